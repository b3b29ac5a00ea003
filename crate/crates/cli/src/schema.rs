//! JSON schemas for groups, super-groups, cochain tables, actions and
//! catalog references, with the `"g|h|a"` tuple-key convention (elements as
//! coordinate arrays).

use fermext_core::cohomology::{Cochain, SuperGroup};
use fermext_core::group::{FinAbGroup, GroupElement};
use fermext_core::pointed::{catalog_entry, AbelianThreeCocycle, MextElement, PointedSpinCategory};
use fermext_core::{action::ActionData, Error, QZ};
use serde::Deserialize;
use std::collections::BTreeMap;

pub fn parse_err(file: &str, key: &str, message: impl ToString) -> Error {
    Error::Parse {
        file: file.to_string(),
        key: key.to_string(),
        message: message.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum GroupSpec {
    Cyclic { cyclic: u64 },
    Factors { invariant_factors: Vec<u64> },
}

impl GroupSpec {
    pub fn build(&self, file: &str) -> Result<FinAbGroup, Error> {
        match self {
            GroupSpec::Cyclic { cyclic } => Ok(FinAbGroup::cyclic(*cyclic)),
            GroupSpec::Factors { invariant_factors } => FinAbGroup::new(invariant_factors.clone())
                .map_err(|e| parse_err(file, "invariant_factors", e)),
        }
    }
}

pub fn parse_group(text: &str, file: &str) -> Result<FinAbGroup, Error> {
    let spec: GroupSpec =
        serde_json::from_str(text).map_err(|e| parse_err(file, "group", e))?;
    spec.build(file)
}

fn parse_element(group: &FinAbGroup, text: &str, file: &str, key: &str) -> Result<GroupElement, Error> {
    let coords: Vec<i64> =
        serde_json::from_str(text).map_err(|e| parse_err(file, key, e))?;
    group.element(&coords).map_err(|e| parse_err(file, key, e))
}

/// Parse a `"g|h|a"` tuple key into elements of the given groups.
fn parse_tuple_key(
    groups: &[&FinAbGroup],
    key: &str,
    file: &str,
) -> Result<Vec<GroupElement>, Error> {
    let parts: Vec<&str> = key.split('|').collect();
    if parts.len() != groups.len() {
        return Err(parse_err(
            file,
            key,
            format!("expected {} components", groups.len()),
        ));
    }
    parts
        .iter()
        .zip(groups)
        .map(|(p, g)| parse_element(g, p, file, key))
        .collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum SuperGroupSpec {
    Pair {
        group: GroupSpec,
        #[serde(default)]
        alpha: BTreeMap<String, QZ>,
    },
    Central {
        tilde_group: GroupSpec,
        z: Vec<i64>,
    },
}

pub fn parse_supergroup(text: &str, file: &str) -> Result<SuperGroup, Error> {
    let spec: SuperGroupSpec =
        serde_json::from_str(text).map_err(|e| parse_err(file, "supergroup", e))?;
    match spec {
        SuperGroupSpec::Central { tilde_group, z } => {
            let tilde = tilde_group.build(file)?;
            let z = tilde.element(&z).map_err(|e| parse_err(file, "z", e))?;
            SuperGroup::from_central(&tilde, &z)
        }
        SuperGroupSpec::Pair { group, alpha } => {
            let g = group.build(file)?;
            let z2 = FinAbGroup::cyclic(2);
            let mut cochain = Cochain::zero(&g, &z2, 2);
            for (key, value) in &alpha {
                let tuple = parse_tuple_key(&[&g, &g], key, file)?;
                let bit = value
                    .as_z2()
                    .ok_or_else(|| parse_err(file, key, "alpha values must be 0 or 1/2"))?;
                cochain
                    .set(&tuple, z2.element(&[bit as i64]).unwrap())
                    .map_err(|e| parse_err(file, key, e))?;
            }
            SuperGroup::new(g, cochain)
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
pub enum CategorySpec {
    Catalog(String),
    Explicit {
        group: GroupSpec,
        omega: BTreeMap<String, QZ>,
        c: BTreeMap<String, QZ>,
        fermion: Vec<i64>,
    },
}

impl CategorySpec {
    pub fn build(&self, file: &str) -> Result<PointedSpinCategory, Error> {
        match self {
            CategorySpec::Catalog(name) => match catalog_entry(name) {
                Some(MextElement::Pointed(cat)) => Ok(cat),
                Some(MextElement::Ising(_)) => Err(parse_err(
                    file,
                    "category",
                    "Ising entries carry no pointed table data",
                )),
                None => Err(parse_err(file, "category", format!("unknown catalog name {name:?}"))),
            },
            CategorySpec::Explicit {
                group,
                omega,
                c,
                fermion,
            } => {
                let a = group.build(file)?;
                let mut data = AbelianThreeCocycle::zero(a.clone());
                for (key, value) in omega {
                    let t = parse_tuple_key(&[&a, &a, &a], key, file)?;
                    data.set_omega(&t[0], &t[1], &t[2], *value);
                }
                for (key, value) in c {
                    let t = parse_tuple_key(&[&a, &a], key, file)?;
                    data.set_braiding(&t[0], &t[1], *value);
                }
                let f = a.element(fermion).map_err(|e| parse_err(file, "fermion", e))?;
                PointedSpinCategory::new(data, f, None)
            }
        }
    }
}

#[derive(Deserialize)]
pub struct ActionSpec {
    pub group: GroupSpec,
    pub category: CategorySpec,
    /// Images of the target group's generators under each actor generator.
    pub rho: Vec<Vec<Vec<i64>>>,
    #[serde(default)]
    pub mu: BTreeMap<String, QZ>,
    #[serde(default)]
    pub gamma: BTreeMap<String, QZ>,
}

pub fn parse_action(text: &str, file: &str) -> Result<ActionData, Error> {
    let spec: ActionSpec =
        serde_json::from_str(text).map_err(|e| parse_err(file, "action", e))?;
    let actor = spec.group.build(file)?;
    let target = spec.category.build(file)?;
    let a = target.group().clone();
    let gen_images = spec
        .rho
        .iter()
        .map(|imgs| {
            imgs.iter()
                .map(|coords| a.element(coords).map_err(|e| parse_err(file, "rho", e)))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let q = actor.order() as usize;
    let n = a.order() as usize;
    let mut mu = vec![QZ::ZERO; q * n * n];
    for (key, value) in &spec.mu {
        let t = parse_tuple_key(&[&actor, &a, &a], key, file)?;
        let idx = (actor.index_of(&t[0]) * n + a.index_of(&t[1])) * n + a.index_of(&t[2]);
        mu[idx] = *value;
    }
    let mut gamma = vec![QZ::ZERO; q * q * n];
    for (key, value) in &spec.gamma {
        let t = parse_tuple_key(&[&actor, &actor, &a], key, file)?;
        let idx = (actor.index_of(&t[0]) * q + actor.index_of(&t[1])) * n + a.index_of(&t[2]);
        gamma[idx] = *value;
    }
    ActionData::new(actor, target, gen_images, mu, gamma)
}

/// A 2-cochain valued in the target's invertible objects.
pub fn parse_mu2(
    text: &str,
    file: &str,
    actor: &FinAbGroup,
    module: &FinAbGroup,
) -> Result<Cochain, Error> {
    let table: BTreeMap<String, Vec<i64>> =
        serde_json::from_str(text).map_err(|e| parse_err(file, "mu2", e))?;
    let mut out = Cochain::zero(actor, module, 2);
    for (key, coords) in &table {
        let t = parse_tuple_key(&[actor, actor], key, file)?;
        let v = module.element(coords).map_err(|e| parse_err(file, key, e))?;
        out.set(&t, v).map_err(|e| parse_err(file, key, e))?;
    }
    Ok(out)
}

pub fn group_name(g: &FinAbGroup) -> String {
    if g.is_trivial() {
        "0".to_string()
    } else {
        g.invariant_factors()
            .iter()
            .map(|n| format!("Z/{n}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

/// Serialize a module-valued cochain as `{"g|h": [coords], ...}` over its
/// nonzero entries.
pub fn cochain_to_json(c: &Cochain) -> serde_json::Value {
    let ts = c.tuple_space();
    let elems = c.actor.elements();
    let mut map = serde_json::Map::new();
    for (t, v) in c.values.iter().enumerate() {
        if *v == c.module.zero() {
            continue;
        }
        let ranks = ts.ranks_at(t);
        let key = ranks
            .iter()
            .map(|&r| serde_json::to_string(&elems[r].coords).unwrap())
            .collect::<Vec<_>>()
            .join("|");
        map.insert(key, serde_json::json!(v.coords));
    }
    serde_json::Value::Object(map)
}

/// Serialize a Q/Z-valued cochain as `{"g|h|k": "p/q", ...}` over its
/// nonzero entries.
pub fn qz_cochain_to_json(c: &fermext_core::o4::QzCochain) -> serde_json::Value {
    let ts = fermext_core::cohomology::TupleSpace::new(c.actor.order() as usize, c.degree);
    let elems = c.actor.elements();
    let mut map = serde_json::Map::new();
    for (t, v) in c.values.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let ranks = ts.ranks_at(t);
        let key = ranks
            .iter()
            .map(|&r| serde_json::to_string(&elems[r].coords).unwrap())
            .collect::<Vec<_>>()
            .join("|");
        map.insert(key, serde_json::Value::String(v.to_string()));
    }
    serde_json::Value::Object(map)
}
