//! The explicit degree-4 obstruction attached to an action together with a
//! 2-cocycle of invertible objects: a ten-factor scalar formula in the
//! pointed case, evaluated exactly in Q/Z, with an exact vanishing test.

use crate::action::ActionData;
use crate::cohomology::{coboundary, is_cocycle, Cochain, GModule, TupleSpace};
use crate::group::{FinAbGroup, GroupElement};
use crate::linalg::{self, IntMat};
use crate::qz::{lcm, QZ};
use crate::{Budget, Error, Result};

/// A Q/Z-valued cochain over tuples of non-identity actor elements with the
/// trivial action (the coefficient picture for divisible scalars).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QzCochain {
    pub actor: FinAbGroup,
    pub degree: usize,
    pub values: Vec<QZ>,
}

impl QzCochain {
    pub fn zero(actor: &FinAbGroup, degree: usize) -> Self {
        let ts = TupleSpace::new(actor.order() as usize, degree);
        QzCochain {
            actor: actor.clone(),
            degree,
            values: vec![QZ::ZERO; ts.count],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn value(&self, tuple: &[GroupElement]) -> QZ {
        let ts = TupleSpace::new(self.actor.order() as usize, self.degree);
        let mut ranks = Vec::with_capacity(self.degree);
        for g in tuple {
            let r = self.actor.index_of(g);
            if r == 0 {
                return QZ::ZERO;
            }
            ranks.push(r);
        }
        self.values[ts.index(&ranks)]
    }

    /// Common denominator of all values (at least 1).
    pub fn denominator(&self) -> u64 {
        self.values.iter().fold(1, |d, v| lcm(d, v.denom()))
    }

    /// Trivial-action bar differential.
    pub fn coboundary(&self) -> QzCochain {
        let q = self.actor.order() as usize;
        let out_ts = TupleSpace::new(q, self.degree + 1);
        let elems = self.actor.elements();
        let mut out = QzCochain::zero(&self.actor, self.degree + 1);
        for t in 0..out_ts.count {
            let ranks = out_ts.ranks_at(t);
            let tuple: Vec<GroupElement> = ranks.iter().map(|&r| elems[r].clone()).collect();
            let mut acc = self.value(&tuple[1..]);
            for i in 1..=self.degree {
                let mut contracted: Vec<GroupElement> = Vec::with_capacity(self.degree);
                contracted.extend_from_slice(&tuple[..i - 1]);
                contracted.push(self.actor.add(&tuple[i - 1], &tuple[i]));
                contracted.extend_from_slice(&tuple[i + 1..]);
                let v = self.value(&contracted);
                if i % 2 == 1 {
                    acc = acc.sub(&v);
                } else {
                    acc = acc.add(&v);
                }
            }
            let last = self.value(&tuple[..self.degree]);
            if (self.degree + 1) % 2 == 1 {
                acc = acc.sub(&last);
            } else {
                acc = acc.add(&last);
            }
            out.values[t] = acc;
        }
        out
    }

    /// View as a cochain with values in the cyclic module `(1/n)Z/Z`.
    pub fn as_cochain(&self, n: u64) -> Result<Cochain> {
        let module = FinAbGroup::cyclic(n);
        let mut c = Cochain::zero(&self.actor, &module, self.degree);
        for (i, v) in self.values.iter().enumerate() {
            let num = v.with_denominator(n).ok_or_else(|| {
                Error::InvalidInput(format!("value {v} does not lie in (1/{n})Z/Z"))
            })?;
            c.values[i] = module.element(&[num as i64])?;
        }
        Ok(c)
    }
}

/// Input for the degree-4 obstruction: a full action together with a
/// 2-cocycle `mu2` valued in the invertible objects (the grading group),
/// cocyclic for the rho-twisted action.
pub struct O4Input {
    pub action: ActionData,
    pub mu2: Cochain,
}

impl O4Input {
    pub fn new(action: ActionData, mu2: Cochain) -> Result<Self> {
        if mu2.degree != 2 {
            return Err(Error::InvalidInput("mu2 must have degree 2".into()));
        }
        if mu2.actor != action.actor || mu2.module != *action.target.group() {
            return Err(Error::InvalidInput(
                "mu2 must be valued in the target's invertible objects over the same actor".into(),
            ));
        }
        if !is_cocycle(action.rho(), &mu2) {
            return Err(Error::InvalidInput(
                "mu2 is not a 2-cocycle for the rho-twisted action".into(),
            ));
        }
        Ok(O4Input { action, mu2 })
    }
}

/// Scalar moves assembling the associator of the twisted graded product.
///
/// An object of grade g with invertible label x composes as
/// `(x, g) (y, h) = (x + g y + mu2(g, h), gh)`; the associator between the
/// two bracketings of a triple product is realized by an explicit composite
/// of structure scalars of the underlying category and the action: six
/// associator evaluations, one braiding factor (moving `mu2(g, h)` past the
/// translated third object), one `gamma` factor and two `mu` factors. The
/// degree-4 obstruction is the pentagon defect of this associator.
struct GradedAssoc<'a> {
    input: &'a O4Input,
}

impl<'a> GradedAssoc<'a> {
    fn m(&self, g: &GroupElement, h: &GroupElement) -> GroupElement {
        self.input.mu2.value(&[g.clone(), h.clone()])
    }

    fn star(&self, g: &GroupElement, x: &GroupElement) -> GroupElement {
        let act = &self.input.action;
        act.rho().act(act.actor.index_of(g), x)
    }

    /// Associator scalar at ((x, g), (y, h), (z, k)).
    fn assoc(
        &self,
        x: &GroupElement,
        g: &GroupElement,
        y: &GroupElement,
        h: &GroupElement,
        z: &GroupElement,
        k: &GroupElement,
    ) -> QZ {
        let act = &self.input.action;
        let grp = act.target.group();
        let data = &act.target.data;
        let gy = self.star(g, y);
        let gh = act.actor.add(g, h);
        let m_gh = self.m(g, h);
        let ghz = self.star(&gh, z);
        let m_ghk = self.m(&gh, k);
        let hz = self.star(h, z);
        let g_hz = self.star(g, &hz);
        let m_hk = self.m(h, k);
        let gm_hk = self.star(g, &m_hk);
        let hk = act.actor.add(h, k);
        let m_g_hk = self.m(g, &hk);
        let x_gy = grp.add(x, &gy);
        let x_gy_ghz = grp.add(&x_gy, &ghz);
        let y_hz = grp.add(y, &hz);
        let g_y_hz = self.star(g, &y_hz);

        // from  ((((x . gy) . m_gh) . ghz) . m_ghk)
        // to    ((x . g(y + hz + m_hk)) . m_g(hk))
        let mut s = QZ::ZERO;
        // expose (m_gh . ghz), swap, close up
        s = s.add(&data.omega(&x_gy, &m_gh, &ghz));
        s = s.add(&data.braiding(&m_gh, &ghz));
        s = s.sub(&data.omega(&x_gy, &ghz, &m_gh));
        // join the two twist labels, re-expand by the mu2 cocycle identity
        s = s.add(&data.omega(&x_gy_ghz, &m_gh, &m_ghk));
        s = s.sub(&data.omega(&x_gy_ghz, &gm_hk, &m_g_hk));
        // (gh) z -> g(h z)
        s = s.add(&act.gamma_of(g, h, z));
        // fold gy and g(hz), then the image of m_hk, into one g(-) block
        s = s.add(&data.omega(x, &gy, &g_hz));
        s = s.add(&act.mu_of(g, y, &hz));
        s = s.add(&data.omega(x, &g_y_hz, &gm_hk));
        s = s.add(&act.mu_of(g, &y_hz, &m_hk));
        s
    }
}

/// Evaluate the obstruction: the pentagon defect of the graded associator,
/// as a Q/Z-valued 4-cochain. The result is asserted to be a 4-cocycle.
pub fn o4(input: &O4Input) -> Result<QzCochain> {
    let act = &input.action;
    let assoc = GradedAssoc { input };
    let g_elems = act.actor.elements();
    let q = act.actor.order() as usize;
    let zero = act.target.group().zero();
    let ts = TupleSpace::new(q, 4);
    let mut out = QzCochain::zero(&act.actor, 4);
    for t in 0..ts.count {
        let ranks = ts.ranks_at(t);
        let (g1, g2, g3, g4) = (
            &g_elems[ranks[0]],
            &g_elems[ranks[1]],
            &g_elems[ranks[2]],
            &g_elems[ranks[3]],
        );
        let g12 = act.actor.add(g1, g2);
        let g23 = act.actor.add(g2, g3);
        let g34 = act.actor.add(g3, g4);
        let m12 = assoc.m(g1, g2);
        let m23 = assoc.m(g2, g3);
        let m34 = assoc.m(g3, g4);
        // pentagon: alpha(P,Q,R) + alpha(P, QR, S) + alpha(Q,R,S)
        //           - alpha(PQ, R, S) - alpha(P, Q, RS)
        let mut d = assoc.assoc(&zero, g1, &zero, g2, &zero, g3);
        d = d.add(&assoc.assoc(&zero, g1, &m23, &g23, &zero, g4));
        d = d.add(&assoc.assoc(&zero, g2, &zero, g3, &zero, g4));
        d = d.sub(&assoc.assoc(&m12, &g12, &zero, g3, &zero, g4));
        d = d.sub(&assoc.assoc(&zero, g1, &zero, g2, &m34, &g34));
        out.values[t] = d;
    }
    if !out.coboundary().is_zero() {
        return Err(Error::InvalidInput(
            "internal: the obstruction failed its 4-cocycle check".into(),
        ));
    }
    Ok(out)
}

/// Vanishing verdict with an explicit witness (or the nonzero class data).
pub struct O4Verdict {
    pub vanishes: bool,
    /// 3-cochain `x` with `d(x)` equal to the obstruction, when it vanishes.
    pub witness: Option<QzCochain>,
    pub obstruction: QzCochain,
}

/// Decide vanishing in H^4(G, Q/Z) by an exact linear solve: a class with
/// values in (1/L)Z/Z (L a multiple of |G|) dies in the divisible coefficients
/// exactly when it is a coboundary of a cochain with values in (1/L^2)Z/Z.
pub fn o4_vanishes(input: &O4Input, budget: &Budget) -> Result<O4Verdict> {
    let obstruction = o4(input)?;
    let actor = obstruction.actor.clone();
    let l = lcm(obstruction.denominator(), actor.order().max(1));
    let modulus = l * l;
    let q = actor.order() as usize;
    let in_ts = TupleSpace::new(q, 3);
    let out_ts = TupleSpace::new(q, 4);
    budget.check(in_ts.count as u128 * out_ts.count as u128)?;
    // d: C^3 -> C^4 over (1/modulus)Z/Z, trivial action
    let module = FinAbGroup::cyclic(modulus);
    let gm = GModule::trivial(actor.clone(), module.clone());
    let mut mat = IntMat::zeros(out_ts.count, in_ts.count);
    for j in 0..in_ts.count {
        let mut basis = Cochain::zero(&actor, &module, 3);
        basis.values[j] = module.element(&[1])?;
        let img = coboundary(&gm, &basis);
        for (i, v) in img.values.iter().enumerate() {
            if module.rank() > 0 {
                mat.set(i, j, v.coords[0] as i128);
            }
        }
    }
    let rhs: Vec<i128> = obstruction
        .values
        .iter()
        .map(|v| v.with_denominator(modulus).expect("modulus chosen to fit") as i128)
        .collect();
    let row_moduli = vec![modulus; out_ts.count];
    let col_moduli = vec![modulus; in_ts.count];
    match linalg::solve_mod(&mat, &rhs, &row_moduli, &col_moduli) {
        Some(x) => {
            let mut witness = QzCochain::zero(&actor, 3);
            for (i, v) in x.iter().enumerate() {
                witness.values[i] = QZ::new(
                    v.rem_euclid(modulus as i128) as i64,
                    modulus as i64,
                )?;
            }
            debug_assert_eq!(witness.coboundary(), obstruction);
            Ok(O4Verdict {
                vanishes: true,
                witness: Some(witness),
                obstruction,
            })
        }
        None => Ok(O4Verdict {
            vanishes: false,
            witness: None,
            obstruction,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::{catalog_action, ActionData};
    use crate::cohomology::cohomology;
    use crate::pointed::{build_rank4, Rank4Family};

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn zero_mu2_gives_zero_obstruction() {
        let cat = build_rank4(Rank4Family::Klein, QZ::ZERO).unwrap();
        let act = catalog_action(&cat).unwrap();
        let mu2 = Cochain::zero(&act.actor, cat.group(), 2);
        let input = O4Input::new(act, mu2).unwrap();
        let o = o4(&input).unwrap();
        assert!(o.is_zero());
        let verdict = o4_vanishes(&input, &b()).unwrap();
        assert!(verdict.vanishes);
        assert!(verdict.witness.unwrap().is_zero());
    }

    #[test]
    fn cyclic_actor_obstruction_always_vanishes() {
        // nontrivial mu2 classes over Z/2 with the trivial and swap actions
        let cat = build_rank4(Rank4Family::Klein, QZ::new(1, 2).unwrap()).unwrap();
        for act in [
            ActionData::trivial(crate::group::FinAbGroup::cyclic(2), cat.clone()).unwrap(),
            catalog_action(&cat).unwrap(),
        ] {
            let h2 = cohomology(act.rho(), 2, &b()).unwrap();
            for class in h2.all_classes() {
                let mu2 = h2.rep_of(&class);
                let input = O4Input::new(act.clone(), mu2).unwrap();
                let verdict = o4_vanishes(&input, &b()).unwrap();
                assert!(verdict.vanishes, "class {class:?}");
                let w = verdict.witness.unwrap();
                assert_eq!(w.coboundary(), verdict.obstruction);
            }
        }
    }

    #[test]
    fn rejects_non_cocycle_mu2() {
        let cat = build_rank4(Rank4Family::Klein, QZ::ZERO).unwrap();
        let act = catalog_action(&cat).unwrap();
        let grp = cat.group().clone();
        let mut mu2 = Cochain::zero(&act.actor, &grp, 2);
        let u = act.actor.element(&[1]).unwrap();
        // mu2(u,u) = v is not a swap-twisted cocycle: d(mu2)(u,u,u) = u.v - v = f
        mu2.set(&[u.clone(), u.clone()], grp.element(&[1, 0]).unwrap())
            .unwrap();
        assert!(O4Input::new(act, mu2).is_err());
    }
}
