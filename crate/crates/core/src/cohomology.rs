//! Normalized bar-resolution cohomology of a finite group acting on a finite
//! abelian module. Cocycles, coboundaries and H^n are computed exactly via
//! integer Smith normal form over the module's invariant factors; large
//! order-only queries go through sparse p-adic sifting instead.

use crate::group::{CentralQuotient, FinAbGroup, GroupElement, GroupHom, Subgroup};
use crate::linalg::{self, IntMat, QuotientData, SparseVec};
use crate::{Budget, Error, Result};
use std::collections::BTreeMap;

/// A finite abelian group `module` acted on by a finite abelian `actor`.
/// Action matrices for every actor element are cached at construction and
/// the generator relations (orders, commutativity, bijectivity) are checked
/// exhaustively.
#[derive(Clone, Debug)]
pub struct GModule {
    pub actor: FinAbGroup,
    pub module: FinAbGroup,
    elem_action: Vec<GroupHom>, // indexed by actor element rank
}

impl GModule {
    pub fn trivial(actor: FinAbGroup, module: FinAbGroup) -> Self {
        let id = GroupHom::identity(module.clone());
        let n = actor.order() as usize;
        GModule {
            actor,
            module,
            elem_action: vec![id; n],
        }
    }

    /// `gen_images[i]` is the automorphism by which the i-th actor generator
    /// acts, given as images of the module's generators.
    pub fn new(
        actor: FinAbGroup,
        module: FinAbGroup,
        gen_images: Vec<Vec<GroupElement>>,
    ) -> Result<Self> {
        if gen_images.len() != actor.rank() {
            return Err(Error::ElementRank {
                got: gen_images.len(),
                expected: actor.rank(),
            });
        }
        let gen_homs: Vec<GroupHom> = gen_images
            .into_iter()
            .map(|imgs| GroupHom::new(module.clone(), module.clone(), imgs))
            .collect::<Result<_>>()?;
        for (i, h) in gen_homs.iter().enumerate() {
            if !h.is_automorphism() {
                return Err(Error::InvalidInput(format!(
                    "actor generator {i} does not act bijectively"
                )));
            }
        }
        // relations of the abelian presentation: orders and commutativity
        let id = GroupHom::identity(module.clone());
        for (i, h) in gen_homs.iter().enumerate() {
            let mut pow = id.clone();
            for _ in 0..actor.invariant_factors()[i] {
                pow = h.compose(&pow)?;
            }
            if pow != id {
                return Err(Error::InvalidInput(format!(
                    "generator {i} action does not satisfy its order relation"
                )));
            }
        }
        for i in 0..gen_homs.len() {
            for j in i + 1..gen_homs.len() {
                if gen_homs[i].compose(&gen_homs[j])? != gen_homs[j].compose(&gen_homs[i])? {
                    return Err(Error::InvalidInput(format!(
                        "generator actions {i} and {j} do not commute"
                    )));
                }
            }
        }
        let mut elem_action = Vec::with_capacity(actor.order() as usize);
        for g in actor.elements() {
            let mut t = id.clone();
            for (c, h) in g.coords.iter().zip(&gen_homs) {
                for _ in 0..*c {
                    t = h.compose(&t)?;
                }
            }
            elem_action.push(t);
        }
        Ok(GModule {
            actor,
            module,
            elem_action,
        })
    }

    pub fn act(&self, g_rank: usize, m: &GroupElement) -> GroupElement {
        self.elem_action[g_rank].apply(m)
    }

    pub fn action_of(&self, g: &GroupElement) -> &GroupHom {
        &self.elem_action[self.actor.index_of(g)]
    }

    pub fn is_trivial_action(&self) -> bool {
        let id = GroupHom::identity(self.module.clone());
        self.elem_action.iter().all(|h| *h == id)
    }

    /// The dual module: characters of `module` with `(g·chi)(a) = chi(g^{-1}a)`.
    pub fn dual(&self) -> Result<GModule> {
        let n = self.module.invariant_factors().to_vec();
        let dual_group = self.module.dual_group();
        let mut gen_images: Vec<Vec<GroupElement>> = Vec::new();
        for gi in 0..self.actor.rank() {
            let mut gen = self.actor.zero();
            gen.coords[gi] = 1;
            let s = self.action_of(&gen).inverse()?;
            // (sigma e_i^)(a) = e_i^(S a) => coords: D[j][i] = (n_j / n_i) S[i][j]
            let mut images = Vec::new();
            for i in 0..n.len() {
                let mut coords = vec![0i64; n.len()];
                for (j, cj) in coords.iter_mut().enumerate() {
                    // S[i][j]: coefficient of e_i in S(e_j)
                    let sij = s.images[j].coords[i] as i128;
                    let v = if n[j] % n[i] == 0 {
                        sij * (n[j] / n[i]) as i128
                    } else {
                        debug_assert_eq!(sij % (n[i] / n[j]) as i128, 0);
                        sij / (n[i] / n[j]) as i128
                    };
                    *cj = (v.rem_euclid(n[j] as i128)) as i64;
                }
                images.push(dual_group.element(&coords)?);
            }
            gen_images.push(images);
        }
        GModule::new(self.actor.clone(), dual_group, gen_images)
    }

    /// Restrict the action to a stable subgroup; errors if not stable.
    pub fn restrict(&self, sub: &Subgroup) -> Result<GModule> {
        let mut gen_images = Vec::new();
        for gi in 0..self.actor.rank() {
            let mut gen = self.actor.zero();
            gen.coords[gi] = 1;
            let act = self.action_of(&gen);
            let mut images = Vec::new();
            for s in &sub.inclusion {
                let t = act.apply(s);
                let c = sub.coords_of(&t).ok_or_else(|| {
                    Error::InvalidSequence("subgroup is not action-stable".into())
                })?;
                images.push(c);
            }
            gen_images.push(images);
        }
        GModule::new(self.actor.clone(), sub.group.clone(), gen_images)
    }
}

/// Indexing of `degree`-tuples of non-identity actor elements, lexicographic.
#[derive(Clone, Debug)]
pub struct TupleSpace {
    pub group_order: usize,
    pub degree: usize,
    pub count: usize,
}

impl TupleSpace {
    pub fn new(group_order: usize, degree: usize) -> Self {
        let count = if degree == 0 {
            1
        } else if group_order <= 1 {
            0
        } else {
            (group_order - 1).pow(degree as u32)
        };
        TupleSpace {
            group_order,
            degree,
            count,
        }
    }

    /// Tuple index from element ranks (each in 1..group_order).
    pub fn index(&self, ranks: &[usize]) -> usize {
        debug_assert_eq!(ranks.len(), self.degree);
        let base = self.group_order - 1;
        ranks.iter().fold(0, |acc, &r| {
            debug_assert!(r >= 1 && r < self.group_order);
            acc * base + (r - 1)
        })
    }

    pub fn ranks_at(&self, mut idx: usize) -> Vec<usize> {
        let base = self.group_order - 1;
        let mut out = vec![0usize; self.degree];
        for i in (0..self.degree).rev() {
            out[i] = idx % base + 1;
            idx /= base;
        }
        out
    }
}

/// A normalized cochain: values on tuples of non-identity actor elements;
/// tuples containing the identity are implicitly zero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Cochain {
    pub actor: FinAbGroup,
    pub module: FinAbGroup,
    pub degree: usize,
    pub values: Vec<GroupElement>,
}

impl Cochain {
    pub fn zero(actor: &FinAbGroup, module: &FinAbGroup, degree: usize) -> Self {
        let ts = TupleSpace::new(actor.order() as usize, degree);
        Cochain {
            actor: actor.clone(),
            module: module.clone(),
            degree,
            values: vec![module.zero(); ts.count],
        }
    }

    pub fn tuple_space(&self) -> TupleSpace {
        TupleSpace::new(self.actor.order() as usize, self.degree)
    }

    /// Value on an arbitrary tuple; tuples containing the identity give 0.
    pub fn value(&self, tuple: &[GroupElement]) -> GroupElement {
        debug_assert_eq!(tuple.len(), self.degree);
        let mut ranks = Vec::with_capacity(self.degree);
        for g in tuple {
            let r = self.actor.index_of(g);
            if r == 0 {
                return self.module.zero();
            }
            ranks.push(r);
        }
        self.values[self.tuple_space().index(&ranks)].clone()
    }

    pub fn set(&mut self, tuple: &[GroupElement], v: GroupElement) -> Result<()> {
        let mut ranks = Vec::with_capacity(self.degree);
        for g in tuple {
            let r = self.actor.index_of(g);
            if r == 0 {
                if v == self.module.zero() {
                    return Ok(());
                }
                return Err(Error::InvalidInput(
                    "normalized cochain cannot take a nonzero value on a tuple containing the identity".into(),
                ));
            }
            ranks.push(r);
        }
        let idx = self.tuple_space().index(&ranks);
        self.values[idx] = v;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        let z = self.module.zero();
        self.values.iter().all(|v| *v == z)
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        debug_assert_eq!(self.degree, other.degree);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.module.add(a, b))
            .collect();
        Cochain {
            actor: self.actor.clone(),
            module: self.module.clone(),
            degree: self.degree,
            values,
        }
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        debug_assert_eq!(self.degree, other.degree);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| self.module.sub(a, b))
            .collect();
        Cochain {
            actor: self.actor.clone(),
            module: self.module.clone(),
            degree: self.degree,
            values,
        }
    }

    /// Flatten to integer coordinates (tuple-major, module coordinate minor).
    pub fn flatten(&self) -> Vec<i128> {
        let rank = self.module.rank();
        let mut out = Vec::with_capacity(self.values.len() * rank);
        for v in &self.values {
            for &c in &v.coords {
                out.push(c as i128);
            }
        }
        out
    }

    pub fn from_flat(
        actor: &FinAbGroup,
        module: &FinAbGroup,
        degree: usize,
        flat: &[i128],
    ) -> Cochain {
        let rank = module.rank();
        let ts = TupleSpace::new(actor.order() as usize, degree);
        assert_eq!(flat.len(), ts.count * rank);
        let mut values = Vec::with_capacity(ts.count);
        for t in 0..ts.count {
            let coords: Vec<i64> = (0..rank)
                .map(|i| (flat[t * rank + i].rem_euclid(module.invariant_factors()[i] as i128)) as i64)
                .collect();
            values.push(module.element(&coords).unwrap());
        }
        Cochain {
            actor: actor.clone(),
            module: module.clone(),
            degree,
            values,
        }
    }

    /// Apply a coefficient homomorphism pointwise.
    pub fn map_coefficients(&self, f: &GroupHom) -> Cochain {
        debug_assert_eq!(f.source, self.module);
        Cochain {
            actor: self.actor.clone(),
            module: f.target.clone(),
            degree: self.degree,
            values: self.values.iter().map(|v| f.apply(v)).collect(),
        }
    }
}

fn flat_moduli(module: &FinAbGroup, tuples: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(tuples * module.rank());
    for _ in 0..tuples {
        out.extend_from_slice(module.invariant_factors());
    }
    out
}

/// The normalized bar differential.
pub fn coboundary(gm: &GModule, c: &Cochain) -> Cochain {
    debug_assert_eq!(c.actor, gm.actor);
    debug_assert_eq!(c.module, gm.module);
    let n = c.degree;
    let q = gm.actor.order() as usize;
    let out_ts = TupleSpace::new(q, n + 1);
    let elems = gm.actor.elements();
    let mut out = Cochain::zero(&gm.actor, &gm.module, n + 1);
    for t in 0..out_ts.count {
        let ranks = out_ts.ranks_at(t);
        let tuple: Vec<GroupElement> = ranks.iter().map(|&r| elems[r].clone()).collect();
        let mut acc = gm.act(ranks[0], &c.value(&tuple[1..]));
        for i in 1..=n {
            let mut contracted: Vec<GroupElement> = Vec::with_capacity(n);
            contracted.extend_from_slice(&tuple[..i - 1]);
            contracted.push(gm.actor.add(&tuple[i - 1], &tuple[i]));
            contracted.extend_from_slice(&tuple[i + 1..]);
            let v = c.value(&contracted);
            if i % 2 == 1 {
                acc = gm.module.sub(&acc, &v);
            } else {
                acc = gm.module.add(&acc, &v);
            }
        }
        let last = c.value(&tuple[..n]);
        if (n + 1) % 2 == 1 {
            acc = gm.module.sub(&acc, &last);
        } else {
            acc = gm.module.add(&acc, &last);
        }
        out.values[t] = acc;
    }
    out
}

pub fn is_cocycle(gm: &GModule, c: &Cochain) -> bool {
    coboundary(gm, c).is_zero()
}

/// Sparse rows of the degree-`n` differential, one per output coordinate.
fn coboundary_rows(gm: &GModule, n: usize) -> Vec<(SparseVec, u64)> {
    let q = gm.actor.order() as usize;
    let rank = gm.module.rank();
    let in_ts = TupleSpace::new(q, n);
    let out_ts = TupleSpace::new(q, n + 1);
    let elems = gm.actor.elements();
    let moduli = gm.module.invariant_factors();
    let mut rows = Vec::with_capacity(out_ts.count * rank);
    for t in 0..out_ts.count {
        let ranks = out_ts.ranks_at(t);
        let tuple: Vec<GroupElement> = ranks.iter().map(|&r| elems[r].clone()).collect();
        // per output module coordinate i, a map input-flat-index -> coeff
        let mut maps: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); rank];
        // action term: rho(g1) applied to c(g2..g_{n+1})
        {
            let mut ok = true;
            let mut tail_ranks = Vec::with_capacity(n);
            for g in &tuple[1..] {
                let r = gm.actor.index_of(g);
                if r == 0 {
                    ok = false;
                    break;
                }
                tail_ranks.push(r);
            }
            if ok {
                let tail_idx = in_ts.index(&tail_ranks);
                let act = &gm.elem_action[ranks[0]];
                for i in 0..rank {
                    for j in 0..rank {
                        let coef = act.images[j].coords[i] as i64;
                        if coef != 0 {
                            *maps[i].entry(tail_idx * rank + j).or_insert(0) += coef;
                        }
                    }
                }
            }
        }
        // contraction terms
        for i in 1..=n {
            let merged = gm.actor.add(&tuple[i - 1], &tuple[i]);
            let mr = gm.actor.index_of(&merged);
            if mr == 0 {
                continue;
            }
            let mut ranks2 = Vec::with_capacity(n);
            for (k, g) in tuple.iter().enumerate() {
                if k == i - 1 {
                    ranks2.push(mr);
                } else if k == i {
                    continue;
                } else {
                    ranks2.push(gm.actor.index_of(g));
                }
            }
            let idx = in_ts.index(&ranks2);
            let sign = if i % 2 == 1 { -1 } else { 1 };
            for (ci, m) in maps.iter_mut().enumerate() {
                *m.entry(idx * rank + ci).or_insert(0) += sign;
            }
        }
        // head term
        {
            let mut head_ranks = Vec::with_capacity(n);
            let mut ok = true;
            for g in &tuple[..n] {
                let r = gm.actor.index_of(g);
                if r == 0 {
                    ok = false;
                    break;
                }
                head_ranks.push(r);
            }
            if ok {
                let idx = in_ts.index(&head_ranks);
                let sign = if (n + 1) % 2 == 1 { -1 } else { 1 };
                for (ci, m) in maps.iter_mut().enumerate() {
                    *m.entry(idx * rank + ci).or_insert(0) += sign;
                }
            }
        }
        for (i, m) in maps.into_iter().enumerate() {
            let row: SparseVec = m.into_iter().filter(|&(_, v)| v != 0).collect();
            rows.push((row, moduli[i]));
        }
    }
    rows
}

/// Sparse columns of the degree-`n` differential over output coordinates.
fn coboundary_columns(gm: &GModule, n: usize) -> Vec<SparseVec> {
    let rows = coboundary_rows(gm, n);
    let q = gm.actor.order() as usize;
    let rank = gm.module.rank();
    let in_count = TupleSpace::new(q, n).count * rank;
    let mut cols: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); in_count];
    for (r, (row, _)) in rows.iter().enumerate() {
        for &(j, coef) in row {
            *cols[j].entry(r).or_insert(0) += coef;
        }
    }
    cols.into_iter()
        .map(|m| m.into_iter().filter(|&(_, v)| v != 0).collect())
        .collect()
}

fn check_budget(gm: &GModule, degree: usize, budget: &Budget) -> Result<()> {
    let q = gm.actor.order().saturating_sub(1) as u128;
    let rank = gm.module.rank().max(1) as u128;
    budget.check(q.pow(degree as u32 + 1) * rank)
}

/// Computed H^n: invariant factors, representative cocycles, and exact
/// class coordinates for arbitrary cocycles.
pub struct CohomologyGroup {
    pub gmodule: GModule,
    pub degree: usize,
    pub invariant_factors: Vec<u64>,
    pub representatives: Vec<Cochain>,
    quotient: QuotientData,
}

impl CohomologyGroup {
    pub fn order(&self) -> u128 {
        self.quotient.order()
    }

    /// Class coordinates of a cocycle; errors if the input is not a cocycle.
    pub fn class_of(&self, c: &Cochain) -> Result<Vec<u64>> {
        self.quotient
            .class_of(&c.flatten())
            .ok_or_else(|| Error::InvalidInput("not a cocycle".into()))
    }

    pub fn is_coboundary(&self, c: &Cochain) -> Result<bool> {
        Ok(self.class_of(c)?.iter().all(|&v| v == 0))
    }

    pub fn rep_of(&self, coords: &[u64]) -> Cochain {
        let flat = self.quotient.rep_of(coords);
        Cochain::from_flat(&self.gmodule.actor, &self.gmodule.module, self.degree, &flat)
    }

    pub fn all_classes(&self) -> Vec<Vec<u64>> {
        self.quotient.all_classes()
    }
}

/// Full engine: H^n as invariant factors plus representatives, via Smith
/// normal form of the two coboundary matrices over the module's moduli.
pub fn cohomology(gm: &GModule, degree: usize, budget: &Budget) -> Result<CohomologyGroup> {
    check_budget(gm, degree, budget)?;
    let q = gm.actor.order() as usize;
    let rank = gm.module.rank();
    let ts = TupleSpace::new(q, degree);
    let dim = ts.count * rank;
    let col_moduli = flat_moduli(&gm.module, ts.count);
    // budget the kernel transform as well (dense dim x dim basis)
    budget.check((dim as u128) * (dim as u128))?;

    let kb = linalg::streaming_kernel(coboundary_rows(gm, degree), dim, &col_moduli);
    let mut sub_gens: Vec<Vec<i128>> = Vec::new();
    if degree > 0 {
        let prev_ts = TupleSpace::new(q, degree - 1);
        for t in 0..prev_ts.count {
            for j in 0..rank {
                let mut basis = Cochain::zero(&gm.actor, &gm.module, degree - 1);
                let mut coords = vec![0i64; rank];
                coords[j] = 1;
                basis.values[t] = gm.module.element(&coords)?;
                sub_gens.push(coboundary(gm, &basis).flatten());
            }
        }
    }
    let quotient = QuotientData::new(kb.basis, &sub_gens, &col_moduli)?;
    let invariant_factors = quotient.factors.clone();
    let representatives: Vec<Cochain> = quotient
        .generators
        .iter()
        .map(|g| Cochain::from_flat(&gm.actor, &gm.module, degree, g))
        .collect();
    for rep in &representatives {
        if !is_cocycle(gm, rep) {
            return Err(Error::InvalidInput(
                "internal: representative is not a cocycle".into(),
            ));
        }
    }
    Ok(CohomologyGroup {
        gmodule: gm.clone(),
        degree,
        invariant_factors,
        representatives,
        quotient,
    })
}

/// Order-only engine via sparse image sifting: |H^n| = |Z^n| / |B^n|, with
/// all sizes tracked as per-prime exponents (the ambients are astronomical).
pub fn cohomology_order(gm: &GModule, degree: usize, budget: &Budget) -> Result<u128> {
    check_budget(gm, degree, budget)?;
    let q = gm.actor.order() as usize;
    let ts = TupleSpace::new(q, degree);
    let col_moduli = flat_moduli(&gm.module, ts.count);
    let total = linalg::moduli_exponents(&col_moduli);
    let out_ts = TupleSpace::new(q, degree + 1);
    let out_moduli = flat_moduli(&gm.module, out_ts.count);
    let im_dn = linalg::image_order_exponents(&coboundary_columns(gm, degree), &out_moduli);
    let im_prev = if degree == 0 {
        Default::default()
    } else {
        linalg::image_order_exponents(&coboundary_columns(gm, degree - 1), &col_moduli)
    };
    let mut order: u128 = 1;
    for (&p, &e_total) in &total {
        let spent = im_dn.get(&p).copied().unwrap_or(0) + im_prev.get(&p).copied().unwrap_or(0);
        let e = e_total
            .checked_sub(spent)
            .ok_or_else(|| Error::InvalidInput("internal: negative cohomology exponent".into()))?;
        order = order
            .checked_mul((p as u128).pow(u32::try_from(e).map_err(|_| {
                Error::BudgetExceeded {
                    needed: u128::MAX,
                    limit: budget.max_entries,
                }
            })?))
            .ok_or_else(|| Error::InvalidInput("cohomology order exceeds u128".into()))?;
    }
    Ok(order)
}

/// Solve `d(x) = c`; returns the witness cochain of degree `c.degree - 1`.
pub fn coboundary_preimage(gm: &GModule, c: &Cochain, budget: &Budget) -> Result<Option<Cochain>> {
    if c.degree == 0 {
        return Err(Error::InvalidInput("degree-0 cochains have no preimage".into()));
    }
    check_budget(gm, c.degree, budget)?;
    let q = gm.actor.order() as usize;
    let rank = gm.module.rank();
    let in_ts = TupleSpace::new(q, c.degree - 1);
    let in_dim = in_ts.count * rank;
    let rows = coboundary_rows(gm, c.degree - 1);
    let mut mat = IntMat::zeros(rows.len(), in_dim);
    let mut row_moduli = Vec::with_capacity(rows.len());
    for (i, (row, w)) in rows.iter().enumerate() {
        for &(j, coef) in row {
            mat.add_to(i, j, coef as i128);
        }
        row_moduli.push(*w);
    }
    let rhs = c.flatten();
    let col_moduli = flat_moduli(&gm.module, in_ts.count);
    match linalg::solve_mod(&mat, &rhs, &row_moduli, &col_moduli) {
        None => Ok(None),
        Some(x) => Ok(Some(Cochain::from_flat(
            &gm.actor,
            &gm.module,
            c.degree - 1,
            &x,
        ))),
    }
}

/// A short exact sequence of G-modules `0 -> sub -> mid -> quo -> 0`.
pub struct ShortExactSeq {
    pub sub: GModule,
    pub mid: GModule,
    pub quo: GModule,
    pub incl: GroupHom,
    pub proj: GroupHom,
}

impl ShortExactSeq {
    pub fn new(
        sub: GModule,
        mid: GModule,
        quo: GModule,
        incl: GroupHom,
        proj: GroupHom,
    ) -> Result<Self> {
        if sub.actor != mid.actor || mid.actor != quo.actor {
            return Err(Error::InvalidSequence("actors differ".into()));
        }
        if incl.source != sub.module
            || incl.target != mid.module
            || proj.source != mid.module
            || proj.target != quo.module
        {
            return Err(Error::InvalidSequence("maps do not match the modules".into()));
        }
        // injectivity / surjectivity / exactness, checked exhaustively
        let mut seen = vec![false; mid.module.order() as usize];
        for k in sub.module.elements() {
            let i = mid.module.index_of(&incl.apply(&k));
            if seen[i] {
                return Err(Error::InvalidSequence("inclusion is not injective".into()));
            }
            seen[i] = true;
        }
        if !proj.is_surjective() {
            return Err(Error::InvalidSequence("projection is not surjective".into()));
        }
        for m in mid.module.elements() {
            let in_kernel = proj.apply(&m) == quo.module.zero();
            if in_kernel != seen[mid.module.index_of(&m)] {
                return Err(Error::InvalidSequence(
                    "image of inclusion differs from kernel of projection".into(),
                ));
            }
        }
        // equivariance of both maps
        for g in mid.actor.elements() {
            let gi = mid.actor.index_of(&g);
            for k in sub.module.elements() {
                if incl.apply(&sub.act(gi, &k)) != mid.act(gi, &incl.apply(&k)) {
                    return Err(Error::InvalidSequence("inclusion is not equivariant".into()));
                }
            }
            for m in mid.module.elements() {
                if proj.apply(&mid.act(gi, &m)) != quo.act(gi, &proj.apply(&m)) {
                    return Err(Error::InvalidSequence("projection is not equivariant".into()));
                }
            }
        }
        Ok(ShortExactSeq {
            sub,
            mid,
            quo,
            incl,
            proj,
        })
    }

    /// Lexicographically minimal (or maximal) set-theoretic section.
    fn section(&self, maximal: bool) -> Vec<GroupElement> {
        let mut table: Vec<Option<GroupElement>> = vec![None; self.quo.module.order() as usize];
        for m in self.mid.module.elements() {
            let qi = self.quo.module.index_of(&self.proj.apply(&m));
            match &table[qi] {
                Some(prev) => {
                    let better = if maximal {
                        m.coords > prev.coords
                    } else {
                        m.coords < prev.coords
                    };
                    if better {
                        table[qi] = Some(m);
                    }
                }
                None => table[qi] = Some(m),
            }
        }
        table.into_iter().map(|o| o.unwrap()).collect()
    }
}

/// Connecting homomorphism: lift a cocycle through a set-theoretic section,
/// take the coboundary, and corestrict to the subcoefficients. The class is
/// verified to be independent of the section choice.
pub fn connecting_hom(ses: &ShortExactSeq, class: &Cochain, budget: &Budget) -> Result<Cochain> {
    if !is_cocycle(&ses.quo, class) {
        return Err(Error::InvalidInput("input is not a cocycle".into()));
    }
    let lift_with = |section: &[GroupElement]| -> Result<Cochain> {
        let mut lifted = Cochain::zero(&ses.mid.actor, &ses.mid.module, class.degree);
        for (t, v) in class.values.iter().enumerate() {
            lifted.values[t] = section[ses.quo.module.index_of(v)].clone();
        }
        let d = coboundary(&ses.mid, &lifted);
        // corestrict: every value must come from the subcoefficients
        let mut preimage: Vec<Option<GroupElement>> =
            vec![None; ses.mid.module.order() as usize];
        for k in ses.sub.module.elements() {
            let i = ses.mid.module.index_of(&ses.incl.apply(&k));
            preimage[i] = Some(k);
        }
        let mut out = Cochain::zero(&ses.sub.actor, &ses.sub.module, class.degree + 1);
        for (t, v) in d.values.iter().enumerate() {
            out.values[t] = preimage[ses.mid.module.index_of(v)].clone().ok_or_else(|| {
                Error::InvalidSequence("coboundary of lift does not land in the subcoefficients".into())
            })?;
        }
        if !is_cocycle(&ses.sub, &out) {
            return Err(Error::InvalidInput("internal: connecting image is not a cocycle".into()));
        }
        Ok(out)
    };
    let s_min = ses.section(false);
    let result = lift_with(&s_min)?;
    let s_max = ses.section(true);
    if s_max != s_min {
        let other = lift_with(&s_max)?;
        let h = cohomology(&ses.sub, class.degree + 1, budget)?;
        if !h.is_coboundary(&result.sub(&other))? {
            return Err(Error::InvalidInput(
                "internal: connecting class depends on the section".into(),
            ));
        }
    }
    Ok(result)
}

/// Induced map on cohomology from an equivariant coefficient homomorphism.
pub struct InducedMap {
    pub source: CohomologyGroup,
    pub target: CohomologyGroup,
    /// Class coordinates in the target, one row per source generator.
    pub matrix: Vec<Vec<u64>>,
}

pub fn induced_map(
    src: &GModule,
    dst: &GModule,
    f: &GroupHom,
    degree: usize,
    budget: &Budget,
) -> Result<InducedMap> {
    if src.actor != dst.actor {
        return Err(Error::InvalidMap("actors differ".into()));
    }
    if f.source != src.module || f.target != dst.module {
        return Err(Error::InvalidMap("coefficient map does not match the modules".into()));
    }
    for g in src.actor.elements() {
        let gi = src.actor.index_of(&g);
        for m in src.module.elements() {
            if f.apply(&src.act(gi, &m)) != dst.act(gi, &f.apply(&m)) {
                return Err(Error::InvalidMap(format!(
                    "not equivariant at g = {:?}, m = {:?}",
                    g, m
                )));
            }
        }
    }
    let source = cohomology(src, degree, budget)?;
    let target = cohomology(dst, degree, budget)?;
    let matrix = source
        .representatives
        .iter()
        .map(|rep| target.class_of(&rep.map_coefficients(f)))
        .collect::<Result<Vec<_>>>()?;
    Ok(InducedMap {
        source,
        target,
        matrix,
    })
}

impl InducedMap {
    pub fn apply(&self, src_coords: &[u64]) -> Vec<u64> {
        let tf = &self.target.invariant_factors;
        let mut out = vec![0u64; tf.len()];
        for (c, row) in src_coords.iter().zip(&self.matrix) {
            for (o, (&m, &fac)) in out.iter_mut().zip(row.iter().zip(tf)) {
                *o = (*o + (*c as u128 * m as u128 % fac as u128) as u64) % fac;
            }
        }
        out
    }

    pub fn kernel_classes(&self) -> Vec<Vec<u64>> {
        self.source
            .all_classes()
            .into_iter()
            .filter(|c| self.apply(c).iter().all(|&v| v == 0))
            .collect()
    }

    pub fn kernel_order(&self) -> u128 {
        self.kernel_classes().len() as u128
    }
}

/// Stabilized divisible-coefficient cohomology: the image of
/// `H^n(G, (1/N)Z/Z) -> H^n(G, (1/N^2)Z/Z)` with `N = |G|` equals
/// `H^n(G, Q/Z)`, so orders and invariant factors computed this way model
/// C^× coefficients faithfully (in particular H^4 of a cyclic group is 0).
pub fn qz_cohomology(actor: &FinAbGroup, degree: usize, budget: &Budget) -> Result<FinAbGroup> {
    let n = actor.order();
    if n == 1 {
        return Ok(FinAbGroup::trivial());
    }
    let small = GModule::trivial(actor.clone(), FinAbGroup::cyclic(n));
    let big = GModule::trivial(actor.clone(), FinAbGroup::cyclic(n * n));
    let incl = GroupHom::new(
        FinAbGroup::cyclic(n),
        FinAbGroup::cyclic(n * n),
        vec![FinAbGroup::cyclic(n * n).element(&[n as i64])?],
    )?;
    let map = induced_map(&small, &big, &incl, degree, budget)?;
    // subgroup of the target generated by the image classes
    let target_group = FinAbGroup::new(map.target.invariant_factors.clone())
        .unwrap_or_else(|_| FinAbGroup::trivial());
    if target_group.is_trivial() {
        return Ok(FinAbGroup::trivial());
    }
    let gens: Vec<GroupElement> = map
        .matrix
        .iter()
        .map(|row| GroupElement { coords: row.clone() })
        .collect();
    let sub = Subgroup::new(&target_group, &gens);
    Ok(sub.group)
}

pub fn qz_cohomology_order(actor: &FinAbGroup, degree: usize, budget: &Budget) -> Result<u128> {
    Ok(qz_cohomology(actor, degree, budget)?.order() as u128)
}

/// A super-group presented as the pair `(G, alpha)` with
/// `alpha ∈ Z^2(G, Z/2)` classifying the extension by the central fermionic
/// element.
#[derive(Clone, Debug)]
pub struct SuperGroup {
    pub group: FinAbGroup,
    pub alpha: Cochain,
}

impl SuperGroup {
    pub fn trivial(group: FinAbGroup) -> Self {
        let alpha = Cochain::zero(&group, &FinAbGroup::cyclic(2), 2);
        SuperGroup { group, alpha }
    }

    pub fn new(group: FinAbGroup, alpha: Cochain) -> Result<Self> {
        if alpha.actor != group || alpha.degree != 2 {
            return Err(Error::InvalidInput(
                "alpha must be a degree-2 cochain over the quotient group".into(),
            ));
        }
        if alpha.module.invariant_factors() != [2] {
            return Err(Error::InvalidInput("alpha must take values in Z/2".into()));
        }
        let gm = GModule::trivial(group.clone(), FinAbGroup::cyclic(2));
        if !is_cocycle(&gm, &alpha) {
            return Err(Error::InvalidInput("alpha is not a 2-cocycle".into()));
        }
        Ok(SuperGroup { group, alpha })
    }

    /// Build from a finite abelian group with a chosen central element of
    /// order two: `G = tilde/<z>` and `alpha` is the extension class.
    pub fn from_central(tilde: &FinAbGroup, z: &GroupElement) -> Result<Self> {
        if tilde.order_of(z) != 2 {
            return Err(Error::InvalidParameter(format!(
                "z = {:?} must have order 2, found {}",
                z,
                tilde.order_of(z)
            )));
        }
        let cq = CentralQuotient::new(tilde, z)?;
        let group = cq.quotient.clone();
        let z2 = FinAbGroup::cyclic(2);
        let mut alpha = Cochain::zero(&group, &z2, 2);
        let elems = group.elements();
        for a in &elems {
            for b in &elems {
                let defect = tilde.sub(
                    &tilde.add(&cq.section(a), &cq.section(b)),
                    &cq.section(&group.add(a, b)),
                );
                let bit = if defect == tilde.zero() {
                    0
                } else if defect == *z {
                    1
                } else {
                    return Err(Error::InvalidParameter(
                        "section defect escapes the central subgroup".into(),
                    ));
                };
                alpha.set(&[a.clone(), b.clone()], z2.element(&[bit])?)?;
            }
        }
        SuperGroup::new(group, alpha)
    }

    pub fn z2_module(&self) -> GModule {
        GModule::trivial(self.group.clone(), FinAbGroup::cyclic(2))
    }

    /// Is the extension class trivial in H^2(G, Z/2)?
    pub fn is_trivial_class(&self, budget: &Budget) -> Result<bool> {
        let h2 = cohomology(&self.z2_module(), 2, budget)?;
        h2.is_coboundary(&self.alpha)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    fn trivial_mod(n: u64, m: u64) -> GModule {
        GModule::trivial(FinAbGroup::cyclic(n), FinAbGroup::cyclic(m))
    }

    #[test]
    fn degree_zero_coboundary() {
        // d(m)(g) = g.m - m; trivial action gives 0
        let gm = trivial_mod(3, 9);
        let mut c = Cochain::zero(&gm.actor, &gm.module, 0);
        c.values[0] = gm.module.element(&[4]).unwrap();
        assert!(coboundary(&gm, &c).is_zero());
        // nontrivial action: Z/2 acting on Z/3 by negation
        let gm = GModule::new(
            FinAbGroup::cyclic(2),
            FinAbGroup::cyclic(3),
            vec![vec![FinAbGroup::cyclic(3).element(&[2]).unwrap()]],
        )
        .unwrap();
        let mut c = Cochain::zero(&gm.actor, &gm.module, 0);
        c.values[0] = gm.module.element(&[1]).unwrap();
        let d = coboundary(&gm, &c);
        // (dc)(u) = u.1 - 1 = -2 = 1 mod 3
        assert_eq!(d.values[0], gm.module.element(&[1]).unwrap());
    }

    #[test]
    fn dd_is_zero_randomized() {
        let cases = vec![
            trivial_mod(2, 4),
            trivial_mod(3, 6),
            GModule::new(
                FinAbGroup::cyclic(2),
                FinAbGroup::new(vec![2, 2]).unwrap(),
                vec![vec![
                    FinAbGroup::new(vec![2, 2]).unwrap().element(&[1, 1]).unwrap(),
                    FinAbGroup::new(vec![2, 2]).unwrap().element(&[0, 1]).unwrap(),
                ]],
            )
            .unwrap(),
        ];
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            seed
        };
        for gm in &cases {
            for degree in 0..3usize {
                let ts = TupleSpace::new(gm.actor.order() as usize, degree);
                let mut c = Cochain::zero(&gm.actor, &gm.module, degree);
                for t in 0..ts.count {
                    let coords: Vec<i64> = gm
                        .module
                        .invariant_factors()
                        .iter()
                        .map(|&n| (rnd() % n) as i64)
                        .collect();
                    c.values[t] = gm.module.element(&coords).unwrap();
                }
                assert!(coboundary(gm, &coboundary(gm, &c)).is_zero());
            }
        }
    }

    #[test]
    fn cyclic_cohomology_orders_match_gcd() {
        for n in 2..=5u64 {
            for m in 2..=5u64 {
                let gm = trivial_mod(n, m);
                let g = {
                    let (mut a, mut b) = (n, m);
                    while b != 0 {
                        let t = a % b;
                        a = b;
                        b = t;
                    }
                    a
                };
                for k in 1..=3usize {
                    assert_eq!(
                        cohomology_order(&gm, k, &b()).unwrap(),
                        g as u128,
                        "H^{k}(Z/{n}, Z/{m})"
                    );
                    assert_eq!(
                        cohomology(&gm, k, &b()).unwrap().order(),
                        g as u128,
                        "full H^{k}(Z/{n}, Z/{m})"
                    );
                }
            }
        }
    }

    #[test]
    fn odd_cyclic_on_klein_h2_vanishes() {
        for m in [3u64, 5, 7] {
            let gm = GModule::trivial(FinAbGroup::cyclic(m), FinAbGroup::new(vec![2, 2]).unwrap());
            assert_eq!(cohomology_order(&gm, 2, &b()).unwrap(), 1);
        }
    }

    #[test]
    fn h3_of_cyclic_with_squared_coefficients() {
        for m in 2..=5u64 {
            let gm = trivial_mod(m, m * m);
            let h = cohomology(&gm, 3, &b()).unwrap();
            assert_eq!(h.invariant_factors, vec![m], "H^3(Z/{m}, Z/{})", m * m);
        }
    }

    #[test]
    fn representatives_are_cocycles_and_nontrivial() {
        let gm = trivial_mod(4, 8);
        let h = cohomology(&gm, 2, &b()).unwrap();
        assert_eq!(h.order(), 4);
        for rep in &h.representatives {
            assert!(is_cocycle(&gm, rep));
            assert!(!h.is_coboundary(rep).unwrap());
        }
        // class arithmetic: rep of class c has class c
        for class in h.all_classes() {
            let rep = h.rep_of(&class);
            assert_eq!(h.class_of(&rep).unwrap(), class);
        }
    }

    #[test]
    fn coboundary_preimage_roundtrip() {
        let gm = trivial_mod(2, 4);
        let mut c1 = Cochain::zero(&gm.actor, &gm.module, 1);
        c1.values[0] = gm.module.element(&[3]).unwrap();
        let d = coboundary(&gm, &c1);
        let x = coboundary_preimage(&gm, &d, &b()).unwrap().unwrap();
        assert_eq!(coboundary(&gm, &x), d);
    }

    #[test]
    fn qz_cohomology_models_divisible_coefficients() {
        // H^3(Z/m, Q/Z) = Z/m, H^4(Z/m, Q/Z) = 0, H^2(Z/m, Q/Z) = 0
        for m in 2..=4u64 {
            let g = FinAbGroup::cyclic(m);
            assert_eq!(
                qz_cohomology(&g, 3, &b()).unwrap().invariant_factors(),
                &[m]
            );
            assert!(qz_cohomology(&g, 4, &b()).unwrap().is_trivial());
            assert!(qz_cohomology(&g, 2, &b()).unwrap().is_trivial());
        }
    }

    #[test]
    fn induced_map_kernel_example() {
        // r: Klein -> Z/2 projection on first coordinate; G = Z/2 trivial action.
        // |H^2(Z/2, Klein)| = 4, kernel of r_* has order 2.
        let klein = FinAbGroup::new(vec![2, 2]).unwrap();
        let z2 = FinAbGroup::cyclic(2);
        let g = FinAbGroup::cyclic(2);
        let src = GModule::trivial(g.clone(), klein.clone());
        let dst = GModule::trivial(g.clone(), z2.clone());
        let r = GroupHom::new(
            klein.clone(),
            z2.clone(),
            vec![z2.element(&[1]).unwrap(), z2.element(&[0]).unwrap()],
        )
        .unwrap();
        let map = induced_map(&src, &dst, &r, 2, &b()).unwrap();
        assert_eq!(map.source.order(), 4);
        assert_eq!(map.kernel_order(), 2);
        // identity induces the identity
        let idm = induced_map(&src, &src, &GroupHom::identity(klein.clone()), 2, &b()).unwrap();
        assert_eq!(idm.kernel_order(), 1);
    }

    #[test]
    fn supergroup_from_central_extensions() {
        // (Z/4, [2]) -> G = Z/2 with nontrivial alpha
        let z4 = FinAbGroup::cyclic(4);
        let sg = SuperGroup::from_central(&z4, &z4.element(&[2]).unwrap()).unwrap();
        assert_eq!(sg.group.invariant_factors(), &[2]);
        assert!(!sg.is_trivial_class(&b()).unwrap());
        // (Z/6, [3]) -> G = Z/3 with trivial alpha
        let z6 = FinAbGroup::cyclic(6);
        let sg = SuperGroup::from_central(&z6, &z6.element(&[3]).unwrap()).unwrap();
        assert_eq!(sg.group.invariant_factors(), &[3]);
        assert!(sg.is_trivial_class(&b()).unwrap());
        // (Z/m x Z/2, (0,1)) -> G = Z/m with trivial alpha
        let g = FinAbGroup::new(vec![2, 6]).unwrap(); // Z/2 x Z/6 ≅ (Z/3 x Z/2) x Z/2
        let z = g.element(&[1, 0]).unwrap();
        let sg = SuperGroup::from_central(&g, &z).unwrap();
        assert!(sg.is_trivial_class(&b()).unwrap());
    }

    #[test]
    fn connecting_hom_splits_and_twists() {
        let b = b();
        let g = FinAbGroup::cyclic(2);
        let klein = FinAbGroup::new(vec![2, 2]).unwrap();
        let z2 = FinAbGroup::cyclic(2);
        // alpha: the nontrivial class of H^2(Z/2, Z/2)
        let gm_q = GModule::trivial(g.clone(), z2.clone());
        let mut alpha = Cochain::zero(&g, &z2, 2);
        let u = g.element(&[1]).unwrap();
        alpha
            .set(&[u.clone(), u.clone()], z2.element(&[1]).unwrap())
            .unwrap();
        assert!(is_cocycle(&gm_q, &alpha));

        // split sequence 0 -> <f> -> Klein -> Z/2 -> 0 (trivial action): d2 = 0
        let mid = GModule::trivial(g.clone(), klein.clone());
        let f = klein.element(&[0, 1]).unwrap();
        let sub = Subgroup::new(&klein, &[f.clone()]);
        let sub_mod = mid.restrict(&sub).unwrap();
        let incl = GroupHom::new(sub.group.clone(), klein.clone(), sub.inclusion.clone()).unwrap();
        let proj = GroupHom::new(
            klein.clone(),
            z2.clone(),
            vec![z2.element(&[1]).unwrap(), z2.element(&[0]).unwrap()],
        )
        .unwrap();
        let ses = ShortExactSeq::new(sub_mod.clone(), mid, gm_q.clone(), incl, proj).unwrap();
        let d2 = connecting_hom(&ses, &alpha, &b).unwrap();
        let h3 = cohomology(&ses.sub, 3, &b).unwrap();
        assert!(h3.is_coboundary(&d2).unwrap());

        // zero class maps to zero
        let zero = Cochain::zero(&g, &z2, 2);
        let d0 = connecting_hom(&ses, &zero, &b).unwrap();
        assert!(d0.is_zero());
    }
}
