//! Pointed braided fusion categories `Vec_A^{(omega, c)}`: abelian 3-cocycle
//! verification, quadratic forms and their bicharacters, Müger centers,
//! fermion detection, the rank-4 spin catalog, and abelian cohomology
//! classification keyed by the quadratic form.

use crate::group::{FinAbGroup, GroupElement, GroupHom};
use crate::linalg::{self, IntMat};
use crate::qz::QZ;
use crate::{Budget, Error, Result};

/// A pair `(omega, c)` of normalized maps `A^3 -> Q/Z`, `A^2 -> Q/Z`
/// intended to satisfy the two hexagon identities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbelianThreeCocycle {
    pub group: FinAbGroup,
    omega: Vec<QZ>,
    c: Vec<QZ>,
}

/// Verification report for `verify_abelian_cocycle`; empty lists mean valid.
#[derive(Debug, Default)]
pub struct CocycleReport {
    pub hexagon1: Vec<(GroupElement, GroupElement, GroupElement)>,
    pub hexagon2: Vec<(GroupElement, GroupElement, GroupElement)>,
    pub cocycle: Vec<(GroupElement, GroupElement, GroupElement, GroupElement)>,
    pub normalization: Vec<String>,
}

impl CocycleReport {
    pub fn is_valid(&self) -> bool {
        self.hexagon1.is_empty()
            && self.hexagon2.is_empty()
            && self.cocycle.is_empty()
            && self.normalization.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.hexagon1.len() + self.hexagon2.len() + self.cocycle.len() + self.normalization.len()
    }
}

impl AbelianThreeCocycle {
    pub fn new(group: FinAbGroup, omega: Vec<QZ>, c: Vec<QZ>) -> Result<Self> {
        let n = group.order() as usize;
        if omega.len() != n * n * n || c.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "tables must have |A|^3 = {} and |A|^2 = {} entries",
                n * n * n,
                n * n
            )));
        }
        Ok(AbelianThreeCocycle { group, omega, c })
    }

    pub fn zero(group: FinAbGroup) -> Self {
        let n = group.order() as usize;
        AbelianThreeCocycle {
            group,
            omega: vec![QZ::ZERO; n * n * n],
            c: vec![QZ::ZERO; n * n],
        }
    }

    #[inline]
    fn idx3(&self, x: &GroupElement, y: &GroupElement, z: &GroupElement) -> usize {
        let n = self.group.order() as usize;
        (self.group.index_of(x) * n + self.group.index_of(y)) * n + self.group.index_of(z)
    }

    #[inline]
    fn idx2(&self, x: &GroupElement, y: &GroupElement) -> usize {
        self.group.index_of(x) * self.group.order() as usize + self.group.index_of(y)
    }

    pub fn omega(&self, x: &GroupElement, y: &GroupElement, z: &GroupElement) -> QZ {
        self.omega[self.idx3(x, y, z)]
    }

    pub fn braiding(&self, x: &GroupElement, y: &GroupElement) -> QZ {
        self.c[self.idx2(x, y)]
    }

    pub fn set_omega(&mut self, x: &GroupElement, y: &GroupElement, z: &GroupElement, v: QZ) {
        let i = self.idx3(x, y, z);
        self.omega[i] = v;
    }

    pub fn set_braiding(&mut self, x: &GroupElement, y: &GroupElement, v: QZ) {
        let i = self.idx2(x, y);
        self.c[i] = v;
    }

    /// Check both hexagon identities, the 3-cocycle condition for `omega`,
    /// and normalization; every violated instance is listed.
    pub fn verify(&self) -> CocycleReport {
        let mut report = CocycleReport::default();
        let elems = self.group.elements();
        let zero = self.group.zero();
        for x in &elems {
            if !self.omega(&zero, x, x).is_zero()
                || !self.omega(x, &zero, x).is_zero()
                || !self.omega(x, x, &zero).is_zero()
            {
                report
                    .normalization
                    .push(format!("omega not normalized at {:?}", x));
            }
            if !self.braiding(&zero, x).is_zero() || !self.braiding(x, &zero).is_zero() {
                report
                    .normalization
                    .push(format!("braiding not normalized at {:?}", x));
            }
        }
        for g in &elems {
            for h in &elems {
                for k in &elems {
                    // c(g, h+k) - c(g,h) - c(g,k) = w(g,h,k) + w(h,k,g) - w(h,g,k)
                    let lhs1 = self
                        .braiding(g, &self.group.add(h, k))
                        .sub(&self.braiding(g, h))
                        .sub(&self.braiding(g, k));
                    let rhs1 = self
                        .omega(g, h, k)
                        .add(&self.omega(h, k, g))
                        .sub(&self.omega(h, g, k));
                    if lhs1 != rhs1 {
                        report.hexagon1.push((g.clone(), h.clone(), k.clone()));
                    }
                    // c(g+h, k) - c(g,k) - c(h,k) = w(g,k,h) - w(g,h,k) - w(k,g,h)
                    let lhs2 = self
                        .braiding(&self.group.add(g, h), k)
                        .sub(&self.braiding(g, k))
                        .sub(&self.braiding(h, k));
                    let rhs2 = self
                        .omega(g, k, h)
                        .sub(&self.omega(g, h, k))
                        .sub(&self.omega(k, g, h));
                    if lhs2 != rhs2 {
                        report.hexagon2.push((g.clone(), h.clone(), k.clone()));
                    }
                }
            }
        }
        // d(omega) = 0, asserted independently of the hexagons
        for a in &elems {
            for h in &elems {
                for k in &elems {
                    for l in &elems {
                        let v = self
                            .omega(h, k, l)
                            .sub(&self.omega(&self.group.add(a, h), k, l))
                            .add(&self.omega(a, &self.group.add(h, k), l))
                            .sub(&self.omega(a, h, &self.group.add(k, l)))
                            .add(&self.omega(a, h, k));
                        if !v.is_zero() {
                            report
                                .cocycle
                                .push((a.clone(), h.clone(), k.clone(), l.clone()));
                        }
                    }
                }
            }
        }
        report
    }

    /// The quadratic form `q(l) = c(l, l)` as a table over `elements()`.
    pub fn quadratic_form(&self) -> Vec<QZ> {
        self.group
            .elements()
            .iter()
            .map(|l| self.braiding(l, l))
            .collect()
    }

    /// `b_q(k, l) = q(k+l) - q(k) - q(l)` as a table over element pairs.
    pub fn bicharacter(&self) -> Vec<QZ> {
        let elems = self.group.elements();
        let q = self.quadratic_form();
        let n = elems.len();
        let mut out = vec![QZ::ZERO; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                let s = self.group.index_of(&self.group.add(x, y));
                out[i * n + j] = q[s].sub(&q[i]).sub(&q[j]);
            }
        }
        out
    }

    /// Violations of the quadratic-form law: q(-l) = q(l) and bilinearity of
    /// b_q. Empty means the law holds.
    pub fn quadratic_law_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let elems = self.group.elements();
        let q = self.quadratic_form();
        let n = elems.len();
        let bq = self.bicharacter();
        for (i, l) in elems.iter().enumerate() {
            let ni = self.group.index_of(&self.group.neg(l));
            if q[i] != q[ni] {
                out.push(format!("q(-{:?}) != q({:?})", l, l));
            }
        }
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                for (k, z) in elems.iter().enumerate() {
                    let yz = self.group.index_of(&self.group.add(y, z));
                    if bq[i * n + yz] != bq[i * n + j].add(&bq[i * n + k]) {
                        out.push(format!("b({:?}, {:?}+{:?}) not additive", x, y, z));
                    }
                    let xy = self.group.index_of(&self.group.add(x, y));
                    if bq[xy * n + k] != bq[i * n + k].add(&bq[j * n + k]) {
                        out.push(format!("b({:?}+{:?}, {:?}) not additive", x, y, z));
                    }
                }
            }
        }
        out
    }

    /// Müger center: the radical `{y : b_q(y, x) = 0 for all x}`.
    pub fn muger_center(&self) -> Vec<GroupElement> {
        let elems = self.group.elements();
        let n = elems.len();
        let bq = self.bicharacter();
        elems
            .iter()
            .enumerate()
            .filter(|(i, _)| (0..n).all(|j| bq[i * n + j].is_zero()))
            .map(|(_, e)| e.clone())
            .collect()
    }

    pub fn is_modular(&self) -> bool {
        self.muger_center().len() == 1
    }

    /// All fermions: order-2 elements with self-braiding -1.
    pub fn fermions(&self) -> Vec<GroupElement> {
        self.group
            .elements()
            .into_iter()
            .filter(|a| self.group.order_of(a) == 2 && self.braiding(a, a) == QZ::HALF)
            .collect()
    }

    /// Transport along an automorphism `t` of A: `(omega ∘ t, c ∘ t)`.
    pub fn transport(&self, t: &GroupHom) -> AbelianThreeCocycle {
        let elems = self.group.elements();
        let mut out = AbelianThreeCocycle::zero(self.group.clone());
        for x in &elems {
            for y in &elems {
                let v = self.braiding(&t.apply(x), &t.apply(y));
                out.set_braiding(x, y, v);
                for z in &elems {
                    let w = self.omega(&t.apply(x), &t.apply(y), &t.apply(z));
                    out.set_omega(x, y, z, w);
                }
            }
        }
        out
    }
}

/// The two fusion-rule families of the rank-4 spin catalog.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rank4Family {
    /// `A = Z/2 x Z/2 = {0, v, f, v+f}`, admissible `k` with `4k = 0`.
    Klein,
    /// `A = Z/4 = <v>`, `f = 2v`, admissible `k` with `4k = 1/2`.
    Z4,
}

/// A pointed braided category with a distinguished fermion.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PointedSpinCategory {
    pub data: AbelianThreeCocycle,
    pub fermion: GroupElement,
    pub label: Option<String>,
    /// `q(v)` for rank-4 catalog entries; the complete invariant there.
    pub k_invariant: Option<QZ>,
}

impl PointedSpinCategory {
    pub fn new(
        data: AbelianThreeCocycle,
        fermion: GroupElement,
        label: Option<String>,
    ) -> Result<Self> {
        if data.group.order_of(&fermion) != 2 {
            return Err(Error::InvalidFermion(format!(
                "{:?} does not have order 2",
                fermion
            )));
        }
        if data.braiding(&fermion, &fermion) != QZ::HALF {
            return Err(Error::InvalidFermion(format!(
                "c(f, f) = {} but a fermion needs 1/2",
                data.braiding(&fermion, &fermion)
            )));
        }
        Ok(PointedSpinCategory {
            data,
            fermion,
            label,
            k_invariant: None,
        })
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.data.group
    }

    pub fn quadratic_form(&self) -> Vec<QZ> {
        self.data.quadratic_form()
    }

    pub fn muger_center(&self) -> Vec<GroupElement> {
        self.data.muger_center()
    }

    pub fn fermions(&self) -> Vec<GroupElement> {
        self.data.fermions()
    }

    /// `r(a) = b_q(a, f)` as a surjective-or-zero homomorphism `A -> Z/2`.
    pub fn fermion_pairing(&self) -> Result<GroupHom> {
        let a = &self.data.group;
        let z2 = FinAbGroup::cyclic(2);
        let q = self.data.quadratic_form();
        let bq = |x: &GroupElement, y: &GroupElement| {
            let s = a.index_of(&a.add(x, y));
            q[s].sub(&q[a.index_of(x)]).sub(&q[a.index_of(y)])
        };
        let images = a
            .generators()
            .iter()
            .map(|g| {
                let v = bq(g, &self.fermion);
                let bit = v.as_z2().ok_or_else(|| {
                    Error::InvalidFermion(format!("b_q({:?}, f) = {} is not 2-torsion", g, v))
                })?;
                z2.element(&[bit as i64])
            })
            .collect::<Result<Vec<_>>>()?;
        GroupHom::new(a.clone(), z2, images)
    }
}

/// Build a rank-4 catalog entry with the printed `omega_k`, `c_k` tables.
pub fn build_rank4(family: Rank4Family, k: QZ) -> Result<PointedSpinCategory> {
    match family {
        Rank4Family::Klein => {
            if !k.scale(4).is_zero() {
                return Err(Error::InvalidParameter(format!(
                    "Klein family requires 4k = 0, got k = {k}"
                )));
            }
            let a = FinAbGroup::new(vec![2, 2])?; // coordinates (v, f)
            let elems = a.elements();
            let mut data = AbelianThreeCocycle::zero(a.clone());
            for x in &elems {
                let xv = x.coords[0] as i64;
                let xf = x.coords[1] as i64;
                for y in &elems {
                    let yv = y.coords[0] as i64;
                    let yf = y.coords[1] as i64;
                    // c_k(x, y) = (1/2)(x_v + x_f) y_f + k x_v y_v
                    let c = QZ::HALF
                        .scale((xv + xf) * yf)
                        .add(&k.scale(xv * yv));
                    data.set_braiding(x, y, c);
                    for z in &elems {
                        let zv = z.coords[0] as i64;
                        // omega_k(x, y, z) = 2k x_v when y_v + z_v >= 2
                        let w = if yv + zv >= 2 {
                            k.scale(2 * xv)
                        } else {
                            QZ::ZERO
                        };
                        data.set_omega(x, y, z, w);
                    }
                }
            }
            let fermion = a.element(&[0, 1])?;
            let mut cat = PointedSpinCategory::new(data, fermion, None)?;
            cat.k_invariant = Some(k);
            cat.label = Some(match k.with_denominator(8) {
                Some(0) => "toric".into(),
                Some(4) => "3f".into(),
                Some(2) => "semion2+".into(),
                Some(6) => "semion2-".into(),
                _ => format!("klein-k{k}"),
            });
            Ok(cat)
        }
        Rank4Family::Z4 => {
            if k.scale(4) != QZ::HALF {
                return Err(Error::InvalidParameter(format!(
                    "Z/4 family requires 4k = 1/2, got k = {k}"
                )));
            }
            let a = FinAbGroup::cyclic(4);
            let elems = a.elements();
            let mut data = AbelianThreeCocycle::zero(a.clone());
            for x in &elems {
                let xv = x.coords[0] as i64;
                for y in &elems {
                    let yv = y.coords[0] as i64;
                    data.set_braiding(x, y, k.scale(xv * yv));
                    for z in &elems {
                        let zv = z.coords[0] as i64;
                        // omega_k(x, y, z) = (4k) x_v when y_v + z_v >= 4
                        let w = if yv + zv >= 4 {
                            QZ::HALF.scale(xv)
                        } else {
                            QZ::ZERO
                        };
                        data.set_omega(x, y, z, w);
                    }
                }
            }
            let fermion = a.element(&[2])?;
            let mut cat = PointedSpinCategory::new(data, fermion, None)?;
            cat.k_invariant = Some(k);
            cat.label = Some(format!("z4-k{k}"));
            Ok(cat)
        }
    }
}

/// An element of the 16-member catalog of modular extensions of sVec.
#[derive(Clone, PartialEq, Debug)]
pub enum MextElement {
    Pointed(PointedSpinCategory),
    /// One of the 8 Ising braided categories, indexed by the choice of
    /// zeta with zeta^8 = -1. Opaque: only trivial super-groups act
    /// fermionically on them, so no internal structure is needed.
    Ising(u8),
}

impl MextElement {
    pub fn name(&self) -> String {
        match self {
            MextElement::Pointed(cat) => cat.label.clone().unwrap_or_else(|| "pointed".into()),
            MextElement::Ising(i) => format!("ising{i}"),
        }
    }

    pub fn is_pointed(&self) -> bool {
        matches!(self, MextElement::Pointed(_))
    }
}

/// The 16 modular extensions of sVec: 8 pointed (k in eighths) + 8 Ising.
pub fn svec_catalog() -> Vec<MextElement> {
    let mut out = Vec::with_capacity(16);
    for s in [0i64, 2, 4, 6] {
        let k = QZ::new(s, 8).unwrap();
        out.push(MextElement::Pointed(
            build_rank4(Rank4Family::Klein, k).unwrap(),
        ));
    }
    for s in [1i64, 3, 5, 7] {
        let k = QZ::new(s, 8).unwrap();
        out.push(MextElement::Pointed(build_rank4(Rank4Family::Z4, k).unwrap()));
    }
    for i in 0..8u8 {
        out.push(MextElement::Ising(i));
    }
    out
}

pub fn catalog_entry(name: &str) -> Option<MextElement> {
    svec_catalog().into_iter().find(|e| e.name() == name)
}

/// One class of `H^3_ab(A, (1/N)Z/Z)` with its quadratic-form key.
#[derive(Clone, Debug)]
pub struct H3abClass {
    pub q: Vec<QZ>,
    pub representative: AbelianThreeCocycle,
}

/// Classify abelian 3-cocycles with values in `(1/N)Z/Z` up to abelian
/// coboundaries. The classes are keyed (faithfully, by Eilenberg–MacLane at
/// this scale — asserted) by the quadratic form.
pub fn classify_h3ab(group: &FinAbGroup, n: u64, budget: &Budget) -> Result<Vec<H3abClass>> {
    let order = group.order();
    budget.check(order as u128 * order as u128 * order as u128 * n as u128)?;
    let elems = group.elements();
    let nz: Vec<&GroupElement> = elems.iter().filter(|e| **e != group.zero()).collect();
    let m = nz.len();
    // unknowns: omega on (A\0)^3, then c on (A\0)^2
    let omega_vars = m * m * m;
    let c_vars = m * m;
    let dim = omega_vars + c_vars;
    let nz_index = {
        let mut t = vec![usize::MAX; order as usize];
        for (i, e) in nz.iter().enumerate() {
            t[group.index_of(e)] = i;
        }
        t
    };
    let ovar = |x: &GroupElement, y: &GroupElement, z: &GroupElement| -> Option<usize> {
        let (a, b, c) = (
            nz_index[group.index_of(x)],
            nz_index[group.index_of(y)],
            nz_index[group.index_of(z)],
        );
        if a == usize::MAX || b == usize::MAX || c == usize::MAX {
            None
        } else {
            Some((a * m + b) * m + c)
        }
    };
    let cvar = |x: &GroupElement, y: &GroupElement| -> Option<usize> {
        let (a, b) = (nz_index[group.index_of(x)], nz_index[group.index_of(y)]);
        if a == usize::MAX || b == usize::MAX {
            None
        } else {
            Some(omega_vars + a * m + b)
        }
    };

    let mut rows: Vec<(linalg::SparseVec, u64)> = Vec::new();
    let mut push_row = |terms: Vec<(Option<usize>, i64)>| {
        let mut map = std::collections::BTreeMap::new();
        for (v, coef) in terms {
            if let Some(v) = v {
                *map.entry(v).or_insert(0i64) += coef;
            }
        }
        let row: linalg::SparseVec = map.into_iter().filter(|&(_, c)| c != 0).collect();
        if !row.is_empty() {
            rows.push((row, n));
        }
    };
    for g in &elems {
        for h in &elems {
            for k in &elems {
                // hexagon 1: c(g,h+k) - c(g,h) - c(g,k) - w(g,h,k) - w(h,k,g) + w(h,g,k) = 0
                push_row(vec![
                    (cvar(g, &group.add(h, k)), 1),
                    (cvar(g, h), -1),
                    (cvar(g, k), -1),
                    (ovar(g, h, k), -1),
                    (ovar(h, k, g), -1),
                    (ovar(h, g, k), 1),
                ]);
                // hexagon 2: c(g+h,k) - c(g,k) - c(h,k) - w(g,k,h) + w(g,h,k) + w(k,g,h) = 0
                push_row(vec![
                    (cvar(&group.add(g, h), k), 1),
                    (cvar(g, k), -1),
                    (cvar(h, k), -1),
                    (ovar(g, k, h), -1),
                    (ovar(g, h, k), 1),
                    (ovar(k, g, h), 1),
                ]);
                for l in &elems {
                    // d(omega) = 0
                    push_row(vec![
                        (ovar(h, k, l), 1),
                        (ovar(&group.add(g, h), k, l), -1),
                        (ovar(g, &group.add(h, k), l), 1),
                        (ovar(g, h, &group.add(k, l)), -1),
                        (ovar(g, h, k), 1),
                    ]);
                }
            }
        }
    }
    let col_moduli = vec![n; dim];
    let kernel = linalg::streaming_kernel(rows, dim, &col_moduli);

    // coboundaries: alpha over (A\0)^2, normalized
    let avar = |x: &GroupElement, y: &GroupElement| -> Option<usize> {
        let (a, b) = (nz_index[group.index_of(x)], nz_index[group.index_of(y)]);
        if a == usize::MAX || b == usize::MAX {
            None
        } else {
            Some(a * m + b)
        }
    };
    let mut sub_gens: Vec<Vec<i128>> = Vec::new();
    for ai in 0..m * m {
        let mut gen = vec![0i128; dim];
        for g in &elems {
            for h in &elems {
                let centry = cvar(g, h);
                if let Some(ci) = centry {
                    // c-coboundary alpha(h, g) - alpha(g, h): the sign that is
                    // compatible with the hexagon identities (the other sign
                    // fails to produce cocycles outside 2-torsion)
                    let mut acc = 0i128;
                    if avar(h, g) == Some(ai) {
                        acc += 1;
                    }
                    if avar(g, h) == Some(ai) {
                        acc -= 1;
                    }
                    gen[ci] += acc;
                }
                for k in &elems {
                    if let Some(oi) = ovar(g, h, k) {
                        let mut acc = 0i128;
                        if avar(g, h) == Some(ai) {
                            acc += 1;
                        }
                        if avar(&group.add(g, h), k) == Some(ai) {
                            acc += 1;
                        }
                        if avar(g, &group.add(h, k)) == Some(ai) {
                            acc -= 1;
                        }
                        if avar(h, k) == Some(ai) {
                            acc -= 1;
                        }
                        gen[oi] += acc;
                    }
                }
            }
        }
        sub_gens.push(gen);
    }
    // Classes are taken with divisible coefficients: coboundary twists may
    // use denominators finer than N, and solvability of the integer twist
    // system over Q/Z is exact at denominator N * e for e the largest
    // elementary divisor of the twist matrix.
    let mut twist_mat = IntMat::zeros(dim, sub_gens.len());
    for (j, g) in sub_gens.iter().enumerate() {
        for (i, &v) in g.iter().enumerate() {
            twist_mat.set(i, j, v);
        }
    }
    let e_t = linalg::elementary_divisors(&twist_mat)
        .into_iter()
        .filter(|&d| d != 0)
        .fold(1u64, crate::qz::lcm);
    let n_fine = n * e_t.max(1);
    let scale = (n_fine / n) as i128;
    let mut scaled_lattice = IntMat::zeros(dim, kernel.basis.cols);
    for i in 0..dim {
        for j in 0..kernel.basis.cols {
            scaled_lattice.set(i, j, kernel.basis.get(i, j) * scale);
        }
    }
    let fine_moduli = vec![n_fine; dim];
    let quotient = linalg::QuotientData::new(scaled_lattice, &sub_gens, &fine_moduli)?;
    budget.check_enumeration(quotient.order())?;

    let unflatten = |flat: &[i128]| -> AbelianThreeCocycle {
        let mut data = AbelianThreeCocycle::zero(group.clone());
        for (ai, x) in nz.iter().enumerate() {
            for (bi, y) in nz.iter().enumerate() {
                let cval = flat[omega_vars + ai * m + bi];
                data.set_braiding(x, y, QZ::new(cval as i64, n_fine as i64).unwrap());
                for (ci, z) in nz.iter().enumerate() {
                    let oval = flat[(ai * m + bi) * m + ci];
                    data.set_omega(x, y, z, QZ::new(oval as i64, n_fine as i64).unwrap());
                }
            }
        }
        data
    };

    let mut out = Vec::new();
    let mut seen_q: Vec<Vec<QZ>> = Vec::new();
    for class in quotient.all_classes() {
        let rep = unflatten(&quotient.rep_of(&class));
        debug_assert!(rep.verify().is_valid(), "{:?}", rep.verify());
        let q = rep.quadratic_form();
        if seen_q.contains(&q) {
            return Err(Error::InvalidInput(
                "internal: distinct classes share a quadratic form".into(),
            ));
        }
        seen_q.push(q.clone());
        out.push(H3abClass {
            q,
            representative: rep,
        });
    }
    // deterministic order: by quadratic-form table
    out.sort_by(|a, b| a.q.cmp(&b.q));
    Ok(out)
}

/// Brute-force braided autoequivalence computation: automorphisms `t` of A
/// fixing the fermion such that `(omega ∘ t - omega, c ∘ t - c)` is an
/// abelian 3-coboundary (decided by an exact linear solve).
pub fn braided_autoequivalences(
    cat: &PointedSpinCategory,
    budget: &Budget,
) -> Result<Vec<GroupHom>> {
    let a = &cat.data.group;
    let elems = a.elements();
    let autos = crate::group::enumerate_automorphisms(a, budget)?;
    let denom = {
        let mut d = 1u64;
        for w in cat.data.omega.iter().chain(cat.data.c.iter()) {
            d = crate::qz::lcm(d, w.denom());
        }
        crate::qz::lcm(2 * d, 2 * a.exponent())
    };
    let mut out = Vec::new();
    for t in autos {
        if t.apply(&cat.fermion) != cat.fermion {
            continue;
        }
        let moved = cat.data.transport(&t);
        // solve for alpha: A^2 -> (1/denom)Z/Z with
        //   (moved - cat).omega = d(alpha)  and  (moved - cat).c = alpha - alpha^T
        let n = elems.len();
        let dim = n * n;
        let avar = |x: &GroupElement, y: &GroupElement| a.index_of(x) * n + a.index_of(y);
        let mut mat_rows: Vec<Vec<i128>> = Vec::new();
        let mut rhs: Vec<i128> = Vec::new();
        for g in &elems {
            for h in &elems {
                let mut row = vec![0i128; dim];
                row[avar(h, g)] += 1;
                row[avar(g, h)] -= 1;
                mat_rows.push(row);
                let d = moved.braiding(g, h).sub(&cat.data.braiding(g, h));
                rhs.push(d.with_denominator(denom).expect("denominator bound") as i128);
                for k in &elems {
                    let mut row = vec![0i128; dim];
                    row[avar(g, h)] += 1;
                    row[avar(&a.add(g, h), k)] += 1;
                    row[avar(g, &a.add(h, k))] -= 1;
                    row[avar(h, k)] -= 1;
                    mat_rows.push(row);
                    let d = moved.omega(g, h, k).sub(&cat.data.omega(g, h, k));
                    rhs.push(d.with_denominator(denom).expect("denominator bound") as i128);
                }
            }
        }
        let mut mat = IntMat::zeros(mat_rows.len(), dim);
        for (i, r) in mat_rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                mat.set(i, j, v);
            }
        }
        let row_moduli = vec![denom; rhs.len()];
        let col_moduli = vec![denom; dim];
        if linalg::solve_mod(&mat, &rhs, &row_moduli, &col_moduli).is_some() {
            out.push(t);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> QZ {
        QZ::new(n, d).unwrap()
    }

    #[test]
    fn rank4_klein_entries_are_valid() {
        for s in [0i64, 2, 4, 6] {
            let cat = build_rank4(Rank4Family::Klein, q(s, 8)).unwrap();
            let report = cat.data.verify();
            assert!(report.is_valid(), "k = {s}/8: {report:?}");
            assert!(cat.data.is_modular());
        }
        assert!(build_rank4(Rank4Family::Klein, q(1, 8)).is_err());
    }

    #[test]
    fn rank4_z4_entries_are_valid() {
        for s in [1i64, 3, 5, 7] {
            let cat = build_rank4(Rank4Family::Z4, q(s, 8)).unwrap();
            let report = cat.data.verify();
            assert!(report.is_valid(), "k = {s}/8: {report:?}");
            assert!(cat.data.is_modular());
        }
        assert!(build_rank4(Rank4Family::Z4, q(1, 4)).is_err());
    }

    #[test]
    fn printed_values_match() {
        // toric code: k = 0
        let toric = build_rank4(Rank4Family::Klein, QZ::ZERO).unwrap();
        let a = toric.group().clone();
        let v = a.element(&[1, 0]).unwrap();
        let f = a.element(&[0, 1]).unwrap();
        assert_eq!(toric.data.braiding(&f, &f), QZ::HALF);
        assert_eq!(toric.data.braiding(&v, &v), QZ::ZERO);
        // two-semion: c(v, v) = 1/4
        let semion = build_rank4(Rank4Family::Klein, q(1, 4)).unwrap();
        assert_eq!(semion.data.braiding(&v, &v), q(1, 4));
        // z4 with k = 1/8: c(v,v) = 1/8, omega(v,v,v) = 0, omega(3v,2v,3v) = 1/2
        let z4 = build_rank4(Rank4Family::Z4, q(1, 8)).unwrap();
        let g = z4.group().clone();
        let v = g.element(&[1]).unwrap();
        assert_eq!(z4.data.braiding(&v, &v), q(1, 8));
        assert_eq!(z4.data.omega(&v, &v, &v), QZ::ZERO);
        assert_eq!(
            z4.data.omega(
                &g.element(&[3]).unwrap(),
                &g.element(&[2]).unwrap(),
                &g.element(&[3]).unwrap()
            ),
            QZ::HALF
        );
        // q tables: q(f) = 1/2, q(v) = q(v+f) = k
        let qtab = z4.quadratic_form();
        assert_eq!(qtab[g.index_of(&g.element(&[2]).unwrap())], QZ::HALF);
        assert_eq!(qtab[g.index_of(&v)], q(1, 8));
        assert_eq!(qtab[g.index_of(&g.element(&[3]).unwrap())], q(1, 8));
    }

    #[test]
    fn fermion_counts() {
        // three fermions: all three nonzero elements are fermions
        let tf = build_rank4(Rank4Family::Klein, QZ::HALF).unwrap();
        assert_eq!(tf.fermions().len(), 3);
        // toric code: exactly one
        let toric = build_rank4(Rank4Family::Klein, QZ::ZERO).unwrap();
        assert_eq!(toric.fermions().len(), 1);
        // odd-order group: none
        let z3 = AbelianThreeCocycle::zero(FinAbGroup::cyclic(3));
        assert!(z3.fermions().is_empty());
    }

    #[test]
    fn degenerate_braiding_has_full_center() {
        let a = FinAbGroup::new(vec![2, 2]).unwrap();
        let data = AbelianThreeCocycle::zero(a.clone());
        assert_eq!(data.muger_center().len(), 4);
    }

    #[test]
    fn hexagon_violation_is_reported() {
        // omega = 0 with a non-bilinear c on Klein
        let a = FinAbGroup::new(vec![2, 2]).unwrap();
        let mut data = AbelianThreeCocycle::zero(a.clone());
        let v = a.element(&[1, 0]).unwrap();
        data.set_braiding(&v, &v, q(1, 4)); // q(v) = 1/4 of order 4 with omega = 0 breaks hexagons
        let report = data.verify();
        assert!(!report.is_valid());
        assert!(!report.hexagon1.is_empty() || !report.hexagon2.is_empty());
    }

    #[test]
    fn fermion_line_restriction_is_symmetric() {
        // restricting the braiding-trivial Klein entry to <f> gives the
        // sign braiding on Z/2: c(f,f) = 1/2 with full Mueger center
        let toric = build_rank4(Rank4Family::Klein, QZ::ZERO).unwrap();
        let f = toric.group().element(&[0, 1]).unwrap();
        let z2 = FinAbGroup::cyclic(2);
        let mut sub = AbelianThreeCocycle::zero(z2.clone());
        let g = z2.element(&[1]).unwrap();
        sub.set_braiding(&g, &g, toric.data.braiding(&f, &f));
        assert_eq!(sub.braiding(&g, &g), QZ::HALF);
        assert!(sub.verify().is_valid());
        // symmetric: everything is transparent
        assert_eq!(sub.muger_center().len(), 2);
    }

    #[test]
    fn budgets_are_enforced() {
        let tiny = Budget::new(1);
        assert!(classify_h3ab(&FinAbGroup::cyclic(4), 32, &tiny).is_err());
        assert!(crate::group::enumerate_homs(
            &FinAbGroup::new(vec![2, 2]).unwrap(),
            &FinAbGroup::new(vec![2, 2]).unwrap(),
            &tiny
        )
        .is_err());
        assert!(crate::cohomology::cohomology(
            &crate::cohomology::GModule::trivial(FinAbGroup::cyclic(8), FinAbGroup::cyclic(8)),
            3,
            &tiny
        )
        .is_err());
    }

    #[test]
    fn catalog_is_sixteen() {
        let cat = svec_catalog();
        assert_eq!(cat.len(), 16);
        assert_eq!(cat.iter().filter(|e| e.is_pointed()).count(), 8);
        assert!(catalog_entry("toric").is_some());
        assert!(catalog_entry("3f").is_some());
        assert!(catalog_entry("semion2+").is_some());
        assert!(catalog_entry("semion2-").is_some());
        assert!(catalog_entry("z4-k1/8").is_some());
        assert!(catalog_entry("ising0").is_some());
        assert!(catalog_entry("ising7").is_some());
        assert!(catalog_entry("nope").is_none());
    }

    #[test]
    fn classify_h3ab_z2() {
        let classes = classify_h3ab(&FinAbGroup::cyclic(2), 8, &Budget::default()).unwrap();
        assert_eq!(classes.len(), 4);
        let mut qf: Vec<QZ> = classes.iter().map(|c| c.q[1]).collect();
        qf.sort();
        assert_eq!(qf, vec![QZ::ZERO, q(1, 4), q(1, 2), q(3, 4)]);
    }

    #[test]
    fn classify_h3ab_trivial_group() {
        let classes = classify_h3ab(&FinAbGroup::trivial(), 8, &Budget::default()).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn rank4_aut_br_is_z2() {
        let b = Budget::default();
        for entry in svec_catalog() {
            let MextElement::Pointed(cat) = entry else {
                continue;
            };
            let autos = braided_autoequivalences(&cat, &b).unwrap();
            assert_eq!(autos.len(), 2, "Aut_br of {:?}", cat.label);
            // the nontrivial one swaps v and v+f
            let nontriv = autos.iter().find(|t| **t != GroupHom::identity(cat.group().clone())).unwrap();
            let a = cat.group();
            for x in a.elements() {
                let y = nontriv.apply(&x);
                if x == cat.fermion || x == a.zero() {
                    assert_eq!(y, x);
                } else {
                    assert_eq!(y, a.add(&x, &cat.fermion));
                }
            }
        }
    }
}
