//! Finite abelian groups by invariant factors, their elements, duals and
//! homomorphisms, plus enumeration of homomorphisms between small groups.

use crate::linalg::{self, IntMat};
use crate::qz::{lcm, QZ};
use crate::{Budget, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A finite abelian group `Z/n_1 x ... x Z/n_r` with `n_i | n_{i+1}`.
/// The empty factor list is the trivial group.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FinAbGroup {
    invariant_factors: Vec<u64>,
}

/// An element of a `FinAbGroup`, coordinates reduced mod the factors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|n| format!("Z/{n}"))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl FinAbGroup {
    /// Build from an invariant-factor chain; rejects non-canonical input.
    pub fn new(invariant_factors: Vec<u64>) -> Result<Self> {
        for w in invariant_factors.windows(2) {
            if w[1] % w[0] != 0 {
                return Err(Error::NonCanonicalFactors(invariant_factors));
            }
        }
        if invariant_factors.iter().any(|&n| n < 2) {
            return Err(Error::NonCanonicalFactors(invariant_factors));
        }
        Ok(FinAbGroup { invariant_factors })
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            invariant_factors: vec![],
        }
    }

    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            FinAbGroup {
                invariant_factors: vec![n],
            }
        }
    }

    /// Canonicalize an arbitrary product of cyclic groups into invariant
    /// factors, e.g. `[2, 3] -> [6]`, `[4, 2] -> [2, 4]`.
    pub fn from_orders(orders: &[u64]) -> Self {
        use std::collections::BTreeMap;
        // p -> exponents, sorted descending
        let mut primary: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
        for &n in orders {
            let mut n = n;
            let mut p = 2;
            while p * p <= n {
                if n % p == 0 {
                    let mut e = 0;
                    while n % p == 0 {
                        n /= p;
                        e += 1;
                    }
                    primary.entry(p).or_default().push(e);
                }
                p += 1;
            }
            if n > 1 {
                primary.entry(n).or_default().push(1);
            }
        }
        let mut rank = 0;
        for exps in primary.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            rank = rank.max(exps.len());
        }
        let mut factors = vec![1u64; rank];
        for (p, exps) in &primary {
            for (i, &e) in exps.iter().enumerate() {
                factors[i] *= p.pow(e);
            }
        }
        factors.reverse(); // ascending divisibility
        factors.retain(|&f| f > 1);
        FinAbGroup {
            invariant_factors: factors,
        }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coords: vec![0; self.rank()],
        }
    }

    pub fn element(&self, coords: &[i64]) -> Result<GroupElement> {
        if coords.len() != self.rank() {
            return Err(Error::ElementRank {
                got: coords.len(),
                expected: self.rank(),
            });
        }
        Ok(GroupElement {
            coords: coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&c, &n)| c.rem_euclid(n as i64) as u64)
                .collect(),
        })
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .zip(&self.invariant_factors)
                .map(|((&x, &y), &n)| (x + y) % n)
                .collect(),
        }
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&x, &n)| (n - x) % n)
                .collect(),
        }
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, k: i64, a: &GroupElement) -> GroupElement {
        GroupElement {
            coords: a
                .coords
                .iter()
                .zip(&self.invariant_factors)
                .map(|(&x, &n)| ((x as i128 * k as i128).rem_euclid(n as i128)) as u64)
                .collect(),
        }
    }

    pub fn order_of(&self, a: &GroupElement) -> u64 {
        a.coords
            .iter()
            .zip(&self.invariant_factors)
            .map(|(&x, &n)| {
                let g = {
                    let (mut a, mut b) = (x, n);
                    while b != 0 {
                        let t = a % b;
                        a = b;
                        b = t;
                    }
                    a
                };
                if x == 0 {
                    1
                } else {
                    n / g
                }
            })
            .fold(1, lcm)
    }

    /// Canonical generators e_1, ..., e_r.
    pub fn generators(&self) -> Vec<GroupElement> {
        (0..self.rank())
            .map(|i| {
                let mut c = vec![0; self.rank()];
                c[i] = 1;
                GroupElement { coords: c }
            })
            .collect()
    }

    /// All elements in lexicographic coordinate order.
    pub fn elements(&self) -> Vec<GroupElement> {
        let mut out = Vec::with_capacity(self.order() as usize);
        let mut cur = vec![0u64; self.rank()];
        loop {
            out.push(GroupElement { coords: cur.clone() });
            // lexicographic increment, last coordinate fastest
            let mut i = self.rank();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                cur[i] += 1;
                if cur[i] < self.invariant_factors[i] {
                    break;
                }
                cur[i] = 0;
                if i == 0 {
                    return out;
                }
            }
        }
    }

    /// Rank of an element in the `elements()` ordering.
    pub fn index_of(&self, a: &GroupElement) -> usize {
        let mut idx = 0usize;
        for (c, n) in a.coords.iter().zip(&self.invariant_factors) {
            idx = idx * *n as usize + *c as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> GroupElement {
        let mut coords = vec![0u64; self.rank()];
        for i in (0..self.rank()).rev() {
            let n = self.invariant_factors[i] as usize;
            coords[i] = (idx % n) as u64;
            idx /= n;
        }
        GroupElement { coords }
    }

    /// The dual group `Hom(A, Q/Z)`, non-canonically isomorphic to `A`.
    pub fn dual_group(&self) -> FinAbGroup {
        self.clone()
    }

    /// Evaluation pairing of a dual element against a group element:
    /// `eval(chi, a) = sum chi_i a_i / n_i (mod 1)`.
    pub fn eval(&self, chi: &GroupElement, a: &GroupElement) -> QZ {
        let mut acc = QZ::ZERO;
        for ((&x, &y), &n) in chi.coords.iter().zip(&a.coords).zip(&self.invariant_factors) {
            acc = acc.add(&QZ::new((x * y) as i64, n as i64).expect("nonzero factor"));
        }
        acc
    }
}

/// A homomorphism of finite abelian groups given by generator images.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct GroupHom {
    pub source: FinAbGroup,
    pub target: FinAbGroup,
    pub images: Vec<GroupElement>,
}

impl GroupHom {
    pub fn new(source: FinAbGroup, target: FinAbGroup, images: Vec<GroupElement>) -> Result<Self> {
        if images.len() != source.rank() {
            return Err(Error::ElementRank {
                got: images.len(),
                expected: source.rank(),
            });
        }
        for (i, img) in images.iter().enumerate() {
            if img.coords.len() != target.rank() {
                return Err(Error::ElementRank {
                    got: img.coords.len(),
                    expected: target.rank(),
                });
            }
            let factor = source.invariant_factors()[i];
            if factor % target.order_of(img) != 0 {
                return Err(Error::InvalidHom { index: i, factor });
            }
        }
        Ok(GroupHom {
            source,
            target,
            images,
        })
    }

    pub fn zero(source: FinAbGroup, target: FinAbGroup) -> Self {
        let images = vec![target.zero(); source.rank()];
        GroupHom {
            source,
            target,
            images,
        }
    }

    pub fn identity(group: FinAbGroup) -> Self {
        let images = group.generators();
        GroupHom {
            source: group.clone(),
            target: group,
            images,
        }
    }

    pub fn apply(&self, a: &GroupElement) -> GroupElement {
        let mut out = self.target.zero();
        for (&c, img) in a.coords.iter().zip(&self.images) {
            out = self.target.add(&out, &self.target.scale(c as i64, img));
        }
        out
    }

    pub fn is_zero_map(&self) -> bool {
        self.images.iter().all(|e| *e == self.target.zero())
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target.order() as usize];
        let mut count = 0;
        for a in self.source.elements() {
            let i = self.target.index_of(&self.apply(&a));
            if !seen[i] {
                seen[i] = true;
                count += 1;
            }
        }
        count == self.target.order()
    }

    pub fn compose(&self, inner: &GroupHom) -> Result<GroupHom> {
        if inner.target != self.source {
            return Err(Error::GroupMismatch(
                "composition source/target mismatch".into(),
            ));
        }
        let images = inner.images.iter().map(|e| self.apply(e)).collect();
        GroupHom::new(inner.source.clone(), self.target.clone(), images)
    }

    /// Is this a bijective endomorphism? (Exhaustive check; groups are small.)
    pub fn is_automorphism(&self) -> bool {
        if self.source != self.target {
            return false;
        }
        let mut seen = vec![false; self.target.order() as usize];
        for a in self.source.elements() {
            let i = self.target.index_of(&self.apply(&a));
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }

    /// Inverse of an automorphism, by exhaustive search.
    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_automorphism() {
            return Err(Error::InvalidInput("not an automorphism".into()));
        }
        let mut preimage = vec![None; self.target.order() as usize];
        for a in self.source.elements() {
            let i = self.target.index_of(&self.apply(&a));
            preimage[i] = Some(a);
        }
        let images = self
            .source
            .generators()
            .iter()
            .map(|g| preimage[self.source.index_of(g)].clone().unwrap())
            .collect();
        GroupHom::new(self.source.clone(), self.target.clone(), images)
    }

    pub fn kernel_elements(&self) -> Vec<GroupElement> {
        self.source
            .elements()
            .into_iter()
            .filter(|a| self.apply(a) == self.target.zero())
            .collect()
    }
}

/// Complete, duplicate-free list of homomorphisms `G -> H` in lexicographic
/// order of generator-image tuples. For abelian `G` a choice of images with
/// matching orders is automatically a homomorphism.
pub fn enumerate_homs(source: &FinAbGroup, target: &FinAbGroup, budget: &Budget) -> Result<Vec<GroupHom>> {
    let candidates_per_gen: Vec<Vec<GroupElement>> = source
        .invariant_factors()
        .iter()
        .map(|&n| {
            target
                .elements()
                .into_iter()
                .filter(|h| n % target.order_of(h) == 0)
                .collect()
        })
        .collect();
    let total: u128 = candidates_per_gen
        .iter()
        .map(|c| c.len() as u128)
        .product();
    budget.check_enumeration(total)?;

    let mut out = Vec::new();
    let mut stack: Vec<usize> = vec![0; candidates_per_gen.len()];
    'outer: loop {
        let images: Vec<GroupElement> = stack
            .iter()
            .zip(&candidates_per_gen)
            .map(|(&i, c)| c[i].clone())
            .collect();
        out.push(GroupHom {
            source: source.clone(),
            target: target.clone(),
            images,
        });
        // odometer increment, last generator fastest
        let mut i = stack.len();
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            stack[i] += 1;
            if stack[i] < candidates_per_gen[i].len() {
                break;
            }
            stack[i] = 0;
            if i == 0 {
                break 'outer;
            }
        }
    }
    if candidates_per_gen.is_empty() {
        // trivial source: exactly the zero map, already pushed once above
        out.truncate(1);
    }
    Ok(out)
}

/// All automorphisms of a finite abelian group (exhaustive).
pub fn enumerate_automorphisms(group: &FinAbGroup, budget: &Budget) -> Result<Vec<GroupHom>> {
    Ok(enumerate_homs(group, group, budget)?
        .into_iter()
        .filter(|h| h.is_automorphism())
        .collect())
}

/// The restriction map `r : Â -> <f>^ ≅ Z/2` sending `chi` to `eval(chi, f)`.
/// `f` must have order 2.
pub fn restriction_map(group: &FinAbGroup, f: &GroupElement) -> Result<GroupHom> {
    if group.order_of(f) != 2 {
        return Err(Error::InvalidFermion(format!(
            "element {:?} has order {}, expected 2",
            f,
            group.order_of(f)
        )));
    }
    let dual = group.dual_group();
    let z2 = FinAbGroup::cyclic(2);
    let images = dual
        .generators()
        .iter()
        .map(|chi| {
            let v = group.eval(chi, f);
            let bit = v
                .as_z2()
                .expect("pairing with an order-2 element is {0, 1/2}-valued");
            GroupElement { coords: vec![bit] }
        })
        .collect();
    GroupHom::new(dual, z2, images)
}

/// A subgroup of `parent` generated by `gens`, presented by invariant
/// factors with an explicit inclusion and coordinate solver.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub parent: FinAbGroup,
    pub group: FinAbGroup,
    /// Images of the presentation's generators inside the parent.
    pub inclusion: Vec<GroupElement>,
    members: Vec<Option<Vec<u64>>>, // parent index -> subgroup coords
}

impl Subgroup {
    pub fn new(parent: &FinAbGroup, gens: &[GroupElement]) -> Subgroup {
        // Enumerate the subgroup by closure; then peel generators of maximal
        // order to get an invariant-factor presentation. Parents are small.
        let order = parent.order() as usize;
        let mut in_sub = vec![false; order];
        in_sub[parent.index_of(&parent.zero())] = true;
        let mut frontier = vec![parent.zero()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = parent.add(&x, g);
                let i = parent.index_of(&y);
                if !in_sub[i] {
                    in_sub[i] = true;
                    frontier.push(y);
                }
            }
        }
        let elems: Vec<GroupElement> = parent
            .elements()
            .into_iter()
            .filter(|e| in_sub[parent.index_of(e)])
            .collect();

        // Invariant factors by repeatedly splitting off a maximal-order cyclic
        // summand; fine at this scale.
        let mut factors_desc: Vec<u64> = Vec::new();
        let mut chosen: Vec<GroupElement> = Vec::new();
        let mut current: Vec<GroupElement> = elems.clone();
        while current.len() > 1 {
            let g = current
                .iter()
                .max_by_key(|e| parent.order_of(e))
                .unwrap()
                .clone();
            let n = parent.order_of(&g);
            factors_desc.push(n);
            chosen.push(g.clone());
            // quotient the current element list by <g>: keep one representative
            // per coset, realized by re-enumerating the span of remaining data.
            let mut cosets: Vec<GroupElement> = Vec::new();
            let mut seen = vec![false; order];
            for e in &current {
                // canonical coset representative: lexicographically least in e + <g>
                let mut best = e.clone();
                let mut cur = e.clone();
                for _ in 0..n {
                    cur = parent.add(&cur, &g);
                    if cur.coords < best.coords {
                        best = cur.clone();
                    }
                }
                let bi = parent.index_of(&best);
                if !seen[bi] {
                    seen[bi] = true;
                    cosets.push(best);
                }
            }
            current = cosets;
        }
        // `chosen` generate the subgroup with orders factors_desc (descending).
        // That peeling gives a direct-sum decomposition for finite abelian
        // groups (maximal-order element generates a direct summand).
        factors_desc.reverse();
        chosen.reverse();
        let group = FinAbGroup::new(factors_desc.clone()).unwrap_or_else(|_| FinAbGroup::trivial());

        // membership/coordinates table by exhaustive span
        let mut members: Vec<Option<Vec<u64>>> = vec![None; order];
        let rank = chosen.len();
        let mut coords = vec![0u64; rank];
        loop {
            let mut x = parent.zero();
            for (c, g) in coords.iter().zip(&chosen) {
                x = parent.add(&x, &parent.scale(*c as i64, g));
            }
            let i = parent.index_of(&x);
            if members[i].is_none() {
                members[i] = Some(coords.clone());
            }
            let mut i = rank;
            let done = loop {
                if i == 0 {
                    break true;
                }
                i -= 1;
                coords[i] += 1;
                if coords[i] < factors_desc[i] {
                    break false;
                }
                coords[i] = 0;
                if i == 0 {
                    break true;
                }
            };
            if done {
                break;
            }
        }
        Subgroup {
            parent: parent.clone(),
            group,
            inclusion: chosen,
            members,
        }
    }

    pub fn contains(&self, x: &GroupElement) -> bool {
        self.members[self.parent.index_of(x)].is_some()
    }

    /// Coordinates of a parent element in the subgroup presentation.
    pub fn coords_of(&self, x: &GroupElement) -> Option<GroupElement> {
        self.members[self.parent.index_of(x)]
            .clone()
            .map(|coords| GroupElement { coords })
    }

    pub fn include(&self, s: &GroupElement) -> GroupElement {
        let mut x = self.parent.zero();
        for (&c, g) in s.coords.iter().zip(&self.inclusion) {
            x = self.parent.add(&x, &self.parent.scale(c as i64, g));
        }
        x
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }
}

/// Quotient of a finite abelian group by a cyclic subgroup, with a chosen
/// set-theoretic section (lexicographically minimal preimages).
#[derive(Clone, Debug)]
pub struct CentralQuotient {
    pub tilde: FinAbGroup,
    pub z: GroupElement,
    pub quotient: FinAbGroup,
    proj_table: Vec<GroupElement>,    // tilde index -> quotient element
    section_table: Vec<GroupElement>, // quotient index -> tilde element
}

impl CentralQuotient {
    pub fn new(tilde: &FinAbGroup, z: &GroupElement) -> Result<CentralQuotient> {
        // Present Q = Z^r / (diag(factors) | z) via Smith normal form.
        let r = tilde.rank();
        let mut rel = IntMat::zeros(r, r + 1);
        for i in 0..r {
            rel.set(i, i, tilde.invariant_factors()[i] as i128);
            rel.set(i, r, z.coords[i] as i128);
        }
        let l0 = tilde.exponent();
        let snf = linalg::snf_mod(&rel, l0);
        // Q = Z^r / im(rel); new coords y = U x mod the cokernel factors.
        let mut q_factors: Vec<u64> = Vec::new();
        let mut kept: Vec<usize> = Vec::new();
        for i in 0..r {
            let f = snf.coker_factor(i);
            if f > 1 {
                q_factors.push(f);
                kept.push(i);
            }
        }
        let quotient = FinAbGroup::new(q_factors.clone())?;
        let project = |x: &GroupElement| -> GroupElement {
            let xv: Vec<i128> = x.coords.iter().map(|&c| c as i128).collect();
            let y = snf.u.mul_vec_mod(&xv, l0.max(1) as i128);
            let coords: Vec<u64> = kept
                .iter()
                .zip(&q_factors)
                .map(|(&i, &f)| y[i].rem_euclid(f as i128) as u64)
                .collect();
            GroupElement { coords }
        };
        let elems = tilde.elements();
        let proj_table: Vec<GroupElement> = elems.iter().map(|x| project(x)).collect();
        let mut section_table: Vec<Option<GroupElement>> =
            vec![None; quotient.order() as usize];
        for x in &elems {
            let q = quotient.index_of(&project(x));
            match &section_table[q] {
                Some(prev) if prev.coords <= x.coords => {}
                _ => section_table[q] = Some(x.clone()),
            }
        }
        Ok(CentralQuotient {
            tilde: tilde.clone(),
            z: z.clone(),
            quotient,
            proj_table,
            section_table: section_table.into_iter().map(|o| o.unwrap()).collect(),
        })
    }

    pub fn project(&self, x: &GroupElement) -> GroupElement {
        self.proj_table[self.tilde.index_of(x)].clone()
    }

    pub fn section(&self, q: &GroupElement) -> GroupElement {
        self.section_table[self.quotient.index_of(q)].clone()
    }
}
