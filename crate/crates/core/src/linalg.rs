//! Exact linear algebra for finite abelian groups. Every lattice handled
//! here contains the lattice of coordinate moduli, so all eliminations run
//! over Z/L for a common modulus L: entries stay machine-sized with no
//! coefficient growth. The pieces are a Smith-style diagonalization over
//! Z/L with tracked transforms, a streamed kernel of row conditions, image
//! orders by p-adic sifting, and finite quotient presentations.

use crate::Result;
use std::collections::BTreeMap;

#[derive(Clone, PartialEq, Eq)]
pub struct IntMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<i128>,
}

impl std::fmt::Debug for IntMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IntMat {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows.min(12) {
            let row: Vec<i128> = (0..self.cols.min(16)).map(|j| self.get(i, j)).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl IntMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMat {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMat::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] += v;
    }

    pub fn mul_vec_mod(&self, x: &[i128], l: i128) -> Vec<i128> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = 0i128;
                for j in 0..self.cols {
                    let v = self.get(i, j);
                    if v != 0 && x[j] != 0 {
                        acc = (acc + v * x[j]).rem_euclid(l);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// rows (a, b) <- (x ra + y rb, z ra + w rb) mod l
    fn combine_rows_mod(&mut self, a: usize, b: usize, x: i128, y: i128, z: i128, w: i128, l: i128) {
        for c in 0..self.cols {
            let va = self.get(a, c);
            let vb = self.get(b, c);
            self.set(a, c, (x * va + y * vb).rem_euclid(l));
            self.set(b, c, (z * va + w * vb).rem_euclid(l));
        }
    }

    /// cols (a, b) <- (x ca + y cb, z ca + w cb) mod l
    fn combine_cols_mod(&mut self, a: usize, b: usize, x: i128, y: i128, z: i128, w: i128, l: i128) {
        for r in 0..self.rows {
            let va = self.get(r, a);
            let vb = self.get(r, b);
            self.set(r, a, (x * va + y * vb).rem_euclid(l));
            self.set(r, b, (z * va + w * vb).rem_euclid(l));
        }
    }

    /// col_a, col_b <- (x*col_a + y*col_b, z*col_a + w*col_b), plain integers.
    fn combine_cols(&mut self, a: usize, b: usize, x: i128, y: i128, z: i128, w: i128) {
        for r in 0..self.rows {
            let va = self.get(r, a);
            let vb = self.get(r, b);
            self.set(r, a, x * va + y * vb);
            self.set(r, b, z * va + w * vb);
        }
    }

    fn scale_col(&mut self, j: usize, s: i128) {
        for r in 0..self.rows {
            let v = self.get(r, j);
            self.set(r, j, v.checked_mul(s).expect("overflow"));
        }
    }
}

pub fn gcd_i(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn extgcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = extgcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

fn inv_mod(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let (g, x, _) = extgcd(a.rem_euclid(m), m);
    debug_assert_eq!(g, 1, "inverse of non-unit");
    x.rem_euclid(m)
}

/// Diagonalization `U A V = D` over Z/L with transforms invertible mod L.
/// The diagonal is normalized so that `gcd(d_1, L) | gcd(d_2, L) | ...`.
pub struct ModSnf {
    pub l: i128,
    pub d: Vec<i128>,
    pub u: IntMat,
    pub u_inv: IntMat,
    pub v: IntMat,
    pub rows: usize,
    pub cols: usize,
}

pub fn snf_mod(a: &IntMat, l: u64) -> ModSnf {
    let l = l.max(1) as i128;
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    for i in 0..m {
        for j in 0..n {
            s.set(i, j, s.get(i, j).rem_euclid(l));
        }
    }
    let mut u = IntMat::identity(m);
    let mut u_inv = IntMat::identity(m);
    let mut v = IntMat::identity(n);

    let rank = m.min(n);
    for t in 0..rank {
        // pivot with minimal gcd(entry, L)
        let mut pivot: Option<(usize, usize, i128)> = None;
        for i in t..m {
            for j in t..n {
                let e = s.get(i, j);
                if e != 0 {
                    let g = gcd_i(e, l);
                    match pivot {
                        Some((_, _, pg)) if pg <= g => {}
                        _ => pivot = Some((i, j, g)),
                    }
                }
            }
        }
        let Some((pi, pj, _)) = pivot else { break };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            for i in t + 1..m {
                let e = s.get(i, t);
                if e == 0 {
                    continue;
                }
                let p = s.get(t, t);
                // pure elimination when the pivot divides the entry keeps
                // the pivot row intact; otherwise shrink the pivot by a gcd
                // combine (bounded by the divisor chain of L)
                let (g, x, y) = if e % p == 0 {
                    (p, 1, 0)
                } else {
                    extgcd(p, e)
                };
                let (pa, pb) = (p / g, e / g);
                s.combine_rows_mod(t, i, x, y, -pb, pa, l);
                u.combine_rows_mod(t, i, x, y, -pb, pa, l);
                // u_inv <- u_inv * M^{-1}, M = [[x, y], [-pb, pa]], det 1
                u_inv.combine_cols_mod(t, i, pa, pb, -y, x, l);
            }
            for j in t + 1..n {
                let e = s.get(t, j);
                if e == 0 {
                    continue;
                }
                let p = s.get(t, t);
                let (g, x, y) = if e % p == 0 {
                    (p, 1, 0)
                } else {
                    extgcd(p, e)
                };
                let (pa, pb) = (p / g, e / g);
                s.combine_cols_mod(t, j, x, y, -pb, pa, l);
                v.combine_cols_mod(t, j, x, y, -pb, pa, l);
            }
            let col_clean = (t + 1..m).all(|i| s.get(i, t) == 0);
            let row_clean = (t + 1..n).all(|j| s.get(t, j) == 0);
            if col_clean && row_clean {
                break;
            }
        }
    }
    let mut snf = ModSnf {
        l,
        d: (0..rank).map(|i| s.get(i, i)).collect(),
        u,
        u_inv,
        v,
        rows: m,
        cols: n,
    };
    // enforce the divisibility chain on gcd(d_i, L)
    loop {
        let mut fixed = true;
        for i in 0..rank {
            for j in i + 1..rank {
                let norm = |d: i128| {
                    let g = gcd_i(d, l);
                    if g == 0 {
                        l
                    } else {
                        g
                    }
                };
                if norm(snf.d[j]) % norm(snf.d[i]) != 0 {
                    snf.fix_pair(i, j);
                    fixed = false;
                }
            }
        }
        if fixed {
            break;
        }
    }
    snf
}

impl ModSnf {
    /// 2x2 chain fix on diagonal entries (i, j): afterwards
    /// gcd(d_i, L) | gcd(d_j, L), with transforms updated.
    fn fix_pair(&mut self, i: usize, j: usize) {
        let l = self.l;
        let (di, dj) = (self.d[i], self.d[j]);
        // col_i += col_j: the virtual diagonal matrix gets (j, i) = dj
        self.v.combine_cols_mod(i, j, 1, 1, 0, 1, l);
        // row combine (i, j) clearing the new (j, i)
        let (g, x, y) = extgcd(di, dj);
        let (pa, pb) = (di / g, dj / g);
        self.u.combine_rows_mod(i, j, x, y, -pb, pa, l);
        self.u_inv.combine_cols_mod(i, j, pa, pb, -y, x, l);
        // matrix now: (i,i) = g, (i,j) = y dj, (j,j) = pa dj
        // col_j -= (y dj / g) col_i
        let q = (y * dj) / g;
        self.v.combine_cols_mod(i, j, 1, 0, -q, 1, l);
        self.d[i] = g.rem_euclid(l);
        self.d[j] = (pa * dj).rem_euclid(l);
    }

    /// Invariant factor of coordinate i of the cokernel: gcd(d_i, L)
    /// (coordinates beyond the diagonal are free mod L).
    pub fn coker_factor(&self, i: usize) -> u64 {
        if i >= self.d.len() {
            return self.l as u64;
        }
        let g = gcd_i(self.d[i], self.l);
        (if g == 0 { self.l } else { g }) as u64
    }

    /// Solve `A x ≡ rhs (mod L)`; x is reduced mod L.
    pub fn solve(&self, rhs: &[i128]) -> Option<Vec<i128>> {
        assert_eq!(rhs.len(), self.rows);
        let c = self.u.mul_vec_mod(rhs, self.l);
        let mut z = vec![0i128; self.cols];
        for (i, &ci) in c.iter().enumerate() {
            let di = if i < self.d.len() { self.d[i] } else { 0 };
            if di.rem_euclid(self.l) == 0 {
                if ci.rem_euclid(self.l) != 0 {
                    return None;
                }
            } else {
                let g = gcd_i(di, self.l);
                if ci.rem_euclid(g) != 0 {
                    return None;
                }
                let lred = self.l / g;
                let zi = ((ci / g).rem_euclid(lred) * inv_mod((di / g).rem_euclid(lred), lred))
                    .rem_euclid(lred);
                z[i] = zi;
            }
        }
        Some(self.v.mul_vec_mod(&z, self.l))
    }
}

fn lcm_u(a: u64, b: u64) -> u64 {
    let g = {
        let (mut a, mut b) = (a, b);
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    };
    if g == 0 {
        0
    } else {
        a / g * b
    }
}

/// Solve `A x ≡ rhs (mod row_moduli)`, x reduced mod `col_moduli`. Solutions
/// are sought modulo the lcm of all moduli, which is exact because every row
/// modulus divides it.
pub fn solve_mod(
    a: &IntMat,
    rhs: &[i128],
    row_moduli: &[u64],
    col_moduli: &[u64],
) -> Option<Vec<i128>> {
    assert_eq!(a.rows, rhs.len());
    assert_eq!(a.rows, row_moduli.len());
    assert_eq!(a.cols, col_moduli.len());
    let mut l: u64 = 1;
    for &w in row_moduli.iter().chain(col_moduli.iter()) {
        l = lcm_u(l, w.max(1));
    }
    if l == 1 {
        return Some(vec![0; a.cols]);
    }
    let li = l as i128;
    let mut scaled = IntMat::zeros(a.rows, a.cols);
    let mut srhs = vec![0i128; a.rows];
    for i in 0..a.rows {
        let w = row_moduli[i].max(1);
        let f = (l / w) as i128;
        for j in 0..a.cols {
            scaled.set(i, j, (a.get(i, j).rem_euclid(li) * f).rem_euclid(li));
        }
        srhs[i] = (rhs[i].rem_euclid(li) * f).rem_euclid(li);
    }
    let snf = snf_mod(&scaled, l);
    let x = snf.solve(&srhs)?;
    Some(
        x.iter()
            .zip(col_moduli)
            .map(|(&v, &m)| if m <= 1 { 0 } else { v.rem_euclid(m as i128) })
            .collect(),
    )
}

/// Elementary divisors (Smith diagonal, no transforms) of a small integer
/// matrix. Intended for matrices with few columns and small entries.
pub fn elementary_divisors(a: &IntMat) -> Vec<u64> {
    let (m, n) = (a.rows, a.cols);
    let mut s = a.clone();
    let mut out = Vec::new();
    for t in 0..m.min(n) {
        loop {
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let v = s.get(i, j);
                    if v != 0 {
                        match pivot {
                            Some((pi, pj)) if s.get(pi, pj).abs() <= v.abs() => {}
                            _ => pivot = Some((i, j)),
                        }
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                return out;
            };
            s.swap_rows(t, pi);
            s.swap_cols(t, pj);
            let p = s.get(t, t);
            let mut clean = true;
            for i in t + 1..m {
                let q = s.get(i, t).div_euclid(p);
                for c in t..n {
                    let v = s.get(i, c) - q * s.get(t, c);
                    s.set(i, c, v);
                }
                if s.get(i, t) != 0 {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = s.get(t, j).div_euclid(p);
                for r in t..m {
                    let v = s.get(r, j) - q * s.get(r, t);
                    s.set(r, j, v);
                }
                if s.get(t, j) != 0 {
                    clean = false;
                }
            }
            if clean {
                out.push(p.unsigned_abs() as u64);
                break;
            }
        }
    }
    out
}

/// A sparse row / column: sorted `(index, coefficient)` pairs.
pub type SparseVec = Vec<(usize, i64)>;

/// Generators of the solution lattice `{x in prod Z/u_j : row · x ≡ 0
/// (mod w_row) for every row}`, kept entry-reduced modulo `u`. The lattice
/// is spanned by these columns TOGETHER with `diag(u)`.
pub struct KernelBasis {
    pub basis: IntMat,
    /// [Z^n : lattice]; saturates at u128::MAX.
    #[cfg_attr(not(test), allow(dead_code))]
    pub index: u128,
}

pub fn streaming_kernel<I>(rows: I, ncols: usize, col_moduli: &[u64]) -> KernelBasis
where
    I: IntoIterator<Item = (SparseVec, u64)>,
{
    assert_eq!(col_moduli.len(), ncols);
    let mut k = IntMat::identity(ncols);
    let mut index: u128 = 1;
    for (row, w) in rows {
        if w <= 1 {
            continue;
        }
        let wi = w as i128;
        // c = row · K  (mod w)
        let mut c = vec![0i128; ncols];
        for &(j, coef) in &row {
            let coef = coef as i128;
            if coef == 0 {
                continue;
            }
            for col in 0..ncols {
                let v = k.get(j, col);
                if v != 0 {
                    c[col] = (c[col] + coef * v).rem_euclid(wi);
                }
            }
        }
        let idxs: Vec<usize> = (0..ncols).filter(|&j| c[j] != 0).collect();
        if idxs.is_empty() {
            continue;
        }
        let p = idxs[0];
        for &i in &idxs[1..] {
            let (g, x, y) = extgcd(c[p], c[i]);
            k.combine_cols(p, i, x, y, -(c[i] / g), c[p] / g);
            c[p] = g;
            c[i] = 0;
        }
        let g = c[p].rem_euclid(wi);
        if g != 0 {
            let scale = wi / gcd_i(g, wi);
            if scale > 1 {
                k.scale_col(p, scale);
                index = index.saturating_mul(scale as u128);
            }
        }
        // reduce entries mod the column moduli; the moduli lattice is part
        // of the solution lattice, so this is a legal change of generators
        for j in 0..ncols {
            let m = col_moduli[j] as i128;
            if m <= 1 {
                continue;
            }
            for col in 0..ncols {
                let v = k.get(j, col);
                if v < 0 || v >= m {
                    k.set(j, col, v.rem_euclid(m));
                }
            }
        }
    }
    KernelBasis { basis: k, index }
}

/// Order of the subgroup `{x in prod Z/u_j : A x ≡ 0}` given the rows of `A`.
#[cfg(test)]
pub fn kernel_order<I>(rows: I, ncols: usize, col_moduli: &[u64]) -> u128
where
    I: IntoIterator<Item = (SparseVec, u64)>,
{
    let kb = streaming_kernel(rows, ncols, col_moduli);
    let total: u128 = col_moduli.iter().map(|&u| u.max(1) as u128).product();
    total / kb.index
}

fn prime_factors(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut n = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn val_p(mut x: u64, p: u64) -> u32 {
    let mut v = 0;
    while x != 0 && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// p-adic sifting: order of the subgroup generated by sparse columns inside
/// `prod_r Z/p^{e_r}`. Pivots are keyed by leading row; storing a pivot also
/// enqueues its order-killed shadow so the span bookkeeping stays exact.
struct PSift {
    p: u64,
    e: Vec<u32>,
    pivot_at: Vec<u32>, // row -> pivot slot + 1, 0 = none
    pivots: Vec<SparseVec>,
    order_exp: u64,
}

const NO_PIVOT: u32 = 0;

impl PSift {
    fn new(p: u64, e: Vec<u32>) -> Self {
        let rows = e.len();
        PSift {
            p,
            e,
            pivot_at: vec![NO_PIVOT; rows],
            pivots: Vec::new(),
            order_exp: 0,
        }
    }

    #[inline]
    fn modulus(&self, row: usize) -> i64 {
        (self.p as i64).pow(self.e[row])
    }

    fn normalize(&self, col: &mut SparseVec) {
        col.retain_mut(|(row, v)| {
            if self.e[*row] == 0 {
                return false;
            }
            let m = self.modulus(*row);
            *v = v.rem_euclid(m);
            *v != 0
        });
    }

    fn shadow(&self, col: &SparseVec, killer: i64) -> SparseVec {
        let mut out = Vec::with_capacity(col.len());
        for &(row, v) in col {
            let m = self.modulus(row) as i128;
            let w = (v as i128 * killer as i128).rem_euclid(m) as i64;
            if w != 0 {
                out.push((row, w));
            }
        }
        out
    }

    /// col -= c * pivot, entries reduced per-row; both inputs sorted.
    fn eliminate(&self, col: &SparseVec, pivot: &SparseVec, c: i128) -> SparseVec {
        let mut out = Vec::with_capacity(col.len() + pivot.len());
        let (mut i, mut j) = (0usize, 0usize);
        while i < col.len() || j < pivot.len() {
            let take_col = j >= pivot.len()
                || (i < col.len() && col[i].0 < pivot[j].0);
            let take_piv = i >= col.len()
                || (j < pivot.len() && pivot[j].0 < col[i].0);
            if take_col {
                out.push(col[i]);
                i += 1;
            } else if take_piv {
                let (row, v) = pivot[j];
                let m = self.modulus(row) as i128;
                let w = (-(c * v as i128)).rem_euclid(m) as i64;
                if w != 0 {
                    out.push((row, w));
                }
                j += 1;
            } else {
                let (row, v0) = col[i];
                let v1 = pivot[j].1;
                let m = self.modulus(row) as i128;
                let w = (v0 as i128 - c * v1 as i128).rem_euclid(m) as i64;
                if w != 0 {
                    out.push((row, w));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }

    fn sift(&mut self, col: SparseVec) {
        let mut work = vec![col];
        while let Some(mut col) = work.pop() {
            self.normalize(&mut col);
            loop {
                let Some(&(r, a)) = col.first() else { break };
                let er = self.e[r];
                let va = val_p(a as u64, self.p);
                debug_assert!(va < er);
                let slot = self.pivot_at[r];
                if slot == NO_PIVOT {
                    self.order_exp += (er - va) as u64;
                    if va + 1 < er || er - va < er {
                        let killer = (self.p as i64).pow(er - va);
                        let shadow = self.shadow(&col, killer);
                        if !shadow.is_empty() {
                            work.push(shadow);
                        }
                    }
                    self.pivots.push(col);
                    self.pivot_at[r] = self.pivots.len() as u32;
                    break;
                }
                let pidx = (slot - 1) as usize;
                let pa = self.pivots[pidx][0].1;
                let vp = val_p(pa as u64, self.p);
                if va < vp {
                    self.order_exp += (vp - va) as u64;
                    let old = std::mem::replace(&mut self.pivots[pidx], col);
                    let killer = (self.p as i64).pow(er - va);
                    let shadow = self.shadow(&self.pivots[pidx], killer);
                    if !shadow.is_empty() {
                        work.push(shadow);
                    }
                    col = old;
                    continue;
                }
                let m = self.modulus(r) as i128;
                let unit = (pa as i128) / (self.p as i128).pow(vp);
                let c = ((a as i128) / (self.p as i128).pow(vp)) * inv_mod(unit, m);
                col = self.eliminate(&col, &self.pivots[pidx], c.rem_euclid(m));
                debug_assert!(col.first().map(|&(row, _)| row > r).unwrap_or(true));
            }
        }
    }
}

/// Per-prime exponents of the order of the subgroup of `prod_r Z/w_r`
/// generated by the given sparse columns. When the p-part of the moduli is
/// uniform, the matrix is transposed first (the image order is invariant
/// and the smaller ambient sifts much faster).
pub fn image_order_exponents(cols: &[SparseVec], row_moduli: &[u64]) -> BTreeMap<u64, u64> {
    let mut primes: Vec<u64> = Vec::new();
    for &w in row_moduli {
        for (p, _) in prime_factors(w) {
            if !primes.contains(&p) {
                primes.push(p);
            }
        }
    }
    let mut out = BTreeMap::new();
    for p in primes {
        let e: Vec<u32> = row_moduli.iter().map(|&w| val_p(w, p)).collect();
        let active: Vec<u32> = e.iter().copied().filter(|&x| x > 0).collect();
        let uniform = active.windows(2).all(|w| w[0] == w[1]);
        let order_exp = if uniform && !active.is_empty() && row_moduli.len() > cols.len() {
            // transpose: columns become the rows of the original columns
            let mut t: Vec<SparseVec> = vec![Vec::new(); row_moduli.len()];
            for (j, col) in cols.iter().enumerate() {
                for &(r, v) in col {
                    t[r].push((j, v));
                }
            }
            t.retain(|c| !c.is_empty());
            t.sort_unstable();
            t.dedup();
            t.sort_by_key(|c| c.len());
            let et = vec![active[0]; cols.len()];
            let mut sift = PSift::new(p, et);
            for col in t {
                sift.sift(col);
            }
            sift.order_exp
        } else {
            let mut sorted: Vec<&SparseVec> = cols.iter().filter(|c| !c.is_empty()).collect();
            sorted.sort_by_key(|c| c.len());
            let mut sift = PSift::new(p, e);
            for col in sorted {
                sift.sift(col.clone());
            }
            sift.order_exp
        };
        out.insert(p, order_exp);
    }
    out
}

/// Order of the generated subgroup (for u128-sized ambients).
#[cfg(test)]
pub fn image_order(cols: &[SparseVec], row_moduli: &[u64]) -> u128 {
    image_order_exponents(cols, row_moduli)
        .into_iter()
        .fold(1u128, |acc, (p, e)| {
            acc.checked_mul((p as u128).pow(u32::try_from(e).expect("overflow")))
                .expect("order overflow")
        })
}

/// Per-prime exponents of `prod u_j`.
pub fn moduli_exponents(moduli: &[u64]) -> BTreeMap<u64, u64> {
    let mut out: BTreeMap<u64, u64> = BTreeMap::new();
    for &u in moduli {
        for (p, e) in prime_factors(u) {
            *out.entry(p).or_insert(0) += e as u64;
        }
    }
    out
}

/// The finite quotient `(span(lattice) + span(diag u)) / (span(sub) +
/// span(diag u))` inside `prod_j Z/u_j`: invariant factors, canonical
/// generators, class coordinates, and representatives.
pub struct QuotientData {
    n: usize,
    l0: u64,
    lattice: IntMat,
    col_moduli: Vec<u64>,
    qpres: ModSnf,
    /// Non-unit invariant factors of the quotient.
    pub factors: Vec<u64>,
    q_kept: Vec<usize>,
    /// Ambient-coordinate generators (entry-reduced), one per factor.
    pub generators: Vec<Vec<i128>>,
}

impl QuotientData {
    pub fn new(lattice: IntMat, sub_gens: &[Vec<i128>], col_moduli: &[u64]) -> Result<QuotientData> {
        let n = lattice.rows;
        let k = lattice.cols;
        assert_eq!(col_moduli.len(), n);
        let mut l0: u64 = 1;
        for &u in col_moduli {
            l0 = lcm_u(l0, u.max(1));
        }
        let l0i = l0.max(1) as i128;

        // P0 = Z^n / (sub + diag(u)), presented over Z/L0
        let mut rel = IntMat::zeros(n, sub_gens.len() + n);
        for (c, g) in sub_gens.iter().enumerate() {
            assert_eq!(g.len(), n);
            for i in 0..n {
                rel.set(i, c, g[i].rem_euclid(l0i));
            }
        }
        for (j, &u) in col_moduli.iter().enumerate() {
            rel.set(j, sub_gens.len() + j, u.max(1) as i128);
        }
        let p0 = snf_mod(&rel, l0);

        // the lattice's image in P0: condition rows over the P0 coordinates
        let mut c_rows: Vec<(SparseVec, u64)> = Vec::new();
        for i in 0..n {
            let f = p0.coker_factor(i);
            if f <= 1 {
                continue;
            }
            let fi = f as i128;
            let mut row: SparseVec = Vec::new();
            for j in 0..k {
                let mut acc = 0i128;
                for r in 0..n {
                    let uv = p0.u.get(i, r);
                    let kv = lattice.get(r, j);
                    if uv != 0 && kv != 0 {
                        acc = (acc + uv * kv).rem_euclid(l0i);
                    }
                }
                let acc = acc.rem_euclid(fi);
                if acc != 0 {
                    row.push((j, acc as i64));
                }
            }
            c_rows.push((row, f));
        }

        // Q = Z^k / {z : (lattice z) in sub-span}: stream the relation
        // lattice out of the condition rows, then present over Z/L0.
        let rel_basis = streaming_kernel(c_rows, k, &vec![l0; k]);
        let qpres = snf_mod(&rel_basis.basis, l0);
        let mut factors = Vec::new();
        let mut q_kept = Vec::new();
        for i in 0..k {
            let f = qpres.coker_factor(i);
            if f > 1 {
                factors.push(f);
                q_kept.push(i);
            }
        }

        // ambient generators: lattice * (U_Q^{-1} e_i), reduced mod u
        let mut generators = Vec::new();
        for &i in &q_kept {
            let col = qpres.u_inv.column(i);
            let mut amb = vec![0i128; n];
            for (r, a) in amb.iter_mut().enumerate() {
                let mut acc = 0i128;
                for j in 0..k {
                    let kv = lattice.get(r, j);
                    if kv != 0 && col[j] != 0 {
                        acc = (acc + kv * col[j]).rem_euclid(l0i);
                    }
                }
                *a = acc.rem_euclid(col_moduli[r].max(1) as i128);
            }
            generators.push(amb);
        }
        Ok(QuotientData {
            n,
            l0,
            lattice,
            col_moduli: col_moduli.to_vec(),
            qpres,
            factors,
            q_kept,
            generators,
        })
    }

    pub fn order(&self) -> u128 {
        self.factors.iter().map(|&f| f as u128).product()
    }

    /// Coordinates of an ambient vector's class; None if it lies outside the
    /// lattice.
    pub fn class_of(&self, x: &[i128]) -> Option<Vec<u64>> {
        assert_eq!(x.len(), self.n);
        // solve lattice * y ≡ x (mod u); any two solutions differ by a
        // relation, so the class coordinates are well defined
        let y = solve_mod(
            &self.lattice,
            x,
            &self.col_moduli,
            &vec![self.l0; self.lattice.cols],
        )?;
        let c = self.qpres.u.mul_vec_mod(&y, self.l0.max(1) as i128);
        let mut coords = Vec::with_capacity(self.q_kept.len());
        for (pos, &i) in self.q_kept.iter().enumerate() {
            coords.push(c[i].rem_euclid(self.factors[pos] as i128) as u64);
        }
        Some(coords)
    }

    /// Ambient representative of a class, entry-reduced.
    pub fn rep_of(&self, coords: &[u64]) -> Vec<i128> {
        assert_eq!(coords.len(), self.factors.len());
        let mut out = vec![0i128; self.n];
        for (c, g) in coords.iter().zip(&self.generators) {
            for i in 0..self.n {
                let u = self.col_moduli[i].max(1) as i128;
                out[i] = (out[i] + *c as i128 * g[i]).rem_euclid(u);
            }
        }
        out
    }

    /// All class-coordinate tuples, lexicographic.
    pub fn all_classes(&self) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for &f in &self.factors {
            let mut next = Vec::with_capacity(out.len() * f as usize);
            for prefix in &out {
                for v in 0..f {
                    let mut p = prefix.clone();
                    p.push(v);
                    next.push(p);
                }
            }
            out = next;
        }
        out
    }
}
