//! Exact linear algebra over ℚ and over polynomial rings.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::poly::{Poly, Q};

pub type SparseVec<K> = BTreeMap<K, Q>;

pub fn sparse_axpy<K: Ord + Clone>(y: &mut SparseVec<K>, a: &Q, x: &SparseVec<K>) {
    if a.is_zero() {
        return;
    }
    for (k, v) in x {
        let e = y.entry(k.clone()).or_insert_with(Q::zero);
        *e += a * v;
        if e.is_zero() {
            y.remove(k);
        }
    }
}

/// Incremental row echelon form over ℚ with sparse rows keyed by any ordered
/// type. Each stored row is scaled so its smallest key has coefficient 1.
#[derive(Clone, Debug)]
pub struct Echelon<K: Ord + Clone> {
    rows: Vec<SparseVec<K>>,
    pivots: BTreeMap<K, usize>,
}

impl<K: Ord + Clone> Default for Echelon<K> {
    fn default() -> Self {
        Echelon { rows: Vec::new(), pivots: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> Echelon<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &SparseVec<K>) -> SparseVec<K> {
        let mut v = v.clone();
        let mut cursor: Option<K> = None;
        loop {
            let next = match &cursor {
                None => v.keys().find(|k| self.pivots.contains_key(*k)).cloned(),
                Some(c) => v
                    .range((std::ops::Bound::Excluded(c.clone()), std::ops::Bound::Unbounded))
                    .map(|(k, _)| k)
                    .find(|k| self.pivots.contains_key(*k))
                    .cloned(),
            };
            let Some(k) = next else { break };
            let c = v[&k].clone();
            let row = &self.rows[self.pivots[&k]];
            sparse_axpy(&mut v, &-c, row);
            cursor = Some(k);
        }
        v
    }

    pub fn contains(&self, v: &SparseVec<K>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span. Returns `true` when the rank grew.
    pub fn insert(&mut self, v: &SparseVec<K>) -> bool {
        let mut r = self.reduce(v);
        let Some((k, lead)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead.recip();
        for c in r.values_mut() {
            *c *= &inv;
        }
        self.pivots.insert(k, self.rows.len());
        self.rows.push(r);
        true
    }

    pub fn pivot_keys(&self) -> Vec<K> {
        self.pivots.keys().cloned().collect()
    }

    /// Canonical reduced row echelon basis, ordered by pivot.
    pub fn rref(&self) -> Vec<SparseVec<K>> {
        let order: Vec<(K, usize)> = self.pivots.iter().map(|(k, i)| (k.clone(), *i)).collect();
        let mut rows: Vec<SparseVec<K>> = order.iter().map(|(_, i)| self.rows[*i].clone()).collect();
        for idx in (0..rows.len()).rev() {
            let (pk, _) = &order[idx];
            let pivot_row = rows[idx].clone();
            for row in rows.iter_mut().take(idx) {
                if let Some(c) = row.get(pk).cloned() {
                    sparse_axpy(row, &-c, &pivot_row);
                }
            }
        }
        rows
    }
}

/// Basis of `{x : rows · x = 0}` for sparse rows over `0..ncols`.
pub fn sparse_kernel(rows: &[SparseVec<usize>], ncols: usize) -> Vec<SparseVec<usize>> {
    let mut ech = Echelon::new();
    for r in rows {
        ech.insert(r);
    }
    let rref = ech.rref();
    let pivot_of: Vec<usize> = rref.iter().map(|r| *r.keys().next().unwrap()).collect();
    let mut out = Vec::new();
    for f in 0..ncols {
        if pivot_of.contains(&f) {
            continue;
        }
        let mut v = SparseVec::new();
        v.insert(f, Q::one());
        for (row, p) in rref.iter().zip(&pivot_of) {
            if let Some(c) = row.get(&f) {
                v.insert(*p, -c.clone());
            }
        }
        out.push(v);
    }
    out
}

/// Dense rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Q>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows);
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &QMat) -> QMat {
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        QMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &Q) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new();
        for i in 0..self.rows {
            let row: SparseVec<usize> = (0..self.cols)
                .filter(|&j| !self[(i, j)].is_zero())
                .map(|j| (j, self[(i, j)].clone()))
                .collect();
            ech.insert(&row);
        }
        ech.rank()
    }

    pub fn det(&self) -> Q {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[(r, c)].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det *= &piv;
            for r in c + 1..n {
                let f = &a[(r, c)] / &piv;
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = &a[(c, k)] * &f;
                    a[(r, k)] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMat::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a[(r, c)].is_zero())?;
            a.swap_rows(p, c);
            inv.swap_rows(p, c);
            let piv = a[(c, c)].recip();
            for k in 0..n {
                a[(c, k)] *= &piv;
                inv[(c, k)] *= &piv;
            }
            for r in 0..n {
                if r == c || a[(r, c)].is_zero() {
                    continue;
                }
                let f = a[(r, c)].clone();
                for k in 0..n {
                    let v = &a[(c, k)] * &f;
                    a[(r, k)] -= v;
                    let w = &inv[(c, k)] * &f;
                    inv[(r, k)] -= w;
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    /// Pivots of symmetric Gaussian elimination without row exchanges, i.e.
    /// the `D` of an `LDLᵀ` factorization. Stops at the first zero pivot.
    pub fn ldl_pivots(&self) -> Vec<Q> {
        let n = self.rows;
        let mut a = self.clone();
        let mut out = Vec::with_capacity(n);
        for c in 0..n {
            let piv = a[(c, c)].clone();
            out.push(piv.clone());
            if piv.is_zero() {
                break;
            }
            for r in c + 1..n {
                let f = &a[(r, c)] / &piv;
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = &a[(c, k)] * &f;
                    a[(r, k)] -= v;
                }
            }
        }
        out
    }

    /// Exact positive-definiteness test for a symmetric matrix.
    pub fn is_positive_definite(&self) -> bool {
        self.is_symmetric() && {
            let p = self.ldl_pivots();
            p.len() == self.rows && p.iter().all(Signed::is_positive)
        }
    }

    /// Leading principal minors, each computed as an independent determinant.
    pub fn leading_minors(&self) -> Vec<Q> {
        (1..=self.rows)
            .map(|k| {
                let mut m = QMat::zeros(k, k);
                for i in 0..k {
                    for j in 0..k {
                        m[(i, j)] = self[(i, j)].clone();
                    }
                }
                m.det()
            })
            .collect()
    }

    /// A nonzero `v` with `vᵀ S v ≤ 0` for symmetric `S` that is not positive
    /// definite.
    pub fn non_pd_witness(&self) -> Option<Vec<Q>> {
        let n = self.rows;
        // Conjugate the failing pivot back through the elimination: solve with
        // the unit lower triangular factor.
        let mut a = self.clone();
        let mut l = QMat::identity(n);
        for c in 0..n {
            let piv = a[(c, c)].clone();
            if !piv.is_positive() {
                if piv.is_zero() {
                    // Any coupling in the remaining block gives a negative
                    // direction; otherwise e_c itself is isotropic.
                    if let Some(r) = (c + 1..n).find(|&r| !a[(r, c)].is_zero()) {
                        let arr = a[(r, r)].clone();
                        let arc = a[(r, c)].clone();
                        // y = t e_c + e_r with 2 t a_rc + a_rr < 0.
                        let t = if arc.is_positive() {
                            -(arr.abs() + Q::one()) / (&arc * Q::from_integer(2.into()))
                        } else {
                            (arr.abs() + Q::one()) / (-&arc * Q::from_integer(2.into()))
                        };
                        let mut y = vec![Q::zero(); n];
                        y[c] = t;
                        y[r] = Q::one();
                        return Some(back_solve_unit_upper(&l, y));
                    }
                }
                let mut y = vec![Q::zero(); n];
                y[c] = Q::one();
                return Some(back_solve_unit_upper(&l, y));
            }
            for r in c + 1..n {
                let f = &a[(r, c)] / &piv;
                if f.is_zero() {
                    continue;
                }
                for k in c..n {
                    let v = &a[(c, k)] * &f;
                    a[(r, k)] -= v;
                }
                for k in 0..n {
                    let v = &l[(c, k)] * &f;
                    l[(r, k)] -= v;
                }
            }
        }
        None
    }

    pub fn quadratic_form(&self, v: &[Q]) -> Q {
        let mut acc = Q::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if !self[(i, j)].is_zero() {
                    acc += &self[(i, j)] * &v[i] * &v[j];
                }
            }
        }
        acc
    }
}

/// Given the row operations `L` (so that `L A Lᵀ` is the partially reduced
/// matrix), returns `x = Lᵀ y`, the vector whose form value equals that of `y`
/// in the reduced coordinates.
fn back_solve_unit_upper(l: &QMat, y: Vec<Q>) -> Vec<Q> {
    let n = l.rows;
    (0..n)
        .map(|j| (0..n).map(|i| &l[(i, j)] * &y[i]).sum())
        .collect()
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

/// Sparse matrix with polynomial entries.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: BTreeMap<(usize, usize), Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }

    pub fn from_dense(rows: Vec<Vec<Poly>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = PolyMatrix::zeros(r, c);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, p) in row.into_iter().enumerate() {
                m.set(i, j, p);
            }
        }
        m
    }

    pub fn from_qmat(a: &QMat) -> Self {
        let mut m = PolyMatrix::zeros(a.rows, a.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                m.set(i, j, Poly::constant(a[(i, j)].clone()));
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Poly {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn get_ref(&self, i: usize, j: usize) -> Option<&Poly> {
        self.entries.get(&(i, j))
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        debug_assert!(i < self.rows && j < self.cols);
        if p.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), p);
        }
    }

    pub fn add_to(&mut self, i: usize, j: usize, p: &Poly) {
        if p.is_zero() {
            return;
        }
        let e = self.entries.entry((i, j)).or_default();
        *e += p;
        if e.is_zero() {
            self.entries.remove(&(i, j));
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Poly)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.entries.values().all(Poly::is_constant)
    }

    pub fn to_dense(&self) -> Vec<Vec<Poly>> {
        let mut out = vec![vec![Poly::zero(); self.cols]; self.rows];
        for ((i, j), p) in &self.entries {
            out[*i][*j] = p.clone();
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Poly) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.rows, self.cols);
        for ((i, j), p) in &self.entries {
            out.set(*i, *j, f(p));
        }
        out
    }

    pub fn scale(&self, f: &Poly) -> PolyMatrix {
        if f.is_zero() {
            return PolyMatrix::zeros(self.rows, self.cols);
        }
        self.map(|p| p * f)
    }

    pub fn neg(&self) -> PolyMatrix {
        self.map(|p| -p)
    }

    pub fn add_assign(&mut self, other: &PolyMatrix) {
        for ((i, j), p) in &other.entries {
            self.add_to(*i, *j, p);
        }
    }

    pub fn add_scaled(&mut self, f: &Poly, other: &PolyMatrix) {
        if f.is_zero() {
            return;
        }
        for ((i, j), p) in &other.entries {
            self.add_to(*i, *j, &(f * p));
        }
    }

    pub fn add(&self, other: &PolyMatrix) -> PolyMatrix {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &PolyMatrix) -> PolyMatrix {
        let mut out = self.clone();
        for ((i, j), p) in &other.entries {
            out.add_to(*i, *j, &-p);
        }
        out
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_row: BTreeMap<usize, Vec<(usize, &Poly)>> = BTreeMap::new();
        for ((k, j), p) in &other.entries {
            by_row.entry(*k).or_default().push((*j, p));
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for ((i, k), a) in &self.entries {
            if let Some(row) = by_row.get(k) {
                for (j, b) in row {
                    out.add_to(*i, *j, &(a * *b));
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &PolyMatrix) -> PolyMatrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.cols, self.rows);
        for ((i, j), p) in &self.entries {
            out.set(*j, *i, p.clone());
        }
        out
    }

    pub fn trace(&self) -> Poly {
        let mut acc = Poly::zero();
        for ((i, j), p) in &self.entries {
            if i == j {
                acc += p;
            }
        }
        acc
    }

    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.rows];
        for ((i, j), p) in &self.entries {
            if !v[*j].is_zero() {
                out[*i] += &(p * &v[*j]);
            }
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> QMat {
        let mut out = QMat::zeros(self.rows, self.cols);
        for ((i, j), p) in &self.entries {
            out[(*i, *j)] = p.eval(point);
        }
        out
    }

    pub fn eval_sparse(&self, point: &[Q]) -> SparseVec<(usize, usize)> {
        let mut out = SparseVec::new();
        for ((i, j), p) in &self.entries {
            let v = p.eval(point);
            if !v.is_zero() {
                out.insert((*i, *j), v);
            }
        }
        out
    }

    pub fn eval_f64(&self, point: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows * self.cols];
        for ((i, j), p) in &self.entries {
            out[i * self.cols + j] = p.eval_f64(point);
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Poly {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.to_dense();
        let mut sign = Poly::one();
        let mut prev = Poly::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r][k].is_zero()) else {
                    return Poly::zero();
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
                }
                a[i][k] = Poly::zero();
            }
            prev = a[k][k].clone();
        }
        &sign * &a[n - 1][n - 1].clone()
    }

    /// Rank over the field of rational functions.
    pub fn generic_rank(&self) -> usize {
        let mut a = self.to_dense();
        let (rows, cols) = (self.rows, self.cols);
        let mut prev = Poly::one();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
            a.swap(r, p);
            for i in r + 1..rows {
                if a[i][c].is_zero() {
                    for j in c + 1..cols {
                        let num = &a[i][j] * &a[r][c];
                        a[i][j] = num.div_exact(&prev).unwrap_or(num);
                    }
                    continue;
                }
                for j in c + 1..cols {
                    let num = &(&a[i][j] * &a[r][c]) - &(&a[i][c] * &a[r][j]);
                    a[i][j] = num.div_exact(&prev).unwrap_or(num);
                }
                a[i][c] = Poly::zero();
            }
            prev = a[r][c].clone();
            r += 1;
        }
        r
    }

    /// Inverse with polynomial entries, `None` when it does not exist.
    pub fn inverse(&self) -> Option<PolyMatrix> {
        assert_eq!(self.rows, self.cols);
        if self.is_constant() {
            let q = self.eval(&[]);
            return q.inverse().map(|m| PolyMatrix::from_qmat(&m));
        }
        if let Some(inv) = self.inverse_constant_pivots() {
            return Some(inv);
        }
        let det = self.det();
        let d = det.as_constant()?;
        if d.is_zero() {
            return None;
        }
        let n = self.rows;
        let inv_d = d.recip();
        let mut out = PolyMatrix::zeros(n, n);
        let dense = self.to_dense();
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<Poly>> = (0..n)
                    .filter(|&r| r != j)
                    .map(|r| (0..n).filter(|&c| c != i).map(|c| dense[r][c].clone()).collect())
                    .collect();
                let m = PolyMatrix::from_dense(minor);
                let cof = if n == 1 { Poly::one() } else { m.det() };
                let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                out.set(i, j, cof.scale(&inv_d));
            }
        }
        Some(out)
    }

    /// Gauss–Jordan restricted to nonzero constant pivots, which keeps every
    /// intermediate entry polynomial.
    fn inverse_constant_pivots(&self) -> Option<PolyMatrix> {
        let n = self.rows;
        let mut a = self.to_dense();
        let mut inv = PolyMatrix::identity(n).to_dense();
        let mut used = vec![false; n];
        let mut pivot_row_of_col = vec![usize::MAX; n];
        for _ in 0..n {
            let mut found = None;
            'search: for c in 0..n {
                if pivot_row_of_col[c] != usize::MAX {
                    continue;
                }
                for r in 0..n {
                    if used[r] {
                        continue;
                    }
                    if let Some(v) = a[r][c].as_constant() {
                        if !v.is_zero() {
                            found = Some((r, c, v));
                            break 'search;
                        }
                    }
                }
            }
            let (r, c, v) = found?;
            used[r] = true;
            pivot_row_of_col[c] = r;
            let s = v.recip();
            for k in 0..n {
                a[r][k] = a[r][k].scale(&s);
                inv[r][k] = inv[r][k].scale(&s);
            }
            for i in 0..n {
                if i == r || a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].clone();
                for k in 0..n {
                    let t = &f * &a[r][k];
                    a[i][k] -= &t;
                    let t = &f * &inv[r][k];
                    inv[i][k] -= &t;
                }
            }
        }
        let mut out = PolyMatrix::zeros(n, n);
        for c in 0..n {
            let r = pivot_row_of_col[c];
            for k in 0..n {
                out.set(c, k, inv[r][k].clone());
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qr};

    #[test]
    fn echelon_rank_and_rref() {
        let mut e: Echelon<usize> = Echelon::new();
        let v = |xs: &[(usize, i64)]| xs.iter().map(|(k, c)| (*k, q(*c))).collect::<SparseVec<_>>();
        assert!(e.insert(&v(&[(0, 2), (1, 4)])));
        assert!(e.insert(&v(&[(1, 1), (2, 1)])));
        assert!(!e.insert(&v(&[(0, 1), (1, 3), (2, 1)])));
        assert_eq!(e.rank(), 2);
        let r = e.rref();
        assert_eq!(r[0], v(&[(0, 1), (2, -2)]));
        assert_eq!(r[1], v(&[(1, 1), (2, 1)]));
    }

    #[test]
    fn kernel_basis() {
        let rows = vec![[(0usize, q(1)), (1, q(1))].into_iter().collect::<SparseVec<_>>()];
        let k = sparse_kernel(&rows, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            let s: Q = rows[0].iter().map(|(i, c)| c * v.get(i).cloned().unwrap_or_default()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn dense_det_inverse_pd() {
        let m = QMat::from_rows(vec![vec![q(2), q(1)], vec![q(1), q(2)]]);
        assert_eq!(m.det(), q(3));
        assert_eq!(m.mul(&m.inverse().unwrap()), QMat::identity(2));
        assert!(m.is_positive_definite());
        assert_eq!(m.leading_minors(), vec![q(2), q(3)]);
        let s = QMat::from_rows(vec![vec![q(1), q(2)], vec![q(2), q(1)]]);
        assert!(!s.is_positive_definite());
        let w = s.non_pd_witness().unwrap();
        assert!(s.quadratic_form(&w) <= Q::zero());
        let z = QMat::from_rows(vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
        let w = z.non_pd_witness().unwrap();
        assert!(z.quadratic_form(&w) <= Q::zero());
        assert!(w.iter().any(|x| !x.is_zero()));
        let h = QMat::from_rows(vec![vec![qr(1, 2), q(0)], vec![q(0), q(0)]]);
        assert!(!h.is_positive_definite());
    }

    #[test]
    fn poly_matrix_inverse() {
        let names: Vec<String> = vec!["x".into(), "y".into()];
        let p = |s: &str| Poly::parse(s, &names).unwrap();
        let m = PolyMatrix::from_dense(vec![
            vec![p("1"), p("0"), p("0")],
            vec![p("x"), p("1"), p("0")],
            vec![p("x*y"), p("y^2"), p("1")],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), PolyMatrix::identity(3));
        let m2 = PolyMatrix::from_dense(vec![vec![p("x"), p("1")], vec![p("x - 1"), p("1")]]);
        let inv2 = m2.inverse().unwrap();
        assert_eq!(m2.mul(&inv2), PolyMatrix::identity(2));
        let bad = PolyMatrix::from_dense(vec![vec![p("x"), p("0")], vec![p("0"), p("1")]]);
        assert!(bad.inverse().is_none());
        assert_eq!(bad.generic_rank(), 2);
        let sing = PolyMatrix::from_dense(vec![vec![p("x"), p("y")], vec![p("x^2"), p("x*y")]]);
        assert_eq!(sing.generic_rank(), 1);
        assert!(sing.det().is_zero());
    }
}
