//! The horizontal holonomy algebra `𝔞(x)` by iterated covariant derivatives
//! of the modified curvature, its action on `Sym²V*`, and a numeric
//! parallel-transport oracle.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::connection::{modified_curvature, CurvatureRoute, VerticalConnection};
use crate::error::{Error, Result};
use crate::forms::GlForm;
use crate::frame::FrameModel;
use crate::linalg::{Echelon, PolyMatrix, QMat, SparseVec};
use crate::poly::{rational_to_f64, Monomial, Q};
use crate::selector::Selector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomyOptions {
    /// Maximal derivative order; `None` means `2n`.
    pub depth_bound: Option<usize>,
    pub stability_margin: usize,
}

impl Default for HolonomyOptions {
    fn default() -> Self {
        HolonomyOptions { depth_bound: None, stability_margin: 2 }
    }
}

/// Why the iteration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The ℚ-span of the curvature sections became closed under `∇_D`.
    Closed,
    /// The evaluated span filled all of `gl(V_x)`.
    Full,
    /// Rank unchanged for the stability margin and bracket-closed.
    Stable,
    /// The depth bound was reached first.
    DepthExceeded,
}

/// Sparse rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMat {
    pub rows: usize,
    pub cols: usize,
    pub entries: BTreeMap<(usize, usize), Q>,
}

impl SparseMat {
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> QMat {
        let mut m = QMat::zeros(self.rows, self.cols);
        for ((i, j), v) in &self.entries {
            m[(*i, *j)] = v.clone();
        }
        m
    }

    /// `M v` for a sparse vector indexed by column.
    pub fn apply(&self, v: &SparseVec<usize>) -> SparseVec<usize> {
        let mut out = SparseVec::new();
        for ((i, j), c) in &self.entries {
            if let Some(x) = v.get(j) {
                let e = out.entry(*i).or_insert_with(Q::zero);
                *e += c * x;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyAlgebra {
    pub base_point: Vec<Q>,
    pub nu: usize,
    /// Reduced echelon basis of `𝔞(x) ⊆ gl(V_x)`.
    pub basis: Vec<QMat>,
    pub depth_used: usize,
    pub stabilized: bool,
    pub stop_reason: StopReason,
    /// Independent polynomial sections examined.
    pub sections: usize,
    /// Elements the final bracket-closure pass had to add.
    pub closure_added: usize,
    pub sym2_basis: Vec<SparseMat>,
}

impl HolonomyAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Whether `m` lies in the span of the basis.
    pub fn contains(&self, m: &QMat) -> bool {
        let mut e = Echelon::new();
        for b in &self.basis {
            e.insert(&mat_key(b));
        }
        e.contains(&mat_key(m))
    }

    /// Every bracket of basis elements lies in the span.
    pub fn is_bracket_closed(&self) -> bool {
        let mut e = Echelon::new();
        for b in &self.basis {
            e.insert(&mat_key(b));
        }
        brackets_missing(&self.basis, &e).is_empty()
    }

    /// Equality of spans with another algebra on the same fiber.
    pub fn same_span(&self, other: &HolonomyAlgebra) -> bool {
        let mut e = Echelon::new();
        for b in &self.basis {
            e.insert(&mat_key(b));
        }
        self.dim() == other.dim() && other.basis.iter().all(|b| e.contains(&mat_key(b)))
    }
}

pub(crate) fn mat_key(m: &QMat) -> SparseVec<(usize, usize)> {
    let mut v = SparseVec::new();
    for i in 0..m.rows {
        for j in 0..m.cols {
            if !m[(i, j)].is_zero() {
                v.insert((i, j), m[(i, j)].clone());
            }
        }
    }
    v
}

fn key_mat(v: &SparseVec<(usize, usize)>, n: usize) -> QMat {
    let mut m = QMat::zeros(n, n);
    for ((i, j), c) in v {
        m[(*i, *j)] = c.clone();
    }
    m
}

fn poly_key(m: &PolyMatrix) -> SparseVec<(usize, usize, Monomial)> {
    let mut v = SparseVec::new();
    for ((i, j), p) in m.entries() {
        for (mono, c) in p.terms() {
            v.insert((*i, *j, mono.clone()), c.clone());
        }
    }
    v
}

fn commutator(a: &QMat, b: &QMat) -> QMat {
    let ab = a.mul(b);
    let ba = b.mul(a);
    ab.add(&ba.scale(&-Q::from_integer(1.into())))
}

fn brackets_missing(basis: &[QMat], span: &Echelon<(usize, usize)>) -> Vec<QMat> {
    let mut out = Vec::new();
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let c = commutator(&basis[i], &basis[j]);
            if !span.contains(&mat_key(&c)) {
                out.push(c);
            }
        }
    }
    out
}

/// `𝔞(x)` for the modified curvature of `∇` and `χ`.
pub fn ozeki_algebra(
    model: &FrameModel,
    conn: &VerticalConnection,
    sel: &Selector,
    route: CurvatureRoute,
    opts: &HolonomyOptions,
) -> Result<HolonomyAlgebra> {
    let rchi = modified_curvature(model, conn, sel, route)?;
    Ok(ozeki_from_curvature(model, conn, &rchi, opts))
}

/// Spans `∇_{E_{i₁}} ⋯ ∇_{E_{i_k}} R(E_a, E_b)|_x` over `D`-indices `i_*`.
pub fn ozeki_from_curvature(
    model: &FrameModel,
    conn: &VerticalConnection,
    curvature: &GlForm,
    opts: &HolonomyOptions,
) -> HolonomyAlgebra {
    let nu = conn.nu;
    let x = model.base_point.clone();
    let bound = opts.depth_bound.unwrap_or(2 * model.dim());
    let mut sections: Echelon<(usize, usize, Monomial)> = Echelon::new();
    let mut values: Echelon<(usize, usize)> = Echelon::new();
    let mut frontier: Vec<PolyMatrix> = Vec::new();
    let mut count = 0;
    for (_, m) in curvature.terms() {
        if sections.insert(&poly_key(m)) {
            values.insert(&m.eval_sparse(&x));
            frontier.push(m.clone());
            count += 1;
        }
    }
    let full = nu * nu;
    let mut depth = 0;
    let mut stable = 0;
    let stop = loop {
        if frontier.is_empty() {
            break StopReason::Closed;
        }
        if values.rank() == full {
            break StopReason::Full;
        }
        if depth >= bound {
            break StopReason::DepthExceeded;
        }
        let before = values.rank();
        let derived: Vec<PolyMatrix> = frontier
            .par_iter()
            .flat_map_iter(|s| model.d_indices.iter().map(move |&a| conn.gl_covariant(model, a, s)))
            .collect();
        frontier = Vec::new();
        for t in derived {
            if !t.is_zero() && sections.insert(&poly_key(&t)) {
                values.insert(&t.eval_sparse(&x));
                frontier.push(t);
                count += 1;
            }
        }
        depth += 1;
        if values.rank() == before {
            stable += 1;
        } else {
            stable = 0;
        }
        if stable >= opts.stability_margin {
            let basis: Vec<QMat> = values.rref().iter().map(|v| key_mat(v, nu)).collect();
            if brackets_missing(&basis, &values).is_empty() {
                break StopReason::Stable;
            }
        }
    };
    let mut added = 0;
    loop {
        let basis: Vec<QMat> = values.rref().iter().map(|v| key_mat(v, nu)).collect();
        let missing = brackets_missing(&basis, &values);
        if missing.is_empty() {
            break;
        }
        for m in missing {
            if values.insert(&mat_key(&m)) {
                added += 1;
            }
        }
    }
    let basis: Vec<QMat> = values.rref().iter().map(|v| key_mat(v, nu)).collect();
    let sym2_basis = basis.iter().map(sym2_action).collect();
    HolonomyAlgebra {
        base_point: x,
        nu,
        basis,
        depth_used: depth,
        stabilized: stop != StopReason::DepthExceeded,
        stop_reason: stop,
        sections: count,
        closure_added: added,
        sym2_basis,
    }
}

/// Position of `(i, j)`, `i ≤ j`, in the basis `e₁₁, e₁₂, …, e₁ν, e₂₂, …` of
/// `Sym²V*`.
pub fn sym2_index(nu: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * nu - i * i.saturating_sub(1) / 2 + j - i
}

pub fn sym2_dim(nu: usize) -> usize {
    nu * (nu + 1) / 2
}

/// Symmetric matrix with coordinates `g` in the `Sym²V*` basis.
pub fn sym2_to_matrix(nu: usize, g: &[Q]) -> QMat {
    let mut m = QMat::zeros(nu, nu);
    for i in 0..nu {
        for j in i..nu {
            let v = g[sym2_index(nu, i, j)].clone();
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}

pub fn matrix_to_sym2(m: &QMat) -> Vec<Q> {
    let nu = m.rows;
    let mut out = vec![Q::zero(); sym2_dim(nu)];
    for i in 0..nu {
        for j in i..nu {
            out[sym2_index(nu, i, j)] = m[(i, j)].clone();
        }
    }
    out
}

/// Matrix of `e ↦ −e(A·, ·) − e(·, A·)`, i.e. `G ↦ −(AᵀG + GA)`, on `Sym²V*`.
pub fn sym2_action(a: &QMat) -> SparseMat {
    let nu = a.rows;
    let dim = sym2_dim(nu);
    let mut entries: BTreeMap<(usize, usize), Q> = BTreeMap::new();
    let mut add = |row: usize, col: usize, v: &Q| {
        let e = entries.entry((row, col)).or_insert_with(Q::zero);
        *e -= v;
    };
    // (AᵀG + GA)_{pq} = Σ_s A_{sp} G_{sq} + Σ_s A_{sq} G_{sp}.
    for s in 0..nu {
        for t in 0..nu {
            let v = &a[(s, t)];
            if v.is_zero() {
                continue;
            }
            // A_{st} with t = p: contributes to rows (t, q) through G_{sq}.
            for q in 0..nu {
                let row = sym2_index(nu, t, q);
                add(row, sym2_index(nu, s, q), v);
                if t == q {
                    // Diagonal row (t, t) also receives the second sum with
                    // the same coefficient.
                    add(row, sym2_index(nu, s, t), v);
                }
            }
        }
    }
    entries.retain(|_, v| !v.is_zero());
    SparseMat { rows: dim, cols: dim, entries }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleOptions {
    pub loops: usize,
    /// Side length of each coordinate square.
    pub epsilon: f64,
    /// RK4 steps per loop (split evenly over the four sides).
    pub steps_per_loop: usize,
    /// Loop centres are drawn from the cube of this half-width around `x`.
    pub corner_radius: f64,
    pub seed: u64,
    /// Relative singular-value threshold.
    pub rank_tolerance: f64,
    /// Singular values of the `ε⁻²`-scaled logs below this count as zero.
    pub flat_tolerance: f64,
    /// Allowed deviation between a loop and its half-step rerun.
    pub step_tolerance: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            loops: 12,
            epsilon: 0.05,
            steps_per_loop: 64,
            corner_radius: 0.1,
            seed: 0,
            rank_tolerance: 1e-8,
            flat_tolerance: 1e-6,
            step_tolerance: 1e-9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopRecord {
    pub plane: (usize, usize),
    pub center: Vec<f64>,
    /// `log P` of the transport around the loop, row-major `ν × ν`.
    pub log_transport: Vec<f64>,
    /// `‖log P(ε)‖ / ‖log P(ε/2)‖`, when the loop is not flat.
    pub halving_ratio: Option<f64>,
    pub step_discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub loops: Vec<LoopRecord>,
    pub singular_values: Vec<f64>,
    pub numeric_rank: usize,
    pub options: OracleOptions,
}

impl OracleReport {
    /// Largest `‖log P‖` over all loops.
    pub fn max_log_norm(&self) -> f64 {
        self.loops.iter().map(|l| frob(&l.log_transport)).fold(0.0, f64::max)
    }
}

fn frob(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

struct Transport<'a> {
    nvars: usize,
    nu: usize,
    inverse: &'a PolyMatrix,
    gamma: &'a [PolyMatrix],
}

impl Transport<'_> {
    /// `−Γ(u) a` with `u` the frame components of `vel` at `p`.
    fn rhs(&self, p: &[f64], vel: &[f64], a: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.nvars;
        let inv = self.inverse.eval_f64(p);
        let mut g = DMatrix::<f64>::zeros(self.nu, self.nu);
        for (i, gi) in self.gamma.iter().enumerate() {
            if gi.is_zero() {
                continue;
            }
            let u: f64 = (0..n).map(|k| inv[k * n + i] * vel[k]).sum();
            if u == 0.0 {
                continue;
            }
            let m = gi.eval_f64(p);
            for r in 0..self.nu {
                for c in 0..self.nu {
                    g[(r, c)] += u * m[r * self.nu + c];
                }
            }
        }
        -(g * a)
    }

    fn segment(&self, start: &[f64], vel: &[f64], steps: usize, mut a: DMatrix<f64>) -> DMatrix<f64> {
        let h = 1.0 / steps as f64;
        let at = |t: f64| -> Vec<f64> { start.iter().zip(vel).map(|(s, v)| s + t * v).collect() };
        for k in 0..steps {
            let t = k as f64 * h;
            let k1 = self.rhs(&at(t), vel, &a);
            let k2 = self.rhs(&at(t + h / 2.0), vel, &(&a + &k1 * (h / 2.0)));
            let k3 = self.rhs(&at(t + h / 2.0), vel, &(&a + &k2 * (h / 2.0)));
            let k4 = self.rhs(&at(t + h), vel, &(&a + &k3 * h));
            a += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        a
    }

    /// Transport around the square of side `eps` centred at `center`.
    fn square(&self, center: &[f64], plane: (usize, usize), eps: f64, steps: usize) -> DMatrix<f64> {
        let per_side = (steps / 4).max(1);
        let mut a = DMatrix::<f64>::identity(self.nu, self.nu);
        let mut p = center.to_vec();
        p[plane.0] -= eps / 2.0;
        p[plane.1] -= eps / 2.0;
        for (axis, sign) in [(plane.0, 1.0), (plane.1, 1.0), (plane.0, -1.0), (plane.1, -1.0)] {
            let mut vel = vec![0.0; self.nvars];
            vel[axis] = sign * eps;
            a = self.segment(&p, &vel, per_side, a);
            p[axis] += sign * eps;
        }
        a
    }
}

/// Matrix logarithm near the identity by its power series.
fn log_near_identity(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    let x = p - DMatrix::<f64>::identity(n, n);
    let mut term = x.clone();
    let mut out = DMatrix::<f64>::zeros(n, n);
    for k in 1..200 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        out += &term * (sign / k as f64);
        term = &term * &x;
        if term.norm() < 1e-18 {
            break;
        }
    }
    out
}

/// Numeric rank of vectors: singular values above `rel_tol` times the
/// largest, and above `abs_tol`.
pub fn numeric_rank(vectors: &[Vec<f64>], rel_tol: f64, abs_tol: f64) -> (usize, Vec<f64>) {
    if vectors.is_empty() {
        return (0, Vec::new());
    }
    let cols = vectors[0].len();
    let m = DMatrix::<f64>::from_fn(vectors.len(), cols, |i, j| vectors[i][j]);
    let sv = m.singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let top = s.first().copied().unwrap_or(0.0);
    let rank = s.iter().filter(|&&v| v > rel_tol * top && v > abs_tol).count();
    (rank, s)
}

/// Transports around small coordinate squares for the connection `conn`
/// (normally the flattened one), on chart models only.
pub fn numeric_transport_oracle(
    model: &FrameModel,
    conn: &VerticalConnection,
    opts: &OracleOptions,
) -> Result<OracleReport> {
    let chart = model
        .chart()
        .ok_or_else(|| Error::OracleUnsupported("abstract models have no coordinates to integrate in".into()))?;
    let nvars = chart.coordinates.len();
    if nvars < 2 {
        return Err(Error::OracleUnsupported("loops need at least two coordinates".into()));
    }
    let tr = Transport { nvars, nu: conn.nu, inverse: &chart.inverse, gamma: &conn.gamma };
    let base: Vec<f64> = model.base_point.iter().map(rational_to_f64).collect();
    let mut planes = Vec::new();
    for i in 0..nvars {
        for j in i + 1..nvars {
            planes.push((i, j));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let jobs: Vec<((usize, usize), Vec<f64>)> = (0..opts.loops)
        .map(|k| {
            let corner: Vec<f64> =
                base.iter().map(|b| b + rng.gen_range(-opts.corner_radius..=opts.corner_radius)).collect();
            (planes[k % planes.len()], corner)
        })
        .collect();
    let eps = opts.epsilon;
    let steps = opts.steps_per_loop.max(4);
    let records: Vec<Result<LoopRecord>> = jobs
        .par_iter()
        .map(|(plane, corner)| {
            let p = tr.square(corner, *plane, eps, steps);
            let fine = tr.square(corner, *plane, eps, 2 * steps);
            let discrepancy = (&p - &fine).norm();
            if discrepancy > opts.step_tolerance {
                return Err(Error::StepTooCoarse { discrepancy, tolerance: opts.step_tolerance });
            }
            let log = log_near_identity(&fine);
            let half = log_near_identity(&tr.square(corner, *plane, eps / 2.0, 2 * steps));
            let ratio = (log.norm() > 1e-12).then(|| log.norm() / half.norm());
            Ok(LoopRecord {
                plane: *plane,
                center: corner.clone(),
                log_transport: log.transpose().as_slice().to_vec(),
                halving_ratio: ratio,
                step_discrepancy: discrepancy,
            })
        })
        .collect();
    let loops = records.into_iter().collect::<Result<Vec<_>>>()?;
    let scaled: Vec<Vec<f64>> =
        loops.iter().map(|l| l.log_transport.iter().map(|v| v / (eps * eps)).collect()).collect();
    let (numeric_rank, singular_values) = numeric_rank(&scaled, opts.rank_tolerance, opts.flat_tolerance);
    Ok(OracleReport { loops, singular_values, numeric_rank, options: opts.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{bracket_connection, flatten, vertical_connection};
    use crate::distribution::{compute_flag, FlagOptions};
    use crate::models;
    use crate::poly::q;
    use crate::selector::build_selector;

    fn algebra(m: &FrameModel) -> HolonomyAlgebra {
        let sel = build_selector(m, &compute_flag(m, &FlagOptions::default()).unwrap()).unwrap();
        ozeki_algebra(m, &vertical_connection(m), &sel, CurvatureRoute::Flattened, &HolonomyOptions::default())
            .unwrap()
    }

    #[test]
    fn sym2_index_enumerates_upper_triangle() {
        let nu = 4;
        let mut seen = Vec::new();
        for i in 0..nu {
            for j in i..nu {
                seen.push(sym2_index(nu, i, j));
            }
        }
        assert_eq!(seen, (0..sym2_dim(nu)).collect::<Vec<_>>());
        assert_eq!(sym2_index(nu, 2, 1), sym2_index(nu, 1, 2));
    }

    #[test]
    fn sym2_examples() {
        assert!(sym2_action(&QMat::zeros(3, 3)).is_zero());
        let a = QMat::from_rows(vec![vec![q(5)]]);
        assert_eq!(sym2_action(&a).to_dense(), QMat::from_rows(vec![vec![q(-10)]]));
        let d = QMat::from_rows(vec![vec![q(1), q(0)], vec![q(0), q(-1)]]);
        let expect = QMat::from_rows(vec![
            vec![q(-2), q(0), q(0)],
            vec![q(0), q(0), q(0)],
            vec![q(0), q(0), q(2)],
        ]);
        assert_eq!(sym2_action(&d).to_dense(), expect);
    }

    #[test]
    fn sym2_matches_direct_formula() {
        let a = QMat::from_rows(vec![
            vec![q(1), q(2), q(0)],
            vec![q(-1), q(0), q(3)],
            vec![q(4), q(1), q(-2)],
        ]);
        let s = sym2_action(&a);
        for k in 0..sym2_dim(3) {
            let mut g = vec![q(0); 6];
            g[k] = q(1);
            let gm = sym2_to_matrix(3, &g);
            let direct = a.transpose().mul(&gm).add(&gm.mul(&a)).scale(&q(-1));
            let img = s.apply(&g.iter().cloned().enumerate().filter(|(_, v)| !v.is_zero()).collect());
            let mut dense = vec![q(0); 6];
            for (i, v) in img {
                dense[i] = v;
            }
            assert_eq!(dense, matrix_to_sym2(&direct));
        }
    }

    #[test]
    fn example_dimensions() {
        assert_eq!(algebra(&models::twisted_heisenberg("x", "0").unwrap()).dim(), 0);
        let a = algebra(&models::twisted_heisenberg("x^2", "0").unwrap());
        assert_eq!(a.dim(), 1);
        assert!(a.stabilized);
        assert_eq!(algebra(&models::heisenberg_algebra()).dim(), 0);
    }

    #[test]
    fn connections_in_one_class_give_one_algebra() {
        let m = models::so4();
        let sel = build_selector(&m, &compute_flag(&m, &FlagOptions::default()).unwrap()).unwrap();
        let o = HolonomyOptions::default();
        let a = ozeki_algebra(&m, &vertical_connection(&m), &sel, CurvatureRoute::Power, &o).unwrap();
        let b = ozeki_algebra(&m, &bracket_connection(&m), &sel, CurvatureRoute::Power, &o).unwrap();
        assert_eq!(a.dim(), 0);
        assert!(a.same_span(&b));
    }

    #[test]
    fn oracle_on_flat_and_curved_models() {
        let flat = models::twisted_heisenberg("x", "0").unwrap();
        let sel = build_selector(&flat, &compute_flag(&flat, &FlagOptions::default()).unwrap()).unwrap();
        let f = flatten(&flat, &vertical_connection(&flat), &sel).unwrap();
        let rep = numeric_transport_oracle(&flat, &f.connection, &OracleOptions::default()).unwrap();
        assert!(rep.max_log_norm() < 1e-10);
        assert_eq!(rep.numeric_rank, 0);

        let m = models::twisted_heisenberg("x^2", "0").unwrap();
        let sel = build_selector(&m, &compute_flag(&m, &FlagOptions::default()).unwrap()).unwrap();
        let f = flatten(&m, &vertical_connection(&m), &sel).unwrap();
        let rep = numeric_transport_oracle(&m, &f.connection, &OracleOptions::default()).unwrap();
        assert_eq!(rep.numeric_rank, 1);
        for l in &rep.loops {
            if let Some(r) = l.halving_ratio {
                assert!((r - 4.0).abs() < 0.4, "ratio {r}");
            }
        }
    }

    #[test]
    fn abstract_models_have_no_oracle() {
        let m = models::heisenberg_algebra();
        let c = vertical_connection(&m);
        assert!(matches!(
            numeric_transport_oracle(&m, &c, &OracleOptions::default()),
            Err(Error::OracleUnsupported(_))
        ));
    }
}
