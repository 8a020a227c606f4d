//! Decision procedures on the holonomy algebra: a positive definite fixed
//! point on `Sym²V*` (totally geodesic metrics), trivial holonomy (principal
//! structure), and the closed-form criterion for one-dimensional foliations.

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{ext_d, lie_derivative, KForm, KVector};
use crate::frame::{FrameField, FrameModel};
use crate::holonomy::{mat_key, sym2_dim, sym2_to_matrix, HolonomyAlgebra};
use crate::linalg::{sparse_kernel, Echelon, QMat, SparseVec};
use crate::poly::{q, rational_to_f64, Poly, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictKind {
    Yes,
    No,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoReason {
    /// No nonzero symmetric form is annihilated by `𝔞`.
    ZeroKernel,
    /// Every annihilated form is traceless, so none is positive definite.
    TraceObstruction,
    /// Some nonzero `A ∈ 𝔞` has `tr(A²) ≥ 0`, impossible for an element that
    /// is skew for a positive definite form.
    SkewFormObstruction,
    /// The annihilated forms are one-dimensional and indefinite.
    Indefinite,
    /// The holonomy algebra is nonzero.
    NonzeroHolonomy,
    /// The obstruction two-form of the one-dimensional criterion is nonzero.
    NonzeroObstruction,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Certificate {
    /// Positive definite `g^V` with `AᵀG + GA = 0` for all `A ∈ 𝔞`.
    FixedPoint(QMat),
    /// Rank of the stacked `Sym²` action equals `dim Sym²V*`.
    ZeroKernel { rank: usize, dim: usize },
    /// Basis of the annihilated forms, each of trace zero.
    Traceless(Vec<QMat>),
    /// `A ∈ 𝔞`, `A ≠ 0`, with `tr(A²) ≥ 0`.
    NonSkew { element: QMat, trace_square: Q },
    /// Generator `G` of the annihilated line with vectors `u`, `w` such that
    /// `uᵀGu ≤ 0 ≤ wᵀGw`.
    Indefinite { generator: QMat, u: Vec<Q>, w: Vec<Q> },
    /// A nonzero element of `𝔞`.
    NonzeroElement(QMat),
    /// Nonzero obstruction two-form, in canonical text.
    Obstruction(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub reason: Option<NoReason>,
    pub certificate: Option<Certificate>,
    /// Hypotheses under which the verdict answers the geometric question.
    pub assumptions: Vec<String>,
    pub notes: Vec<String>,
    pub seed: Option<u64>,
    pub budget: Option<SearchBudget>,
}

impl Verdict {
    fn new(kind: VerdictKind, assumptions: Vec<String>) -> Verdict {
        Verdict { kind, reason: None, certificate: None, assumptions, notes: Vec::new(), seed: None, budget: None }
    }

    fn no(reason: NoReason, cert: Certificate, assumptions: Vec<String>) -> Verdict {
        Verdict { reason: Some(reason), certificate: Some(cert), ..Verdict::new(VerdictKind::No, assumptions) }
    }

    fn yes(g: QMat, assumptions: Vec<String>) -> Verdict {
        Verdict { certificate: Some(Certificate::FixedPoint(g)), ..Verdict::new(VerdictKind::Yes, assumptions) }
    }

    fn inconclusive(note: impl Into<String>, assumptions: Vec<String>) -> Verdict {
        let mut v = Verdict::new(VerdictKind::Inconclusive, assumptions);
        v.notes.push(note.into());
        v
    }
}

/// Limits of the randomized positive-definiteness search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { restarts: 16, iterations: 400 }
    }
}

pub fn tg_assumptions() -> Vec<String> {
    vec![
        "D is completely controllable (bracket-generating suffices)".into(),
        "the horizontal holonomy group is connected (M simply connected and D bracket-generating)".into(),
        "the holonomy algebra at the base point equals the algebra of the holonomy group (polynomial data)".into(),
    ]
}

pub fn principal_assumptions() -> Vec<String> {
    vec![
        "D is completely controllable (bracket-generating suffices)".into(),
        "the fiber F is compact and simply connected".into(),
        "the horizontal holonomy group is connected (M simply connected and D bracket-generating)".into(),
        "the holonomy algebra at the base point equals the algebra of the holonomy group (polynomial data)".into(),
    ]
}

/// Basis of `{G ∈ Sym²V* : AᵀG + GA = 0 for all A ∈ 𝔞}` as symmetric matrices.
pub fn fixed_forms(h: &HolonomyAlgebra) -> (Vec<QMat>, usize) {
    let dim = sym2_dim(h.nu);
    let mut rows: Vec<SparseVec<usize>> = Vec::new();
    for s in &h.sym2_basis {
        let mut by_row: std::collections::BTreeMap<usize, SparseVec<usize>> = Default::default();
        for ((i, j), v) in &s.entries {
            by_row.entry(*i).or_default().insert(*j, v.clone());
        }
        rows.extend(by_row.into_values());
    }
    let kernel = sparse_kernel(&rows, dim);
    let rank = dim - kernel.len();
    let mats = kernel
        .iter()
        .map(|v| {
            let mut g = vec![Q::zero(); dim];
            for (i, c) in v {
                g[*i] = c.clone();
            }
            sym2_to_matrix(h.nu, &g)
        })
        .collect();
    (mats, rank)
}

fn is_fixed(h: &HolonomyAlgebra, g: &QMat) -> bool {
    h.basis.iter().all(|a| a.transpose().mul(g).add(&g.mul(a)).is_zero())
}

/// Existence of a positive definite fixed point of `𝔞` on `Sym²V*`.
pub fn tg_metric_exists(h: &HolonomyAlgebra, budget: SearchBudget, seed: u64) -> Verdict {
    let assumptions = tg_assumptions();
    if !h.stabilized {
        return Verdict::inconclusive("holonomy iteration did not stabilize", assumptions);
    }
    let nu = h.nu;
    if h.dim() == 0 {
        return Verdict::yes(QMat::identity(nu), assumptions);
    }
    let (kernel, rank) = fixed_forms(h);
    if kernel.is_empty() {
        return Verdict::no(NoReason::ZeroKernel, Certificate::ZeroKernel { rank, dim: sym2_dim(nu) }, assumptions);
    }
    if kernel.iter().all(|g| g.trace().is_zero()) {
        return Verdict::no(NoReason::TraceObstruction, Certificate::Traceless(kernel), assumptions);
    }
    if let Some((element, trace_square)) = non_skew_element(h) {
        return Verdict::no(NoReason::SkewFormObstruction, Certificate::NonSkew { element, trace_square }, assumptions);
    }
    let id = QMat::identity(nu);
    if is_fixed(h, &id) {
        return Verdict::yes(id, assumptions);
    }
    if kernel.len() == 1 {
        let g = &kernel[0];
        if g.is_positive_definite() {
            return Verdict::yes(g.clone(), assumptions);
        }
        let neg = g.scale(&q(-1));
        if neg.is_positive_definite() {
            return Verdict::yes(neg, assumptions);
        }
        let u = g.non_pd_witness().expect("not positive definite");
        let w = neg.non_pd_witness().expect("not negative definite");
        return Verdict::no(
            NoReason::Indefinite,
            Certificate::Indefinite { generator: g.clone(), u, w },
            assumptions,
        );
    }
    let mut v = match search_positive(&kernel, budget, seed) {
        Some(g) => Verdict::yes(g, assumptions),
        None => Verdict::inconclusive(
            "no positive definite fixed form found within the search budget",
            assumptions,
        ),
    };
    v.seed = Some(seed);
    v.budget = Some(budget);
    v
}

/// A nonzero element with `tr(A²) ≥ 0`, found from the Gram form
/// `(A, B) ↦ tr(AB)` on the basis, which must be negative definite.
fn non_skew_element(h: &HolonomyAlgebra) -> Option<(QMat, Q)> {
    let k = h.dim();
    let mut neg_gram = QMat::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let t = -h.basis[i].mul(&h.basis[j]).trace();
            neg_gram[(i, j)] = t.clone();
            neg_gram[(j, i)] = t;
        }
    }
    let c = neg_gram.non_pd_witness()?;
    let mut a = QMat::zeros(h.nu, h.nu);
    for (ci, b) in c.iter().zip(&h.basis) {
        if !ci.is_zero() {
            a = a.add(&b.scale(ci));
        }
    }
    let t = a.mul(&a).trace();
    Some((a, t))
}

fn to_f64(m: &QMat) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows, m.cols, |i, j| rational_to_f64(&m[(i, j)]))
}

fn rationalize(x: f64) -> Q {
    let den = 1i64 << 24;
    Q::new(BigInt::from((x * den as f64).round() as i64), BigInt::from(den))
}

/// Projected subgradient ascent of `λ_min` over the unit sphere of the span
/// of `kernel`, with exact verification of any candidate.
fn search_positive(kernel: &[QMat], budget: SearchBudget, seed: u64) -> Option<QMat> {
    let k = kernel.len();
    let nu = kernel[0].rows;
    // Orthonormal combinations of the kernel basis for the Frobenius inner
    // product.
    let raw: Vec<DMatrix<f64>> = kernel.iter().map(to_f64).collect();
    let mut onb: Vec<(DMatrix<f64>, Vec<f64>)> = Vec::new();
    for (i, m) in raw.iter().enumerate() {
        let mut v = m.clone();
        let mut coef = vec![0.0; k];
        coef[i] = 1.0;
        for (b, bc) in &onb {
            let d = v.dot(b);
            v -= b * d;
            for (c, x) in coef.iter_mut().zip(bc) {
                *c -= d * x;
            }
        }
        let n = v.norm();
        if n > 1e-12 {
            onb.push((v / n, coef.iter().map(|c| c / n).collect()));
        }
    }
    let id = DMatrix::<f64>::identity(nu, nu);
    let start: Vec<f64> = onb.iter().map(|(b, _)| b.dot(&id)).collect();
    let eval = |c: &[f64]| -> (f64, Vec<f64>) {
        let mut g = DMatrix::<f64>::zeros(nu, nu);
        for (ci, (b, _)) in c.iter().zip(&onb) {
            g += b * *ci;
        }
        let eig = SymmetricEigen::new(g);
        let (idx, lmin) = eig.eigenvalues.iter().copied().enumerate().fold((0, f64::INFINITY), |acc, (i, v)| {
            if v < acc.1 {
                (i, v)
            } else {
                acc
            }
        });
        let v = eig.eigenvectors.column(idx).into_owned();
        let grad = onb.iter().map(|(b, _)| (v.transpose() * b * &v)[(0, 0)]).collect();
        (lmin, grad)
    };
    let normalize = |c: &mut Vec<f64>| {
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.0 {
            c.iter_mut().for_each(|x| *x /= n);
        }
    };
    let exact = |c: &[f64]| -> Option<QMat> {
        let mut a = vec![0.0; k];
        for (ci, (_, coef)) in c.iter().zip(&onb) {
            for (x, y) in a.iter_mut().zip(coef) {
                *x += ci * y;
            }
        }
        let mut g = QMat::zeros(nu, nu);
        for (ai, m) in a.iter().zip(kernel) {
            let r = rationalize(*ai);
            if !r.is_zero() {
                g = g.add(&m.scale(&r));
            }
        }
        g.is_positive_definite().then_some(g)
    };
    let mut seeds = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<(u64, bool)> = (0..budget.restarts.max(1)).map(|i| (seeds.gen(), i == 0)).collect();
    let results: Vec<Option<(usize, QMat)>> = starts
        .par_iter()
        .enumerate()
        .map(|(run, &(s, first))| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut c: Vec<f64> =
                if first && start.iter().any(|x| x.abs() > 1e-12) { start.clone() } else {
                    (0..onb.len()).map(|_| rng.gen_range(-1.0..1.0)).collect()
                };
            normalize(&mut c);
            for it in 0..budget.iterations {
                let (lmin, grad) = eval(&c);
                if lmin > 1e-9 {
                    if let Some(g) = exact(&c) {
                        return Some((run, g));
                    }
                }
                let step = 0.5 / (1.0 + it as f64).sqrt();
                for (x, g) in c.iter_mut().zip(&grad) {
                    *x += step * g;
                }
                normalize(&mut c);
            }
            None
        })
        .collect();
    results.into_iter().flatten().min_by_key(|(run, _)| *run).map(|(_, g)| g)
}

/// Trivial holonomy, `𝔞(x) = 0`.
pub fn principal_structure_exists(h: &HolonomyAlgebra) -> Verdict {
    let assumptions = principal_assumptions();
    if !h.stabilized {
        return Verdict::inconclusive("holonomy iteration did not stabilize", assumptions);
    }
    match h.basis.first() {
        None => Verdict::new(VerdictKind::Yes, assumptions),
        Some(a) => Verdict::no(NoReason::NonzeroHolonomy, Certificate::NonzeroElement(a.clone()), assumptions),
    }
}

/// Re-checks a verdict's certificate against the algebra from scratch.
pub fn check_certificate(h: &HolonomyAlgebra, v: &Verdict) -> Result<()> {
    let fail = |m: &str| Err(Error::Decide(format!("certificate check failed: {m}")));
    let span = || {
        let mut e = Echelon::new();
        for b in &h.basis {
            e.insert(&mat_key(b));
        }
        e
    };
    match (&v.kind, &v.certificate) {
        (VerdictKind::Yes, Some(Certificate::FixedPoint(g))) => {
            if g.rows != h.nu || !g.is_symmetric() {
                return fail("fixed point is not a symmetric form on V");
            }
            for a in &h.basis {
                if !a.transpose().mul(g).add(&g.mul(a)).is_zero() {
                    return fail("form is not annihilated by the algebra");
                }
            }
            if !g.leading_minors().iter().all(Signed::is_positive) {
                return fail("form is not positive definite");
            }
            Ok(())
        }
        (VerdictKind::Yes, None) if h.dim() == 0 => Ok(()),
        (VerdictKind::No, Some(Certificate::ZeroKernel { dim, .. })) => {
            let (kernel, _) = fixed_forms(h);
            if *dim != sym2_dim(h.nu) || !kernel.is_empty() {
                return fail("annihilated forms exist");
            }
            Ok(())
        }
        (VerdictKind::No, Some(Certificate::Traceless(basis))) => {
            let (kernel, _) = fixed_forms(h);
            if kernel.len() != basis.len() {
                return fail("basis does not span the annihilated forms");
            }
            for g in basis {
                if !g.trace().is_zero() || !is_fixed(h, g) {
                    return fail("basis element is not a traceless fixed form");
                }
            }
            Ok(())
        }
        (VerdictKind::No, Some(Certificate::NonSkew { element, trace_square })) => {
            if element.is_zero() || !span().contains(&mat_key(element)) {
                return fail("element is zero or outside the algebra");
            }
            let t = element.mul(element).trace();
            if t != *trace_square || t.is_negative() {
                return fail("tr(A²) is negative");
            }
            Ok(())
        }
        (VerdictKind::No, Some(Certificate::Indefinite { generator, u, w })) => {
            let (kernel, _) = fixed_forms(h);
            if kernel.len() != 1 || !is_fixed(h, generator) {
                return fail("annihilated forms are not the stated line");
            }
            if generator.quadratic_form(u).is_positive() || generator.quadratic_form(w).is_negative() {
                return fail("witness vectors do not show indefiniteness");
            }
            if u.iter().all(Zero::is_zero) || w.iter().all(Zero::is_zero) {
                return fail("zero witness vector");
            }
            Ok(())
        }
        (VerdictKind::No, Some(Certificate::NonzeroElement(a))) => {
            if a.is_zero() || !span().contains(&mat_key(a)) {
                return fail("element is zero or outside the algebra");
            }
            Ok(())
        }
        (VerdictKind::Inconclusive, _) => Ok(()),
        _ => fail("verdict and certificate do not match"),
    }
}

/// Result of the one-dimensional criterion.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDimResult {
    /// `d_{τ⊗χ} 𝓛_Z τ = d(β + dβ(χ) τ)` with `β = 𝓛_Z τ`.
    pub obstruction: KForm,
    pub lie_derivative: KForm,
    pub verdict: Verdict,
}

/// Criterion for `V = span{Z}`, `D = ker τ`, with `τ(Z) = 1` and
/// `dτ(χ) = −1` for a two-vector `χ ∈ Λ²D`.
pub fn one_dim_criterion(model: &FrameModel, tau: &KForm, z: &FrameField, chi: &KVector) -> Result<OneDimResult> {
    let bad = |m: String| Err(Error::NormalizationFailed(m));
    if tau.degree != 1 || chi.degree != 2 {
        return bad("τ must be a one-form and χ a two-vector".into());
    }
    let tz = tau.interior(z).value();
    if tz != Poly::one() {
        return bad(format!("τ(Z) = {} instead of 1", tz.to_text(&model.variable_names())));
    }
    for &d in &model.d_indices {
        if !tau.interior(&FrameField::basis(model.dim(), d)).value().is_zero() {
            return bad(format!("τ does not vanish on {}", model.frame_names[d]));
        }
    }
    if chi.support().iter().any(|&i| !model.is_d(i)) {
        return bad("χ is not a section of Λ²D".into());
    }
    let dtau = ext_d(model, tau);
    let dc = dtau.pair(chi);
    if dc != Poly::int(-1) {
        return bad(format!("dτ(χ) = {} instead of −1", dc.to_text(&model.variable_names())));
    }
    let beta = lie_derivative(model, z, tau);
    let db = ext_d(model, &beta);
    let inner = beta.add(&tau.scale(&db.pair(chi)));
    let obstruction = ext_d(model, &inner);
    let verdict = if obstruction.is_zero() {
        Verdict::new(VerdictKind::Yes, tg_assumptions())
    } else {
        Verdict::no(
            NoReason::NonzeroObstruction,
            Certificate::Obstruction(obstruction.to_text(&model.variable_names())),
            tg_assumptions(),
        )
    };
    Ok(OneDimResult { obstruction, lie_derivative: beta, verdict })
}
