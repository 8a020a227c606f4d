//! Connections on `V` compatible with `∇_X Z = pr_V[X, Z]` along `D`, their
//! curvature and the flattened connection with `ι_χ R = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{lie_derivative, Form, GlForm, KForm};
use crate::frame::{FrameField, FrameModel};
use crate::linalg::PolyMatrix;
use crate::poly::Poly;
use crate::selector::Selector;

/// Christoffel table over the frame: `∇_{E_a} Z_j = Σ_k Γ_a[k][j] Z_k`, where
/// `Z_j = E_{v_j}` runs over the vertical frame fields.
#[derive(Clone, Debug, PartialEq)]
pub struct VerticalConnection {
    pub nu: usize,
    pub gamma: Vec<PolyMatrix>,
}

impl VerticalConnection {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `∇ + β` for a `gl(V)`-valued one-form `β`.
    pub fn offset(&self, beta: &GlForm) -> VerticalConnection {
        assert_eq!(beta.degree, 1);
        let mut out = self.clone();
        for (idx, m) in beta.terms() {
            out.gamma[idx[0]].add_assign(m);
        }
        out
    }

    /// `∇_{E_a} s` for a section `s = Σ sʲ Z_j`.
    pub fn covariant(&self, model: &FrameModel, a: usize, s: &[Poly]) -> Vec<Poly> {
        let mut out: Vec<Poly> = s.iter().map(|p| model.derive(a, p)).collect();
        for (k, v) in self.gamma[a].apply(s).into_iter().enumerate() {
            out[k] += &v;
        }
        out
    }

    /// `∇_X s`.
    pub fn covariant_along(&self, model: &FrameModel, x: &FrameField, s: &[Poly]) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.nu];
        for a in x.support() {
            for (k, v) in self.covariant(model, a, s).into_iter().enumerate() {
                out[k] += &(&x.coeffs[a] * &v);
            }
        }
        out
    }

    /// Induced connection on `gl(V)`: `∇_{E_a} A = E_a(A) + [Γ_a, A]`.
    pub fn gl_covariant(&self, model: &FrameModel, a: usize, m: &PolyMatrix) -> PolyMatrix {
        let mut out = if model.is_abstract() { PolyMatrix::zeros(m.rows, m.cols) } else { m.map(|p| model.derive(a, p)) };
        if !self.gamma[a].is_zero() {
            out.add_assign(&self.gamma[a].commutator(m));
        }
        out
    }

    /// `Γ(X) = Σ Xᵃ Γ_a`.
    pub fn gamma_along(&self, x: &FrameField) -> PolyMatrix {
        let mut out = PolyMatrix::zeros(self.nu, self.nu);
        for a in x.support() {
            out.add_scaled(&x.coeffs[a], &self.gamma[a]);
        }
        out
    }

    /// Agreement along `D`, i.e. membership in the same class `[∇]_D`.
    pub fn d_equivalent(&self, other: &VerticalConnection, model: &FrameModel) -> bool {
        model.d_indices.iter().all(|&a| self.gamma[a] == other.gamma[a])
    }
}

/// `∇_{E_a} Z_j = pr_V[E_a, Z_j]` for `E_a ∈ D`, and `∇_{Z_i} Z_j = 0`.
pub fn vertical_connection(model: &FrameModel) -> VerticalConnection {
    let n = model.dim();
    let nu = model.nu();
    let mut gamma = vec![PolyMatrix::zeros(nu, nu); n];
    for &a in &model.d_indices {
        for (j, &vj) in model.v_indices.iter().enumerate() {
            for (k, c) in model.structure(a, vj) {
                if let Some(kp) = model.v_position(*k) {
                    gamma[a].set(kp, j, c.clone());
                }
            }
        }
    }
    VerticalConnection { nu, gamma }
}

/// `∇_{E_a} Z_j = pr_V[E_a, Z_j]` in every direction, the connection used for
/// left-invariant models. It agrees with [`vertical_connection`] along `D`.
pub fn bracket_connection(model: &FrameModel) -> VerticalConnection {
    let n = model.dim();
    let nu = model.nu();
    let mut gamma = vec![PolyMatrix::zeros(nu, nu); n];
    for (a, g) in gamma.iter_mut().enumerate() {
        for (j, &vj) in model.v_indices.iter().enumerate() {
            for (k, c) in model.structure(a, vj) {
                if let Some(kp) = model.v_position(*k) {
                    g.set(kp, j, c.clone());
                }
            }
        }
    }
    VerticalConnection { nu, gamma }
}

/// `R(E_a, E_b) = [∇_a, ∇_b] − ∇_{[E_a, E_b]}` applied to each `Z_j`.
pub fn curvature_direct(model: &FrameModel, conn: &VerticalConnection) -> GlForm {
    let n = model.dim();
    let nu = conn.nu;
    let mut out = Form::zero(2);
    for a in 0..n {
        for b in a + 1..n {
            let bracket = model.structure(a, b);
            if conn.gamma[a].is_zero() && conn.gamma[b].is_zero() && bracket.keys().all(|m| conn.gamma[*m].is_zero()) {
                continue;
            }
            let mut r = PolyMatrix::zeros(nu, nu);
            for j in 0..nu {
                let mut e = vec![Poly::zero(); nu];
                e[j] = Poly::one();
                let nb = conn.covariant(model, b, &e);
                let na = conn.covariant(model, a, &e);
                let mut col = conn.covariant(model, a, &nb);
                for (k, v) in conn.covariant(model, b, &na).into_iter().enumerate() {
                    col[k] -= &v;
                }
                for (m, c) in bracket {
                    for (k, v) in conn.covariant(model, *m, &e).into_iter().enumerate() {
                        col[k] -= &(c * &v);
                    }
                }
                for (k, v) in col.into_iter().enumerate() {
                    r.set(k, j, v);
                }
            }
            out.add_term(vec![a, b], &r);
        }
    }
    out
}

/// Exterior covariant derivative for the induced connection on `gl(V)`.
pub fn d_nabla(model: &FrameModel, conn: &VerticalConnection, beta: &GlForm) -> GlForm {
    beta.d_with(model, |a, m| {
        let v = conn.gl_covariant(model, a, m);
        (!v.is_zero()).then_some(v)
    })
}

/// `[β, γ] = Σ τ^I ∧ τ^J ⊗ [B_I, C_J]`.
pub fn wedge_bracket(beta: &GlForm, gamma: &GlForm) -> GlForm {
    let mut out = Form::zero(beta.degree + gamma.degree);
    for (i, b) in beta.terms() {
        for (j, c) in gamma.terms() {
            if i.iter().any(|x| j.contains(x)) {
                continue;
            }
            let mut idx = i.clone();
            idx.extend_from_slice(j);
            out.add_term(idx, &b.commutator(c));
        }
    }
    out
}

/// `L^∇ β = d^∇ β + ½[β, β]` for a one-form `β`.
pub fn l_op(model: &FrameModel, conn: &VerticalConnection, beta: &GlForm) -> GlForm {
    assert_eq!(beta.degree, 1);
    let mut out = d_nabla(model, conn, beta);
    // ½[β, β](E_a, E_b) = [β_a, β_b].
    let terms: Vec<(usize, &PolyMatrix)> = beta.terms().map(|(i, m)| (i[0], m)).collect();
    for (x, (a, ba)) in terms.iter().enumerate() {
        for (b, bb) in terms.iter().skip(x + 1) {
            out.add_term(vec![*a, *b], &ba.commutator(bb));
        }
    }
    out
}

/// `α(X)_{ij} = (pr_D 𝓛_{Z_j} τ^{v_i})(X)`, the endomorphism form of the
/// global vertical frame.
pub fn alpha_endomorphism(model: &FrameModel) -> GlForm {
    let n = model.dim();
    let nu = model.nu();
    let mut per_a = vec![PolyMatrix::zeros(nu, nu); n];
    for (i, &vi) in model.v_indices.iter().enumerate() {
        let tau = KForm::coframe(vi);
        for (j, &vj) in model.v_indices.iter().enumerate() {
            let l = lie_derivative(model, &FrameField::basis(n, vj), &tau);
            for (idx, c) in l.terms() {
                if model.is_d(idx[0]) {
                    per_a[idx[0]].set(i, j, c.clone());
                }
            }
        }
    }
    let mut out = Form::zero(1);
    for (a, m) in per_a.into_iter().enumerate() {
        out.add_term(vec![a], &m);
    }
    out
}

/// Curvature through `R^∇ = L^∇α − [α, α]`.
pub fn curvature_global_basis(model: &FrameModel, conn: &VerticalConnection) -> GlForm {
    let alpha = alpha_endomorphism(model);
    let la = l_op(model, conn, &alpha);
    la.sub(&wedge_bracket(&alpha, &alpha))
}

/// Which closed form is used for the modified curvature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureRoute {
    /// Curvature of the flattened connection `∇̃`.
    Flattened,
    /// `(id + L^∇ ι_χ)^{r−1} R^∇`.
    Power,
    /// `Σ_j C(r−1, j) η^j` with `η^{j+1} = L^∇ ι_χ η^j`.
    Binomial,
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

pub fn modified_curvature_power(model: &FrameModel, conn: &VerticalConnection, sel: &Selector) -> GlForm {
    let mut eta = curvature_direct(model, conn);
    for _ in 1..sel.step() {
        let next = l_op(model, conn, &eta.contract(&sel.table));
        eta = eta.add(&next);
    }
    eta
}

pub fn modified_curvature_binomial(model: &FrameModel, conn: &VerticalConnection, sel: &Selector) -> GlForm {
    let r = sel.step();
    let mut eta = curvature_direct(model, conn);
    let mut sum = Form::zero(2);
    for j in 0..r {
        sum = sum.add(&eta.scale(&Poly::int(binomial(r - 1, j))));
        if j + 1 < r {
            eta = l_op(model, conn, &eta.contract(&sel.table));
        }
    }
    sum
}

#[derive(Clone, Debug)]
pub struct Flattened {
    /// `∇̃ = ∇ + α`.
    pub connection: VerticalConnection,
    pub alpha: GlForm,
    /// `R^{∇̃}`.
    pub curvature: GlForm,
}

/// The unique `∇̃ ∈ [∇]_D` with `ι_χ R^{∇̃} = 0`, by the iteration
/// `α ← α + ι_χ R^{∇+α}` run `r − 1` times from `α = 0`.
pub fn flatten(model: &FrameModel, conn: &VerticalConnection, sel: &Selector) -> Result<Flattened> {
    let base = curvature_direct(model, conn);
    let mut alpha: GlForm = Form::zero(1);
    let mut curv = base.clone();
    for _ in 1..sel.step() {
        let delta = curv.contract(&sel.table);
        if delta.is_zero() {
            break;
        }
        alpha = alpha.add(&delta);
        curv = base.add(&l_op(model, conn, &alpha));
    }
    if let Some((idx, _)) = alpha.terms().find(|(i, _)| model.is_d(i[0])) {
        return Err(Error::PostconditionFailed(format!(
            "α does not vanish on D (component along {})",
            model.frame_names[idx[0]]
        )));
    }
    let residual = curv.contract(&sel.table);
    if !residual.is_zero() {
        return Err(Error::PostconditionFailed("ι_χ R of the flattened connection is nonzero".into()));
    }
    Ok(Flattened { connection: conn.offset(&alpha), alpha, curvature: curv })
}

pub fn modified_curvature(
    model: &FrameModel,
    conn: &VerticalConnection,
    sel: &Selector,
    route: CurvatureRoute,
) -> Result<GlForm> {
    Ok(match route {
        CurvatureRoute::Flattened => flatten(model, conn, sel)?.curvature,
        CurvatureRoute::Power => modified_curvature_power(model, conn, sel),
        CurvatureRoute::Binomial => modified_curvature_binomial(model, conn, sel),
    })
}
