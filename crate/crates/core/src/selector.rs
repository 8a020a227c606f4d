//! Selectors `χ: TM → Λ²TM` of an equiregular bracket-generating flag,
//! their verification, the extension solver and `d_χ`.

use crate::distribution::Flag;
use crate::error::{Error, Result};
use crate::forms::{ext_d, KForm, KVector};
use crate::frame::{FrameField, FrameModel};
use crate::linalg::PolyMatrix;
use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq)]
pub struct SelectorEvidence {
    /// Number of identities `α(v) + dα(χ(v)) = 0` checked.
    pub axiom2_checks: usize,
    /// Number of support conditions `χ(E_j) ∈ Λ²D^k` checked.
    pub axiom1_checks: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selector {
    /// Cumulative index sets `S_1 ⊂ … ⊂ S_r` of the adapted frame.
    pub levels: Vec<Vec<usize>>,
    /// `table[j] = χ(E_j)`.
    pub table: Vec<KVector>,
    pub evidence: Option<SelectorEvidence>,
}

impl Selector {
    pub fn step(&self) -> usize {
        self.levels.len()
    }

    pub fn dim(&self) -> usize {
        self.table.len()
    }

    /// Wraps a user-supplied table `χ(E_j)` and verifies it.
    pub fn from_table(model: &FrameModel, flag: &Flag, table: Vec<KVector>) -> Result<Selector> {
        let levels = adapted_levels(flag)?;
        if table.len() != model.dim() || table.iter().any(|v| v.degree != 2) {
            return Err(Error::MismatchedModel(format!(
                "selector table needs one bivector per frame field ({})",
                model.dim()
            )));
        }
        let mut sel = Selector { levels, table, evidence: None };
        sel.evidence = Some(verify_selector(model, &sel)?);
        Ok(sel)
    }

    /// `χ(X) = Σ Xʲ χ(E_j)`.
    pub fn apply(&self, x: &FrameField) -> KVector {
        let mut out = KVector::zero(2);
        for (j, c) in x.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out = out.add(&self.table[j].scale(c));
            }
        }
        out
    }

    /// `χ₁ + f·(χ₂ − χ₁)`, unverified.
    pub fn affine_combination(&self, other: &Selector, f: &Poly) -> Selector {
        let table = self
            .table
            .iter()
            .zip(&other.table)
            .map(|(a, b)| a.add(&b.sub(a).scale(f)))
            .collect();
        Selector { levels: self.levels.clone(), table, evidence: None }
    }

    /// `(id + ι_χ d) β`.
    pub fn step_operator(&self, model: &FrameModel, beta: &KForm) -> KForm {
        beta.add(&ext_d(model, beta).contract(&self.table))
    }
}

fn adapted_levels(flag: &Flag) -> Result<Vec<Vec<usize>>> {
    if !flag.bracket_generating {
        return Err(Error::NotEquiregular("the distribution is not bracket-generating".into()));
    }
    if !flag.equiregular.holds {
        return Err(Error::NotEquiregular(format!(
            "the flag is not equiregular at the base point (growth {:?})",
            flag.growth_vector
        )));
    }
    flag.levels
        .clone()
        .ok_or_else(|| Error::NoAdaptedFrame("no subset of the frame spans each D^k".into()))
}

/// Builds the minimum-norm selector for the frame-orthonormal metric.
pub fn build_selector(model: &FrameModel, flag: &Flag) -> Result<Selector> {
    build_selector_restricted(model, flag, |_, _| true)
}

/// As [`build_selector`], but only bivectors `E_a ∧ E_b` with `allowed(a, b)`
/// enter the preimage.
pub fn build_selector_restricted(
    model: &FrameModel,
    flag: &Flag,
    allowed: impl Fn(usize, usize) -> bool,
) -> Result<Selector> {
    let levels = adapted_levels(flag)?;
    let n = model.dim();
    let mut table = vec![KVector::zero(2); n];
    let layer = |k: usize| -> Vec<usize> {
        let prev: &[usize] = if k >= 1 { &levels[k - 1] } else { &[] };
        levels[k].iter().copied().filter(|i| !prev.contains(i)).collect()
    };
    let l1 = layer(0);
    for k in 1..levels.len() {
        // Target layer L_{k+1} (0-based k) and source layer L_k.
        let target = layer(k);
        let source = layer(k - 1);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &i in &l1 {
            for &j in &source {
                if i == j || (k == 1 && i > j) {
                    continue;
                }
                let (a, b) = if i < j { (i, j) } else { (j, i) };
                if allowed(a, b) && !pairs.contains(&(a, b)) {
                    pairs.push((a, b));
                }
            }
        }
        let mut phi = PolyMatrix::zeros(target.len(), pairs.len());
        for (p, &(a, b)) in pairs.iter().enumerate() {
            for (row, &m) in target.iter().enumerate() {
                phi.set(row, p, model.structure_coeff(a, b, m));
            }
        }
        let gram = phi.mul(&phi.transpose());
        let ginv = gram.inverse().ok_or_else(|| {
            Error::NoAdaptedFrame(format!(
                "level {} projection has no polynomial minimum-norm preimage",
                k + 1
            ))
        })?;
        let pre = phi.transpose().mul(&ginv);
        for (col, &m) in target.iter().enumerate() {
            let mut v = KVector::zero(2);
            for (p, &(a, b)) in pairs.iter().enumerate() {
                v.add_term(vec![a, b], &pre.get(p, col));
            }
            table[m] = v;
        }
    }
    let mut sel = Selector { levels, table, evidence: None };
    sel.evidence = Some(verify_selector(model, &sel)?);
    Ok(sel)
}

/// Exact check of the selector axioms in the adapted frame.
pub fn verify_selector(model: &FrameModel, sel: &Selector) -> Result<SelectorEvidence> {
    let n = model.dim();
    let levels = &sel.levels;
    let level_of = |i: usize| levels.iter().position(|s| s.contains(&i)).expect("adapted frame") + 1;
    let mut ev = SelectorEvidence { axiom1_checks: 0, axiom2_checks: 0 };
    // (I): χ(E_j) ∈ Λ²D^{k} for E_j of level k+1, in particular χ(D) = 0.
    for j in 0..n {
        let lvl = level_of(j);
        let allowed: &[usize] = if lvl >= 2 { &levels[lvl - 2] } else { &[] };
        ev.axiom1_checks += 1;
        if let Some(bad) = sel.table[j].support().into_iter().find(|i| !allowed.contains(i)) {
            return Err(Error::SelectorViolation {
                axiom: "I".into(),
                level: lvl - 1,
                detail: format!(
                    "χ({}) has a leg along {} outside D^{}",
                    model.frame_names[j],
                    model.frame_names[bad],
                    lvl - 1
                ),
            });
        }
    }
    // (II) on the coframe generators τ^m of Ann(D^k).
    for k in 1..levels.len() {
        for m in (0..n).filter(|m| !levels[k - 1].contains(m)) {
            for &j in &levels[k] {
                let mut val = if m == j { Poly::one() } else { Poly::zero() };
                for ((a, b), c) in model.pairs_into(m) {
                    let chi = sel.table[j].get(&[*a, *b]);
                    if !chi.is_zero() {
                        val -= &(c * &chi);
                    }
                }
                ev.axiom2_checks += 1;
                if !val.is_zero() {
                    return Err(Error::SelectorViolation {
                        axiom: "II".into(),
                        level: k,
                        detail: format!(
                            "τ^{m}(v) + dτ^{m}(χ(v)) = {} for α = τ^{m} ({}), v = {}",
                            val.to_text(&model.variable_names()),
                            model.frame_names[m],
                            model.frame_names[j]
                        ),
                    });
                }
            }
        }
    }
    Ok(ev)
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// The unique `α` with `α|_D = β|_D` and `ι_χ dα = ι_χ η`.
pub fn extend_one_form(model: &FrameModel, sel: &Selector, beta: &KForm, eta: &KForm) -> KForm {
    let r = sel.step();
    let mut a = beta.clone();
    for _ in 1..r {
        a = sel.step_operator(model, &a);
    }
    let mut sum = KForm::zero(2);
    let mut cur = eta.clone();
    for j in 0..r.saturating_sub(1) {
        let c = Poly::int(binomial(r - 1, j + 1) as i64);
        sum = sum.add(&cur.scale(&c));
        cur = ext_d(model, &cur.contract(&sel.table));
    }
    a.sub(&sum.contract(&sel.table))
}

/// `d_χ β = d (id + ι_χ d)^{r−1} β`.
pub fn d_chi(model: &FrameModel, sel: &Selector, beta: &KForm) -> KForm {
    let mut a = beta.clone();
    for _ in 1..sel.step() {
        a = sel.step_operator(model, &a);
    }
    ext_d(model, &a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::{compute_flag, FlagOptions};
    use crate::models;

    fn selector(m: &FrameModel) -> Selector {
        let flag = compute_flag(m, &FlagOptions::default()).unwrap();
        build_selector(m, &flag).unwrap()
    }

    #[test]
    fn heisenberg_selector() {
        let m = models::heisenberg();
        let s = selector(&m);
        assert!(s.table[0].is_zero() && s.table[1].is_zero());
        assert_eq!(s.table[2], KVector::basis(vec![0, 1]));
    }

    #[test]
    fn contact_minimum_norm() {
        let m = models::contact(2, &[]).unwrap();
        let s = selector(&m);
        let half = Poly::constant(crate::poly::qr(1, 2));
        let expect = KVector::basis(vec![0, 2]).add(&KVector::basis(vec![1, 3])).scale(&half);
        assert_eq!(s.table[4], expect);
    }

    #[test]
    fn integrable_distribution_has_zero_selector() {
        let m = models::heisenberg_algebra().with_split(vec![0, 1, 2], vec![]).unwrap();
        let s = selector(&m);
        assert!(s.table.iter().all(KVector::is_zero));
        assert_eq!(s.step(), 1);
    }

    #[test]
    fn axiom_two_rejects_non_affine_sum() {
        let m = models::contact(2, &[]).unwrap();
        let flag = compute_flag(&m, &FlagOptions::default()).unwrap();
        let mut table = vec![KVector::zero(2); 5];
        table[4] = KVector::basis(vec![0, 2]).add(&KVector::basis(vec![1, 3]));
        let err = Selector::from_table(&m, &flag, table).unwrap_err();
        assert!(matches!(err, Error::SelectorViolation { ref axiom, .. } if axiom == "II"));
    }

    #[test]
    fn coframe_check_suffices_by_f_linearity() {
        // (fτ^m)(v) + d(fτ^m)(χ(v)) = f·(τ^m(v) + dτ^m(χ(v))) since χ(v) has legs in D^k.
        let m = models::contact(2, &[(0, "y1*z")]).unwrap();
        let s = selector(&m);
        let names = m.variable_names();
        let f = Poly::parse("x1^2*z - y2 + 3", &names).unwrap();
        let v = FrameField::basis(5, 4);
        let tau = KForm::coframe(4);
        let lhs_form = tau.scale(&f);
        let lhs = &lhs_form.eval_fields(std::slice::from_ref(&v)).unwrap_or_default()
            + &ext_d(&m, &lhs_form).pair(&s.apply(&v));
        let base = &tau.eval_fields(std::slice::from_ref(&v)).unwrap_or_default() + &ext_d(&m, &tau).pair(&s.apply(&v));
        assert_eq!(lhs, &f * &base);
        assert!(base.is_zero());
    }

    #[test]
    fn extension_solves_both_equations() {
        let m = models::contact(2, &[(1, "x1*y2"), (2, "z")]).unwrap();
        let s = selector(&m);
        let names = m.variable_names();
        let p = |t: &str| Poly::parse(t, &names).unwrap();
        let beta = KForm::one_form(&[(0, p("x1*z")), (3, p("y2^2")), (4, p("x2"))]);
        let mut eta = KForm::zero(2);
        eta.add_term(vec![0, 2], &p("z^2 - x1"));
        eta.add_term(vec![1, 4], &p("y1"));
        let alpha = extend_one_form(&m, &s, &beta, &eta);
        let d = |i: usize| m.is_d(i);
        assert_eq!(alpha.restrict(d), beta.restrict(d));
        assert_eq!(ext_d(&m, &alpha).contract(&s.table), eta.contract(&s.table));
    }

    #[test]
    fn d_chi_depends_only_on_restriction() {
        let m = models::contact(1, &[(0, "y1")]).unwrap();
        let s = selector(&m);
        let names = m.variable_names();
        let p = |t: &str| Poly::parse(t, &names).unwrap();
        let b1 = KForm::one_form(&[(0, p("x1")), (1, p("z"))]);
        let b2 = b1.add(&KForm::one_form(&[(2, p("x1*y1 - z^3"))]));
        assert_eq!(d_chi(&m, &s, &b1), d_chi(&m, &s, &b2));
        let closed = KForm::coordinate_differential(&m, 2).unwrap();
        assert!(d_chi(&m, &s, &closed).is_zero());
    }
}
