//! Differential forms and multivectors expressed in the global frame and
//! its dual coframe `τ¹..τⁿ`.
//!
//! A `k`-form stores `ω(E_{i_1},…,E_{i_k})` for strictly increasing index
//! tuples; a `k`-vector stores its coefficients on `E_{i_1}∧…∧E_{i_k}` the
//! same way, so that `⟨τ^I, E_J⟩ = δ_{IJ}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::frame::{FrameField, FrameModel};
use crate::linalg::PolyMatrix;
use crate::poly::Poly;

/// Coefficient type of a form: scalar polynomials or `gl(V)`-valued ones.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scaled(&self, f: &Poly) -> Self;
    fn negated(&self) -> Self;
}

impl Coeff for Poly {
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn scaled(&self, f: &Poly) -> Self {
        self * f
    }
    fn negated(&self) -> Self {
        -self
    }
}

impl Coeff for PolyMatrix {
    fn is_zero(&self) -> bool {
        PolyMatrix::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        PolyMatrix::add_assign(self, other);
    }
    fn scaled(&self, f: &Poly) -> Self {
        self.scale(f)
    }
    fn negated(&self) -> Self {
        self.neg()
    }
}

/// Sorts an index list; `None` if an index repeats, otherwise the sorted
/// list and whether the permutation was odd.
pub fn sort_with_sign(mut idx: Vec<usize>) -> Option<(Vec<usize>, bool)> {
    let mut odd = false;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            odd = !odd;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((idx, odd))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Form<C: Coeff> {
    pub degree: usize,
    terms: BTreeMap<Vec<usize>, C>,
}

pub type KForm = Form<Poly>;
pub type GlForm = Form<PolyMatrix>;

impl<C: Coeff> Form<C> {
    pub fn zero(degree: usize) -> Self {
        Form { degree, terms: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Adds `c · τ^{idx}` for an arbitrary ordering of `idx`.
    pub fn add_term(&mut self, idx: Vec<usize>, c: &C) {
        debug_assert_eq!(idx.len(), self.degree);
        if c.is_zero() {
            return;
        }
        let Some((idx, odd)) = sort_with_sign(idx) else { return };
        let c = if odd { c.negated() } else { c.clone() };
        match self.terms.get_mut(&idx) {
            Some(e) => {
                e.add_assign(&c);
                if e.is_zero() {
                    self.terms.remove(&idx);
                }
            }
            None => {
                self.terms.insert(idx, c);
            }
        }
    }

    /// `ω(E_{idx})` for any ordering of `idx`; `None` stands for zero.
    pub fn get(&self, idx: &[usize]) -> Option<C> {
        let (sorted, odd) = sort_with_sign(idx.to_vec())?;
        let c = self.terms.get(&sorted)?;
        Some(if odd { c.negated() } else { c.clone() })
    }

    pub fn get_sorted(&self, idx: &[usize]) -> Option<&C> {
        self.terms.get(idx)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Form { degree: self.degree, terms: self.terms.iter().map(|(k, c)| (k.clone(), c.negated())).collect() }
    }

    pub fn scale(&self, f: &Poly) -> Self {
        let mut out = Form::zero(self.degree);
        if f.is_zero() {
            return out;
        }
        for (k, c) in &self.terms {
            let v = c.scaled(f);
            if !v.is_zero() {
                out.terms.insert(k.clone(), v);
            }
        }
        out
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Form<D> {
        let mut out = Form::zero(self.degree);
        for (k, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(k.clone(), v);
            }
        }
        out
    }

    /// Keeps only the terms whose indices all satisfy `keep`.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        Form {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| k.iter().all(|&i| keep(i)))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Interior product `ι_X ω`.
    pub fn interior(&self, x: &FrameField) -> Self {
        assert!(self.degree > 0, "interior product of a 0-form");
        let mut out = Form::zero(self.degree - 1);
        for (idx, c) in &self.terms {
            for (p, &i) in idx.iter().enumerate() {
                let xi = &x.coeffs[i];
                if xi.is_zero() {
                    continue;
                }
                let mut rest = idx.clone();
                rest.remove(p);
                let v = c.scaled(xi);
                out.add_term(rest, &if p % 2 == 1 { v.negated() } else { v });
            }
        }
        out
    }

    /// `ω(X_1,…,X_k)`.
    pub fn eval_fields(&self, fields: &[FrameField]) -> Option<C> {
        assert_eq!(fields.len(), self.degree);
        let mut cur = self.clone();
        for x in fields {
            cur = cur.interior(x);
        }
        cur.terms.get(&Vec::new()).cloned()
    }

    /// `(scalar) ∧ self`.
    pub fn wedge_left(&self, a: &KForm) -> Self {
        let mut out = Form::zero(a.degree + self.degree);
        for (i, f) in &a.terms {
            for (j, c) in &self.terms {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_term(idx, &c.scaled(f));
            }
        }
        out
    }

    /// Contraction with a selector table `χ`: `(ι_χ η)_j = Σ_{a<b} χ_j^{ab} η_{ab}`.
    pub fn contract(&self, chi: &[KVector]) -> Self {
        assert_eq!(self.degree, 2, "ι_χ acts on 2-forms");
        let mut out = Form::zero(1);
        for (j, row) in chi.iter().enumerate() {
            for (ab, coeff) in &row.terms {
                if let Some(eta) = self.terms.get(ab) {
                    out.add_term(vec![j], &eta.scaled(coeff));
                }
            }
        }
        out
    }

    /// Exterior derivative assembled by the Leibniz rule from a derivation
    /// `nabla(a, c) = D_{E_a} c` on coefficients:
    /// `d(c τ^I) = Σ_a τ^a ∧ τ^I ⊗ D_a c + c ⊗ dτ^I`.
    pub fn d_with(&self, model: &FrameModel, nabla: impl Fn(usize, &C) -> Option<C>) -> Self {
        let n = model.dim();
        let mut out = Form::zero(self.degree + 1);
        for (idx, c) in &self.terms {
            for a in 0..n {
                if idx.contains(&a) {
                    continue;
                }
                if let Some(dc) = nabla(a, c) {
                    let mut full = vec![a];
                    full.extend_from_slice(idx);
                    out.add_term(full, &dc);
                }
            }
            for (p, &m) in idx.iter().enumerate() {
                for ((a, b), s) in model.pairs_into(m) {
                    if idx.iter().enumerate().any(|(q, &i)| q != p && (i == *a || i == *b)) {
                        continue;
                    }
                    // dτ^m = −Σ_{a<b} c^m_{ab} τ^a∧τ^b, inserted at slot p.
                    let mut full = idx[..p].to_vec();
                    full.push(*a);
                    full.push(*b);
                    full.extend_from_slice(&idx[p + 1..]);
                    let v = c.scaled(s);
                    let neg = p % 2 == 0;
                    out.add_term(full, &if neg { v.negated() } else { v });
                }
            }
        }
        out
    }
}

impl KForm {
    /// The 0-form `f`.
    pub fn function(f: Poly) -> Self {
        let mut out = Form::zero(0);
        out.add_term(vec![], &f);
        out
    }

    /// The coframe element `τ^i`.
    pub fn coframe(i: usize) -> Self {
        let mut out = Form::zero(1);
        out.add_term(vec![i], &Poly::one());
        out
    }

    pub fn one_form(coeffs: &[(usize, Poly)]) -> Self {
        let mut out = Form::zero(1);
        for (i, c) in coeffs {
            out.add_term(vec![*i], c);
        }
        out
    }

    pub fn value(&self) -> Poly {
        if self.degree != 0 {
            return Poly::zero();
        }
        self.terms.get(&Vec::new()).cloned().unwrap_or_default()
    }

    pub fn wedge(&self, other: &KForm) -> KForm {
        other.wedge_left(self)
    }

    /// Pairing with a multivector of the same degree.
    pub fn pair(&self, v: &KVector) -> Poly {
        assert_eq!(self.degree, v.degree);
        let mut acc = Poly::zero();
        for (k, c) in &v.terms {
            if let Some(w) = self.terms.get(k) {
                acc += &(w * c);
            }
        }
        acc
    }

    /// Coordinate differential `dx_j = Σ_i a_{ij} τ^i` on a chart model.
    pub fn coordinate_differential(model: &FrameModel, j: usize) -> Option<KForm> {
        let c = model.chart()?;
        let mut out = Form::zero(1);
        for i in 0..model.dim() {
            if let Some(a) = c.matrix.get_ref(i, j) {
                out.add_term(vec![i], a);
            }
        }
        Some(out)
    }

    pub fn to_text(&self, names: &[String]) -> String {
        let mut s = format!("kform {}\n", self.degree);
        for (idx, c) in &self.terms {
            let idx: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(s, "{} : {}", idx.join(" "), c.to_text(names));
        }
        s
    }

    pub fn from_text(text: &str, names: &[String]) -> Result<KForm> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty form text".into()))?;
        let degree: usize = header
            .strip_prefix("kform")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected `kform <degree>`, found `{header}`")))?;
        let mut out = Form::zero(degree);
        for line in lines {
            let (idx, poly) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected `indices : polynomial`, found `{line}`")))?;
            let idx: Vec<usize> = idx
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad index `{t}`"))))
                .collect::<Result<_>>()?;
            if idx.len() != degree {
                return Err(Error::Parse(format!(
                    "term `{line}` has {} indices, expected {degree}",
                    idx.len()
                )));
            }
            out.add_term(idx, &Poly::parse(poly, names)?);
        }
        Ok(out)
    }
}

/// Exterior derivative of a scalar form.
pub fn ext_d(model: &FrameModel, w: &KForm) -> KForm {
    w.d_with(model, |a, c| {
        let v = model.derive(a, c);
        (!v.is_zero()).then_some(v)
    })
}

/// Lie derivative `𝓛_Z ω = ι_Z dω + d ι_Z ω`.
pub fn lie_derivative(model: &FrameModel, z: &FrameField, w: &KForm) -> KForm {
    if w.degree == 0 {
        return KForm::function(model.apply(z, &w.value()));
    }
    let a = ext_d(model, w).interior(z);
    let b = ext_d(model, &w.interior(z));
    a.add(&b)
}

/// `dω(X, Y)` for a 1-form via the invariant formula, used as an
/// independent route in tests and checks.
pub fn d_invariant_1form(model: &FrameModel, w: &KForm, x: &FrameField, y: &FrameField) -> Poly {
    let wx = w.eval_fields(std::slice::from_ref(x)).unwrap_or_default();
    let wy = w.eval_fields(std::slice::from_ref(y)).unwrap_or_default();
    let br = model.bracket_unchecked(x, y);
    let wb = w.eval_fields(&[br]).unwrap_or_default();
    &(&model.apply(x, &wy) - &model.apply(y, &wx)) - &wb
}

/// Multivector in the frame basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KVector {
    pub degree: usize,
    terms: BTreeMap<Vec<usize>, Poly>,
}

impl KVector {
    pub fn zero(degree: usize) -> Self {
        KVector { degree, terms: BTreeMap::new() }
    }

    pub fn basis(idx: Vec<usize>) -> Self {
        let mut v = KVector::zero(idx.len());
        v.add_term(idx, &Poly::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, idx: Vec<usize>, c: &Poly) {
        if c.is_zero() {
            return;
        }
        let Some((idx, odd)) = sort_with_sign(idx) else { return };
        let e = self.terms.entry(idx.clone()).or_default();
        if odd {
            *e -= c;
        } else {
            *e += c;
        }
        if e.is_zero() {
            self.terms.remove(&idx);
        }
    }

    pub fn get(&self, idx: &[usize]) -> Poly {
        match sort_with_sign(idx.to_vec()) {
            None => Poly::zero(),
            Some((s, odd)) => {
                let c = self.terms.get(&s).cloned().unwrap_or_default();
                if odd {
                    -c
                } else {
                    c
                }
            }
        }
    }

    /// `X ∧ Y`.
    pub fn wedge2(x: &FrameField, y: &FrameField) -> KVector {
        let mut v = KVector::zero(2);
        for a in x.support() {
            for b in y.support() {
                if a != b {
                    v.add_term(vec![a, b], &(&x.coeffs[a] * &y.coeffs[b]));
                }
            }
        }
        v
    }

    pub fn add(&self, other: &KVector) -> KVector {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &KVector) -> KVector {
        self.add(&other.scale(&-Poly::one()))
    }

    pub fn scale(&self, f: &Poly) -> KVector {
        let mut out = KVector::zero(self.degree);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), &(c * f));
        }
        out
    }

    /// Indices appearing in any term.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.terms.keys().flatten().copied().collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    /// Frame on ℝ⁴ with nonconstant structure functions.
    fn model() -> FrameModel {
        let c = names(&["x", "y", "z", "w"]);
        let p = |t: &str| Poly::parse(t, &c).unwrap();
        FrameModel::from_chart(
            c.clone(),
            names(&["A", "B", "C", "D"]),
            vec![
                vec![p("1"), p("0"), p("y"), p("0")],
                vec![p("0"), p("1"), p("x^2"), p("z")],
                vec![p("0"), p("0"), p("1"), p("0")],
                vec![p("x"), p("0"), p("0"), p("1")],
            ],
            vec![0, 1],
            vec![2, 3],
            vec![q(0); 4],
        )
        .unwrap()
    }

    fn arb_coeff() -> impl Strategy<Value = Poly> {
        let c = names(&["x", "y", "z", "w"]);
        prop::sample::select(vec!["0", "1", "x", "y*z - 2", "x^2*w", "3/2*y + z"])
            .prop_map(move |s| Poly::parse(s, &c).unwrap())
    }

    fn arb_form(deg: usize) -> impl Strategy<Value = KForm> {
        prop::collection::vec((prop::collection::vec(0usize..4, deg), arb_coeff()), 0..4).prop_map(
            move |terms| {
                let mut f = KForm::zero(deg);
                for (idx, c) in terms {
                    f.add_term(idx, &c);
                }
                f
            },
        )
    }

    fn arb_field() -> impl Strategy<Value = FrameField> {
        prop::collection::vec(arb_coeff(), 4).prop_map(|coeffs| FrameField { coeffs })
    }

    #[test]
    fn sorting_sign() {
        assert_eq!(sort_with_sign(vec![2, 0, 1]), Some((vec![0, 1, 2], false)));
        assert_eq!(sort_with_sign(vec![1, 0]), Some((vec![0, 1], true)));
        assert_eq!(sort_with_sign(vec![1, 1]), None);
    }

    #[test]
    fn dtau_is_minus_structure() {
        let m = model();
        for k in 0..4 {
            let dt = ext_d(&m, &KForm::coframe(k));
            for i in 0..4 {
                for j in 0..4 {
                    let v = dt.get(&[i, j]).unwrap_or_default();
                    assert_eq!(v, -m.structure_coeff(i, j, k));
                }
            }
        }
    }

    #[test]
    fn text_round_trip() {
        let m = model();
        let names = m.variable_names();
        let mut f = KForm::zero(2);
        f.add_term(vec![2, 0], &Poly::parse("x^2 - 1/3*y", &names).unwrap());
        f.add_term(vec![1, 3], &Poly::parse("z", &names).unwrap());
        let t = f.to_text(&names);
        assert_eq!(KForm::from_text(&t, &names).unwrap(), f);
        assert!(KForm::from_text("kform 2\n0 : x", &names).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn d_squared_vanishes(w in arb_form(1), f in arb_coeff()) {
            let m = model();
            prop_assert!(ext_d(&m, &ext_d(&m, &w)).is_zero());
            prop_assert!(ext_d(&m, &ext_d(&m, &KForm::function(f))).is_zero());
        }

        #[test]
        fn d_two_forms_squared(w in arb_form(2)) {
            let m = model();
            prop_assert!(ext_d(&m, &ext_d(&m, &w)).is_zero());
        }

        #[test]
        fn d_matches_invariant_formula(w in arb_form(1), x in arb_field(), y in arb_field()) {
            let m = model();
            let dw = ext_d(&m, &w);
            let lhs = dw.eval_fields(&[x.clone(), y.clone()]).unwrap_or_default();
            prop_assert_eq!(lhs, d_invariant_1form(&m, &w, &x, &y));
        }

        #[test]
        fn cartan_identities(w in arb_form(1), z in arb_field(), x in arb_field()) {
            let m = model();
            // 𝓛_Z ω (X) = Z(ω(X)) − ω([Z, X])
            let l = lie_derivative(&m, &z, &w);
            let lhs = l.eval_fields(std::slice::from_ref(&x)).unwrap_or_default();
            let wx = w.eval_fields(std::slice::from_ref(&x)).unwrap_or_default();
            let br = m.bracket_unchecked(&z, &x);
            let rhs = &m.apply(&z, &wx) - &w.eval_fields(&[br]).unwrap_or_default();
            prop_assert_eq!(lhs, rhs);
            // d commutes with 𝓛_Z
            let a = ext_d(&m, &lie_derivative(&m, &z, &w));
            let b = lie_derivative(&m, &z, &ext_d(&m, &w));
            prop_assert_eq!(a, b);
        }

        #[test]
        fn wedge_leibniz(a in arb_form(1), b in arb_form(1)) {
            let m = model();
            let lhs = ext_d(&m, &a.wedge(&b));
            let rhs = ext_d(&m, &a).wedge(&b).sub(&a.wedge(&ext_d(&m, &b)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn interior_is_f_linear(w in arb_form(2), x in arb_field(), f in arb_coeff()) {
            prop_assert_eq!(w.interior(&x.scale(&f)), w.interior(&x).scale(&f));
        }
    }

    #[test]
    fn coordinate_differentials_are_closed() {
        let m = model();
        for j in 0..4 {
            let dx = KForm::coordinate_differential(&m, j).unwrap();
            assert!(ext_d(&m, &dx).is_zero(), "d(dx_{j}) must vanish");
            for i in 0..4 {
                let e = FrameField::basis(4, i);
                let expect = m.chart().unwrap().matrix.get(i, j);
                assert_eq!(dx.eval_fields(&[e]).unwrap_or_default(), expect);
            }
        }
    }
}
