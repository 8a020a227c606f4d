//! Frame models: a global frame `E_1..E_n`, its structure functions and a
//! split of the frame into distribution (`D`) and complement (`V`) indices.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{PolyMatrix, QMat};
use crate::poly::{Poly, Q};

/// A vector field written in the global frame, `X = Σ Xⁱ E_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FrameField {
    pub coeffs: Vec<Poly>,
}

impl FrameField {
    pub fn zero(n: usize) -> Self {
        FrameField { coeffs: vec![Poly::zero(); n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut f = FrameField::zero(n);
        f.coeffs[i] = Poly::one();
        f
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect()
    }

    pub fn add(&self, other: &FrameField) -> FrameField {
        FrameField { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &FrameField) -> FrameField {
        FrameField { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, f: &Poly) -> FrameField {
        FrameField { coeffs: self.coeffs.iter().map(|a| a * f).collect() }
    }

    pub fn eval(&self, point: &[Q]) -> Vec<Q> {
        self.coeffs.iter().map(|p| p.eval(point)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartData {
    pub coordinates: Vec<String>,
    /// Row `i` holds the coordinate components of `E_i`.
    pub matrix: PolyMatrix,
    pub inverse: PolyMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Backend {
    /// Frame given by polynomial vector fields on a coordinate chart.
    Chart(ChartData),
    /// Left-invariant frame of a Lie algebra: constant structure constants
    /// and no chart, so `E_i(f) = 0` for every coefficient.
    Abstract,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrameModel {
    pub frame_names: Vec<String>,
    pub backend: Backend,
    /// `structure[i * n + j]` maps `k` to `c^k_{ij}`.
    structure: Vec<BTreeMap<usize, Poly>>,
    /// For each `m`, the pairs `a < b` with `c^m_{ab} ≠ 0`.
    dual_pairs: Vec<Vec<((usize, usize), Poly)>>,
    pub d_indices: Vec<usize>,
    pub v_indices: Vec<usize>,
    pub base_point: Vec<Q>,
}

impl FrameModel {
    /// Builds a chart model. `rows[i]` are the coordinate components of
    /// `E_i`; the frame matrix must have a polynomial inverse.
    pub fn from_chart(
        coordinates: Vec<String>,
        frame_names: Vec<String>,
        rows: Vec<Vec<Poly>>,
        d_indices: Vec<usize>,
        v_indices: Vec<usize>,
        base_point: Vec<Q>,
    ) -> Result<Self> {
        let n = coordinates.len();
        if rows.len() != n || frame_names.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(format!(
                "a chart frame on {n} coordinates needs {n} fields with {n} components each"
            )));
        }
        if base_point.len() != n {
            return Err(Error::InvalidModel(format!(
                "base point has {} entries, expected {n}",
                base_point.len()
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            for p in r {
                if p.nvars_used() > n {
                    return Err(Error::InvalidModel(format!(
                        "component of `{}` uses an undeclared variable",
                        frame_names[i]
                    )));
                }
            }
        }
        let matrix = PolyMatrix::from_dense(rows);
        let inverse = matrix.inverse().ok_or_else(|| {
            Error::InvalidModel(
                "frame matrix has no polynomial inverse; the frame must be unimodular".into(),
            )
        })?;
        let chart = ChartData { coordinates, matrix, inverse };
        let mut structure = vec![BTreeMap::new(); n * n];
        for i in 0..n {
            for j in i + 1..n {
                // Coordinate components of [E_i, E_j].
                let mut w = vec![Poly::zero(); n];
                for (l, wl) in w.iter_mut().enumerate() {
                    for m in 0..n {
                        let aim = chart.matrix.get(i, m);
                        let ajm = chart.matrix.get(j, m);
                        if !aim.is_zero() {
                            *wl += &(&aim * &chart.matrix.get(j, l).derivative(m));
                        }
                        if !ajm.is_zero() {
                            *wl -= &(&ajm * &chart.matrix.get(i, l).derivative(m));
                        }
                    }
                }
                for k in 0..n {
                    let mut c = Poly::zero();
                    for (l, wl) in w.iter().enumerate() {
                        if let Some(b) = chart.inverse.get_ref(l, k) {
                            c += &(wl * b);
                        }
                    }
                    if !c.is_zero() {
                        structure[j * n + i].insert(k, -&c);
                        structure[i * n + j].insert(k, c);
                    }
                }
            }
        }
        let model = FrameModel::assemble(
            frame_names,
            Backend::Chart(chart),
            structure,
            d_indices,
            v_indices,
            base_point,
        )?;
        Ok(model)
    }

    /// Builds an abstract (left-invariant) model from structure constants
    /// `(i, j, k, c)` meaning `c^k_{ij} = c` for `i < j`.
    pub fn abstract_algebra(
        frame_names: Vec<String>,
        constants: &[(usize, usize, usize, Q)],
        d_indices: Vec<usize>,
        v_indices: Vec<usize>,
    ) -> Result<Self> {
        let n = frame_names.len();
        let mut structure: Vec<BTreeMap<usize, Poly>> = vec![BTreeMap::new(); n * n];
        for (i, j, k, c) in constants {
            let (i, j, k) = (*i, *j, *k);
            if i >= n || j >= n || k >= n {
                return Err(Error::InvalidModel(format!(
                    "structure constant ({i},{j},{k}) out of range for dimension {n}"
                )));
            }
            if i == j {
                if !c.is_zero() {
                    return Err(Error::InvalidModel(format!(
                        "structure constant c^{k}_{{{i}{i}}} must vanish by antisymmetry"
                    )));
                }
                continue;
            }
            let (a, b, c) = if i < j { (i, j, c.clone()) } else { (j, i, -c.clone()) };
            let e = structure[a * n + b].entry(k).or_insert_with(Poly::zero);
            *e += &Poly::constant(c);
            if e.is_zero() {
                structure[a * n + b].remove(&k);
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                let neg: BTreeMap<usize, Poly> =
                    structure[a * n + b].iter().map(|(k, c)| (*k, -c)).collect();
                structure[b * n + a] = neg;
            }
        }
        let model =
            FrameModel::assemble(frame_names, Backend::Abstract, structure, d_indices, v_indices, vec![])?;
        model.check_jacobi()?;
        Ok(model)
    }

    fn assemble(
        frame_names: Vec<String>,
        backend: Backend,
        structure: Vec<BTreeMap<usize, Poly>>,
        d_indices: Vec<usize>,
        v_indices: Vec<usize>,
        base_point: Vec<Q>,
    ) -> Result<Self> {
        let n = frame_names.len();
        let mut seen = vec![false; n];
        for &i in d_indices.iter().chain(&v_indices) {
            if i >= n || seen[i] {
                return Err(Error::InvalidModel(
                    "D and V indices must partition the frame".into(),
                ));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidModel("D and V indices must partition the frame".into()));
        }
        if d_indices.is_empty() {
            return Err(Error::InvalidModel("the distribution D must be nonzero".into()));
        }
        let mut names = frame_names.clone();
        names.sort();
        names.dedup();
        if names.len() != n {
            return Err(Error::InvalidModel("frame names must be distinct".into()));
        }
        let mut d_indices = d_indices;
        let mut v_indices = v_indices;
        d_indices.sort_unstable();
        v_indices.sort_unstable();
        let mut dual_pairs = vec![Vec::new(); n];
        for a in 0..n {
            for b in a + 1..n {
                for (m, c) in &structure[a * n + b] {
                    dual_pairs[*m].push(((a, b), c.clone()));
                }
            }
        }
        Ok(FrameModel {
            frame_names,
            backend,
            structure,
            dual_pairs,
            d_indices,
            v_indices,
            base_point,
        })
    }

    /// The same frame with a different `D ⊕ V` split.
    pub fn with_split(&self, d_indices: Vec<usize>, v_indices: Vec<usize>) -> Result<Self> {
        FrameModel::assemble(
            self.frame_names.clone(),
            self.backend.clone(),
            self.structure.clone(),
            d_indices,
            v_indices,
            self.base_point.clone(),
        )
    }

    pub fn with_base_point(&self, base_point: Vec<Q>) -> Result<Self> {
        if base_point.len() != self.nvars() {
            return Err(Error::InvalidModel(format!(
                "base point has {} entries, expected {}",
                base_point.len(),
                self.nvars()
            )));
        }
        let mut m = self.clone();
        m.base_point = base_point;
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.frame_names.len()
    }

    pub fn nu(&self) -> usize {
        self.v_indices.len()
    }

    pub fn is_abstract(&self) -> bool {
        matches!(self.backend, Backend::Abstract)
    }

    pub fn chart(&self) -> Option<&ChartData> {
        match &self.backend {
            Backend::Chart(c) => Some(c),
            Backend::Abstract => None,
        }
    }

    /// Number of polynomial variables (coordinates); zero for abstract models.
    pub fn nvars(&self) -> usize {
        self.chart().map_or(0, |c| c.coordinates.len())
    }

    /// Variable names used to print and parse coefficients.
    pub fn variable_names(&self) -> Vec<String> {
        self.chart().map(|c| c.coordinates.clone()).unwrap_or_default()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.frame_names.iter().position(|n| n == name)
    }

    pub fn is_d(&self, i: usize) -> bool {
        self.d_indices.binary_search(&i).is_ok()
    }

    /// Position of frame index `i` inside `V`, if it is vertical.
    pub fn v_position(&self, i: usize) -> Option<usize> {
        self.v_indices.binary_search(&i).ok()
    }

    /// `c^k_{ij}` for all `k`.
    pub fn structure(&self, i: usize, j: usize) -> &BTreeMap<usize, Poly> {
        &self.structure[i * self.dim() + j]
    }

    pub fn structure_coeff(&self, i: usize, j: usize, k: usize) -> Poly {
        self.structure(i, j).get(&k).cloned().unwrap_or_default()
    }

    /// Pairs `a < b` with `c^m_{ab} ≠ 0`.
    pub fn pairs_into(&self, m: usize) -> &[((usize, usize), Poly)] {
        &self.dual_pairs[m]
    }

    /// `E_i(f)`.
    pub fn derive(&self, i: usize, f: &Poly) -> Poly {
        match &self.backend {
            Backend::Abstract => Poly::zero(),
            Backend::Chart(c) => {
                let mut out = Poly::zero();
                for j in 0..c.coordinates.len() {
                    if let Some(a) = c.matrix.get_ref(i, j) {
                        let d = f.derivative(j);
                        if !d.is_zero() {
                            out += &(a * &d);
                        }
                    }
                }
                out
            }
        }
    }

    /// `X(f)`.
    pub fn apply(&self, x: &FrameField, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        if self.is_abstract() || f.is_constant() {
            return out;
        }
        for (i, xi) in x.coeffs.iter().enumerate() {
            if !xi.is_zero() {
                out += &(xi * &self.derive(i, f));
            }
        }
        out
    }

    fn check_field(&self, x: &FrameField) -> Result<()> {
        if x.dim() != self.dim() {
            return Err(Error::MismatchedModel(format!(
                "field of dimension {} used with a model of dimension {}",
                x.dim(),
                self.dim()
            )));
        }
        Ok(())
    }

    pub fn bracket(&self, x: &FrameField, y: &FrameField) -> Result<FrameField> {
        self.check_field(x)?;
        self.check_field(y)?;
        Ok(self.bracket_unchecked(x, y))
    }

    pub fn bracket_unchecked(&self, x: &FrameField, y: &FrameField) -> FrameField {
        let n = self.dim();
        let mut out = FrameField::zero(n);
        let xs = x.support();
        let ys = y.support();
        for &i in &xs {
            for &j in &ys {
                if i == j {
                    continue;
                }
                let s = self.structure(i, j);
                if s.is_empty() {
                    continue;
                }
                let f = &x.coeffs[i] * &y.coeffs[j];
                for (k, c) in s {
                    out.coeffs[*k] += &(&f * c);
                }
            }
        }
        if !self.is_abstract() {
            for k in 0..n {
                let a = self.apply(x, &y.coeffs[k]);
                let b = self.apply(y, &x.coeffs[k]);
                out.coeffs[k] += &(&a - &b);
            }
        }
        out
    }

    pub fn frame_bracket(&self, i: usize, j: usize) -> FrameField {
        let mut out = FrameField::zero(self.dim());
        for (k, c) in self.structure(i, j) {
            out.coeffs[*k] = c.clone();
        }
        out
    }

    /// Coordinate components `Σ Xⁱ a_{ij}` of a frame field.
    pub fn coordinate_components(&self, x: &FrameField) -> Option<Vec<Poly>> {
        let c = self.chart()?;
        let n = self.dim();
        let mut out = vec![Poly::zero(); n];
        for ((i, j), a) in c.matrix.entries() {
            if !x.coeffs[*i].is_zero() {
                out[*j] += &(&x.coeffs[*i] * a);
            }
        }
        Some(out)
    }

    /// Frame components of a coordinate vector field.
    pub fn from_coordinate_components(&self, v: &[Poly]) -> Option<FrameField> {
        let c = self.chart()?;
        let n = self.dim();
        let mut out = FrameField::zero(n);
        for ((l, k), b) in c.inverse.entries() {
            if !v[*l].is_zero() {
                out.coeffs[*k] += &(&v[*l] * b);
            }
        }
        Some(out)
    }

    /// Evaluated frame matrix (row `i` = `E_i`) at a point.
    pub fn frame_matrix_at(&self, point: &[Q]) -> Option<QMat> {
        self.chart().map(|c| c.matrix.eval(point))
    }

    /// The Jacobi identity for the structure functions, including the
    /// derivative terms of a chart frame.
    pub fn check_jacobi(&self) -> Result<()> {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let e = |a| FrameField::basis(n, a);
                    let t1 = self.bracket_unchecked(&self.frame_bracket(i, j), &e(k));
                    let t2 = self.bracket_unchecked(&self.frame_bracket(j, k), &e(i));
                    let t3 = self.bracket_unchecked(&self.frame_bracket(k, i), &e(j));
                    if !t1.add(&t2).add(&t3).is_zero() {
                        return Err(Error::InvalidModel(format!(
                            "Jacobi identity fails for ({}, {}, {})",
                            self.frame_names[i], self.frame_names[j], self.frame_names[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Antisymmetry of the stored structure functions.
    pub fn check_antisymmetry(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            self.structure(i, i).is_empty()
                && (0..n).all(|j| {
                    let a = self.structure(i, j);
                    let b = self.structure(j, i);
                    a.len() == b.len() && a.iter().all(|(k, c)| b.get(k) == Some(&-c))
                })
        })
    }

    /// Nonsingularity of the frame at a point (always true for abstract models).
    pub fn frame_nonsingular_at(&self, point: &[Q]) -> bool {
        match self.frame_matrix_at(point) {
            None => true,
            Some(m) => !m.det().is_zero(),
        }
    }

    /// Structure constants evaluated at a point, as `(i, j, k, c)` with `i < j`.
    pub fn structure_constants_at(&self, point: &[Q]) -> Vec<(usize, usize, usize, Q)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for (k, c) in self.structure(i, j) {
                    let v = c.eval(point);
                    if !v.is_zero() {
                        out.push((i, j, *k, v));
                    }
                }
            }
        }
        out
    }
}
