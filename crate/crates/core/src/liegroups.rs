//! Structure-constant Lie algebras: free nilpotent algebras in a Hall basis,
//! Carnot gradings and the `p₁ ⊕ p₂ ⊕ 𝔨` split.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::distribution::{compute_flag, Flag, FlagOptions};
use crate::frame::FrameModel;
use crate::selector::{build_selector_restricted, Selector};
use crate::linalg::{sparse_axpy, Echelon, SparseVec};
use crate::poly::{q, Q};

/// A Lie algebra given by `c^k_{ij}` on a named basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraSpec {
    pub names: Vec<String>,
    /// `(i, j, k, c)` with `i < j`, sorted, no zero entries.
    pub constants: Vec<(usize, usize, usize, Q)>,
    /// Index sets `g₁, …, g_r`, when graded.
    pub grading: Option<Vec<Vec<usize>>>,
}

impl LieAlgebraSpec {
    /// Normalizes the constants (antisymmetry folded onto `i < j`).
    pub fn new(
        names: Vec<String>,
        constants: &[(usize, usize, usize, Q)],
        grading: Option<Vec<Vec<usize>>>,
    ) -> Result<LieAlgebraSpec> {
        let n = names.len();
        let mut acc: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
        for (i, j, k, c) in constants {
            if *i >= n || *j >= n || *k >= n {
                return Err(Error::Lie(format!("structure constant ({i},{j},{k}) out of range")));
            }
            if i == j {
                if !c.is_zero() {
                    return Err(Error::Lie(format!("c^{k}_{{{i}{i}}} must vanish")));
                }
                continue;
            }
            let (a, b, c) = if i < j { (*i, *j, c.clone()) } else { (*j, *i, -c.clone()) };
            *acc.entry((a, b, *k)).or_insert_with(Q::zero) += c;
        }
        let constants = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((i, j, k), c)| (i, j, k, c)).collect();
        let spec = LieAlgebraSpec { names, constants, grading };
        spec.check_jacobi()?;
        if let Some(g) = &spec.grading {
            spec.check_grading(g)?;
        }
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn abelian(n: usize) -> LieAlgebraSpec {
        LieAlgebraSpec { names: (1..=n).map(|i| format!("e{i}")).collect(), constants: vec![], grading: None }
    }

    fn table(&self) -> HashMap<(usize, usize), SparseVec<usize>> {
        let mut t: HashMap<(usize, usize), SparseVec<usize>> = HashMap::new();
        for (i, j, k, c) in &self.constants {
            t.entry((*i, *j)).or_default().insert(*k, c.clone());
            t.entry((*j, *i)).or_default().insert(*k, -c.clone());
        }
        t
    }

    /// `[x, y]` for coordinate vectors.
    pub fn bracket(&self, x: &SparseVec<usize>, y: &SparseVec<usize>) -> SparseVec<usize> {
        let t = self.table();
        bracket_with(&t, x, y)
    }

    pub fn check_jacobi(&self) -> Result<()> {
        let t = self.table();
        let n = self.dim();
        let mut degree = vec![0usize; n];
        let mut top = usize::MAX;
        if let Some(g) = &self.grading {
            top = g.len();
            for (d, layer) in g.iter().enumerate() {
                for &i in layer {
                    if i < n {
                        degree[i] = d + 1;
                    }
                }
            }
        }
        let e = |i: usize| -> SparseVec<usize> { [(i, q(1))].into_iter().collect() };
        for a in 0..n {
            for b in a + 1..n {
                let ab = bracket_with(&t, &e(a), &e(b));
                for c in b + 1..n {
                    // Triples above the top degree vanish once the grading holds.
                    if top != usize::MAX && degree[a] + degree[b] + degree[c] > top {
                        continue;
                    }
                    let mut s = bracket_with(&t, &ab, &e(c));
                    let bc = bracket_with(&t, &e(b), &e(c));
                    sparse_axpy(&mut s, &q(1), &bracket_with(&t, &bc, &e(a)));
                    let ca = bracket_with(&t, &e(c), &e(a));
                    sparse_axpy(&mut s, &q(1), &bracket_with(&t, &ca, &e(b)));
                    if !s.is_empty() {
                        return Err(Error::Lie(format!(
                            "Jacobi identity fails for ({}, {}, {})",
                            self.names[a], self.names[b], self.names[c]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_grading(&self, g: &[Vec<usize>]) -> Result<()> {
        let n = self.dim();
        let mut degree = vec![0usize; n];
        for (d, layer) in g.iter().enumerate() {
            for &i in layer {
                if i >= n || degree[i] != 0 {
                    return Err(Error::Lie("grading layers must partition the basis".into()));
                }
                degree[i] = d + 1;
            }
        }
        if degree.contains(&0) {
            return Err(Error::Lie("grading layers must partition the basis".into()));
        }
        for (i, j, k, _) in &self.constants {
            if degree[*k] != degree[*i] + degree[*j] {
                return Err(Error::Lie(format!(
                    "[{}, {}] has a component along {} outside degree {}",
                    self.names[*i],
                    self.names[*j],
                    self.names[*k],
                    degree[*i] + degree[*j]
                )));
            }
        }
        Ok(())
    }

    /// `[g₁, g_k] = g_{k+1}` for `k < r` and `[g₁, g_r] = 0`.
    pub fn is_carnot(&self) -> bool {
        let Some(g) = &self.grading else { return false };
        let t = self.table();
        let r = g.len();
        for k in 0..r {
            let mut span: Echelon<usize> = Echelon::new();
            for &a in &g[0] {
                for &b in &g[k] {
                    if let Some(v) = t.get(&(a, b)) {
                        span.insert(v);
                    }
                }
            }
            let expect = if k + 1 < r { g[k + 1].len() } else { 0 };
            if span.rank() != expect {
                return false;
            }
        }
        true
    }

    pub fn step(&self) -> Option<usize> {
        self.grading.as_ref().map(|g| g.len())
    }

    /// Abstract frame model with the given split. The model is
    /// left-invariant, so the base point is the identity.
    pub fn to_frame_model(&self, d_indices: Vec<usize>, v_indices: Vec<usize>) -> Result<FrameModel> {
        FrameModel::abstract_algebra(self.names.clone(), &self.constants, d_indices, v_indices)
    }
}

fn bracket_with(
    t: &HashMap<(usize, usize), SparseVec<usize>>,
    x: &SparseVec<usize>,
    y: &SparseVec<usize>,
) -> SparseVec<usize> {
    let mut out = SparseVec::new();
    for (i, a) in x {
        for (j, b) in y {
            if let Some(v) = t.get(&(*i, *j)) {
                sparse_axpy(&mut out, &(a * b), v);
            }
        }
    }
    out
}

/// Number of degree-`k` elements of a Hall basis on `n` generators,
/// `(1/k) Σ_{d | k} μ(d) n^{k/d}`.
pub fn witt_dimension(n: usize, k: usize) -> usize {
    fn mobius(mut m: usize) -> i64 {
        let mut res = 1;
        let mut p = 2;
        while p * p <= m {
            if m.is_multiple_of(p) {
                m /= p;
                if m.is_multiple_of(p) {
                    return 0;
                }
                res = -res;
            }
            p += 1;
        }
        if m > 1 {
            res = -res;
        }
        res
    }
    let mut total: i128 = 0;
    for d in 1..=k {
        if k.is_multiple_of(d) {
            total += mobius(d) as i128 * (n as i128).pow((k / d) as u32);
        }
    }
    (total / k as i128) as usize
}

/// Basic commutators of weight `≤ r`: generators, then `[a, b]` with
/// `a > b` and, if `a = [a₁, a₂]`, `a₂ ≤ b`. Ordered by weight, then by
/// creation (lexicographic in the pair of indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HallBasis {
    pub generators: usize,
    /// `None` for generators, `Some((a, b))` for `[a, b]`.
    pub elements: Vec<Option<(usize, usize)>>,
    pub weight: Vec<usize>,
    index: HashMap<(usize, usize), usize>,
}

impl HallBasis {
    pub fn new(n: usize, r: usize) -> HallBasis {
        let mut elements = Vec::new();
        let mut weight = Vec::new();
        let mut index = HashMap::new();
        for _ in 0..n {
            elements.push(None);
            weight.push(1);
        }
        for w in 2..=r {
            let cur = elements.len();
            let mut fresh = Vec::new();
            for a in 0..cur {
                for b in 0..a {
                    if weight[a] + weight[b] != w {
                        continue;
                    }
                    let ok = match elements[a] {
                        None => true,
                        Some((_, a2)) => a2 <= b,
                    };
                    if ok {
                        fresh.push((a, b));
                    }
                }
            }
            fresh.sort();
            for p in fresh {
                index.insert(p, elements.len());
                elements.push(Some(p));
                weight.push(w);
            }
        }
        HallBasis { generators: n, elements, weight, index }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Bracket word, e.g. `[[X2, X1], X1]`.
    pub fn name(&self, i: usize) -> String {
        match self.elements[i] {
            None => format!("X{}", i + 1),
            Some((a, b)) => format!("[{}, {}]", self.name(a), self.name(b)),
        }
    }

    pub fn lookup(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&(a, b)).copied()
    }
}

struct Rewriter<'a> {
    hall: &'a HallBasis,
    max_weight: usize,
    memo: HashMap<(usize, usize), SparseVec<usize>>,
}

impl Rewriter<'_> {
    /// `[a, b]` in Hall normal form, truncated above the maximal weight.
    fn bracket(&mut self, a: usize, b: usize) -> SparseVec<usize> {
        if a == b || self.hall.weight[a] + self.hall.weight[b] > self.max_weight {
            return SparseVec::new();
        }
        if a < b {
            let mut v = self.bracket(b, a);
            v.values_mut().for_each(|c| *c = -c.clone());
            return v;
        }
        if let Some(v) = self.memo.get(&(a, b)) {
            return v.clone();
        }
        let out = if let Some(i) = self.hall.lookup(a, b) {
            [(i, q(1))].into_iter().collect()
        } else {
            // a = [a₁, a₂] with a₂ > b: [[a₁, a₂], b] = [a₁, [a₂, b]] − [a₂, [a₁, b]].
            let (a1, a2) = self.hall.elements[a].expect("generators bracket to basic elements");
            let mut out = SparseVec::new();
            for (c, x) in self.bracket(a2, b) {
                let t = self.bracket(a1, c);
                sparse_axpy(&mut out, &x, &t);
            }
            for (c, x) in self.bracket(a1, b) {
                let t = self.bracket(a2, c);
                sparse_axpy(&mut out, &-x, &t);
            }
            out
        };
        self.memo.insert((a, b), out.clone());
        out
    }
}

/// The free nilpotent Lie algebra of step `r` on `n` generators, graded by
/// weight.
pub fn free_nilpotent(n: usize, r: usize) -> Result<(LieAlgebraSpec, HallBasis)> {
    if n < 2 || r < 1 {
        return Err(Error::Lie("free nilpotent algebras need n ≥ 2 generators and step r ≥ 1".into()));
    }
    let hall = HallBasis::new(n, r);
    let mut rw = Rewriter { hall: &hall, max_weight: r, memo: HashMap::new() };
    let mut constants = Vec::new();
    for i in 0..hall.len() {
        for j in i + 1..hall.len() {
            for (k, c) in rw.bracket(i, j) {
                constants.push((i, j, k, c));
            }
        }
    }
    let mut grading = vec![Vec::new(); r];
    for (i, w) in hall.weight.iter().enumerate() {
        grading[w - 1].push(i);
    }
    let names = (0..hall.len()).map(|i| format!("H{}", i + 1)).collect();
    let spec = LieAlgebraSpec { names, constants, grading: Some(grading) };
    spec.check_jacobi()?;
    Ok((spec, hall))
}

/// `p₁ = ⊕_{k odd} g_k`, `p₂ = ⊕_{k even ≤ ⌊r/2⌋} g_k`,
/// `𝔨 = ⊕_{k even > ⌊r/2⌋} g_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarnotSplit {
    pub step: usize,
    pub p1: Vec<usize>,
    pub p2: Vec<usize>,
    pub k: Vec<usize>,
    /// The six bracket relations between the pieces, in the order
    /// `[p₁,p₁] = p₂⊕𝔨`, `[p₁,p₂] ⊆ p₁`, `[p₁,𝔨] ⊆ p₁`, `[p₂,p₂] ⊆ p₂⊕𝔨`,
    /// `[p₂,𝔨] ⊆ 𝔨`, `[𝔨,𝔨] = 0`.
    pub relations: [bool; 6],
}

impl CarnotSplit {
    pub fn d_indices(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.p1.iter().chain(&self.p2).copied().collect();
        d.sort_unstable();
        d
    }

    pub fn relations_hold(&self) -> bool {
        self.relations.iter().all(|b| *b)
    }
}

pub fn carnot_split(spec: &LieAlgebraSpec) -> Result<CarnotSplit> {
    if !spec.is_carnot() {
        return Err(Error::NotCarnot("missing grading or [g₁, g_k] ≠ g_{k+1}".into()));
    }
    let g = spec.grading.as_ref().expect("Carnot algebras are graded");
    let r = g.len();
    let half = r / 2;
    let (mut p1, mut p2, mut k) = (Vec::new(), Vec::new(), Vec::new());
    for (d, layer) in g.iter().enumerate() {
        let deg = d + 1;
        let target = if deg % 2 == 1 {
            &mut p1
        } else if deg <= half {
            &mut p2
        } else {
            &mut k
        };
        target.extend_from_slice(layer);
    }
    let t = spec.table();
    let inside = |a: &[usize], b: &[usize], allowed: &[usize]| -> bool {
        a.iter().all(|i| {
            b.iter().all(|j| t.get(&(*i, *j)).is_none_or(|v| v.keys().all(|m| allowed.contains(m))))
        })
    };
    let p2k: Vec<usize> = p2.iter().chain(&k).copied().collect();
    let mut span: Echelon<usize> = Echelon::new();
    for i in &p1 {
        for j in &p1 {
            if let Some(v) = t.get(&(*i, *j)) {
                span.insert(v);
            }
        }
    }
    let r0 = inside(&p1, &p1, &p2k) && span.rank() == p2k.len();
    let relations = [
        r0,
        inside(&p1, &p2, &p1),
        inside(&p1, &k, &p1),
        inside(&p2, &p2, &p2k),
        inside(&p2, &k, &k),
        inside(&k, &k, &[]),
    ];
    Ok(CarnotSplit { step: r, p1, p2, k, relations })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P2kCheck {
    pub holds: bool,
    /// `(A, C)` with `A ∈ p₂`, `C ∈ 𝔨` and `[A, C] ≠ 0`.
    pub witness: Option<(usize, usize)>,
}

/// Whether `[p₂, 𝔨] = 0`.
pub fn bracket_condition_p2k(spec: &LieAlgebraSpec, split: &CarnotSplit) -> P2kCheck {
    let t = spec.table();
    for &a in &split.p2 {
        for &c in &split.k {
            if t.get(&(a, c)).is_some_and(|v| !v.is_empty()) {
                return P2kCheck { holds: false, witness: Some((a, c)) };
            }
        }
    }
    P2kCheck { holds: true, witness: None }
}

/// Bivector block `g₁ ∧ p₁` used for Carnot selectors: the target in `g_k`
/// is reached from `g₁ ∧ g_{k−1}` only.
pub fn carnot_selector_block(spec: &LieAlgebraSpec, split: &CarnotSplit) -> impl Fn(usize, usize) -> bool {
    let g1: Vec<usize> = spec.grading.as_ref().map(|g| g[0].clone()).unwrap_or_default();
    let p1 = split.p1.clone();
    move |a, b| (g1.contains(&a) && p1.contains(&b)) || (g1.contains(&b) && p1.contains(&a))
}

/// Left-invariant model with `D = p₁ ⊕ p₂` and `V = 𝔨`.
pub fn carnot_model(spec: &LieAlgebraSpec, split: &CarnotSplit) -> Result<FrameModel> {
    spec.to_frame_model(split.d_indices(), split.k.clone())
}

/// The flag of `D = p₁ ⊕ p₂` and the selector supported on `g₁ ∧ p₁`.
pub fn carnot_selector(
    model: &FrameModel,
    spec: &LieAlgebraSpec,
    split: &CarnotSplit,
) -> Result<(Flag, Selector)> {
    let flag = compute_flag(model, &FlagOptions::default())?;
    let sel = build_selector_restricted(model, &flag, carnot_selector_block(spec, split))?;
    Ok((flag, sel))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Expansion of a Hall element in the free associative algebra, as a map
    /// from words to integer coefficients.
    fn expand(h: &HallBasis, i: usize) -> BTreeMap<Vec<usize>, i64> {
        match h.elements[i] {
            None => [(vec![i], 1)].into_iter().collect(),
            Some((a, b)) => commutator(&expand(h, a), &expand(h, b)),
        }
    }

    fn commutator(x: &BTreeMap<Vec<usize>, i64>, y: &BTreeMap<Vec<usize>, i64>) -> BTreeMap<Vec<usize>, i64> {
        let mut out: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
        for (u, a) in x {
            for (v, b) in y {
                let mut uv = u.clone();
                uv.extend(v);
                *out.entry(uv).or_default() += a * b;
                let mut vu = v.clone();
                vu.extend(u);
                *out.entry(vu).or_default() -= a * b;
            }
        }
        out.retain(|_, c| *c != 0);
        out
    }

    #[test]
    fn witt_formula() {
        assert_eq!((1..=8).map(|k| witt_dimension(2, k)).collect::<Vec<_>>(), vec![2, 1, 2, 3, 6, 9, 18, 30]);
        assert_eq!((1..=4).map(|k| witt_dimension(3, k)).collect::<Vec<_>>(), vec![3, 3, 8, 18]);
    }

    #[test]
    fn hall_counts_match_witt() {
        for n in 2..=3 {
            for r in 1..=8 {
                let h = HallBasis::new(n, r);
                assert_eq!(h.len(), (1..=r).map(|k| witt_dimension(n, k)).sum::<usize>());
                for k in 1..=r {
                    assert_eq!(h.weight.iter().filter(|&&w| w == k).count(), witt_dimension(n, k), "n={n} r={r} k={k}");
                }
            }
        }
    }

    #[test]
    fn small_free_algebras() {
        let (s, _) = free_nilpotent(2, 2).unwrap();
        assert_eq!(s.dim(), 3);
        let (s, h) = free_nilpotent(2, 3).unwrap();
        assert_eq!(s.dim(), 5);
        assert_eq!(s.grading.as_ref().unwrap().iter().map(Vec::len).collect::<Vec<_>>(), vec![2, 1, 2]);
        assert_eq!(h.name(2), "[X2, X1]");
    }

    #[test]
    fn structure_constants_match_associative_expansion() {
        for (n, r) in [(2, 6), (3, 4)] {
            let (s, h) = free_nilpotent(n, r).unwrap();
            let t = s.table();
            for i in 0..h.len() {
                for j in i + 1..h.len() {
                    if h.weight[i] + h.weight[j] > r {
                        continue;
                    }
                    let lhs = commutator(&expand(&h, i), &expand(&h, j));
                    let mut rhs: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
                    if let Some(v) = t.get(&(i, j)) {
                        for (k, c) in v {
                            let c: i64 = c.to_integer().try_into().unwrap();
                            for (w, x) in expand(&h, *k) {
                                *rhs.entry(w).or_default() += c * x;
                            }
                        }
                    }
                    rhs.retain(|_, c| *c != 0);
                    assert_eq!(lhs, rhs, "[{}, {}]", h.name(i), h.name(j));
                }
            }
        }
    }

    #[test]
    fn jacobi_and_carnot() {
        for (n, r) in [(2, 2), (2, 4), (2, 5), (3, 3), (3, 4)] {
            let (s, _) = free_nilpotent(n, r).unwrap();
            s.check_jacobi().unwrap();
            assert!(s.is_carnot());
            let split = carnot_split(&s).unwrap();
            assert!(split.relations_hold(), "n={n} r={r} {:?}", split.relations);
        }
    }

    #[test]
    fn splits() {
        let g = |n, r| {
            let (s, _) = free_nilpotent(n, r).unwrap();
            (carnot_split(&s).unwrap(), s.grading.unwrap())
        };
        let (sp, gr) = g(2, 2);
        assert!(sp.p2.is_empty());
        assert_eq!(sp.k, gr[1]);
        let (sp, gr) = g(2, 4);
        assert_eq!(sp.p1, [gr[0].clone(), gr[2].clone()].concat());
        assert_eq!(sp.p2, gr[1]);
        assert_eq!(sp.k, gr[3]);
        let (sp, gr) = g(2, 8);
        assert_eq!(sp.p2, [gr[1].clone(), gr[3].clone()].concat());
        assert_eq!(sp.k, [gr[5].clone(), gr[7].clone()].concat());
    }

    #[test]
    fn p2k_condition() {
        let (s, _) = free_nilpotent(2, 8).unwrap();
        let split = carnot_split(&s).unwrap();
        let c = bracket_condition_p2k(&s, &split);
        assert!(!c.holds);
        let (a, k) = c.witness.unwrap();
        let gr = s.grading.as_ref().unwrap();
        assert!(gr[1].contains(&a) || gr[3].contains(&a));
        assert!(split.k.contains(&k));
        for r in 2..=5 {
            let (s, _) = free_nilpotent(2, r).unwrap();
            assert!(bracket_condition_p2k(&s, &carnot_split(&s).unwrap()).holds, "r={r}");
        }
        // From r = 6 on, g₄ ⊆ 𝔨 and [g₂, g₄] ⊆ g₆ is nonzero in the free algebra.
        for r in 6..=7 {
            let (s, _) = free_nilpotent(2, r).unwrap();
            let split = carnot_split(&s).unwrap();
            let c = bracket_condition_p2k(&s, &split);
            assert!(!c.holds, "r={r}");
            let (a, k) = c.witness.unwrap();
            let gr = s.grading.as_ref().unwrap();
            assert!(gr[1].contains(&a) && gr[3].contains(&k));
        }
        let ab = LieAlgebraSpec::abelian(3);
        let split = CarnotSplit { step: 1, p1: vec![0, 1, 2], p2: vec![], k: vec![], relations: [true; 6] };
        assert!(bracket_condition_p2k(&ab, &split).holds);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let names = vec!["a".into(), "b".into(), "c".into()];
        // [a,b] = a, [a,c] = b, [b,c] = 0 violates Jacobi.
        let bad = [(0, 1, 0, q(1)), (0, 2, 1, q(1))];
        assert!(LieAlgebraSpec::new(names.clone(), &bad, None).is_err());
        let heis = [(0, 1, 2, q(1))];
        assert!(LieAlgebraSpec::new(names.clone(), &heis, Some(vec![vec![0, 1], vec![2]])).unwrap().is_carnot());
        assert!(LieAlgebraSpec::new(names, &heis, Some(vec![vec![0], vec![1, 2]])).is_err());
    }
}
