//! The flag `D¹ ⊂ D² ⊂ …` generated by iterated brackets, growth vectors
//! and the regular-point classification.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{FrameField, FrameModel};
use crate::linalg::{Echelon, PolyMatrix, SparseVec};
use crate::poly::{Monomial, Poly, Q};

#[derive(Clone, Debug)]
pub struct FlagOptions {
    pub max_step: usize,
    pub samples: usize,
    pub box_radius: Q,
    pub seed: u64,
    /// Also compare exact ranks with generic ranks over the rational
    /// function field, which decides regularity of the point exactly.
    pub symbolic: bool,
}

impl Default for FlagOptions {
    fn default() -> Self {
        FlagOptions { max_step: 16, samples: 32, box_radius: Q::from_integer(1.into()), seed: 0, symbolic: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointClass {
    Regular,
    Singular,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleWitness {
    pub point: Vec<Q>,
    pub growth: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointClassification {
    pub class: PointClass,
    pub growth: Vec<usize>,
    pub samples_checked: usize,
    /// A sampled point whose truncated growth vector differs.
    pub witness: Option<SampleWitness>,
    /// Generic ranks of each `D^k` over rational functions, when computed.
    pub generic_ranks: Option<Vec<usize>>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Equiregularity {
    pub holds: bool,
    pub strictly_increasing: bool,
    pub point: PointClassification,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct Flag {
    /// Minimal spanning set of `D^k` at the base point, for each `k`.
    pub generators: Vec<Vec<FrameField>>,
    pub growth_vector: Vec<usize>,
    pub step: usize,
    pub equiregular: Equiregularity,
    pub bracket_generating: bool,
    /// Frame indices spanning `D^k` (cumulative), when the frame is adapted.
    pub levels: Option<Vec<Vec<usize>>>,
    /// Adapted ordering of frame indices, level by level.
    pub adapted_frame: Option<Vec<usize>>,
}

impl Flag {
    /// Frame indices of level `k` alone (`S_k ∖ S_{k−1}`), 1-based `k`.
    pub fn layer(&self, k: usize) -> Option<Vec<usize>> {
        let levels = self.levels.as_ref()?;
        let cur = levels.get(k - 1)?;
        let prev: &[usize] = if k >= 2 { &levels[k - 2] } else { &[] };
        Some(cur.iter().copied().filter(|i| !prev.contains(i)).collect())
    }

    /// Level (1-based) of frame index `i` in the adapted frame.
    pub fn level_of(&self, i: usize) -> Option<usize> {
        let levels = self.levels.as_ref()?;
        levels.iter().position(|s| s.contains(&i)).map(|p| p + 1)
    }
}

fn field_key(f: &FrameField) -> SparseVec<(usize, Monomial)> {
    let mut v = SparseVec::new();
    for (i, p) in f.coeffs.iter().enumerate() {
        for (m, c) in p.terms() {
            v.insert((i, m.clone()), c.clone());
        }
    }
    v
}

/// ℚ-linearly reduced bracket pools: level `k` holds the new fields of
/// `[D, D^{k−1}]` not already in the ℚ-span of earlier levels.
struct Pools {
    levels: Vec<Vec<FrameField>>,
    span: Echelon<(usize, Monomial)>,
    saturated: bool,
}

impl Pools {
    fn new(model: &FrameModel) -> Self {
        let n = model.dim();
        let mut span = Echelon::new();
        let mut first = Vec::new();
        for &i in &model.d_indices {
            let f = FrameField::basis(n, i);
            if span.insert(&field_key(&f)) {
                first.push(f);
            }
        }
        Pools { levels: vec![first], span, saturated: false }
    }

    /// Generates the next level; returns `false` once nothing new appears.
    fn grow(&mut self, model: &FrameModel) -> bool {
        if self.saturated {
            return false;
        }
        let n = model.dim();
        let frontier = self.levels.last().expect("first level").clone();
        let mut next = Vec::new();
        for &i in &model.d_indices {
            let e = FrameField::basis(n, i);
            for g in &frontier {
                let b = model.bracket_unchecked(&e, g);
                if b.is_zero() {
                    continue;
                }
                if self.span.insert(&field_key(&b)) {
                    next.push(b);
                }
            }
        }
        if next.is_empty() {
            self.saturated = true;
            return false;
        }
        self.levels.push(next);
        true
    }

    fn cumulative(&self, k: usize) -> impl Iterator<Item = &FrameField> {
        self.levels.iter().take(k).flatten()
    }

    fn rank_at(&self, k: usize, point: &[Q]) -> usize {
        let mut ech = Echelon::new();
        for f in self.cumulative(k) {
            let v: SparseVec<usize> = f
                .eval(point)
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .collect();
            ech.insert(&v);
        }
        ech.rank()
    }

    fn growth_at(&self, point: &[Q], n: usize) -> Vec<usize> {
        let mut g = Vec::new();
        for k in 1..=self.levels.len() {
            let r = self.rank_at(k, point);
            g.push(r);
            if r == n {
                break;
            }
        }
        g
    }

    fn generic_rank(&self, k: usize, n: usize) -> usize {
        let rows: Vec<Vec<Poly>> = self.cumulative(k).map(|f| f.coeffs.clone()).collect();
        if rows.is_empty() {
            return 0;
        }
        let m = PolyMatrix::from_dense(rows);
        if m.is_constant() {
            m.eval(&[]).rank()
        } else {
            m.generic_rank().min(n)
        }
    }
}

/// Builds pools until the rank at `point` reaches `n` or brackets saturate.
fn build_pools(model: &FrameModel, point: &[Q], max_step: usize) -> Result<(Pools, Vec<usize>)> {
    let n = model.dim();
    let mut pools = Pools::new(model);
    let mut growth = vec![pools.rank_at(1, point)];
    while *growth.last().unwrap() < n {
        if growth.len() >= max_step {
            let mut probe = pools;
            if !probe.grow(model) {
                return Ok((probe, growth));
            }
            return Err(Error::NotStabilized { max_step, growth });
        }
        if !pools.grow(model) {
            break;
        }
        growth.push(pools.rank_at(pools.levels.len(), point));
    }
    Ok((pools, growth))
}

/// Ranks of `D^k` evaluated at `point` until the rank reaches `n` or the
/// flag saturates.
pub fn growth_vector_at(model: &FrameModel, point: &[Q], max_step: usize) -> Result<Vec<usize>> {
    check_point(model, point)?;
    build_pools(model, point, max_step).map(|(_, g)| g)
}

fn check_point(model: &FrameModel, point: &[Q]) -> Result<()> {
    if point.len() != model.nvars() {
        return Err(Error::InvalidModel(format!(
            "point has {} coordinates, expected {}",
            point.len(),
            model.nvars()
        )));
    }
    if !model.frame_nonsingular_at(point) {
        return Err(Error::SingularFrame);
    }
    Ok(())
}

fn sample_points(model: &FrameModel, point: &[Q], opts: &FlagOptions) -> Vec<Vec<Q>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let denom: i64 = 1 << 16;
    (0..opts.samples)
        .map(|_| {
            (0..model.nvars())
                .map(|i| {
                    // Strictly inside the open box around the point.
                    let k: i64 = rng.gen_range(1 - denom..denom);
                    &point[i] + &opts.box_radius * Q::new(k.into(), denom.into())
                })
                .collect()
        })
        .collect()
}

fn classify_with_pools(
    model: &FrameModel,
    pools: &Pools,
    point: &[Q],
    growth: &[usize],
    opts: &FlagOptions,
) -> PointClassification {
    let n = model.dim();
    let samples = if model.nvars() == 0 { Vec::new() } else { sample_points(model, point, opts) };
    let sampled: Vec<Vec<usize>> = samples.par_iter().map(|p| pools.growth_at(p, n)).collect();
    let witness = samples
        .iter()
        .zip(&sampled)
        .find(|(_, g)| g.as_slice() != growth)
        .map(|(p, g)| SampleWitness { point: p.clone(), growth: g.clone() });
    let mut out = PointClassification {
        class: PointClass::Undetermined,
        growth: growth.to_vec(),
        samples_checked: samples.len(),
        witness,
        generic_ranks: None,
        reason: None,
    };
    if opts.symbolic {
        let generic: Vec<usize> = (1..=growth.len()).map(|k| pools.generic_rank(k, n)).collect();
        let regular = generic.as_slice() == growth;
        out.class = if regular { PointClass::Regular } else { PointClass::Singular };
        if !regular {
            out.reason = Some(format!("generic ranks {generic:?} exceed ranks {growth:?} at the point"));
        }
        out.generic_ranks = Some(generic);
    } else if out.witness.is_some() {
        out.class = PointClass::Singular;
        out.reason = Some("a sampled neighbor has a different growth vector".into());
    } else {
        out.class = PointClass::Regular;
    }
    out
}

/// Regular / singular / undetermined classification of a point.
pub fn classify_point(model: &FrameModel, point: &[Q], opts: &FlagOptions) -> PointClassification {
    let undetermined = |reason: String| PointClassification {
        class: PointClass::Undetermined,
        growth: Vec::new(),
        samples_checked: 0,
        witness: None,
        generic_ranks: None,
        reason: Some(reason),
    };
    if let Err(e) = check_point(model, point) {
        return undetermined(e.to_string());
    }
    match build_pools(model, point, opts.max_step) {
        Ok((pools, growth)) => classify_with_pools(model, &pools, point, &growth, opts),
        Err(e) => undetermined(e.to_string()),
    }
}

/// Computes the flag at the model's base point.
pub fn compute_flag(model: &FrameModel, opts: &FlagOptions) -> Result<Flag> {
    if opts.max_step < 1 {
        return Err(Error::InvalidModel("max_step must be at least 1".into()));
    }
    let point = model.base_point.clone();
    check_point(model, &point)?;
    let n = model.dim();
    let (pools, growth) = build_pools(model, &point, opts.max_step)?;
    let step = growth.len();
    let bracket_generating = *growth.last().unwrap() == n;
    let strictly_increasing = growth.windows(2).all(|w| w[0] < w[1]);
    let pc = classify_with_pools(model, &pools, &point, &growth, opts);
    let holds = strictly_increasing && pc.class == PointClass::Regular;
    let equiregular = Equiregularity { holds, strictly_increasing, point: pc, seed: opts.seed };

    let mut generators = Vec::new();
    for k in 1..=step {
        let mut ech = Echelon::new();
        let mut gens = Vec::new();
        for f in pools.cumulative(k) {
            let v: SparseVec<usize> =
                f.eval(&point).into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect();
            if ech.insert(&v) {
                gens.push(f.clone());
            }
        }
        generators.push(gens);
    }

    let levels = adapted_levels(model, &pools, &growth);
    let adapted_frame = levels.as_ref().map(|ls| {
        let mut order: Vec<usize> = Vec::new();
        for s in ls {
            for &i in s {
                if !order.contains(&i) {
                    order.push(i);
                }
            }
        }
        order
    });

    Ok(Flag { generators, growth_vector: growth, step, equiregular, bracket_generating, levels, adapted_frame })
}

/// Index sets `S_k` with `D^k = span{E_j : j ∈ S_k}`, when the frame is
/// adapted to the flag.
fn adapted_levels(model: &FrameModel, pools: &Pools, growth: &[usize]) -> Option<Vec<Vec<usize>>> {
    let mut levels: Vec<Vec<usize>> = Vec::new();
    for (k, &nk) in growth.iter().enumerate() {
        let mut s: Vec<usize> = pools.cumulative(k + 1).flat_map(FrameField::support).collect();
        s.sort_unstable();
        s.dedup();
        if s.len() != nk {
            return None;
        }
        levels.push(s);
    }
    if levels.first()? != &model.d_indices {
        return None;
    }
    // [E_i, E_j] for i ∈ S_1, j ∈ S_k must stay inside S_{k+1}.
    for k in 0..levels.len() {
        let target = levels.get(k + 1).unwrap_or(&levels[k]);
        for &i in &levels[0] {
            for &j in &levels[k] {
                if model.structure(i, j).keys().any(|m| !target.contains(m)) {
                    return None;
                }
            }
        }
    }
    Some(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    fn xsq(point: [i64; 3]) -> FrameModel {
        let c = s(&["x", "y", "z"]);
        let p = |t: &str| Poly::parse(t, &c).unwrap();
        FrameModel::from_chart(
            c.clone(),
            s(&["X", "Y", "Z"]),
            vec![
                vec![p("1"), p("0"), p("0")],
                vec![p("0"), p("1"), p("x^2")],
                vec![p("0"), p("0"), p("1")],
            ],
            vec![0, 1],
            vec![2],
            point.iter().map(|v| q(*v)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn xsq_growth_vectors() {
        let m = xsq([0, 0, 0]);
        assert_eq!(growth_vector_at(&m, &[q(1), q(0), q(0)], 8).unwrap(), vec![2, 3]);
        assert_eq!(growth_vector_at(&m, &[q(0), q(0), q(0)], 8).unwrap(), vec![2, 2, 3]);
    }

    #[test]
    fn xsq_classification_is_seed_independent() {
        let m = xsq([0, 0, 0]);
        for seed in [0, 1, 99] {
            for symbolic in [true, false] {
                let opts = FlagOptions { seed, symbolic, ..FlagOptions::default() };
                let reg = classify_point(&m, &[q(1), q(0), q(0)], &opts);
                assert_eq!(reg.class, PointClass::Regular, "seed {seed} symbolic {symbolic}");
                let sing = classify_point(&m, &[q(0), q(0), q(0)], &opts);
                assert_eq!(sing.class, PointClass::Singular);
            }
        }
    }

    #[test]
    fn step_limit_is_reported() {
        let m = xsq([0, 0, 0]);
        let err = growth_vector_at(&m, &[q(0), q(0), q(0)], 2).unwrap_err();
        assert!(matches!(err, Error::NotStabilized { max_step: 2, .. }));
    }

    #[test]
    fn non_bracket_generating_saturates() {
        let m = xsq([0, 0, 0]).with_split(vec![0, 2], vec![1]).unwrap();
        let flag = compute_flag(&m, &FlagOptions::default()).unwrap();
        assert_eq!(flag.growth_vector, vec![2]);
        assert!(!flag.bracket_generating);
    }
}
