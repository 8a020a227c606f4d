//! Model files: TOML for hand-written chart models, JSON for generated
//! algebra specs. Unknown fields are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::connection::CurvatureRoute;
use crate::decide::SearchBudget;
use crate::distribution::FlagOptions;
use crate::error::{Error, Result};
use crate::frame::FrameModel;
use crate::holonomy::{HolonomyOptions, OracleOptions};
use crate::liegroups::{CarnotSplit, LieAlgebraSpec};
use crate::poly::{parse_rational, Poly, Q};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    Chart,
    Algebra,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub format: u32,
    pub backend: BackendKind,
    /// Rational strings, one per coordinate. Empty for algebras.
    #[serde(default)]
    pub base_point: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<ChartSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSection>,
    pub split: SplitSection,
    #[serde(default)]
    pub config: RunConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSection {
    pub coordinates: Vec<String>,
    pub frame: Vec<FieldSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub name: String,
    /// Polynomial coordinate components.
    pub components: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSection {
    pub names: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<Vec<usize>>>,
    pub constants: Vec<ConstantSpec>,
}

/// `c^k_{ij} = c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantSpec {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub c: String,
}

/// Frame names spanning `D` and `V`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitSection {
    pub d: Vec<String>,
    pub v: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    /// Random points sampled for regularity checks.
    pub samples: usize,
    pub box_radius: String,
    pub max_step: usize,
    pub symbolic: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_bound: Option<usize>,
    pub stability_margin: usize,
    pub route: CurvatureRoute,
    pub oracle: OracleOptions,
    pub search: SearchBudget,
}

impl Default for RunConfig {
    fn default() -> Self {
        let f = FlagOptions::default();
        let h = HolonomyOptions::default();
        RunConfig {
            seed: f.seed,
            samples: f.samples,
            box_radius: f.box_radius.to_string(),
            max_step: f.max_step,
            symbolic: f.symbolic,
            depth_bound: h.depth_bound,
            stability_margin: h.stability_margin,
            route: CurvatureRoute::Flattened,
            oracle: OracleOptions::default(),
            search: SearchBudget::default(),
        }
    }
}

impl RunConfig {
    pub fn flag_options(&self) -> Result<FlagOptions> {
        Ok(FlagOptions {
            max_step: self.max_step,
            samples: self.samples,
            box_radius: parse_rational(&self.box_radius)?,
            seed: self.seed,
            symbolic: self.symbolic,
        })
    }

    pub fn holonomy_options(&self) -> HolonomyOptions {
        HolonomyOptions { depth_bound: self.depth_bound, stability_margin: self.stability_margin }
    }

    pub fn oracle_options(&self) -> OracleOptions {
        OracleOptions { seed: self.seed, ..self.oracle.clone() }
    }
}

fn parse_err(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{path}: {e}"))
}

impl ModelFile {
    pub fn from_toml(text: &str) -> Result<ModelFile> {
        let f: ModelFile = toml::from_str(text).map_err(|e| parse_err("model", e))?;
        f.validate()?;
        Ok(f)
    }

    pub fn from_json(text: &str) -> Result<ModelFile> {
        let f: ModelFile = serde_json::from_str(text).map_err(|e| parse_err("model", e))?;
        f.validate()?;
        Ok(f)
    }

    /// Reads `.toml` or `.json` by extension.
    pub fn load(path: &Path) -> Result<ModelFile> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let shown = path.display().to_string();
        match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => ModelFile::from_toml(&text),
            Some("json") => ModelFile::from_json(&text),
            _ => Err(parse_err(&shown, "model files must end in .toml or .json")),
        }
        .map_err(|e| match e {
            Error::Parse(m) => Error::Parse(format!("{shown}: {m}")),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(format!("model: {e}")))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(format!("model: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.format != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported format version {}", self.format)));
        }
        match (self.backend, &self.chart, &self.algebra) {
            (BackendKind::Chart, Some(_), None) | (BackendKind::Algebra, None, Some(_)) => Ok(()),
            (BackendKind::Chart, _, _) => Err(Error::Parse("a chart model needs a [chart] section and no [algebra]".into())),
            (BackendKind::Algebra, _, _) => Err(Error::Parse("an algebra model needs an algebra section and no chart".into())),
        }
    }

    fn frame_names(&self) -> Vec<String> {
        match (&self.chart, &self.algebra) {
            (Some(c), _) => c.frame.iter().map(|f| f.name.clone()).collect(),
            (_, Some(a)) => a.names.clone(),
            _ => Vec::new(),
        }
    }

    fn split_indices(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let names = self.frame_names();
        let find = |s: &String| {
            names
                .iter()
                .position(|n| n == s)
                .ok_or_else(|| Error::InvalidModel(format!("split names unknown frame field `{s}`")))
        };
        let d = self.split.d.iter().map(find).collect::<Result<Vec<_>>>()?;
        let v = self.split.v.iter().map(find).collect::<Result<Vec<_>>>()?;
        Ok((d, v))
    }

    pub fn base_point(&self) -> Result<Vec<Q>> {
        self.base_point.iter().map(|s| parse_rational(s)).collect()
    }

    pub fn lie_spec(&self) -> Result<Option<LieAlgebraSpec>> {
        let Some(a) = &self.algebra else { return Ok(None) };
        let constants = a
            .constants
            .iter()
            .map(|c| Ok((c.i, c.j, c.k, parse_rational(&c.c)?)))
            .collect::<Result<Vec<_>>>()?;
        LieAlgebraSpec::new(a.names.clone(), &constants, a.grading.clone()).map(Some)
    }

    pub fn build(&self) -> Result<FrameModel> {
        let (d, v) = self.split_indices()?;
        if let Some(c) = &self.chart {
            let rows = c
                .frame
                .iter()
                .map(|f| f.components.iter().map(|p| Poly::parse(p, &c.coordinates)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let names = c.frame.iter().map(|f| f.name.clone()).collect();
            return FrameModel::from_chart(c.coordinates.clone(), names, rows, d, v, self.base_point()?);
        }
        if !self.base_point.is_empty() {
            return Err(Error::InvalidModel("algebra models are left-invariant and take no base point".into()));
        }
        let spec = self.lie_spec()?.expect("validated algebra section");
        spec.to_frame_model(d, v)
    }

    /// Canonical form: polynomials and rationals re-rendered, constants
    /// normalized to `i < j` in sorted order.
    pub fn canonical(&self) -> Result<ModelFile> {
        let mut out = self.clone();
        out.base_point = self.base_point()?.iter().map(Q::to_string).collect();
        if let Some(c) = &mut out.chart {
            for f in &mut c.frame {
                for p in &mut f.components {
                    *p = Poly::parse(p, &c.coordinates)?.to_text(&c.coordinates);
                }
            }
        }
        if let Some(spec) = self.lie_spec()? {
            let a = out.algebra.as_mut().expect("algebra section");
            a.constants = constants_of(&spec);
        }
        out.config.box_radius = parse_rational(&self.config.box_radius)?.to_string();
        Ok(out)
    }

    /// Algebra model file with `D = p₁ ⊕ p₂` and `V = 𝔨`.
    pub fn from_carnot(spec: &LieAlgebraSpec, split: &CarnotSplit) -> ModelFile {
        let name = |i: &usize| spec.names[*i].clone();
        ModelFile {
            format: FORMAT_VERSION,
            backend: BackendKind::Algebra,
            base_point: Vec::new(),
            chart: None,
            algebra: Some(AlgebraSection {
                names: spec.names.clone(),
                grading: spec.grading.clone(),
                constants: constants_of(spec),
            }),
            split: SplitSection { d: split.d_indices().iter().map(name).collect(), v: split.k.iter().map(name).collect() },
            config: RunConfig::default(),
        }
    }
}

fn constants_of(spec: &LieAlgebraSpec) -> Vec<ConstantSpec> {
    spec.constants.iter().map(|(i, j, k, c)| ConstantSpec { i: *i, j: *j, k: *k, c: c.to_string() }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = r#"
format = 1
backend = "chart"
base_point = ["0", "0", "0"]

[chart]
coordinates = ["x", "y", "z"]
frame = [
  { name = "X", components = ["1", "0", "0"] },
  { name = "Y", components = ["0", "1", "x"] },
  { name = "Z", components = ["0", "0", "1"] },
]

[split]
d = ["X", "Y"]
v = ["Z"]
"#;

    #[test]
    fn chart_file_builds() {
        let f = ModelFile::from_toml(HEIS).unwrap();
        let m = f.build().unwrap();
        assert_eq!(m.dim(), 3);
        assert_eq!(m.nu(), 1);
        assert_eq!(f.config, RunConfig::default());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = HEIS.replace("[split]", "[split]\nextra = 1");
        assert!(matches!(ModelFile::from_toml(&bad), Err(Error::Parse(_))));
        let bad = format!("{HEIS}\n[config]\nsede = 3\n");
        assert!(ModelFile::from_toml(&bad).is_err());
        let bad = format!("{HEIS}\n[config.oracle]\nloopz = 3\n");
        assert!(ModelFile::from_toml(&bad).is_err());
    }

    #[test]
    fn structural_errors() {
        let bad = HEIS.replace("format = 1", "format = 2");
        assert!(ModelFile::from_toml(&bad).is_err());
        let bad = HEIS.replace("v = [\"Z\"]", "v = [\"W\"]");
        assert!(matches!(ModelFile::from_toml(&bad).unwrap().build(), Err(Error::InvalidModel(_))));
        let bad = HEIS.replace("\"x\"] }", "\"w\"] }");
        assert!(matches!(ModelFile::from_toml(&bad).unwrap().build(), Err(Error::Parse(_))));
    }

    #[test]
    fn canonical_round_trip() {
        let messy = HEIS.replace("[\"0\", \"1\", \"x\"]", "[\"0\", \"2/2\", \"x + 0*x\"]");
        let f = ModelFile::from_toml(&messy).unwrap().canonical().unwrap();
        let once = f.to_toml().unwrap();
        let twice = ModelFile::from_toml(&once).unwrap().canonical().unwrap().to_toml().unwrap();
        assert_eq!(once, twice);
        assert_eq!(f.chart.as_ref().unwrap().frame[1].components, vec!["0", "1", "x"]);
        let j = f.to_json().unwrap();
        assert_eq!(ModelFile::from_json(&j).unwrap().to_json().unwrap(), j);
    }

    #[test]
    fn algebra_file() {
        let (spec, _) = crate::liegroups::free_nilpotent(2, 4).unwrap();
        let split = crate::liegroups::carnot_split(&spec).unwrap();
        let f = ModelFile::from_carnot(&spec, &split);
        let j = f.to_json().unwrap();
        let g = ModelFile::from_json(&j).unwrap();
        assert_eq!(g, f);
        assert_eq!(g.canonical().unwrap().to_json().unwrap(), j);
        let m = g.build().unwrap();
        assert_eq!(m.dim(), 8);
        assert_eq!(m.nu(), split.k.len());
        let mut bad = g.clone();
        bad.base_point = vec!["0".into()];
        assert!(bad.build().is_err());
    }
}
