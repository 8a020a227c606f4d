//! The full chain flag → selector → flattening → holonomy → decision for one
//! model file.

use crate::connection::{curvature_direct, flatten, vertical_connection, Flattened, VerticalConnection};
use crate::decide::{one_dim_criterion, principal_structure_exists, tg_metric_exists, OneDimResult, Verdict};
use crate::distribution::{compute_flag, Flag};
use crate::error::{Error, Result};
use crate::forms::KForm;
use crate::frame::{FrameField, FrameModel};
use crate::holonomy::{ozeki_algebra, ozeki_from_curvature, HolonomyAlgebra};
use crate::liegroups::{carnot_selector_block, carnot_split, LieAlgebraSpec};
use crate::model_file::{ModelFile, RunConfig};
use crate::selector::{build_selector, build_selector_restricted, Selector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectorKind {
    /// Minimum-norm preimage over all bivectors of the adapted frame.
    MinimumNorm,
    /// Minimum-norm preimage restricted to `g₁ ∧ p₁` on a Carnot split.
    CarnotBlock,
}

impl SelectorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SelectorKind::MinimumNorm => "minimum_norm",
            SelectorKind::CarnotBlock => "carnot_block",
        }
    }
}

pub struct Pipeline {
    pub file: ModelFile,
    pub config: RunConfig,
    pub model: FrameModel,
    pub spec: Option<LieAlgebraSpec>,
}

impl Pipeline {
    pub fn new(file: ModelFile) -> Result<Pipeline> {
        let model = file.build()?;
        let spec = file.lie_spec()?;
        let config = file.config.clone();
        Ok(Pipeline { file, config, model, spec })
    }

    pub fn flag(&self) -> Result<Flag> {
        compute_flag(&self.model, &self.config.flag_options()?)
    }

    /// Carnot algebras split as `p₁ ⊕ p₂ | 𝔨` get the block selector.
    pub fn selector(&self, flag: &Flag) -> Result<(Selector, SelectorKind)> {
        if let Some(spec) = &self.spec {
            if spec.is_carnot() {
                let split = carnot_split(spec)?;
                if split.d_indices() == sorted(&self.model.d_indices) && split.k == sorted(&self.model.v_indices) {
                    let sel = build_selector_restricted(&self.model, flag, carnot_selector_block(spec, &split))?;
                    return Ok((sel, SelectorKind::CarnotBlock));
                }
            }
        }
        Ok((build_selector(&self.model, flag)?, SelectorKind::MinimumNorm))
    }

    pub fn connection(&self) -> VerticalConnection {
        vertical_connection(&self.model)
    }

    pub fn flatten(&self, conn: &VerticalConnection, sel: &Selector) -> Result<Flattened> {
        flatten(&self.model, conn, sel)
    }

    pub fn holonomy(&self, conn: &VerticalConnection, sel: &Selector) -> Result<HolonomyAlgebra> {
        let opts = self.config.holonomy_options();
        match self.config.route {
            crate::connection::CurvatureRoute::Flattened => {
                let fl = self.flatten(conn, sel)?;
                Ok(ozeki_from_curvature(&self.model, conn, &fl.curvature, &opts))
            }
            route => ozeki_algebra(&self.model, conn, sel, route, &opts),
        }
    }

    /// Holonomy through the selector when `D` is bracket-generating. Otherwise
    /// the algebra generated by `R^∇` and its derivatives, which only tests the
    /// algebraic condition.
    pub fn holonomy_for(&self, flag: &Flag) -> Result<(HolonomyAlgebra, Option<Selector>)> {
        let conn = self.connection();
        if flag.bracket_generating {
            let (sel, _) = self.selector(flag)?;
            let h = self.holonomy(&conn, &sel)?;
            return Ok((h, Some(sel)));
        }
        let r = curvature_direct(&self.model, &conn);
        Ok((ozeki_from_curvature(&self.model, &conn, &r, &self.config.holonomy_options()), None))
    }

    pub fn decide_tg(&self, h: &HolonomyAlgebra) -> Verdict {
        tg_metric_exists(h, self.config.search, self.config.seed)
    }

    pub fn decide_principal(&self, h: &HolonomyAlgebra) -> Verdict {
        principal_structure_exists(h)
    }

    /// The criterion for `ν = 1` with `Z` the vertical frame field, `τ` its
    /// dual coframe form and `χ = χ(Z)`.
    pub fn decide_one_dim(&self, sel: &Selector) -> Result<OneDimResult> {
        let [v] = self.model.v_indices[..] else {
            return Err(Error::NormalizationFailed(format!(
                "the one-dimensional criterion needs ν = 1, the model has ν = {}",
                self.model.nu()
            )));
        };
        let tau = KForm::coframe(v);
        let z = FrameField::basis(self.model.dim(), v);
        one_dim_criterion(&self.model, &tau, &z, &sel.table[v])
    }
}

fn sorted(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decide::VerdictKind;
    use crate::liegroups::free_nilpotent;

    #[test]
    fn carnot_file_uses_block_selector() {
        let (spec, _) = free_nilpotent(2, 4).unwrap();
        let split = carnot_split(&spec).unwrap();
        let p = Pipeline::new(ModelFile::from_carnot(&spec, &split)).unwrap();
        let flag = p.flag().unwrap();
        let (sel, kind) = p.selector(&flag).unwrap();
        assert_eq!(kind, SelectorKind::CarnotBlock);
        let conn = p.connection();
        let h = p.holonomy(&conn, &sel).unwrap();
        assert_eq!(p.decide_tg(&h).kind, VerdictKind::Yes);
        assert!(p.decide_one_dim(&sel).is_err());
    }

    #[test]
    fn non_bracket_generating_falls_back_to_curvature() {
        let text = r#"{"format": 1, "backend": "algebra",
            "algebra": {"names": ["A", "B", "C"], "constants": []},
            "split": {"d": ["A", "B"], "v": ["C"]}}"#;
        let p = Pipeline::new(ModelFile::from_json(text).unwrap()).unwrap();
        let flag = p.flag().unwrap();
        assert!(!flag.bracket_generating);
        let (h, sel) = p.holonomy_for(&flag).unwrap();
        assert!(sel.is_none());
        assert_eq!(p.decide_principal(&h).kind, VerdictKind::Yes);
    }
}
