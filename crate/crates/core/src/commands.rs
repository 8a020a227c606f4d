//! Report-producing commands shared by the CLI and the C interface.

use serde_json::{json, Value};

use crate::connection::{curvature_direct, curvature_global_basis, modified_curvature};
use crate::decide::{check_certificate, VerdictKind};
use crate::error::Result;
use crate::holonomy::numeric_transport_oracle;
use crate::liegroups::{bracket_condition_p2k, carnot_split};
use crate::pipeline::Pipeline;
use crate::report;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// Totally geodesic foliation with `D ⟂ V`.
    Tg,
    /// Principal bundle structure (trivial holonomy).
    Principal,
    /// The criterion for one-dimensional `V`.
    OneDim,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Flag,
    Selector,
    Curvature,
    Holonomy { oracle: bool },
    Decide(Criterion),
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Flag => "flag",
            Command::Selector => "selector",
            Command::Curvature => "curvature",
            Command::Holonomy { .. } => "holonomy",
            Command::Decide(_) => "decide",
        }
    }
}

/// How a successful command ended; maps onto exit codes 0, 1 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    No,
    Inconclusive,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::No => 1,
            Outcome::Inconclusive => 2,
        }
    }
}

impl From<VerdictKind> for Outcome {
    fn from(k: VerdictKind) -> Self {
        match k {
            VerdictKind::Yes => Outcome::Success,
            VerdictKind::No => Outcome::No,
            VerdictKind::Inconclusive => Outcome::Inconclusive,
        }
    }
}

/// Runs one command and wraps the body with the input name and config.
pub fn run(p: &Pipeline, cmd: Command, input: &str) -> Result<(Value, Outcome)> {
    let m = &p.model;
    let mut code = Outcome::Success;
    let body = match cmd {
        Command::Flag => {
            let flag = p.flag()?;
            if !flag.equiregular.holds || !flag.bracket_generating {
                code = Outcome::No;
            }
            report::flag(m, &flag)
        }
        Command::Selector => {
            let flag = p.flag()?;
            let (sel, kind) = p.selector(&flag)?;
            report::selector(m, &sel, kind.as_str())
        }
        Command::Curvature => {
            let flag = p.flag()?;
            let (sel, _) = p.selector(&flag)?;
            let conn = p.connection();
            let r = curvature_direct(m, &conn);
            let global = curvature_global_basis(m, &conn);
            let fl = p.flatten(&conn, &sel)?;
            let modified = modified_curvature(m, &conn, &sel, p.config.route)?;
            json!({
                "curvature": report::glform(m, &r),
                "global_basis_agrees": global == r,
                "alpha": report::glform(m, &fl.alpha),
                "flattened_curvature": report::glform(m, &fl.curvature),
                "flattened_contraction_zero": fl.curvature.contract(&sel.table).is_zero(),
                "modified_curvature": report::glform(m, &modified),
                "route": p.config.route,
            })
        }
        Command::Holonomy { oracle } => {
            let flag = p.flag()?;
            let (sel, _) = p.selector(&flag)?;
            let conn = p.connection();
            let h = p.holonomy(&conn, &sel)?;
            let oracle = if oracle {
                let fl = p.flatten(&conn, &sel)?;
                Some(numeric_transport_oracle(m, &fl.connection, &p.config.oracle_options())?)
            } else {
                None
            };
            if !h.stabilized {
                code = Outcome::Inconclusive;
            }
            report::holonomy(&h, oracle.as_ref())
        }
        Command::Decide(criterion) => {
            let flag = p.flag()?;
            let mut body = json!({});
            let mut verdict = match criterion {
                Criterion::OneDim => {
                    let (sel, _) = p.selector(&flag)?;
                    let r = p.decide_one_dim(&sel)?;
                    body["onedim"] = report::one_dim(m, &r);
                    r.verdict
                }
                Criterion::Tg | Criterion::Principal => {
                    let (h, _) = p.holonomy_for(&flag)?;
                    let v = match criterion {
                        Criterion::Tg => p.decide_tg(&h),
                        _ => p.decide_principal(&h),
                    };
                    check_certificate(&h, &v)?;
                    body["holonomy"] = report::holonomy(&h, None);
                    v
                }
            };
            if !flag.bracket_generating {
                verdict.notes.push(
                    "D is not bracket-generating: the verdict reports the algebraic condition only".into(),
                );
            }
            if let Some(spec) = &p.spec {
                if let Ok(split) = carnot_split(spec) {
                    let c = bracket_condition_p2k(spec, &split);
                    body["p2k_commute"] = json!({ "holds": c.holds, "witness": c.witness.map(|(a, k)| {
                        [spec.names[a].clone(), spec.names[k].clone()]
                    }) });
                }
            }
            code = verdict.kind.into();
            body["verdict"] = report::verdict(&verdict);
            body
        }
    };
    Ok((report::envelope(cmd.name(), input, &p.config, body), code))
}
