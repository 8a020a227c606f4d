//! JSON reports. Rationals and polynomials are written as strings.

use serde_json::{json, Map, Value};

use crate::decide::{Certificate, OneDimResult, Verdict};
use crate::distribution::Flag;
use crate::forms::{Form, GlForm, KForm, KVector};
use crate::frame::{FrameField, FrameModel};
use crate::holonomy::{HolonomyAlgebra, OracleReport};
use crate::linalg::{PolyMatrix, QMat};
use crate::model_file::RunConfig;
use crate::poly::{Poly, Q};
use crate::selector::Selector;

pub fn rational(q: &Q) -> Value {
    Value::String(q.to_string())
}

pub fn qmat(m: &QMat) -> Value {
    Value::Array(
        (0..m.rows)
            .map(|i| Value::Array((0..m.cols).map(|j| rational(&m.data[i * m.cols + j])).collect()))
            .collect(),
    )
}

pub fn vector(v: &[Q]) -> Value {
    Value::Array(v.iter().map(rational).collect())
}

fn poly(model: &FrameModel, p: &Poly) -> Value {
    Value::String(p.to_text(&model.variable_names()))
}

fn poly_matrix(model: &FrameModel, m: &PolyMatrix) -> Value {
    Value::Array(
        (0..m.rows).map(|i| Value::Array((0..m.cols).map(|j| poly(model, &m.get(i, j))).collect())).collect(),
    )
}

/// `{frame name: coefficient}` over the nonzero coefficients.
pub fn field(model: &FrameModel, x: &FrameField) -> Value {
    let mut m = Map::new();
    for (i, c) in x.coeffs.iter().enumerate() {
        if !c.is_zero() {
            m.insert(model.frame_names[i].clone(), poly(model, c));
        }
    }
    Value::Object(m)
}

fn index_names(model: &FrameModel, idx: &[usize]) -> Value {
    Value::Array(idx.iter().map(|i| Value::String(model.frame_names[*i].clone())).collect())
}

pub fn kform(model: &FrameModel, w: &KForm) -> Value {
    form_terms(model, w, |p| poly(model, p))
}

pub fn glform(model: &FrameModel, w: &GlForm) -> Value {
    form_terms(model, w, |m| poly_matrix(model, m))
}

fn form_terms<C: crate::forms::Coeff>(model: &FrameModel, w: &Form<C>, f: impl Fn(&C) -> Value) -> Value {
    Value::Array(w.terms().map(|(idx, c)| json!({ "indices": index_names(model, idx), "value": f(c) })).collect())
}

pub fn kvector(model: &FrameModel, v: &KVector) -> Value {
    Value::Array(v.terms().map(|(idx, c)| json!({ "indices": index_names(model, idx), "value": poly(model, c) })).collect())
}

pub fn flag(model: &FrameModel, flag: &Flag) -> Value {
    let eq = &flag.equiregular;
    let witness = eq.point.witness.as_ref().map(|w| json!({ "point": vector(&w.point), "growth": w.growth }));
    json!({
        "growth_vector": flag.growth_vector,
        "step": flag.step,
        "bracket_generating": flag.bracket_generating,
        "equiregular": eq.holds,
        "strictly_increasing": eq.strictly_increasing,
        "point_class": eq.point.class,
        "samples_checked": eq.point.samples_checked,
        "generic_ranks": eq.point.generic_ranks,
        "witness": witness,
        "reason": eq.point.reason,
        "levels": flag.levels.as_ref().map(|ls| ls.iter().map(|l| index_names(model, l)).collect::<Vec<_>>()),
        "generators": flag.generators.iter().map(|g| g.iter().map(|x| field(model, x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "base_point": vector(&model.base_point),
    })
}

pub fn selector(model: &FrameModel, sel: &Selector, kind: &str) -> Value {
    let table: Map<String, Value> = sel
        .table
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (model.frame_names[j].clone(), kvector(model, v)))
        .collect();
    json!({
        "kind": kind,
        "levels": sel.levels.iter().map(|l| index_names(model, l)).collect::<Vec<_>>(),
        "table": table,
        "verification": sel.evidence.as_ref().map(|e| json!({
            "axiom1_checks": e.axiom1_checks,
            "axiom2_checks": e.axiom2_checks,
            "passed": true,
        })),
    })
}

fn certificate(c: &Certificate) -> Value {
    match c {
        Certificate::FixedPoint(g) => json!({ "type": "fixed_point", "metric": qmat(g) }),
        Certificate::ZeroKernel { rank, dim } => json!({ "type": "zero_kernel", "rank": rank, "sym2_dim": dim }),
        Certificate::Traceless(k) => json!({ "type": "traceless", "kernel": k.iter().map(qmat).collect::<Vec<_>>() }),
        Certificate::NonSkew { element, trace_square } => {
            json!({ "type": "non_skew", "element": qmat(element), "trace_square": rational(trace_square) })
        }
        Certificate::Indefinite { generator, u, w } => {
            json!({ "type": "indefinite", "generator": qmat(generator), "u": vector(u), "w": vector(w) })
        }
        Certificate::NonzeroElement(a) => json!({ "type": "nonzero_element", "element": qmat(a) }),
        Certificate::Obstruction(s) => json!({ "type": "obstruction", "form": s }),
    }
}

/// Yes-certificates go under `certificate`, refutations under `witness`.
pub fn verdict(v: &Verdict) -> Value {
    let (cert, witness) = match &v.certificate {
        Some(c @ Certificate::FixedPoint(_)) => (certificate(c), Value::Null),
        Some(c) => (Value::Null, certificate(c)),
        None => (Value::Null, Value::Null),
    };
    json!({
        "kind": v.kind,
        "reason": v.reason,
        "certificate": cert,
        "witness": witness,
        "assumptions": v.assumptions,
        "notes": v.notes,
        "seed": v.seed,
        "budget": v.budget,
    })
}

pub fn one_dim(model: &FrameModel, r: &OneDimResult) -> Value {
    json!({
        "obstruction": kform(model, &r.obstruction),
        "lie_derivative": kform(model, &r.lie_derivative),
        "verdict": verdict(&r.verdict),
    })
}

pub fn holonomy(h: &HolonomyAlgebra, oracle: Option<&OracleReport>) -> Value {
    let mut out = json!({
        "base_point": vector(&h.base_point),
        "nu": h.nu,
        "dim": h.dim(),
        "basis": h.basis.iter().map(qmat).collect::<Vec<_>>(),
        "depth_used": h.depth_used,
        "stabilized": h.stabilized,
        "stop_reason": h.stop_reason,
        "sections": h.sections,
        "closure_added": h.closure_added,
    });
    if let Some(o) = oracle {
        out["oracle"] = serde_json::to_value(o).expect("oracle reports serialize");
        out["oracle_agrees"] = Value::Bool(o.numeric_rank == h.dim());
    }
    out
}

/// Wraps a report body with the command, input and full configuration.
pub fn envelope(command: &str, input: &str, config: &RunConfig, body: Value) -> Value {
    json!({
        "command": command,
        "input": input,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed,
        "config": config,
        "report": body,
    })
}
