use proptest::prelude::*;

use hk_core::connection::{flatten, vertical_connection, CurvatureRoute};
use hk_core::decide::{check_certificate, tg_metric_exists, SearchBudget};
use hk_core::distribution::{compute_flag, growth_vector_at, FlagOptions};
use hk_core::forms::KForm;
use hk_core::frame::{FrameField, FrameModel};
use hk_core::holonomy::{
    numeric_transport_oracle, ozeki_algebra, ozeki_from_curvature, sym2_action, HolonomyAlgebra, HolonomyOptions,
    OracleOptions,
};
use hk_core::linalg::QMat;
use hk_core::models;
use hk_core::poly::{q, Poly, Q};
use hk_core::selector::{build_selector, verify_selector, Selector};

fn phi() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["0", "1", "x", "y", "x^2", "x*y", "2*x - y", "y^2 + 1/2*x", "x^3"]).prop_map(String::from)
}

fn contact_extra() -> impl Strategy<Value = Vec<(usize, String)>> {
    prop::collection::vec(
        (0usize..4, prop::sample::select(vec!["x1", "y2", "x1^2", "y1*z", "1/3*x2*y1", "z"]).prop_map(String::from)),
        0..3,
    )
}

fn contact_model(extra: &[(usize, String)]) -> FrameModel {
    let e: Vec<(usize, &str)> = extra.iter().map(|(i, s)| (*i, s.as_str())).collect();
    models::contact(2, &e).unwrap()
}

fn selector(m: &FrameModel) -> Selector {
    build_selector(m, &compute_flag(m, &FlagOptions::default()).unwrap()).unwrap()
}

fn small_q() -> impl Strategy<Value = Q> {
    (-4i64..=4, 1i64..=3).prop_map(|(a, b)| Q::new(a.into(), b.into()))
}

fn arb_field(n: usize, names: Vec<String>) -> impl Strategy<Value = FrameField> {
    let polys = vec!["0", "1", "x1", "y1*z", "x2^2 - y2", "1/2*z"];
    prop::collection::vec(prop::sample::select(polys), n)
        .prop_map(move |cs| FrameField { coeffs: cs.iter().map(|s| Poly::parse(s, &names).unwrap()).collect() })
}

fn contact_names() -> Vec<String> {
    ["x1", "x2", "y1", "y2", "z"].iter().map(|s| s.to_string()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jacobi_for_polynomial_fields(
        x in arb_field(5, contact_names()),
        y in arb_field(5, contact_names()),
        z in arb_field(5, contact_names()),
        extra in contact_extra(),
    ) {
        let m = contact_model(&extra);
        let b = |a: &FrameField, c: &FrameField| m.bracket(a, c).unwrap();
        let s = b(&x, &b(&y, &z)).add(&b(&y, &b(&z, &x))).add(&b(&z, &b(&x, &y)));
        prop_assert!(s.is_zero());
    }

    #[test]
    fn growth_is_monotone_and_seed_independent(p1 in phi(), p2 in phi(), seed in 0u64..1000) {
        let m = models::twisted_heisenberg(&p1, &p2).unwrap();
        let f = compute_flag(&m, &FlagOptions { seed, ..FlagOptions::default() }).unwrap();
        let g = &f.growth_vector;
        prop_assert!(g.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(*g.last().unwrap() <= m.dim());
        prop_assert_eq!(f.bracket_generating, *g.last().unwrap() == m.dim());
        let f0 = compute_flag(&m, &FlagOptions::default()).unwrap();
        prop_assert_eq!(f.equiregular.holds, f0.equiregular.holds);
        prop_assert_eq!(&f.growth_vector, &f0.growth_vector);
    }

    #[test]
    fn adapted_frame_spans_the_flag(extra in contact_extra()) {
        let m = contact_model(&extra);
        let f = compute_flag(&m, &FlagOptions::default()).unwrap();
        let levels = f.levels.clone().unwrap();
        for (k, s) in levels.iter().enumerate() {
            prop_assert_eq!(s.len(), f.growth_vector[k]);
            let rows: Vec<Vec<Q>> = s.iter().map(|&i| {
                let mut e = vec![q(0); m.dim()];
                e[i] = q(1);
                e
            }).chain(f.generators[k].iter().map(|g| g.eval(&m.base_point))).collect();
            prop_assert_eq!(QMat::from_rows(rows).rank(), s.len());
        }
        prop_assert_eq!(growth_vector_at(&m, &m.base_point, 8).unwrap(), f.growth_vector);
    }

    #[test]
    fn selectors_verify_and_form_an_affine_space(extra in contact_extra(), f in prop::sample::select(vec!["0", "1", "x1", "1 - y2", "z^2"])) {
        let m = contact_model(&extra);
        let flag = compute_flag(&m, &FlagOptions::default()).unwrap();
        let chi1 = build_selector(&m, &flag).unwrap();
        prop_assert!(verify_selector(&m, &chi1).is_ok());
        let x1 = m.index_of("X1").unwrap();
        let y1 = m.index_of("Y1").unwrap();
        let chi2 = hk_core::selector::build_selector_restricted(&m, &flag, |a, b| (a, b) == (x1, y1)).unwrap();
        let f = Poly::parse(f, &m.variable_names()).unwrap();
        prop_assert!(verify_selector(&m, &chi1.affine_combination(&chi2, &f)).is_ok());
    }

    #[test]
    fn step_operator_kills_contracted_two_forms(
        extra in contact_extra(),
        terms in prop::collection::vec((0usize..5, 0usize..5, prop::sample::select(vec!["1", "x1", "y2*z", "z^2 - x2"])), 1..4),
    ) {
        let m = contact_model(&extra);
        let sel = selector(&m);
        let mut eta = KForm::zero(2);
        for (a, b, c) in terms {
            if a != b {
                eta.add_term(vec![a, b], &Poly::parse(c, &m.variable_names()).unwrap());
            }
        }
        let mut w = eta.contract(&sel.table);
        for _ in 1..sel.step() {
            w = sel.step_operator(&m, &w);
        }
        prop_assert!(w.is_zero());
    }

    #[test]
    fn holonomy_is_closed_and_contains_flattened_curvature(p1 in phi(), p2 in phi()) {
        let m = models::twisted_heisenberg(&p1, &p2).unwrap();
        let sel = selector(&m);
        let conn = vertical_connection(&m);
        let fl = flatten(&m, &conn, &sel).unwrap();
        let h = ozeki_from_curvature(&m, &conn, &fl.curvature, &HolonomyOptions::default());
        prop_assert!(h.is_bracket_closed());
        for (_, r) in fl.curvature.terms() {
            prop_assert!(h.contains(&r.eval(&m.base_point)));
        }
        for route in [CurvatureRoute::Power, CurvatureRoute::Binomial] {
            let other = ozeki_algebra(&m, &conn, &sel, route, &HolonomyOptions::default()).unwrap();
            prop_assert!(other.same_span(&h));
        }
    }

    #[test]
    fn tg_verdict_is_invariant_under_change_of_frame(
        gens in prop::collection::vec(prop::collection::vec(small_q(), 4), 1..3),
        p in prop::collection::vec(small_q(), 4),
        seed in 0u64..100,
    ) {
        let mats: Vec<QMat> = gens.into_iter().map(|g| QMat::from_rows(vec![g[..2].to_vec(), g[2..].to_vec()])).collect();
        let pm = QMat::from_rows(vec![vec![&p[0] + &q(3), p[1].clone()], vec![p[2].clone(), &p[3] + &q(3)]]);
        prop_assume!(pm.det() != q(0));
        let pinv = pm.inverse().unwrap();
        let h = close(2, mats.clone());
        let h2 = close(2, mats.iter().map(|a| pinv.mul(a).mul(&pm)).collect());
        let v = tg_metric_exists(&h, SearchBudget::default(), seed);
        let v2 = tg_metric_exists(&h2, SearchBudget::default(), seed);
        prop_assert_eq!(v.kind, v2.kind);
        check_certificate(&h, &v).unwrap();
        check_certificate(&h2, &v2).unwrap();
        // Same seed and budget, same verdict.
        prop_assert_eq!(tg_metric_exists(&h, SearchBudget::default(), seed), v);
    }
}

/// Lie algebra generated by `gens`, as a holonomy algebra usable by the
/// decision routines.
fn close(nu: usize, gens: Vec<QMat>) -> HolonomyAlgebra {
    let mut basis: Vec<QMat> = Vec::new();
    let mut span = hk_core::linalg::Echelon::new();
    let key = |m: &QMat| -> hk_core::linalg::SparseVec<usize> {
        m.data.iter().enumerate().filter(|(_, c)| **c != q(0)).map(|(i, c)| (i, c.clone())).collect()
    };
    let mut queue = gens;
    while let Some(a) = queue.pop() {
        if !span.insert(&key(&a)) {
            continue;
        }
        for b in &basis {
            let c = a.mul(b).add(&b.mul(&a).scale(&q(-1)));
            queue.push(c);
        }
        basis.push(a);
    }
    let sym2_basis = basis.iter().map(sym2_action).collect();
    HolonomyAlgebra {
        base_point: vec![],
        nu,
        basis,
        depth_used: 0,
        stabilized: true,
        stop_reason: hk_core::holonomy::StopReason::Closed,
        sections: 0,
        closure_added: 0,
        sym2_basis,
    }
}

#[test]
fn oracle_rank_matches_symbolic_dimension() {
    for (p1, p2) in [("0", "0"), ("x", "0"), ("x^2", "0"), ("0", "y^2"), ("x*y", "x")] {
        let m = models::twisted_heisenberg(p1, p2).unwrap();
        let sel = selector(&m);
        let conn = vertical_connection(&m);
        let fl = flatten(&m, &conn, &sel).unwrap();
        let h = ozeki_from_curvature(&m, &conn, &fl.curvature, &HolonomyOptions::default());
        let rep = numeric_transport_oracle(&m, &fl.connection, &OracleOptions::default()).unwrap();
        assert_eq!(rep.numeric_rank, h.dim(), "φ = ({p1}, {p2})");
    }
}
