use hk_core::connection::{curvature_direct, flatten, vertical_connection};
use hk_core::decide::{check_certificate, principal_structure_exists, tg_metric_exists, SearchBudget, VerdictKind};
use hk_core::holonomy::{ozeki_from_curvature, HolonomyOptions};
use hk_core::liegroups::*;

#[test]
fn free_algebras_satisfy_jacobi_and_the_split_relations() {
    for (n, rmax) in [(2, 8), (3, 5)] {
        for r in 1..=rmax {
            let (spec, hall) = free_nilpotent(n, r).unwrap();
            spec.check_jacobi().unwrap();
            assert!(spec.is_carnot(), "n={n} r={r}");
            let dims: Vec<usize> = spec.grading.as_ref().unwrap().iter().map(Vec::len).collect();
            assert_eq!(dims, (1..=r).map(|k| witt_dimension(n, k)).collect::<Vec<_>>());
            assert_eq!(hall.len(), spec.dim());
            let split = carnot_split(&spec).unwrap();
            assert!(split.relations_hold(), "n={n} r={r}: {:?}", split.relations);
        }
    }
}

#[test]
fn free_n2_r8_degree_dimensions() {
    let (spec, _) = free_nilpotent(2, 8).unwrap();
    let dims: Vec<usize> = spec.grading.unwrap().iter().map(Vec::len).collect();
    assert_eq!(dims, vec![2, 1, 2, 3, 6, 9, 18, 30]);
}

#[test]
fn non_carnot_gradings_are_refused() {
    // Graded but [g₁, g₁] = 0 ≠ g₂.
    let names = vec!["a".into(), "b".into(), "c".into()];
    let spec = LieAlgebraSpec::new(names, &[], Some(vec![vec![0, 1], vec![2]])).unwrap();
    assert!(matches!(carnot_split(&spec), Err(hk_core::Error::NotCarnot(_))));
    assert!(carnot_split(&LieAlgebraSpec::abelian(2)).is_err());
}

#[test]
fn verdict_tracks_the_p2k_condition() {
    for n in [2, 3] {
        let rmax = if n == 2 { 8 } else { 4 };
        for r in 2..=rmax {
            let (spec, _) = free_nilpotent(n, r).unwrap();
            let split = carnot_split(&spec).unwrap();
            let m = carnot_model(&spec, &split).unwrap();
            let (flag, sel) = carnot_selector(&m, &spec, &split).unwrap();
            assert_eq!(flag.step, 2);
            let conn = vertical_connection(&m);
            assert!(curvature_direct(&m, &conn).contract(&sel.table).is_zero(), "n={n} r={r}");
            let fl = flatten(&m, &conn, &sel).unwrap();
            let h = ozeki_from_curvature(&m, &conn, &fl.curvature, &HolonomyOptions::default());
            assert!(h.stabilized && h.is_bracket_closed());
            let v = tg_metric_exists(&h, SearchBudget::default(), 0);
            check_certificate(&h, &v).unwrap();
            let p2k = bracket_condition_p2k(&spec, &split);
            assert_eq!(v.kind == VerdictKind::Yes, p2k.holds, "n={n} r={r}");
            assert_eq!(principal_structure_exists(&h).kind == VerdictKind::Yes, h.dim() == 0);
        }
    }
}

#[test]
fn condition_fails_from_step_six() {
    let holds: Vec<bool> = (2..=8)
        .map(|r| {
            let (spec, _) = free_nilpotent(2, r).unwrap();
            bracket_condition_p2k(&spec, &carnot_split(&spec).unwrap()).holds
        })
        .collect();
    assert_eq!(holds, vec![true, true, true, true, false, false, false]);
}
