//! Ray tracing and travel-time inversion through the public API.

use interface_lab::inverse::{forward_table, invert_direct_profile, invert_fluid_speed, KnownSolid};
use interface_lab::media::{Profile, RadialModel};
use interface_lab::rays::{interface_branch, source_state, trace_segment, EventKind, Mode, TracerConfig};
use interface_lab::Error;

fn graded() -> RadialModel {
    RadialModel::layered(
        1.0,
        0.5,
        Profile::Linear { a: 2.4, b: -0.4 },
        Profile::Linear { a: 1.2, b: -0.2 },
        Profile::Linear { a: 1.8, b: -0.6 },
        1.0,
        1.0,
    )
    .unwrap()
}

fn drift(cfg: TracerConfig) -> f64 {
    let m = graded();
    let cfg = TracerConfig { renormalize: false, max_steps: 10_000_000, ..cfg };
    let mut worst: f64 = 0.0;
    for k in 1..=10 {
        let s = source_state(&m, Mode::P, 0.13 * k as f64);
        let seg = trace_segment(&m, &s, &cfg).unwrap();
        for st in &seg.samples {
            worst = worst.max(st.shell_defect(m.speed(st.mode.speed(), st.radius()).0).abs());
        }
    }
    worst
}

#[test]
fn drift_falls_with_step_and_tolerance() {
    let fixed = |h: f64| drift(TracerConfig { fixed_step: Some(h), ..Default::default() });
    let (a, b) = (fixed(0.02), fixed(0.01));
    assert!(a / b >= 4.0, "step halving: {a:e} -> {b:e}");
    // With step-doubling control the global error scales like tol^(4/5).
    let adaptive = |tol: f64| drift(TracerConfig { tol, ..Default::default() });
    let (c, d) = (adaptive(1e-8), adaptive(1e-9));
    assert!(c / d >= 4.0, "tolerance refinement: {c:e} -> {d:e}");
    assert!(adaptive(TracerConfig::default().tol) <= 1e-9);
}

#[test]
fn sv_incidence_in_me_spawns_one_branch() {
    // c_s = 1 < c_f = 1.5 < c_p = 2 at the interface; steep SV incidence is ME.
    let m = RadialModel::canonical_layered();
    let cfg = TracerConfig::default();
    let s = source_state(&m, Mode::SV, 0.45);
    let end = *trace_segment(&m, &s, &cfg).unwrap().last();
    let z = 1.0 / (end.tangential_xi() * end.tangential_xi());
    assert!(z > 1.0 && z < 2.25, "z = {z}");
    let branches = interface_branch(&m, &end).unwrap();
    let propagating: Vec<_> = branches.iter().filter(|b| b.state.is_some()).collect();
    assert_eq!(propagating.len(), 1);
    assert_eq!(propagating[0].event.emergent, Some(Mode::SV));
    assert_eq!(branches.iter().filter(|b| b.event.kind == EventKind::EvanescentBranchDropped).count(), 2);
}

#[test]
fn direct_p_profile_round_trip() {
    let m = RadialModel::solid_ball(1.0, Profile::Linear { a: 3.0, b: -1.0 }, Profile::Linear { a: 1.5, b: -0.5 }).unwrap();
    let deltas: Vec<f64> = (1..=170).map(|k| k as f64).collect();
    let t = forward_table(&m, &deltas, &["P"], &TracerConfig::default()).unwrap();
    let rep = invert_direct_profile(&t.records, "P", 1.0, 2.0).unwrap().with_truth(&m.c_p);
    assert!(rep.rms_rel_error.unwrap() < 1e-3, "{:?}", rep.rms_rel_error);
}

#[test]
fn inversion_refuses_speed_profiles_violating_the_foliation() {
    // r/c decreases where c_f triples over the outer part of the core.
    let m = RadialModel::layered(
        1.0,
        0.5,
        Profile::Constant(2.0),
        Profile::Constant(1.0),
        Profile::tabulated(&[(0.0, 1.0), (0.3, 1.0), (0.5, 3.0)]).unwrap(),
        1.0,
        1.0,
    )
    .unwrap();
    let deltas: Vec<f64> = (0..=90).map(|k| 2.0 * k as f64).collect();
    match forward_table(&m, &deltas, &["S->F->S"], &TracerConfig::default()) {
        Err(e) => assert!(matches!(e, Error::FoliationViolated(_)), "{e}"),
        Ok(t) => {
            let e = invert_fluid_speed(&t.records, &KnownSolid::from_model(&m), 0.5).unwrap_err();
            assert!(matches!(e, Error::FoliationViolated(_)), "{e}");
        }
    }
}

#[test]
fn speed_ordering_is_enforced() {
    let m = RadialModel::layered(
        1.0,
        0.5,
        Profile::Constant(2.0),
        Profile::Constant(1.0),
        Profile::Constant(0.8),
        1.0,
        1.0,
    )
    .unwrap();
    let e = forward_table(&m, &[90.0], &["S->F->S"], &TracerConfig::default()).unwrap_err();
    assert!(matches!(e, Error::SpeedOrderingViolated(_)));
}
