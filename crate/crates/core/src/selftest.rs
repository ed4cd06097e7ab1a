//! A compact invariant suite for quick end-to-end checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::interface::{
    assemble, closed_form_determinant, control_matrix_mh, control_matrix_mh2, mh_control2_det_closed,
    mh_control_det_closed, solve, solve_general, solve_outgoing, AmplitudeSet, Case, Component,
};
use crate::inverse::{estimate_interface_radius, forward_table, invert_fluid_speed, KnownSolid};
use crate::media::{Profile, RadialModel};
use crate::microlocal::BoundaryCovector;
use crate::rays::{interface_branch, source_state, trace_segment, two_point_time, TracerConfig};
use crate::sampling::{random_material, sample_case};
use crate::scholte::{find_scholte_speed, scholte_kernel_mode};
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult { name, passed: worst <= tol, detail: format!("worst {worst:.3e}, tolerance {tol:.0e}") }
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> CheckResult {
    CheckResult { name, passed: false, detail: e.to_string() }
}

fn incoming(case: Case) -> AmplitudeSet {
    let all = AmplitudeSet::incoming(
        C64::new(0.3, -1.0),
        C64::new(1.0, 0.5),
        C64::new(-0.7, 0.2),
        C64::new(0.1, 0.9),
    );
    let mut adm = AmplitudeSet::default();
    for &k in case.admitted_incoming() {
        adm.set(k, all.get(k).expect("all components set"));
    }
    adm
}

/// Runs every check with `samples` random draws per case.
pub fn run(seed: u64, samples: usize) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    let mut det_err: f64 = 0.0;
    let mut sh_err: f64 = 0.0;
    let mut residual: f64 = 0.0;
    let mut covariance: f64 = 0.0;
    for case in Case::ALL {
        for _ in 0..samples {
            let (m, cv) = sample_case(&mut rng, case, 2.0);
            let r = (|| -> crate::Result<()> {
                let sys = assemble(case, &cv, &m)?;
                let closed = closed_form_determinant(case, &cv, &m)?;
                // Scaled by the row norms: the relative error of a double-precision LU
                // determinant grows with the conditioning, so this is the backward error.
                let scale: f64 = sys.a_out.row_norms().iter().product();
                det_err = det_err.max((sys.a_out.det() - closed).norm() / scale);
                if case == Case::EE {
                    return Ok(());
                }
                let inc = incoming(case);
                let sol = solve_outgoing(&sys, &inc)?;
                residual = residual.max(sol.residual / inc.max_abs());
                let b1 = sol.outgoing.value(Component::B1S);
                let expect = if case.has_sh_reflection() { -inc.value(Component::B1S) } else { C64::new(0.0, 0.0) };
                sh_err = sh_err.max((b1 - expect).norm());
                let phi = rand::Rng::gen_range(&mut rng, 0.0..std::f64::consts::TAU);
                let rot = BoundaryCovector::new(cv.xi1 * phi.cos(), cv.xi1 * phi.sin(), cv.tau);
                let a = solve(&rot, &m, &inc)?;
                let g = solve_general(&rot, &m, &inc)?;
                let conj = solve(&BoundaryCovector { tau: -rot.tau, ..rot }, &m, &inc.conj())?;
                let scale = inc.max_abs().max(a.outgoing.max_abs());
                for (k, c) in Component::ALL.into_iter().enumerate() {
                    let v = a.outgoing.value(c);
                    covariance = covariance.max((v - g[k]).norm() / scale);
                    covariance = covariance.max((conj.outgoing.value(c) - v.conj()).norm() / scale);
                }
                Ok(())
            })();
            if let Err(e) = r {
                out.push(failed("interface sweep", format!("{case}: {e}")));
            }
        }
    }
    out.push(check("closed-form determinants (row-scaled)", det_err, 1e-12));
    out.push(check("SH reflection law", sh_err, 1e-14));
    out.push(check("transmission residual", residual, 1e-10));
    out.push(check("rotation covariance and tau conjugation", covariance, 1e-10));

    let mut ctl_err: f64 = 0.0;
    for _ in 0..samples {
        let (m, cv) = sample_case(&mut rng, Case::MH, 2.0);
        let r = (|| -> crate::Result<()> {
            let d1 = mh_control_det_closed(&cv, &m)?;
            let d2 = mh_control2_det_closed(&cv, &m)?;
            ctl_err = ctl_err.max((control_matrix_mh(&cv, &m)?.0.det() - d1).norm() / d1.norm());
            ctl_err = ctl_err.max((control_matrix_mh2(&cv, &m)?.0.det() - d2).norm() / d2.norm());
            Ok(())
        })();
        if let Err(e) = r {
            out.push(failed("control determinants", e));
        }
    }
    out.push(check("control determinants", ctl_err, 1e-12));

    let mut scholte_err: f64 = 0.0;
    for _ in 0..samples {
        let m = random_material(&mut rng, 2.0);
        match find_scholte_speed(&m).and_then(|_| scholte_kernel_mode(&m)) {
            Ok(mode) => {
                let z = mode.root.c_sc_sq;
                let zmax = (m.c_s * m.c_s).min(m.c_f * m.c_f);
                if !(z > 0.0 && z < zmax) || mode.amplitudes.value(Component::B1S) != C64::new(0.0, 0.0) {
                    scholte_err = f64::INFINITY;
                }
                scholte_err = scholte_err.max(mode.residual);
            }
            Err(e) => out.push(failed("Scholte root and mode", e)),
        }
    }
    out.push(check("Scholte root and mode", scholte_err, 1e-9));

    let cfg = TracerConfig::default();
    let ball = RadialModel::solid_ball(1.0, Profile::Constant(2.0), Profile::Constant(1.0)).expect("valid ball");
    let mut chord: f64 = 0.0;
    for d in [15.0f64, 75.0, 135.0] {
        match two_point_time(&ball, "P", 0.0, d, &cfg) {
            Ok(s) => chord = chord.max((s.time - (d.to_radians() / 2.0).sin()).abs()),
            Err(e) => out.push(failed("chord travel times", e)),
        }
    }
    out.push(check("chord travel times", chord, 1e-10));

    let layered = RadialModel::canonical_layered();
    let mut snell: f64 = 0.0;
    for k in 1..8 {
        let s = source_state(&layered, crate::rays::Mode::SV, 0.05 * k as f64);
        let r = trace_segment(&layered, &s, &cfg).and_then(|seg| interface_branch(&layered, seg.last()));
        match r {
            Ok(branches) => {
                for b in branches {
                    let (a, c) = b.event.xi_tangential;
                    snell = snell.max((a - c).abs() / a.abs().max(1e-300));
                }
            }
            Err(e) => out.push(failed("Snell invariance", e)),
        }
    }
    out.push(check("Snell invariance", snell, 1e-12));

    let deltas: Vec<f64> = (0..=90).map(|k| 2.0 * k as f64).collect();
    let inv = forward_table(&layered, &deltas, &["S->F->S", "S->S"], &cfg).and_then(|t| {
        let solid = KnownSolid::from_model(&layered);
        let rc = estimate_interface_radius(&t.records, &solid)?;
        let truth = layered.c_f.as_ref().expect("layered model has a fluid profile");
        Ok((rc, invert_fluid_speed(&t.records, &solid, rc)?.with_truth(truth)))
    });
    match inv {
        Ok((rc, rep)) => {
            out.push(check("interface radius recovery", (rc - layered.r_core).abs() / layered.r_core, 1e-2));
            out.push(check("fluid speed recovery (RMS)", rep.rms_rel_error.unwrap_or(f64::INFINITY), 1e-2));
        }
        Err(e) => out.push(failed("inverse round trip", e)),
    }
    out
}
