//! Property tests of the transmission solver through the public API.

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{oracle, random_incoming};
use interface_lab::interface::{solve, AmplitudeSet, Case, Component, Direction};
use interface_lab::microlocal::BoundaryCovector;
use interface_lab::sampling::{covector_for_case, material_for_case};
use interface_lab::C64;

const SOLVABLE: [Case; 5] = [Case::HH, Case::MH, Case::EH, Case::HE, Case::ME];

fn draw(seed: u64, case: Case) -> (interface_lab::media::MaterialPoint, BoundaryCovector, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let m = material_for_case(&mut rng, case, 2.0);
        if let Some(c) = covector_for_case(&mut rng, case, &m) {
            return (m, c, rng);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sh_total_reflection(seed in any::<u64>(), k in 0usize..4, re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let case = [Case::HH, Case::MH, Case::HE, Case::ME][k];
        let (m, cv, _) = draw(seed, case);
        let red = BoundaryCovector::new(cv.tangential_norm(), 0.0, cv.tau);
        let b1 = C64::new(re, im);
        let inc = AmplitudeSet::incoming(b1, C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let sol = solve(&red, &m, &inc).unwrap();
        prop_assert_eq!(sol.outgoing.value(Component::B1S), -b1);
    }

    #[test]
    fn solution_invariants(seed in any::<u64>(), k in 0usize..5, flip in any::<bool>()) {
        let case = SOLVABLE[k];
        let (m, cv, mut rng) = draw(seed, case);
        let cv = if flip { BoundaryCovector { tau: -cv.tau, ..cv } } else { cv };
        let inc = random_incoming(&mut rng, case);
        let sol = solve(&cv, &m, &inc).unwrap();
        prop_assert_eq!(sol.label.case, case);
        prop_assert!(sol.residual <= 1e-10 * inc.max_abs());
        prop_assert!((sol.det_numeric - sol.det_closed_form).norm() <= 1e-12 * sol.det_closed_form.norm());
        prop_assert!(!sol.conditioning_warning);
        let dirs = case.unknown_directions();
        for (c, d) in [Component::B2S, Component::BP, Component::BF].into_iter().zip(dirs) {
            prop_assert_eq!(sol.outgoing.get(c).map(|a| a.dir), Some(d));
        }
        if case == Case::EH {
            // No SH evanescent wave; in a rotated frame b1 mixes in the SV component.
            let red = BoundaryCovector::new(cv.tangential_norm(), 0.0, cv.tau);
            let b1 = solve(&red, &m, &inc).unwrap().outgoing.get(Component::B1S).map(|a| (a.value, a.dir));
            prop_assert_eq!(b1, Some((C64::new(0.0, 0.0), Direction::Ev)));
        }
    }

    #[test]
    fn plane_waves_satisfy_transmission_conditions(seed in any::<u64>(), k in 0usize..5) {
        let case = SOLVABLE[k];
        let (m, cv, mut rng) = draw(seed, case);
        let inc = random_incoming(&mut rng, case);
        let sol = solve(&cv, &m, &inc).unwrap();
        let (s, f) = oracle::plane_waves(case, &cv, &m, &inc, &sol.outgoing);
        let r = oracle::transmission_residual(&cv, &m, &s, &f, &[[0.3, -1.2, 2.0], [5.0, 4.0, -7.5]]);
        prop_assert!(r <= 1e-9, "residual {r:e}");
    }

    #[test]
    fn hh_energy_flux_balances(seed in any::<u64>()) {
        let (m, cv, mut rng) = draw(seed, Case::HH);
        let inc = random_incoming(&mut rng, Case::HH);
        let sol = solve(&cv, &m, &inc).unwrap();
        let (s, f) = oracle::plane_waves(Case::HH, &cv, &m, &inc, &sol.outgoing);
        // Net flux through the interface: solid side equals fluid side.
        let solid: f64 = s.iter().map(|w| w.flux(&cv, &m)).sum();
        let fluid: f64 = f.iter().map(|w| w.flux(&cv, &m)).sum();
        let scale: f64 = s.iter().map(|w| w.flux(&cv, &m).abs()).sum::<f64>() + f.iter().map(|w| w.flux(&cv, &m).abs()).sum::<f64>();
        prop_assert!((solid - fluid).abs() <= 1e-9 * scale);
    }
}

#[test]
fn double_double_oracle_matches_well_conditioned_lu() {
    use interface_lab::interface::assemble;
    let (m, cv, _) = draw(7, Case::HH);
    let red = BoundaryCovector::new(cv.tangential_norm(), 0.0, cv.tau);
    let lu = assemble(Case::HH, &red, &m).unwrap().a_out.det();
    let dd = common::dd::reduced_determinant(Case::HH, &red, &m);
    assert!((lu - dd).norm() <= 1e-13 * dd.norm());
}
