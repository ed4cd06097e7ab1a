//! Shared helpers and independent oracles for the integration tests.
#![allow(dead_code)]

pub mod dd;
pub mod oracle;

use rand::Rng;

use interface_lab::interface::{AmplitudeSet, Case, Component};
use interface_lab::C64;

pub fn random_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random incoming amplitudes on the components admitted by `case`; zero elsewhere.
pub fn random_incoming<R: Rng>(rng: &mut R, case: Case) -> AmplitudeSet {
    let mut v = [C64::new(0.0, 0.0); 4];
    for (k, c) in Component::ALL.into_iter().enumerate() {
        if case.admitted_incoming().contains(&c) {
            v[k] = random_complex(rng);
        }
    }
    AmplitudeSet::incoming(v[0], v[1], v[2], v[3])
}

/// Rotates a tangential pair by `phi`.
pub fn rotate(phi: f64, v: (C64, C64)) -> (C64, C64) {
    let (c, s) = (phi.cos(), phi.sin());
    (c * v.0 - s * v.1, s * v.0 + c * v.1)
}
