//! Two-point travel times by scanning and bisecting the takeoff angle.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::media::RadialModel;

use super::integrator::TracerConfig;
use super::radial::trace_phase;
use super::Phase;

/// Number of takeoff samples in the initial scan.
pub const SCAN_SAMPLES: usize = 256;
/// Bisection steps on a bracketing pair of takeoffs.
pub const BISECTION_STEPS: usize = 60;
/// Bisection steps locating an edge of the realizable takeoff range.
const EDGE_STEPS: usize = 40;

/// A connecting ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotResult {
    pub delta: f64,
    pub time: f64,
    pub takeoff: f64,
    /// Unwrapped epicentral angle reached by the ray; `Δ` or `2π − Δ`.
    pub theta: f64,
}

#[derive(Debug, Clone, Copy)]
struct Sample {
    takeoff: f64,
    theta: f64,
}

/// Caches the takeoff scan of one phase so many distances can be shot cheaply.
#[derive(Debug, Clone)]
pub struct PhaseShooter<'a> {
    pub model: &'a RadialModel,
    pub phase: Phase,
    pub cfg: TracerConfig,
    scan: Vec<Option<Sample>>,
}

impl<'a> PhaseShooter<'a> {
    pub fn new(model: &'a RadialModel, phase: Phase, cfg: TracerConfig) -> Self {
        let coarse: Vec<Option<Sample>> = (0..=SCAN_SAMPLES)
            .map(|k| {
                let i = FRAC_PI_2 * k as f64 / SCAN_SAMPLES as f64;
                if k == SCAN_SAMPLES {
                    // The horizontal takeoff never leaves the source.
                    return phase.is_direct().then_some(Sample { takeoff: i, theta: 0.0 });
                }
                theta_at(model, &phase, i, &cfg).map(|theta| Sample { takeoff: i, theta })
            })
            .collect();
        // Distances near the edge of the realizable takeoff range (grazing at the
        // interface, say) change quickly, so the edges are located and sampled too.
        let mut scan = Vec::with_capacity(coarse.len() + 8);
        for (k, w) in coarse.windows(2).enumerate() {
            scan.push(w[0]);
            if w[0].is_some() != w[1].is_some() {
                let step = FRAC_PI_2 / SCAN_SAMPLES as f64;
                let (a, b) = (k as f64 * step, (k + 1) as f64 * step);
                if let Some(edge) = edge_sample(model, &phase, &cfg, a, b, w[0].is_some()) {
                    if w[0].is_some() {
                        scan.push(Some(edge));
                        scan.push(None);
                    } else {
                        scan.push(None);
                        scan.push(Some(edge));
                    }
                }
            }
        }
        scan.extend(coarse.last().copied());
        PhaseShooter { model, phase, cfg, scan }
    }

    /// Fastest ray of the phase arriving at epicentral distance `delta` (radians, `[0, π]`).
    pub fn shoot(&self, delta: f64) -> Result<ShotResult> {
        let not_reachable = || Error::NotReachable { phase: self.phase.to_string(), delta_deg: delta.to_degrees() };
        if !(0.0..=PI).contains(&delta) {
            return Err(not_reachable());
        }
        if delta == 0.0 && self.phase.is_direct() {
            return Ok(ShotResult { delta, time: 0.0, takeoff: FRAC_PI_2, theta: 0.0 });
        }
        let mut best: Option<ShotResult> = None;
        for target in [delta, TAU - delta] {
            for w in self.scan.windows(2) {
                let (Some(a), Some(b)) = (w[0], w[1]) else { continue };
                if (a.theta - target) * (b.theta - target) > 0.0 {
                    continue;
                }
                if let Some(shot) = self.refine(a, b, target, delta) {
                    if best.is_none_or(|s| shot.time < s.time) {
                        best = Some(shot);
                    }
                }
            }
        }
        best.ok_or_else(not_reachable)
    }

    fn refine(&self, a: Sample, b: Sample, target: f64, delta: f64) -> Option<ShotResult> {
        let (mut lo, mut hi) = (a, b);
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo.takeoff + hi.takeoff);
            let theta = theta_at(self.model, &self.phase, mid, &self.cfg)?;
            let m = Sample { takeoff: mid, theta };
            if (lo.theta - target) * (theta - target) <= 0.0 {
                hi = m;
            } else {
                lo = m;
            }
        }
        let pick = if (lo.theta - target).abs() <= (hi.theta - target).abs() { lo } else { hi };
        if pick.takeoff >= FRAC_PI_2 {
            return Some(ShotResult { delta, time: 0.0, takeoff: pick.takeoff, theta: 0.0 });
        }
        let ray = trace_phase(self.model, &self.phase, pick.takeoff, &self.cfg).ok()??;
        // Reject brackets that straddle a jump rather than a root.
        let tol = 1e-6 * (1.0 + (a.theta - b.theta).abs());
        if (ray.theta - target).abs() > tol {
            return None;
        }
        Some(ShotResult { delta, time: ray.time(), takeoff: pick.takeoff, theta: ray.theta })
    }
}

/// Last realizable sample between takeoffs `a` and `b`, where exactly one end is realizable.
fn edge_sample(model: &RadialModel, phase: &Phase, cfg: &TracerConfig, a: f64, b: f64, left_valid: bool) -> Option<Sample> {
    let (mut good, mut bad) = if left_valid { (a, b) } else { (b, a) };
    let mut best = None;
    for _ in 0..EDGE_STEPS {
        let mid = 0.5 * (good + bad);
        match theta_at(model, phase, mid, cfg) {
            Some(theta) => {
                good = mid;
                best = Some(Sample { takeoff: mid, theta });
            }
            None => bad = mid,
        }
    }
    best
}

fn theta_at(model: &RadialModel, phase: &Phase, takeoff: f64, cfg: &TracerConfig) -> Option<f64> {
    trace_phase(model, phase, takeoff, cfg).ok().flatten().map(|r| r.theta)
}

/// Angular separation in `[0, π]` of two surface points given by their angles in degrees.
pub fn separation(src_deg: f64, rcv_deg: f64) -> f64 {
    let d = (rcv_deg - src_deg).to_radians();
    (d - TAU * (d / TAU).round()).abs()
}

/// First arrival of `phase` between two surface points given by their angles in degrees.
pub fn two_point_time(
    model: &RadialModel,
    phase: &str,
    src_deg: f64,
    rcv_deg: f64,
    cfg: &TracerConfig,
) -> Result<ShotResult> {
    let phase = Phase::parse(phase)?;
    PhaseShooter::new(model, phase, *cfg).shoot(separation(src_deg, rcv_deg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::media::Profile;

    #[test]
    fn chord_times_in_homogeneous_ball() {
        let m = RadialModel::solid_ball(1.0, Profile::Constant(2.0), Profile::Constant(1.0)).unwrap();
        let cfg = TracerConfig::default();
        for d in [10.0f64, 60.0, 120.0, 175.0] {
            let s = two_point_time(&m, "S", 0.0, d, &cfg).unwrap();
            let chord = 2.0 * (d.to_radians() / 2.0).sin();
            assert!((s.time - chord).abs() < 1e-10, "{d}: {} vs {chord}", s.time);
            let p = two_point_time(&m, "P", 30.0, 30.0 - d, &cfg).unwrap();
            assert!((p.time - chord / 2.0).abs() < 1e-10);
        }
        assert_eq!(two_point_time(&m, "P", 10.0, 370.0, &cfg).unwrap().time, 0.0);
    }

    #[test]
    fn unreachable_distance_errors() {
        let m = RadialModel::canonical_layered();
        // Core phases cannot arrive at very short distances.
        let e = two_point_time(&m, "S->F->S", 0.0, 5.0, &TracerConfig::default()).unwrap_err();
        assert!(matches!(e, Error::NotReachable { .. }));
    }
}
