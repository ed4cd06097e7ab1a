//! Travel-time tables and kinematic recovery of radial speed profiles.
//!
//! The forward problem shoots phases through a [`RadialModel`]. The inverse side
//! works with the ray parameter `p = r sin(i)/c`, which is constant along a ray
//! in a radial medium and equals `dT/dΔ`:
//!
//! * known solid legs are stripped from fluid-refracted records, leaving the
//!   angle `Δ_c(p)` subtended inside the fluid ball;
//! * the Herglotz–Wiechert formula
//!   `ln(R_c/r_t) = (1/π) ∫₀^{acosh(p₀/p)} Δ_c(p cosh u) du` gives the turning
//!   radius `r_t` of each ray, and `c(r_t) = r_t/p`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::media::{Pchip, Profile, RadialModel};
use crate::rays::{Mode, Phase, PhaseShooter, TracerConfig};

/// Simpson panels for solid-leg quadrature.
const LEG_PANELS: usize = 2000;
/// Trapezoid nodes for the Herglotz–Wiechert integral.
const HW_NODES: usize = 4000;

/// One first arrival. Positions are angles on the surface in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelTimeRecord {
    pub src_deg: f64,
    pub rcv_deg: f64,
    pub phase: String,
    pub time: f64,
    pub takeoff_deg: f64,
}

impl TravelTimeRecord {
    pub fn delta(&self) -> f64 {
        crate::rays::separation(self.src_deg, self.rcv_deg)
    }
}

/// A `(Δ, phase)` pair with no connecting ray.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmittedRecord {
    pub delta_deg: f64,
    pub phase: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TravelTimeTable {
    pub records: Vec<TravelTimeRecord>,
    pub omitted: Vec<OmittedRecord>,
}

/// First-arrival times of every phase at every distance (degrees), source at angle 0.
///
/// The model must satisfy the speed ordering `c_s < c_f` at the interface and the
/// convexity condition on every layer.
pub fn forward_table(
    model: &RadialModel,
    deltas_deg: &[f64],
    phases: &[&str],
    cfg: &TracerConfig,
) -> Result<TravelTimeTable> {
    if model.has_core() && !model.satisfies_cond_g() {
        return Err(Error::SpeedOrderingViolated("c_s must be below c_f at the interface".into()));
    }
    model.check_convexity()?;
    let parsed: Vec<Phase> = phases.iter().map(|p| Phase::parse(p)).collect::<Result<_>>()?;
    let shooters: Vec<PhaseShooter> = parsed.into_par_iter().map(|p| PhaseShooter::new(model, p, *cfg)).collect();
    let jobs: Vec<(usize, f64)> =
        (0..shooters.len()).flat_map(|k| deltas_deg.iter().map(move |&d| (k, d))).collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(k, d)| {
            let s = &shooters[k];
            (d, s.phase.to_string(), s.shoot(d.to_radians()))
        })
        .collect();
    let mut table = TravelTimeTable::default();
    for (d, phase, r) in results {
        match r {
            Ok(shot) => table.records.push(TravelTimeRecord {
                src_deg: 0.0,
                rcv_deg: d,
                phase,
                time: shot.time,
                takeoff_deg: shot.takeoff.to_degrees(),
            }),
            Err(e) => table.omitted.push(OmittedRecord { delta_deg: d, phase, reason: e.to_string() }),
        }
    }
    Ok(table)
}

/// Solid profiles assumed known when inverting for the fluid.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownSolid {
    pub r_outer: f64,
    pub c_p: Profile,
    pub c_s: Profile,
}

impl KnownSolid {
    pub fn from_model(m: &RadialModel) -> Self {
        KnownSolid { r_outer: m.r_outer, c_p: m.c_p.clone(), c_s: m.c_s.clone() }
    }

    fn profile(&self, mode: Mode) -> Result<&Profile> {
        match mode {
            Mode::P => Ok(&self.c_p),
            Mode::SV | Mode::SH => Ok(&self.c_s),
            Mode::F => Err(Error::InvalidPhase("fluid leg has no known solid profile".into())),
        }
    }

    /// Ray parameter of a record from its takeoff angle.
    pub fn ray_parameter(&self, first_leg: Mode, takeoff: f64) -> Result<f64> {
        Ok(self.r_outer * takeoff.sin() / self.profile(first_leg)?.value(self.r_outer))
    }
}

/// Angle subtended by a leg crossing `[r_lo, r_hi]` without turning.
///
/// `∫ p c / (r √(r² − p²c²)) dr`; the leg must not turn inside the interval.
pub fn leg_delta(c: &Profile, p: f64, r_lo: f64, r_hi: f64) -> Option<f64> {
    simpson(r_lo, r_hi, |r| {
        let pc = p * c.value(r);
        let q = r * r - pc * pc;
        (q > 0.0).then(|| pc / (r * q.sqrt()))
    })
}

/// Travel time of a leg crossing `[r_lo, r_hi]` without turning: `∫ r / (c √(r² − p²c²)) dr`.
pub fn leg_time(c: &Profile, p: f64, r_lo: f64, r_hi: f64) -> Option<f64> {
    simpson(r_lo, r_hi, |r| {
        let cv = c.value(r);
        let q = r * r - p * p * cv * cv;
        (q > 0.0).then(|| r / (cv * q.sqrt()))
    })
}

fn simpson(a: f64, b: f64, f: impl Fn(f64) -> Option<f64>) -> Option<f64> {
    let n = LEG_PANELS;
    let h = (b - a) / n as f64;
    let mut s = f(a)? + f(b)?;
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * k as f64)?;
    }
    Some(s * h / 3.0)
}

/// Turning radius `r_t = p c(r_t)` and speed there, for a ray parameter sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub p: f64,
    pub r: f64,
    pub c: f64,
}

/// Herglotz–Wiechert inversion of a ball of radius `r_top`.
///
/// `data` holds `(p, Δ(p))` pairs where `Δ` is the full angle subtended inside the
/// ball by a ray entering at `r_top`. `Δ` must decrease strictly with `p`; the
/// grazing ray parameter `p₀` (where `Δ → 0`) is extrapolated from `Δ²`, which is
/// linear in `p` near grazing.
pub fn herglotz_wiechert(data: &[(f64, f64)], r_top: f64) -> Result<Vec<ProfileSample>> {
    // The central ray (p = 0) has no turning point.
    let mut d: Vec<(f64, f64)> = data.iter().copied().filter(|x| x.0 > 0.0).collect();
    if d.len() < 4 {
        return Err(Error::InsufficientCoverage(format!("{} ray parameters, need at least 4", d.len())));
    }
    d.sort_by(|a, b| a.0.total_cmp(&b.0));
    d.dedup_by(|a, b| (a.0 - b.0).abs() <= 1e-14 * b.0.abs().max(1e-300));
    for w in d.windows(2) {
        if w[1].1 >= w[0].1 {
            return Err(Error::FoliationViolated(format!(
                "distance does not decrease with ray parameter near p = {:.6}",
                w[1].0
            )));
        }
    }
    let n = d.len();
    let ((pa, da), (pb, db)) = (d[n - 2], d[n - 1]);
    let slope = (db * db - da * da) / (pb - pa);
    if slope >= 0.0 {
        return Err(Error::FoliationViolated("distance does not vanish at grazing".into()));
    }
    let p0 = pb - db * db / slope;
    // Δ is smooth in s = √(p₀ − p); interpolate there.
    let mut pts: Vec<(f64, f64)> = d.iter().rev().map(|&(p, delta)| ((p0 - p).sqrt(), delta)).collect();
    pts.insert(0, (0.0, 0.0));
    let interp = Pchip::new(&pts)?;
    let delta_at = |p: f64| if p >= p0 { 0.0 } else { interp.eval((p0 - p).sqrt()).0 };

    let mut out = Vec::with_capacity(n);
    for &(p1, _) in &d {
        let u_max = (p0 / p1).acosh();
        let h = u_max / HW_NODES as f64;
        let mut s = 0.5 * (delta_at(p1) + delta_at(p0));
        for k in 1..HW_NODES {
            s += delta_at(p1 * (h * k as f64).cosh());
        }
        let r = r_top * (-(s * h) / PI).exp();
        out.push(ProfileSample { p: p1, r, c: r / p1 });
    }
    for w in out.windows(2) {
        if w[1].r <= w[0].r {
            return Err(Error::FoliationViolated(format!("turning radius not monotone near r = {:.6}", w[1].r)));
        }
    }
    Ok(out)
}

/// Recovered profile compared to the truth where available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub samples: Vec<ProfileSample>,
    pub c_true: Option<Vec<f64>>,
    pub rms_rel_error: Option<f64>,
    pub r_core_estimate: Option<f64>,
}

impl RecoveryReport {
    fn new(samples: Vec<ProfileSample>, truth: Option<&Profile>, r_core_estimate: Option<f64>) -> Self {
        let c_true = truth.map(|t| samples.iter().map(|s| t.value(s.r)).collect::<Vec<_>>());
        let rms_rel_error = c_true.as_ref().map(|ct| {
            let sum: f64 = samples.iter().zip(ct).map(|(s, t)| ((s.c - t) / t).powi(2)).sum();
            (sum / samples.len() as f64).sqrt()
        });
        RecoveryReport { samples, c_true, rms_rel_error, r_core_estimate }
    }

    pub fn with_truth(self, truth: &Profile) -> Self {
        RecoveryReport::new(self.samples, Some(truth), self.r_core_estimate)
    }
}

/// Fluid-refracted records: phases `X->F->Y` with solid `X` and `Y`.
fn fluid_legs(phase: &str) -> Option<(Mode, Mode)> {
    let p = Phase::parse(phase).ok()?;
    match p.legs.as_slice() {
        [a, Mode::F, b] if a.is_solid() && b.is_solid() => Some((*a, *b)),
        _ => None,
    }
}

/// Recovers the fluid speed profile from fluid-refracted records (`X->F->Y`).
///
/// Other phases in the table are ignored. The distance ambiguity `Δ` versus
/// `2π − Δ` is resolved by continuation from grazing rays, where the fluid angle
/// is small.
pub fn invert_fluid_speed(table: &[TravelTimeRecord], solid: &KnownSolid, r_core: f64) -> Result<RecoveryReport> {
    let mut data = Vec::new();
    for rec in table {
        let Some((a, b)) = fluid_legs(&rec.phase) else { continue };
        let p = solid.ray_parameter(a, rec.takeoff_deg.to_radians())?;
        let legs = leg_delta(solid.profile(a)?, p, r_core, solid.r_outer)
            .zip(leg_delta(solid.profile(b)?, p, r_core, solid.r_outer))
            .map(|(x, y)| x + y)
            .ok_or_else(|| Error::InvalidModel(format!("ray with p = {p} turns in the solid")))?;
        let delta = rec.delta();
        data.push((p, [delta - legs, TAU - delta - legs]));
    }
    if data.is_empty() {
        return Err(Error::InsufficientCoverage("no fluid-refracted records".into()));
    }
    data.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut prev = 0.0;
    let mut resolved = Vec::with_capacity(data.len());
    for (p, cands) in data {
        let pick = cands
            .into_iter()
            .filter(|c| *c > -1e-9 && *c < PI + 1e-9)
            .min_by(|a, b| (a - prev).abs().total_cmp(&(b - prev).abs()));
        if let Some(dc) = pick {
            resolved.push((p, dc));
            prev = dc;
        }
    }
    let samples = herglotz_wiechert(&resolved, r_core)?;
    Ok(RecoveryReport::new(samples, None, Some(r_core)))
}

/// Recovers the direct-wave profile of a ball without core, e.g. `c_p` from direct `P`.
pub fn invert_direct_profile(table: &[TravelTimeRecord], phase: &str, r_outer: f64, c_surface: f64) -> Result<RecoveryReport> {
    let data: Vec<(f64, f64)> = table
        .iter()
        .filter(|r| r.phase == phase && r.time > 0.0)
        .map(|r| (r_outer * r.takeoff_deg.to_radians().sin() / c_surface, r.delta()))
        .collect();
    if data.is_empty() {
        return Err(Error::InsufficientCoverage(format!("no {phase} records")));
    }
    Ok(RecoveryReport::new(herglotz_wiechert(&data, r_outer)?, None, None))
}

/// Estimates the interface radius from waves reflected off it (e.g. `S->S`).
///
/// The ray parameter of each record is read off the travel-time curve as a
/// centred difference `dT/dΔ`, so the estimate improves with data density.
/// Each record then fixes the radius at which two legs of that ray parameter
/// subtend its distance; the median over records is returned.
pub fn estimate_interface_radius(table: &[TravelTimeRecord], solid: &KnownSolid) -> Result<f64> {
    let mut groups: std::collections::BTreeMap<String, Vec<&TravelTimeRecord>> = Default::default();
    let mut any_interface = false;
    for rec in table {
        let Ok(p) = Phase::parse(&rec.phase) else { continue };
        if p.legs.len() > 1 {
            any_interface = true;
        }
        if p.legs.len() == 2 && p.is_solid_reflection() {
            groups.entry(rec.phase.clone()).or_default().push(rec);
        }
    }
    if !any_interface {
        return Err(Error::NoInterfaceSignature);
    }
    let mut estimates = Vec::new();
    for (name, mut recs) in groups {
        let phase = Phase::parse(&name)?;
        let (ca, cb) = (solid.profile(phase.legs[0])?, solid.profile(phase.legs[1])?);
        recs.sort_by(|a, b| a.delta().total_cmp(&b.delta()));
        for w in recs.windows(3) {
            let (d0, d1, d2) = (w[0].delta(), w[1].delta(), w[2].delta());
            if d2 - d0 <= 0.0 || d1 <= 0.0 {
                continue;
            }
            let p = (w[2].time - w[0].time) / (d2 - d0);
            if let Some(r) = reflection_radius(ca, cb, p, d1, solid.r_outer) {
                estimates.push(r);
            }
        }
    }
    if estimates.is_empty() {
        return Err(Error::InsufficientCoverage("need three reflected records on a phase branch".into()));
    }
    estimates.sort_by(f64::total_cmp);
    let n = estimates.len();
    Ok(if n % 2 == 1 { estimates[n / 2] } else { 0.5 * (estimates[n / 2 - 1] + estimates[n / 2]) })
}

/// Radius at which two legs with ray parameter `p` subtend `delta`, by bisection.
fn reflection_radius(ca: &Profile, cb: &Profile, p: f64, delta: f64, r_outer: f64) -> Option<f64> {
    let g = |rc: f64| Some(leg_delta(ca, p, rc, r_outer)? + leg_delta(cb, p, rc, r_outer)? - delta);
    // Lowest admissible radius: both legs must reach it without turning.
    let mut lo = 0.0;
    let mut hi = r_outer;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let ok = mid > p * ca.value(mid) && mid > p * cb.value(mid);
        if ok {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut lo = hi * (1.0 + 1e-9);
    let mut hi = r_outer;
    if g(lo)? < 0.0 {
        return None;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_leg_matches_closed_form() {
        let c = Profile::Constant(1.0);
        let p = 0.3;
        let d = leg_delta(&c, p, 0.5, 1.0).unwrap();
        let exact = (p / 1.0f64).acos() - (p / 0.5f64).acos();
        assert!((d - exact).abs() < 1e-10);
        let t = leg_time(&c, p, 0.5, 1.0).unwrap();
        let exact_t = (1.0 - p * p).sqrt() - (0.25 - p * p).sqrt();
        assert!((t - exact_t).abs() < 1e-10);
    }

    #[test]
    fn hw_recovers_homogeneous_ball() {
        // Straight chords in a ball of radius 1 and speed 2: Δ(p) = 2 acos(2p).
        let data: Vec<(f64, f64)> = (1..60).map(|k| {
            let p = 0.5 * k as f64 / 60.0;
            (p, 2.0 * (2.0 * p).acos())
        }).collect();
        let s = herglotz_wiechert(&data, 1.0).unwrap();
        for x in &s {
            assert!((x.c - 2.0).abs() < 2e-3, "{x:?}");
        }
    }

    #[test]
    fn non_monotone_data_rejected() {
        let data = [(0.1, 2.0), (0.2, 1.5), (0.3, 1.7), (0.4, 0.5)];
        let e = herglotz_wiechert(&data, 1.0).unwrap_err();
        assert!(e.to_string().contains("foliation-type condition violated"));
    }

    #[test]
    fn no_interface_signature_in_solid_ball() {
        let m = RadialModel::solid_ball(1.0, Profile::Constant(2.0), Profile::Constant(1.0)).unwrap();
        let deltas: Vec<f64> = (1..10).map(|k| 10.0 * k as f64).collect();
        let t = forward_table(&m, &deltas, &["P", "S"], &TracerConfig::default()).unwrap();
        let e = estimate_interface_radius(&t.records, &KnownSolid::from_model(&m)).unwrap_err();
        assert!(matches!(e, Error::NoInterfaceSignature));
        assert_eq!(e.to_string(), "no interface signature in travel-time table");
    }

    #[test]
    fn table_direct_times_and_zero_distance() {
        let m = RadialModel::solid_ball(1.0, Profile::Constant(2.0), Profile::Constant(1.0)).unwrap();
        let t = forward_table(&m, &[0.0, 90.0], &["P"], &TracerConfig::default()).unwrap();
        assert_eq!(t.records[0].time, 0.0);
        assert!((t.records[1].time - 2f64.sqrt() / 2.0).abs() < 1e-10);
    }
}
