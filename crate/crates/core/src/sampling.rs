//! Random materials and covectors for property sweeps.

use rand::Rng;

use crate::interface::Case;
use crate::media::{FluidParams, MaterialPoint, SolidParams};
use crate::microlocal::BoundaryCovector;
use crate::scholte::find_scholte_speed;

/// Relative distance kept from every glancing set.
pub const GLANCING_MARGIN: f64 = 1e-4;
/// Relative distance in `z` kept from the Scholte root in EE, where the determinant vanishes.
pub const SCHOLTE_MARGIN: f64 = 1e-2;

/// Log-uniform sample on `[lo, hi]`.
pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Material with every parameter log-uniform over `decades` decades around 1.
pub fn random_material<R: Rng>(rng: &mut R, decades: f64) -> MaterialPoint {
    let span = 10f64.powf(decades / 2.0);
    let mut draw = || log_uniform(rng, 1.0 / span, span);
    let solid = SolidParams::new(draw(), draw(), draw()).expect("positive");
    let fluid = FluidParams::new(draw(), draw()).expect("positive");
    MaterialPoint::new(solid, fluid)
}

fn with_fluid_speed(m: &MaterialPoint, c_f: f64) -> MaterialPoint {
    let fluid = FluidParams::new(m.fluid.rho_f * c_f * c_f, m.fluid.rho_f).expect("positive");
    MaterialPoint::new(m.solid, fluid)
}

/// A material for which `case` is non-empty.
pub fn material_for_case<R: Rng>(rng: &mut R, case: Case, decades: f64) -> MaterialPoint {
    let m = random_material(rng, decades);
    let (cs, cp) = (m.c_s, m.c_p);
    match case {
        Case::EH => with_fluid_speed(&m, cs * rng.gen_range(0.2..0.95)),
        Case::HE => with_fluid_speed(&m, cp * rng.gen_range(1.05..3.0)),
        Case::MH => with_fluid_speed(&m, cp * rng.gen_range(0.1..0.95)),
        Case::ME => with_fluid_speed(&m, cs * rng.gen_range(1.05..5.0)),
        Case::HH | Case::EE => m,
    }
}

/// Open interval of `z = τ²/|ξ'|²` for `case`, or `None` if empty.
pub fn z_interval(case: Case, m: &MaterialPoint) -> Option<(f64, f64)> {
    let (s, p, f) = (m.c_s * m.c_s, m.c_p * m.c_p, m.c_f * m.c_f);
    let (lo, hi) = match case {
        Case::HH => (p.max(f), 4.0 * p.max(f)),
        Case::MH => (s.max(f), p),
        Case::EH => (f, s),
        Case::HE => (p, f),
        Case::ME => (s, p.min(f)),
        Case::EE => (0.0, s.min(f)),
    };
    let (lo, hi) = (lo * (1.0 + GLANCING_MARGIN), hi * (1.0 - GLANCING_MARGIN));
    (lo < hi).then_some((lo, hi))
}

/// A covector in `case` with `τ < 0`, random tangential direction and scale.
///
/// Returns `None` for EE draws that fall near the Scholte root.
pub fn covector_for_case<R: Rng>(rng: &mut R, case: Case, m: &MaterialPoint) -> Option<BoundaryCovector> {
    let (lo, hi) = z_interval(case, m)?;
    let z = rng.gen_range(lo.max(hi * 1e-6)..hi);
    if case == Case::EE {
        let root = find_scholte_speed(m).ok()?.c_sc_sq;
        if (z - root).abs() < SCHOLTE_MARGIN * root {
            return None;
        }
    }
    let n = log_uniform(rng, 0.1, 10.0);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    Some(BoundaryCovector::new(n * phi.cos(), n * phi.sin(), -n * z.sqrt()))
}

/// A material and a reduced-frame (`ξ₂ = 0`) covector in `case`.
pub fn sample_case<R: Rng>(rng: &mut R, case: Case, decades: f64) -> (MaterialPoint, BoundaryCovector) {
    loop {
        let m = material_for_case(rng, case, decades);
        if let Some(c) = covector_for_case(rng, case, &m) {
            return (m, BoundaryCovector::new(c.tangential_norm(), 0.0, c.tau));
        }
    }
}
