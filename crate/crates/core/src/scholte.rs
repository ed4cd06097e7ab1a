//! Scholte interface waves.
//!
//! With `z = τ²/ξ₁²` the elliptic-elliptic determinant is `i ξ₁⁵ S(z)`, where
//!
//! `S(z) = z²ρ_s√(1 − z/c_p²) + ρ_f⁻¹√(1 − z/c_f²)·[(2μ_s − ρ_s z)² − 4μ_s²√(1 − z/c_s²)√(1 − z/c_p²)]`.
//!
//! `S < 0` just above `z = 0` and `S > 0` near `min(c_s², c_f²)`, so the real
//! root on `(0, min(c_s², c_f²))` is bracketed by a sign scan.

use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interface::{assemble, secular_bracket, AmplitudeSet, Amplitude, Case, Component, Direction};
use crate::media::MaterialPoint;
use crate::microlocal::BoundaryCovector;
use crate::C64;

const SCAN_SAMPLES: usize = 1024;
const REL_TOL: f64 = 1e-14;

/// Upper end of the real branch, `min(c_s², c_f²)`.
pub fn secular_domain(mat: &MaterialPoint) -> f64 {
    (mat.c_s * mat.c_s).min(mat.c_f * mat.c_f)
}

fn secular_unchecked(z: f64, mat: &MaterialPoint) -> f64 {
    let rho = mat.rho_s();
    let mu = mat.mu();
    let (cs2, cp2, cf2) = (mat.c_s * mat.c_s, mat.c_p * mat.c_p, mat.c_f * mat.c_f);
    z * z * rho * (1.0 - z / cp2).sqrt()
        + (1.0 - z / cf2).sqrt() / mat.rho_f() * secular_bracket(mu, rho, z, cs2, cp2)
}

/// Secular function with the `ξ₁⁵` prefactor stripped.
pub fn secular(z: f64, mat: &MaterialPoint) -> Result<f64> {
    let max = secular_domain(mat);
    if !(z > 0.0 && z < max) {
        return Err(Error::SecularDomain { z, max });
    }
    Ok(secular_unchecked(z, mat))
}

/// Magnitude of the terms of `S` at `z`, used to judge residuals.
pub fn secular_scale(z: f64, mat: &MaterialPoint) -> f64 {
    let mu = mat.mu();
    let rho = mat.rho_s();
    z * z * rho + ((2.0 * mu - rho * z).powi(2) + 4.0 * mu * mu) / mat.rho_f()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScholteRoot {
    pub c_sc_sq: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub derivative_estimate: f64,
}

impl ScholteRoot {
    pub fn c_sc(&self) -> f64 {
        self.c_sc_sq.sqrt()
    }
}

/// Bracketed root of `S` on `(δ, z_max − δ)`, refined by safeguarded secant steps.
pub fn find_scholte_speed(mat: &MaterialPoint) -> Result<ScholteRoot> {
    let zmax = secular_domain(mat);
    let delta = 1e-12 * zmax;
    let (lo, hi) = (delta, zmax - delta);
    let f = |z: f64| secular_unchecked(z, mat);

    let mut bracket = None;
    let mut za = lo;
    let mut fa = f(za);
    for k in 1..SCAN_SAMPLES {
        let zb = lo + (hi - lo) * k as f64 / (SCAN_SAMPLES - 1) as f64;
        let fb = f(zb);
        if fa == 0.0 {
            bracket = Some((za, za, fa, fa));
            break;
        }
        if fa.signum() != fb.signum() {
            bracket = Some((za, zb, fa, fb));
            break;
        }
        za = zb;
        fa = fb;
    }
    let (mut a, mut b, mut fa, mut fb) = bracket.ok_or(Error::NoRootFound { max: zmax })?;
    let initial = (a, b);
    while b - a > REL_TOL * b && fa != 0.0 && fb != 0.0 {
        let width = b - a;
        let secant = b - fb * (b - a) / (fb - fa);
        let mid = 0.5 * (a + b);
        // Accept the secant point only well inside the bracket.
        let m = if secant > a + 0.05 * width && secant < b - 0.05 * width { secant } else { mid };
        let fm = f(m);
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
        // Force a bisection if the secant step made poor progress.
        if b - a > 0.5 * width {
            let mid = 0.5 * (a + b);
            let fmid = f(mid);
            if fmid.signum() == fa.signum() {
                a = mid;
                fa = fmid;
            } else {
                b = mid;
                fb = fmid;
            }
        }
    }
    let root = if fa == 0.0 {
        a
    } else if fb == 0.0 {
        b
    } else if fa.abs() < fb.abs() {
        a
    } else {
        b
    };
    let h = 1e-6 * zmax;
    let d = (f((root + h).min(hi)) - f((root - h).max(lo))) / ((root + h).min(hi) - (root - h).max(lo));
    Ok(ScholteRoot { c_sc_sq: root, residual: f(root).abs(), bracket: initial, derivative_estimate: d })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScholteMode {
    /// Evanescent amplitudes; `b1_s` is identically zero.
    pub amplitudes: AmplitudeSet,
    pub root: ScholteRoot,
    /// Covector on the Scholte characteristic set used for the kernel (`ξ₁ = 1`).
    pub covector: BoundaryCovector,
    /// `‖A v‖ / ‖A‖` for the unit kernel vector.
    pub residual: f64,
    pub singular_values: [f64; 3],
}

/// Unit kernel vector of the elliptic-elliptic system on the Scholte set, with `b_f` real positive.
pub fn scholte_kernel_mode(mat: &MaterialPoint) -> Result<ScholteMode> {
    let root = find_scholte_speed(mat)?;
    let cov = BoundaryCovector::new(1.0, 0.0, -root.c_sc());
    let sys = assemble(Case::EE, &cov, mat)?;
    let a = &sys.a_out;
    let m = Matrix3::from_fn(|i, j| a[(i, j)]);
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut sv = [svd.singular_values[0], svd.singular_values[1], svd.singular_values[2]];
    let (imin, _) = sv.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let mut v: Vec<C64> = (0..3).map(|j| v_t[(imin, j)].conj()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    if sv[2] > 1e-9 * sv[0] {
        return Err(Error::NullspaceDimension(0));
    }
    if sv[1] <= 1e-6 * sv[0] {
        return Err(Error::NullspaceDimension(2));
    }
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phase = if v[2].norm() > 0.0 { v[2].conj() / v[2].norm() } else { C64::new(1.0, 0.0) };
    for z in v.iter_mut() {
        *z = *z * phase / nrm;
    }
    v[2] = C64::new(v[2].re.abs(), 0.0);
    let av = a.mul_vec(&v);
    let residual = av.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() / a.frobenius();
    let ev = |value| Some(Amplitude { value, dir: Direction::Ev });
    let mut amps = AmplitudeSet::default();
    amps.set(Component::B1S, Amplitude { value: C64::new(0.0, 0.0), dir: Direction::Ev });
    amps.b2_s = ev(v[0]);
    amps.b_p = ev(v[1]);
    amps.b_f = ev(v[2]);
    Ok(ScholteMode { amplitudes: amps, root, covector: cov, residual, singular_values: sv })
}

/// Pointwise Scholte speed `c_Sc` over sampled interface materials.
pub fn scholte_speed_field(samples: &[MaterialPoint]) -> Vec<Result<f64>> {
    samples.par_iter().map(|m| find_scholte_speed(m).map(|r| r.c_sc())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical_material;
    use crate::interface::closed_form_determinant;
    use crate::media::{FluidParams, SolidParams};
    use crate::sampling::random_material;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn secular_limits() {
        let m = canonical_material();
        assert!(secular(1e-12, &m).unwrap().abs() < 1e-10);
        assert!(secular(1e-6, &m).unwrap() < 0.0);
        let near = secular(1.0 - 1e-12, &m).unwrap();
        let expect = (0.75f64).sqrt() + (1.0 - 1.0 / 2.25f64).sqrt();
        assert!((near - expect).abs() < 1e-5);
        assert!(matches!(secular(0.0, &m), Err(Error::SecularDomain { .. })));
        assert!(matches!(secular(1.0, &m), Err(Error::SecularDomain { .. })));
    }

    #[test]
    fn canonical_root() {
        let m = canonical_material();
        let r = find_scholte_speed(&m).unwrap();
        assert!(r.c_sc_sq > 0.0 && r.c_sc_sq < 1.0);
        assert!(r.residual <= 1e-12 * secular_scale(r.c_sc_sq, &m));
        assert!(r.derivative_estimate > 0.0);
        // Independent bisection.
        let (mut a, mut b) = (0.5f64, 1.0 - 1e-12);
        assert!(secular(a, &m).unwrap() < 0.0);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            if secular(c, &m).unwrap() < 0.0 {
                a = c;
            } else {
                b = c;
            }
        }
        assert!((a - r.c_sc_sq).abs() < 1e-13);
    }

    #[test]
    fn scaling_invariance() {
        let m = canonical_material();
        let k = 37.0;
        let s = MaterialPoint::new(
            SolidParams::new(2.0 * k, k, k).unwrap(),
            FluidParams::new(2.25 * k, k).unwrap(),
        );
        let a = find_scholte_speed(&m).unwrap().c_sc_sq;
        let b = find_scholte_speed(&s).unwrap().c_sc_sq;
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn kernel_mode_properties() {
        let m = canonical_material();
        let mode = scholte_kernel_mode(&m).unwrap();
        assert!(mode.residual < 1e-9);
        assert_eq!(mode.amplitudes.value(Component::B1S), C64::new(0.0, 0.0));
        let bf = mode.amplitudes.value(Component::BF);
        assert!(bf.im == 0.0 && bf.re > 0.0);
        let n: f64 = mode.amplitudes.values().iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn determinant_vanishes_only_at_root() {
        let m = canonical_material();
        let r = find_scholte_speed(&m).unwrap();
        let det = |z: f64| closed_form_determinant(Case::EE, &BoundaryCovector::new(1.0, 0.0, -z.sqrt()), &m).unwrap();
        let at = det(r.c_sc_sq).norm();
        let off = det(0.99 * r.c_sc_sq).norm().min(det(1.01 * r.c_sc_sq).norm());
        assert!(at <= 1e-9 * secular_scale(r.c_sc_sq, &m));
        assert!(off > 1e3 * at.max(1e-14));
        let sys = assemble(Case::EE, &BoundaryCovector::new(1.0, 0.0, -(0.9 * r.c_sc_sq).sqrt()), &m).unwrap();
        assert!(crate::interface::solve_outgoing(&sys, &AmplitudeSet::default()).is_err());
    }

    #[test]
    fn random_materials_have_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let m = random_material(&mut rng, 4.0);
            let r = find_scholte_speed(&m).unwrap();
            assert!(r.c_sc_sq > 0.0 && r.c_sc_sq < secular_domain(&m));
            assert!(r.derivative_estimate != 0.0);
        }
    }

    #[test]
    fn speed_field() {
        let m = canonical_material();
        let field = scholte_speed_field(&[m; 5]);
        let c0 = *field[0].as_ref().unwrap();
        assert!(field.iter().all(|c| *c.as_ref().unwrap() == c0));
        assert!(c0 < 1.0);
        // Smooth perturbation: bounded difference quotient.
        let perturbed: Vec<MaterialPoint> = (0..20)
            .map(|k| {
                let e = 1e-3 * k as f64;
                MaterialPoint::new(SolidParams::new(2.0 + e, 1.0 + e, 1.0).unwrap(), FluidParams::new(2.25, 1.0).unwrap())
            })
            .collect();
        let cs: Vec<f64> = scholte_speed_field(&perturbed).into_iter().map(|c| c.unwrap()).collect();
        for w in cs.windows(2) {
            assert!(((w[1] - w[0]) / 1e-3).abs() < 10.0);
        }
    }
}
