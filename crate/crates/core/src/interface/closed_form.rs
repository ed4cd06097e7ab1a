use crate::error::{Error, Result};
use crate::media::MaterialPoint;
use crate::microlocal::{rotate_to_frame, vertical_wavenumbers, BoundaryCovector};
use crate::C64;

use super::{case_of, Case};

/// `(2μ − ρz)² − 4μ²·sqrt(1 − z/c_s²)·sqrt(1 − z/c_p²)` without cancellation near `z = 0`.
///
/// Valid for `z < c_s²`, where both radicands are positive.
pub fn secular_bracket(mu: f64, rho: f64, z: f64, cs2: f64, cp2: f64) -> f64 {
    let a = 1.0 - z / cs2;
    let b = 1.0 - z / cp2;
    let sab = (a * b).sqrt();
    // 1 − a·b = z/c_s² + z/c_p² − z²/(c_s² c_p²)
    let one_minus = (z / cs2 + z / cp2 - z * z / (cs2 * cp2)) / (1.0 + sab);
    4.0 * mu * mu * one_minus - 4.0 * mu * rho * z + rho * rho * z * z
}

/// The printed closed-form determinant of the reduced `case` system.
///
/// All six share the shape `τ⁴ρ_s k_p + ρ_f⁻¹ k_f (B² + 4μ_s²ξ₁² k_s k_p)` with
/// `B = 2μ_sξ₁² − ρ_sτ²` and the `k` the case's vertical wavenumbers; the
/// mixed cases carry an extra factor 2 from the doubled pressure column.
pub fn closed_form_determinant(case: Case, cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<C64> {
    let red = rotate_to_frame(cov).covector;
    let label = case_of(&red, mat)?;
    if label.case != case {
        return Err(Error::RegionMismatch(format!("requested {case} but covector lies in {}", label.case)));
    }
    let neg = red.with_negative_tau();
    let w = vertical_wavenumbers(&neg, mat)?;
    let (xs, xp, xf) = (w.xi3_s(), w.xi3_p(), w.xi3_f());
    let (x1, t) = (neg.xi1, neg.tau);
    let mu = mat.mu();
    let rho = mat.rho_s();
    let rfi = 1.0 / mat.rho_f();
    let b = 2.0 * mu * x1 * x1 - rho * t * t;
    let t4 = t * t * t * t;
    let core = |ks: C64, kp: C64, kf: C64| t4 * rho * kp + rfi * kf * (b * b + 4.0 * mu * mu * x1 * x1 * ks * kp);
    let det = match case {
        Case::HH | Case::HE => core(xs, xp, xf),
        Case::MH | Case::ME => 2.0 * core(xs, xp, xf),
        Case::EH => {
            // k_s k_p = −a_s a_p is real; the bracket is evaluated stably.
            let z = t * t / (x1 * x1);
            let br = x1.powi(4) * secular_bracket(mu, rho, z, mat.c_s * mat.c_s, mat.c_p * mat.c_p);
            C64::new(0.0, t4 * rho * xp.im) + rfi * xf * br
        }
        Case::EE => {
            let z = t * t / (x1 * x1);
            let br = x1.powi(4) * secular_bracket(mu, rho, z, mat.c_s * mat.c_s, mat.c_p * mat.c_p);
            C64::new(0.0, t4 * rho * xp.im + rfi * xf.im * br)
        }
    };
    Ok(if cov.tau > 0.0 { det.conj() } else { det })
}
