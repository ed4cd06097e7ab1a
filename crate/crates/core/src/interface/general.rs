//! Unreduced 4×4 transmission system at an arbitrary tangential covector.
//!
//! Columns are built directly from the symbols `U`, `M` and `Λ`. Rows are the
//! kinematic condition followed by the three traction components, all divided
//! by `−i`:
//!
//! * solid potential column `j`: `(τU₃ⱼ, M₁ⱼ, M₂ⱼ, M₃ⱼ)`
//! * fluid potential column: `(iρ_f⁻¹Λ, 0, 0, τ)`
//!
//! Used to check rotation covariance of the reduced solve.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::media::MaterialPoint;
use crate::microlocal::{vertical_wavenumbers, BoundaryCovector};
use crate::symbols::{dtn_value, potential_matrix, solid_k3, traction_matrix, Flavor};
use crate::C64;

use super::{case_of, AmplitudeSet, Case, Component};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSystem {
    pub case: Case,
    /// Unknowns `(q₁, q₂, q_p, ψ)`.
    pub a_out: CMat,
    /// Columns act on incoming `(q₁, q₂, q_p, ψ)`; inadmissible columns are zero.
    pub a_in: CMat,
}

fn solid_columns(xi1: f64, xi2: f64, tau: f64, mat: &MaterialPoint, k3s: C64, k3p: C64) -> Vec<Vec<C64>> {
    let u = potential_matrix(xi1, xi2, k3s, k3p);
    let m = traction_matrix(xi1, xi2, tau, mat, k3s, k3p);
    (0..3).map(|j| vec![tau * u[(2, j)], m[(0, j)], m[(1, j)], m[(2, j)]]).collect()
}

fn fluid_column(tau: f64, mat: &MaterialPoint, lambda: C64) -> Vec<C64> {
    let z = C64::new(0.0, 0.0);
    vec![C64::new(0.0, 1.0) * lambda / mat.rho_f(), z, z, C64::new(tau, 0.0)]
}

pub fn general_frame_system(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<GeneralSystem> {
    let case = case_of(cov, mat)?.case;
    let neg = cov.with_negative_tau();
    let w = vertical_wavenumbers(&neg, mat)?;
    let (x1, x2, t) = (neg.xi1, neg.xi2, neg.tau);
    let zero = vec![C64::new(0.0, 0.0); 4];
    let cols = |fl: Flavor| {
        let (s, p) = solid_k3(fl, &w);
        solid_columns(x1, x2, t, mat, s, p)
    };
    let (out_fl, in_fl) = match case {
        Case::HH | Case::HE => (Flavor::Outgoing, Some(Flavor::Incoming)),
        Case::MH | Case::ME => (Flavor::MixedOutgoing, Some(Flavor::MixedIncoming)),
        Case::EH | Case::EE => (Flavor::Evanescent, None),
    };
    let mut out = cols(out_fl);
    let mut inc = match in_fl {
        Some(fl) => cols(fl),
        None => vec![zero.clone(); 3],
    };
    if matches!(case, Case::MH | Case::ME) {
        // The evanescent pressure potential enters both traces.
        out[2] = out[2].iter().zip(&inc[2]).map(|(a, b)| a + b).collect();
        inc[2] = zero.clone();
    }
    let fluid_hyp = matches!(case, Case::HH | Case::MH | Case::EH);
    if fluid_hyp {
        out.push(fluid_column(t, mat, dtn_value(Flavor::Outgoing, w.xi3_f())));
        inc.push(fluid_column(t, mat, dtn_value(Flavor::Incoming, w.xi3_f())));
    } else {
        out.push(fluid_column(t, mat, dtn_value(Flavor::Evanescent, w.xi3_f())));
        inc.push(zero);
    }
    // Printed convention: A_out x = A_in b.
    let a_out = CMat::from_columns(&out);
    let a_in = CMat::from_columns(&inc).scale(C64::new(-1.0, 0.0));
    let (a_out, a_in) = if cov.tau > 0.0 { (a_out.conj(), a_in.conj()) } else { (a_out, a_in) };
    Ok(GeneralSystem { case, a_out, a_in })
}

/// Outgoing/evanescent `(q₁, q₂, q_p, ψ)` from the unreduced system.
pub fn solve_general(cov: &BoundaryCovector, mat: &MaterialPoint, incoming: &AmplitudeSet) -> Result<[C64; 4]> {
    let sys = general_frame_system(cov, mat)?;
    if sys.case == Case::EE {
        return Err(Error::HomogeneousSystem);
    }
    let b = Component::ALL.map(|c| incoming.value(c));
    let rhs = sys.a_in.mul_vec(&b);
    let x = sys.a_out.solve(&rhs).ok_or(Error::EllipticityFailure { det: 0.0 })?;
    Ok([x[0], x[1], x[2], x[3]])
}
