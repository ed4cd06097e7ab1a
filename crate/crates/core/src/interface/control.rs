//! Controllability systems: prescribe one side's amplitudes, recover the other's.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::media::MaterialPoint;
use crate::microlocal::{rotate_to_frame, vertical_wavenumbers, BoundaryCovector};
use crate::C64;

use super::{case_of, Case, Component, Direction};

/// Relative pivot tolerance for the numerical rank.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ControlSolution {
    /// Solved amplitudes in the order of the system's unknowns.
    pub amplitudes: Vec<(Component, Direction, C64)>,
    pub rank: usize,
    pub det_numeric: Option<C64>,
}

struct Parts {
    x1: f64,
    t: f64,
    mu: f64,
    rho: f64,
    rfi: f64,
    b: f64,
    xs: C64,
    xp: C64,
    xf: C64,
    conj: bool,
}

fn parts(expect: Case, cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<Parts> {
    let red = rotate_to_frame(cov).covector;
    let label = case_of(&red, mat)?;
    if label.case != expect {
        return Err(Error::RegionMismatch(format!("requires {expect}, covector lies in {}", label.case)));
    }
    let neg = red.with_negative_tau();
    let w = vertical_wavenumbers(&neg, mat)?;
    let (x1, t) = (neg.xi1, neg.tau);
    Ok(Parts {
        x1,
        t,
        mu: mat.mu(),
        rho: mat.rho_s(),
        rfi: 1.0 / mat.rho_f(),
        b: 2.0 * mat.mu() * x1 * x1 - mat.rho_s() * t * t,
        xs: w.xi3_s(),
        xp: w.xi3_p(),
        xf: w.xi3_f(),
        conj: cov.tau > 0.0,
    })
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn fluid_rhs(p: &Parts) -> CMat {
    CMat::from_rows(&[[-p.rfi * p.xf, p.rfi * p.xf], [r(0.0), r(0.0)], [r(-p.t), r(-p.t)]])
}

fn maybe_conj(p: &Parts, m: CMat) -> CMat {
    if p.conj {
        m.conj()
    } else {
        m
    }
}

/// HH control system on `(b₂_out, b_p_out, b₂_in, b_p_in)` with right-hand side acting on `(b_f_in, b_f_out)`.
pub fn control_matrix_hh(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<(CMat, CMat)> {
    let p = parts(Case::HH, cov, mat)?;
    let (x1, t, mu, b, xs, xp) = (p.x1, p.t, p.mu, p.b, p.xs, p.xp);
    let lhs = CMat::from_rows(&[
        [r(t * x1), t * xp, r(t * x1), -t * xp],
        [r(b), 2.0 * mu * x1 * xp, r(b), -2.0 * mu * x1 * xp],
        [2.0 * mu * x1 * xs, r(-b), -2.0 * mu * x1 * xs, r(-b)],
    ]);
    Ok((maybe_conj(&p, lhs), maybe_conj(&p, fluid_rhs(&p))))
}

/// MH control system on `(b₂_out, b_p_ev, b₂_in)` with right-hand side acting on `(b_f_in, b_f_out)`.
pub fn control_matrix_mh(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<(CMat, CMat)> {
    let p = parts(Case::MH, cov, mat)?;
    let (x1, t, mu, b, xs, xp) = (p.x1, p.t, p.mu, p.b, p.xs, p.xp);
    let lhs = CMat::from_rows(&[
        [r(t * x1), 2.0 * t * xp, r(t * x1)],
        [r(b), 4.0 * mu * x1 * xp, r(b)],
        [2.0 * mu * x1 * xs, r(-2.0 * b), -2.0 * mu * x1 * xs],
    ]);
    Ok((maybe_conj(&p, lhs), maybe_conj(&p, fluid_rhs(&p))))
}

/// Second MH control system on `(b_f_in, b_f_out, b_p_ev)` with right-hand side acting on `(b₂_out, b₂_in)`.
pub fn control_matrix_mh2(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<(CMat, CMat)> {
    let p = parts(Case::MH, cov, mat)?;
    let (x1, t, mu, b, xs, xp, xf, rfi) = (p.x1, p.t, p.mu, p.b, p.xs, p.xp, p.xf, p.rfi);
    let lhs = CMat::from_rows(&[
        [-rfi * xf, rfi * xf, -2.0 * t * xp],
        [r(0.0), r(0.0), -4.0 * mu * x1 * xp],
        [r(-t), r(-t), r(2.0 * b)],
    ]);
    let rhs = CMat::from_rows(&[[r(t * x1), r(t * x1)], [r(b), r(b)], [2.0 * mu * x1 * xs, -2.0 * mu * x1 * xs]]);
    Ok((maybe_conj(&p, lhs), maybe_conj(&p, rhs)))
}

/// `−8μ_sρ_sτ³ξ₁ξ₃ˢξ̃₃ᵖ`.
pub fn mh_control_det_closed(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<C64> {
    let p = parts(Case::MH, cov, mat)?;
    let d = -8.0 * p.mu * p.rho * p.t.powi(3) * p.x1 * p.xs * p.xp;
    Ok(if p.conj { d.conj() } else { d })
}

/// `8ρ_f⁻¹μ_sτξ₁ξ₃ᶠξ̃₃ᵖ`.
pub fn mh_control2_det_closed(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<C64> {
    let p = parts(Case::MH, cov, mat)?;
    let d = 8.0 * p.rfi * p.mu * p.t * p.x1 * p.xf * p.xp;
    Ok(if p.conj { d.conj() } else { d })
}

/// Solid amplitudes that produce the prescribed fluid amplitudes.
///
/// HH is underdetermined and returns the minimum-norm solution on
/// `(b₂_out, b_p_out, b₂_in, b_p_in)`; MH returns the unique
/// `(b₂_out, b_p_ev, b₂_in)`.
pub fn control_solid_to_fluid(
    case: Case,
    cov: &BoundaryCovector,
    mat: &MaterialPoint,
    b_f_in: C64,
    b_f_out: C64,
) -> Result<ControlSolution> {
    use Component::*;
    use Direction::*;
    match case {
        Case::HH => {
            let (lhs, rhs) = control_matrix_hh(cov, mat)?;
            let rank = lhs.rank(RANK_TOL);
            if rank < 3 {
                return Err(Error::RankDeficient { rank, expected: 3 });
            }
            let b = rhs.mul_vec(&[b_f_in, b_f_out]);
            let x = lhs.min_norm_solve(&b).ok_or(Error::RankDeficient { rank, expected: 3 })?;
            let tags = [(B2S, Out), (BP, Out), (B2S, In), (BP, In)];
            Ok(ControlSolution {
                amplitudes: tags.iter().zip(&x).map(|(&(c, d), &v)| (c, d, v)).collect(),
                rank,
                det_numeric: None,
            })
        }
        Case::MH => {
            let (lhs, rhs) = control_matrix_mh(cov, mat)?;
            let lu = lhs.lu().ok_or(Error::EllipticityFailure { det: 0.0 })?;
            let b = rhs.mul_vec(&[b_f_in, b_f_out]);
            let x = lu.solve(&b);
            let tags = [(B2S, Out), (BP, Ev), (B2S, In)];
            Ok(ControlSolution {
                amplitudes: tags.iter().zip(&x).map(|(&(c, d), &v)| (c, d, v)).collect(),
                rank: 3,
                det_numeric: Some(lu.det()),
            })
        }
        other => Err(Error::RegionMismatch(format!("no control system for case {other}"))),
    }
}

/// Fluid amplitudes `(b_f_in, b_f_out, b_p_ev)` producing the prescribed SV amplitudes in MH.
pub fn control_fluid_to_sv(
    cov: &BoundaryCovector,
    mat: &MaterialPoint,
    b2_out: C64,
    b2_in: C64,
) -> Result<(C64, C64, C64)> {
    let (lhs, rhs) = control_matrix_mh2(cov, mat)?;
    let lu = lhs.lu().ok_or(Error::EllipticityFailure { det: 0.0 })?;
    let scale: f64 = lhs.row_norms().iter().product();
    if lu.det().norm() < super::CONDITIONING_GUARD * scale {
        return Err(Error::EllipticityFailure { det: lu.det().norm() });
    }
    let x = lu.solve(&rhs.mul_vec(&[b2_out, b2_in]));
    Ok((x[0], x[1], x[2]))
}
