//! Oracles built from explicit plane-wave fields in homogeneous half-spaces.
//!
//! The solid occupies `x₃ > 0`, the fluid `x₃ < 0`, and the interface normal is
//! `ν = −e₃`. Solid potentials `(q₁, q₂, q_p)` give the displacement
//! `u = ξ × (q₁, q₂, 0) + ξ q_p` times `e^{i(x·ξ + tτ)}`; the fluid potential `ψ`
//! gives pressure `∂ₜψ` and velocity `−ρ_f⁻¹∇ψ`. Everything here is computed from
//! fields and stresses, never from the solver's matrices.

use interface_lab::interface::{AmplitudeSet, Case, Component, Direction};
use interface_lab::media::MaterialPoint;
use interface_lab::microlocal::BoundaryCovector;
use interface_lab::C64;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `√(τ²/c² − |ξ'|²)`, or `i√(|ξ'|² − τ²/c²)` when evanescent.
pub fn vertical(cov: &BoundaryCovector, speed: f64) -> C64 {
    let q = cov.tau * cov.tau / (speed * speed) - cov.xi1 * cov.xi1 - cov.xi2 * cov.xi2;
    if q >= 0.0 {
        c(q.sqrt())
    } else {
        I * (-q).sqrt()
    }
}

/// One plane wave in the solid.
#[derive(Debug, Clone, Copy)]
pub struct SolidWave {
    pub k3: C64,
    /// Displacement amplitude vector.
    pub a: [C64; 3],
}

/// One plane wave in the fluid.
#[derive(Debug, Clone, Copy)]
pub struct FluidWave {
    pub k3: C64,
    pub psi: C64,
}

impl SolidWave {
    fn shear(cov: &BoundaryCovector, k3: C64, q1: C64, q2: C64) -> Self {
        let (x1, x2) = (c(cov.xi1), c(cov.xi2));
        SolidWave { k3, a: [-k3 * q2, k3 * q1, x1 * q2 - x2 * q1] }
    }

    fn pressure(cov: &BoundaryCovector, k3: C64, qp: C64) -> Self {
        SolidWave { k3, a: [c(cov.xi1) * qp, c(cov.xi2) * qp, k3 * qp] }
    }

    fn xi(&self, cov: &BoundaryCovector) -> [C64; 3] {
        [c(cov.xi1), c(cov.xi2), self.k3]
    }

    /// Stress rows `σ_{3j}` (the traction on planes `x₃ = const` with normal `+e₃`).
    pub fn stress_row3(&self, cov: &BoundaryCovector, mat: &MaterialPoint) -> [C64; 3] {
        let (lam, mu) = (mat.solid.lambda_s, mat.solid.mu_s);
        let xi = self.xi(cov);
        let div = I * (xi[0] * self.a[0] + xi[1] * self.a[1] + xi[2] * self.a[2]);
        let mut s = [C64::new(0.0, 0.0); 3];
        for (j, sj) in s.iter_mut().enumerate() {
            *sj = I * mu * (xi[2] * self.a[j] + xi[j] * self.a[2]);
        }
        s[2] += lam * div;
        s
    }

    /// Time-averaged energy flux along `+e₃` of the real field.
    pub fn flux(&self, cov: &BoundaryCovector, mat: &MaterialPoint) -> f64 {
        let s = self.stress_row3(cov, mat);
        let v: Vec<C64> = self.a.iter().map(|a| I * cov.tau * a).collect();
        -0.5 * (0..3).map(|j| (s[j] * v[j].conj()).re).sum::<f64>()
    }
}

impl FluidWave {
    pub fn flux(&self, cov: &BoundaryCovector, mat: &MaterialPoint) -> f64 {
        let p = I * cov.tau * self.psi;
        let v3 = -I * self.k3 * self.psi / mat.fluid.rho_f;
        0.5 * (p * v3.conj()).re
    }
}

/// Every plane wave of a solution at covector `cov` with `τ < 0`, given incoming and
/// outgoing amplitude sets in the original tangential frame.
pub fn plane_waves(
    case: Case,
    cov: &BoundaryCovector,
    mat: &MaterialPoint,
    incoming: &AmplitudeSet,
    outgoing: &AmplitudeSet,
) -> (Vec<SolidWave>, Vec<FluidWave>) {
    assert!(cov.tau < 0.0);
    let (xs, xp, xf) = (vertical(cov, mat.c_s), vertical(cov, mat.c_p), vertical(cov, mat.c_f));
    let p_factor = if matches!(case, Case::MH | Case::ME) { 2.0 } else { 1.0 };
    let v = |set: &AmplitudeSet, k: Component| set.value(k);
    let mut solid = Vec::new();
    let mut fluid = Vec::new();
    let (b1, b2) = (v(incoming, Component::B1S), v(incoming, Component::B2S));
    if b1 != c(0.0) || b2 != c(0.0) {
        solid.push(SolidWave::shear(cov, -xs, b1, b2));
    }
    if v(incoming, Component::BP) != c(0.0) {
        solid.push(SolidWave::pressure(cov, -xp, v(incoming, Component::BP)));
    }
    if v(incoming, Component::BF) != c(0.0) {
        fluid.push(FluidWave { k3: xf, psi: v(incoming, Component::BF) });
    }
    for k in [Component::B2S, Component::BP, Component::BF] {
        let d = outgoing.get(k).map(|a| a.dir);
        assert!(matches!(d, Some(Direction::Out) | Some(Direction::Ev)), "{k:?} has direction {d:?}");
    }
    solid.push(SolidWave::shear(cov, xs, v(outgoing, Component::B1S), v(outgoing, Component::B2S)));
    solid.push(SolidWave::pressure(cov, xp, p_factor * v(outgoing, Component::BP)));
    fluid.push(FluidWave { k3: -xf, psi: v(outgoing, Component::BF) });
    (solid, fluid)
}

/// Largest relative residual of the two transmission conditions, evaluated pointwise
/// at the interface points `(x₁, x₂, t)`.
///
/// The conditions are `ν·∂ₜu = −ρ_f⁻¹ ∂_ν ψ` and `σ(u)ν = −∂ₜψ ν`.
pub fn transmission_residual(
    cov: &BoundaryCovector,
    mat: &MaterialPoint,
    solid: &[SolidWave],
    fluid: &[FluidWave],
    points: &[[f64; 3]],
) -> f64 {
    let mut worst: f64 = 0.0;
    for &[x1, x2, t] in points {
        let e = (I * (x1 * cov.xi1 + x2 * cov.xi2 + t * cov.tau)).exp();
        // Kinematic condition: −∂ₜu₃ + ρ_f⁻¹ ∂_ν ψ with ∂_ν = −∂₃.
        let mut kin = Vec::new();
        // Dynamic condition: σν + ∂ₜψ ν = −σ_{3j} − ∂ₜψ δ_{3j}.
        let mut dynamic: [Vec<C64>; 3] = Default::default();
        for w in solid {
            kin.push(-I * cov.tau * w.a[2] * e);
            let s = w.stress_row3(cov, mat);
            for j in 0..3 {
                dynamic[j].push(-s[j] * e);
            }
        }
        for w in fluid {
            kin.push(-I * w.k3 * w.psi * e / mat.fluid.rho_f);
            dynamic[2].push(-I * cov.tau * w.psi * e);
        }
        for terms in std::iter::once(&kin).chain(dynamic.iter()) {
            let sum: C64 = terms.iter().sum();
            let scale: f64 = terms.iter().map(|z| z.norm()).sum();
            if scale > 0.0 {
                worst = worst.max(sum.norm() / scale);
            }
        }
    }
    worst
}

/// Reflected and transmitted potentials for a fluid-incident plane wave on a
/// fluid–fluid interface, with the upper medium `(λ, ρ)` described by a displacement
/// potential `u = ξ q_p` as in the solid.
///
/// Returns `(ψ_reflected, q_p_transmitted)` for unit incident `ψ`.
pub fn two_fluid(cov: &BoundaryCovector, lambda_up: f64, rho_up: f64, lambda_f: f64, rho_f: f64) -> (C64, C64) {
    let kup = vertical(cov, (lambda_up / rho_up).sqrt());
    let kf = vertical(cov, (lambda_f / rho_f).sqrt());
    // Normal velocity: τ k_up q = −k_f(1 − r)/ρ_f. Normal stress: ρ_up τ² q = −τ(1 + r).
    let zf = kf / rho_f;
    let zu = kup / rho_up;
    let r = (zf - zu) / (zf + zu);
    let q = -(1.0 + r) / (rho_up * cov.tau);
    (r, q)
}
