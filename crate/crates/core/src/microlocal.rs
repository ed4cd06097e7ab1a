//! Boundary covectors, region classification and vertical wavenumbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Speed};
use crate::media::MaterialPoint;
use crate::C64;

pub const DEFAULT_EPS_G: f64 = 1e-9;

/// A covector `(ξ₁, ξ₂, τ)` on the interface times the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCovector {
    pub xi1: f64,
    pub xi2: f64,
    pub tau: f64,
}

impl BoundaryCovector {
    pub fn new(xi1: f64, xi2: f64, tau: f64) -> Self {
        BoundaryCovector { xi1, xi2, tau }
    }

    pub fn tangential_norm(&self) -> f64 {
        self.xi1.hypot(self.xi2)
    }

    pub fn is_zero(&self) -> bool {
        self.xi1 == 0.0 && self.xi2 == 0.0 && self.tau == 0.0
    }

    pub fn tau_sign(&self) -> TauSign {
        if self.tau > 0.0 {
            TauSign::Plus
        } else {
            TauSign::Minus
        }
    }

    /// The same covector with `τ` replaced by `−|τ|`.
    pub fn with_negative_tau(&self) -> Self {
        BoundaryCovector { tau: -self.tau.abs(), ..*self }
    }

    pub fn scaled(&self, s: f64) -> Self {
        BoundaryCovector { xi1: s * self.xi1, xi2: s * self.xi2, tau: s * self.tau }
    }
}

/// Rotation in the tangential plane that maps `(ξ₁, ξ₂)` to `(|ξ'|, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedFrame {
    pub cos: f64,
    pub sin: f64,
    pub covector: BoundaryCovector,
}

impl ReducedFrame {
    /// Rotation angle in radians.
    pub fn angle(&self) -> f64 {
        self.sin.atan2(self.cos)
    }

    /// Applies the forward rotation to the first two components.
    pub fn rotate_vector(&self, v: [C64; 3]) -> [C64; 3] {
        [self.cos * v[0] + self.sin * v[1], -self.sin * v[0] + self.cos * v[1], v[2]]
    }

    /// Inverse rotation of the first two components; the third is untouched.
    pub fn rotate_vector_back(&self, v: [C64; 3]) -> [C64; 3] {
        [self.cos * v[0] - self.sin * v[1], self.sin * v[0] + self.cos * v[1], v[2]]
    }

    /// Recovers the original tangential covector.
    pub fn original(&self) -> BoundaryCovector {
        let x = self.covector.xi1;
        BoundaryCovector::new(self.cos * x, self.sin * x, self.covector.tau)
    }
}

pub fn rotate_to_frame(cov: &BoundaryCovector) -> ReducedFrame {
    let n = cov.tangential_norm();
    let (cos, sin) = if n > 0.0 { (cov.xi1 / n, cov.xi2 / n) } else { (1.0, 0.0) };
    ReducedFrame { cos, sin, covector: BoundaryCovector::new(n, 0.0, cov.tau) }
}

pub fn rotate_vector_back(frame: &ReducedFrame, v: [C64; 3]) -> [C64; 3] {
    frame.rotate_vector_back(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolidRegion {
    /// Hyperbolic for both `c_s` and `c_p`.
    Hyperbolic,
    PGlancing,
    /// Hyperbolic for `c_s`, elliptic for `c_p`.
    Mixed,
    SGlancing,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluidRegion {
    Hyperbolic,
    Glancing,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TauSign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegionLabel {
    pub solid: SolidRegion,
    pub fluid: FluidRegion,
    pub tau_sign: TauSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Band {
    Hyperbolic,
    Glancing,
    Elliptic,
}

fn band(cov: &BoundaryCovector, c: f64, eps_g: f64) -> Band {
    let t2 = cov.tau * cov.tau;
    let x2 = c * c * (cov.xi1 * cov.xi1 + cov.xi2 * cov.xi2);
    if (t2 - x2).abs() <= eps_g * (t2 + x2) {
        Band::Glancing
    } else if t2 > x2 {
        Band::Hyperbolic
    } else {
        Band::Elliptic
    }
}

/// Region of `cov` relative to each wave speed, without rejecting glancing sets.
pub fn regions(cov: &BoundaryCovector, mat: &MaterialPoint, eps_g: f64) -> Result<RegionLabel> {
    if cov.is_zero() {
        return Err(Error::ZeroCovector);
    }
    let s = band(cov, mat.c_s, eps_g);
    let p = band(cov, mat.c_p, eps_g);
    let f = band(cov, mat.c_f, eps_g);
    let solid = match (s, p) {
        (_, Band::Hyperbolic) => SolidRegion::Hyperbolic,
        (_, Band::Glancing) => SolidRegion::PGlancing,
        (Band::Hyperbolic, Band::Elliptic) => SolidRegion::Mixed,
        (Band::Glancing, _) => SolidRegion::SGlancing,
        (Band::Elliptic, _) => SolidRegion::Elliptic,
    };
    let fluid = match f {
        Band::Hyperbolic => FluidRegion::Hyperbolic,
        Band::Glancing => FluidRegion::Glancing,
        Band::Elliptic => FluidRegion::Elliptic,
    };
    Ok(RegionLabel { solid, fluid, tau_sign: cov.tau_sign() })
}

/// Classifies a covector, rejecting any glancing set.
pub fn classify(cov: &BoundaryCovector, mat: &MaterialPoint, eps_g: f64) -> Result<RegionLabel> {
    if cov.is_zero() {
        return Err(Error::ZeroCovector);
    }
    for sp in [Speed::S, Speed::P, Speed::F] {
        if band(cov, mat.speed(sp), eps_g) == Band::Glancing {
            return Err(Error::Glancing(sp));
        }
    }
    regions(cov, mat, eps_g)
}

/// One vertical wavenumber together with its branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavenumber {
    pub value: C64,
    pub propagating: bool,
}

impl Wavenumber {
    fn new(cov: &BoundaryCovector, c: f64) -> Self {
        let t2 = cov.tau * cov.tau / (c * c);
        let x2 = cov.xi1 * cov.xi1 + cov.xi2 * cov.xi2;
        if t2 > x2 {
            Wavenumber { value: C64::new((t2 - x2).sqrt(), 0.0), propagating: true }
        } else {
            Wavenumber { value: C64::new(0.0, (x2 - t2).sqrt()), propagating: false }
        }
    }

    /// `|ξ₃|`, i.e. the real square root of the radicand's modulus.
    pub fn modulus(&self) -> f64 {
        if self.propagating {
            self.value.re
        } else {
            self.value.im
        }
    }
}

/// Vertical wavenumbers: real `ξ₃` on propagating branches, `ξ̃₃ = i·sqrt(·)` on evanescent ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalWavenumbers {
    pub s: Wavenumber,
    pub p: Wavenumber,
    pub f: Wavenumber,
}

impl VerticalWavenumbers {
    pub fn xi3_s(&self) -> C64 {
        self.s.value
    }
    pub fn xi3_p(&self) -> C64 {
        self.p.value
    }
    pub fn xi3_f(&self) -> C64 {
        self.f.value
    }
}

pub fn vertical_wavenumbers(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<VerticalWavenumbers> {
    vertical_wavenumbers_eps(cov, mat, DEFAULT_EPS_G)
}

pub fn vertical_wavenumbers_eps(
    cov: &BoundaryCovector,
    mat: &MaterialPoint,
    eps_g: f64,
) -> Result<VerticalWavenumbers> {
    classify(cov, mat, eps_g)?;
    Ok(VerticalWavenumbers {
        s: Wavenumber::new(cov, mat.c_s),
        p: Wavenumber::new(cov, mat.c_p),
        f: Wavenumber::new(cov, mat.c_f),
    })
}
