//! Double-double arithmetic, enough to assemble and expand 3×3 complex determinants
//! to roughly 32 significant digits.

use std::ops::{Add, Mul, Neg, Sub};

use interface_lab::interface::Case;
use interface_lab::media::MaterialPoint;
use interface_lab::microlocal::BoundaryCovector;
use interface_lab::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn recip(self) -> Dd {
        Dd::new(1.0) / self
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let x = self.hi.sqrt();
        let xd = Dd::new(x);
        // One Newton step from a double-precision estimate doubles the digits.
        xd + (self - xd * xd) * Dd::new(0.5 / x)
    }

    pub fn is_negative(self) -> bool {
        self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        Dd::new(q1) + Dd::new(q2) + Dd::new(q3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cdd {
    pub re: Dd,
    pub im: Dd,
}

impl Cdd {
    pub const ZERO: Cdd = Cdd { re: Dd::ZERO, im: Dd::ZERO };

    pub fn real(x: Dd) -> Cdd {
        Cdd { re: x, im: Dd::ZERO }
    }

    pub fn imag(x: Dd) -> Cdd {
        Cdd { re: Dd::ZERO, im: x }
    }

    pub fn to_c64(self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for Cdd {
    type Output = Cdd;
    fn neg(self) -> Cdd {
        Cdd { re: -self.re, im: -self.im }
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

/// Vertical wavenumber `√(τ²/c² − ξ₁²)`, or `i√(ξ₁² − τ²/c²)` when evanescent.
fn vertical(tau2: Dd, c2: Dd, xi1sq: Dd) -> Cdd {
    let q = tau2 / c2 - xi1sq;
    if q.is_negative() {
        Cdd::imag((-q).sqrt())
    } else {
        Cdd::real(q.sqrt())
    }
}

/// Determinant of the reduced outgoing matrix for `case`, assembled from the raw
/// material parameters and covector in double-double precision.
///
/// Uses the reduced frame `ξ₁ = |ξ'|` and requires `τ < 0`.
pub fn reduced_determinant(case: Case, cov: &BoundaryCovector, mat: &MaterialPoint) -> C64 {
    assert!(cov.tau < 0.0);
    let xi1 = Dd::new(cov.xi1) * Dd::new(cov.xi1) + Dd::new(cov.xi2) * Dd::new(cov.xi2);
    let xi1sq = xi1;
    let xi1 = xi1.sqrt();
    let tau = Dd::new(cov.tau);
    let tau2 = tau * tau;
    let (lam, mu, rho) = (Dd::new(mat.solid.lambda_s), Dd::new(mat.solid.mu_s), Dd::new(mat.solid.rho_s));
    let (lamf, rhof) = (Dd::new(mat.fluid.lambda_f), Dd::new(mat.fluid.rho_f));
    let cs2 = mu / rho;
    let cp2 = (lam + mu + mu) / rho;
    let cf2 = lamf / rhof;
    let xs = vertical(tau2, cs2, xi1sq);
    let xp = vertical(tau2, cp2, xi1sq);
    let xf = vertical(tau2, cf2, xi1sq);
    let two = Dd::new(2.0);
    let k = if matches!(case, Case::MH | Case::ME) { Dd::new(2.0) } else { Dd::new(1.0) };
    let b = two * mu * xi1sq - rho * tau2;
    let r = Cdd::real;
    let rfi = rhof.recip();
    let a = [
        [r(tau * xi1), r(k * tau) * xp, -(r(rfi) * xf)],
        [r(b), r(two * k * mu * xi1) * xp, Cdd::ZERO],
        [r(two * mu * xi1) * xs, r(-(k * b)), r(tau)],
    ];
    let m = |i: usize, j: usize| a[i][j];
    let det = m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    det.to_c64()
}
