//! Rays of a speed field on the sphere `|x| = R`.
//!
//! The flow is the ambient Hamiltonian flow with the constraint force that keeps
//! `x` on the sphere: `ẋ = c²ξ`, `ξ̇ = −c|ξ|²∇_S c − (c²|ξ|²/R²) x` (with `τ = −1`).
//! After every step `x` is projected back to the sphere and `ξ` onto its tangent plane.

use crate::error::{Error, Result};
use crate::media::MaterialPoint;
use crate::scholte::find_scholte_speed;

use super::integrator::{Stepper, TracerConfig};

/// Speed and ambient gradient of a scalar field on the sphere.
pub trait SurfaceSpeed: Sync {
    fn speed_grad(&self, x: [f64; 3]) -> (f64, [f64; 3]);
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantSpeed(pub f64);

impl SurfaceSpeed for ConstantSpeed {
    fn speed_grad(&self, _x: [f64; 3]) -> (f64, [f64; 3]) {
        (self.0, [0.0; 3])
    }
}

/// A field given by a closure returning speed and gradient.
pub struct FnSpeed<F>(pub F);

impl<F> SurfaceSpeed for FnSpeed<F>
where
    F: Fn([f64; 3]) -> (f64, [f64; 3]) + Sync,
{
    fn speed_grad(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        (self.0)(x)
    }
}

/// Scholte speed of a spatially varying interface material, differentiated numerically.
pub struct MaterialSpeedField<F> {
    pub material: F,
    /// Central-difference step.
    pub h: f64,
}

impl<F> MaterialSpeedField<F>
where
    F: Fn([f64; 3]) -> MaterialPoint + Sync,
{
    pub fn new(material: F, h: f64) -> Self {
        MaterialSpeedField { material, h }
    }

    fn speed(&self, x: [f64; 3]) -> f64 {
        find_scholte_speed(&(self.material)(x)).map_or(f64::NAN, |r| r.c_sc())
    }
}

impl<F> SurfaceSpeed for MaterialSpeedField<F>
where
    F: Fn([f64; 3]) -> MaterialPoint + Sync,
{
    fn speed_grad(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        let c = self.speed(x);
        let g = std::array::from_fn(|i| {
            let (mut a, mut b) = (x, x);
            a[i] += self.h;
            b[i] -= self.h;
            (self.speed(a) - self.speed(b)) / (2.0 * self.h)
        });
        (c, g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub t: f64,
    pub x: [f64; 3],
    pub xi: [f64; 3],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceRay {
    pub radius: f64,
    pub samples: Vec<SurfaceSample>,
}

impl SurfaceRay {
    pub fn last(&self) -> &SurfaceSample {
        self.samples.last().expect("non-empty")
    }

    /// Largest `|c²|ξ|² − 1|` along the ray.
    pub fn max_shell_defect(&self, field: &dyn SurfaceSpeed) -> f64 {
        self.samples
            .iter()
            .map(|s| {
                let c = field.speed_grad(s.x).0;
                (c * c * dot(&s.xi, &s.xi) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn project(radius: f64, y: &mut [f64; 6]) {
    let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
    for v in &mut y[..3] {
        *v *= radius / r;
    }
    let n = [y[0] / radius, y[1] / radius, y[2] / radius];
    let xn = y[3] * n[0] + y[4] * n[1] + y[5] * n[2];
    for i in 0..3 {
        y[3 + i] -= xn * n[i];
    }
}

/// Traces a surface ray for time `t_total` from `start` in tangent direction `dir`.
///
/// `dir` is projected to the tangent plane and scaled so that `c|ξ| = 1`.
pub fn surface_ray(
    radius: f64,
    field: &dyn SurfaceSpeed,
    start: [f64; 3],
    dir: [f64; 3],
    t_total: f64,
    cfg: &TracerConfig,
) -> Result<SurfaceRay> {
    let mut y = [start[0], start[1], start[2], dir[0], dir[1], dir[2]];
    project(radius, &mut y);
    let (c0, _) = field.speed_grad([y[0], y[1], y[2]]);
    let norm = (y[3] * y[3] + y[4] * y[4] + y[5] * y[5]).sqrt();
    if !(c0.is_finite() && c0 > 0.0) || norm == 0.0 {
        return Err(Error::InvalidModel("surface ray needs a positive speed and a tangent direction".into()));
    }
    for v in &mut y[3..] {
        *v /= c0 * norm;
    }
    let r2 = radius * radius;
    let f = |y: &[f64; 6]| -> [f64; 6] {
        let x = [y[0], y[1], y[2]];
        let xi = [y[3], y[4], y[5]];
        let (c, g) = field.speed_grad(x);
        let gn = dot(&g, &x) / r2;
        let gs = [g[0] - gn * x[0], g[1] - gn * x[1], g[2] - gn * x[2]];
        let xi2 = dot(&xi, &xi);
        let c2 = c * c;
        std::array::from_fn(|i| if i < 3 { c2 * xi[i] } else { -c * xi2 * gs[i - 3] - c2 * xi2 / r2 * x[i - 3] })
    };
    let err = |a: &[f64; 6], b: &[f64; 6]| {
        let dx = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt() / radius;
        let nb = (b[3] * b[3] + b[4] * b[4] + b[5] * b[5]).sqrt();
        let dxi = ((a[3] - b[3]).powi(2) + (a[4] - b[4]).powi(2) + (a[5] - b[5]).powi(2)).sqrt() / nb;
        dx.max(dxi)
    };
    let mut stepper = Stepper::new(TracerConfig { h_max: cfg.h_max.min(0.1 * radius), ..*cfg });
    let sample = |t: f64, y: &[f64; 6]| SurfaceSample { t, x: [y[0], y[1], y[2]], xi: [y[3], y[4], y[5]] };
    let mut samples = vec![sample(0.0, &y)];
    let mut t = 0.0;
    while t < t_total {
        let (mut next, h) = stepper.step(&f, &err, &y, t, t_total - t)?;
        project(radius, &mut next);
        if cfg.renormalize {
            let (c, _) = field.speed_grad([next[0], next[1], next[2]]);
            let n = (next[3] * next[3] + next[4] * next[4] + next[5] * next[5]).sqrt();
            for v in &mut next[3..] {
                *v /= c * n;
            }
        }
        y = next;
        t += h;
        samples.push(sample(t, &y));
    }
    Ok(SurfaceRay { radius, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_speed_follows_great_circle() {
        let c = 0.8;
        let r = 2.0;
        let ray = surface_ray(r, &ConstantSpeed(c), [r, 0.0, 0.0], [0.0, 1.0, 0.0], 3.0, &TracerConfig::default())
            .unwrap();
        let end = ray.last();
        let phi = c * 3.0 / r;
        assert!((end.x[0] - r * phi.cos()).abs() < 1e-9);
        assert!((end.x[1] - r * phi.sin()).abs() < 1e-9);
        assert!(end.x[2].abs() < 1e-12);
    }

    #[test]
    fn bends_toward_low_speed() {
        let r = 1.0;
        let field = FnSpeed(|x: [f64; 3]| (1.0 + 0.2 * x[2], [0.0, 0.0, 0.2]));
        let ray = surface_ray(r, &field, [r, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, &TracerConfig::default()).unwrap();
        assert!(ray.last().x[2] < -1e-3);
        assert!(ray.max_shell_defect(&field) < 1e-12);
    }
}
