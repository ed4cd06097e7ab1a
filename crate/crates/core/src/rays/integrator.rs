//! Classical RK4 with step-doubling error control.

use crate::error::{Error, Result};

/// Integration settings shared by radial and surface rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracerConfig {
    /// Per-step local error tolerance, relative to the model length scale and `|ξ|`.
    pub tol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Rescale `ξ` back onto the characteristic set after every accepted step.
    pub renormalize: bool,
    /// Use this constant step instead of adaptive control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
    /// Hard stop on the ray time of a single segment.
    pub t_max: f64,
}

impl Default for TracerConfig {
    fn default() -> Self {
        TracerConfig {
            tol: 1e-11,
            h_init: 1e-3,
            h_min: 1e-13,
            h_max: 0.1,
            renormalize: true,
            fixed_step: None,
            max_steps: 200_000,
            t_max: 100.0,
        }
    }
}

/// One classical RK4 step of `y' = f(y)`.
pub fn rk4_step<const N: usize>(f: &impl Fn(&[f64; N]) -> [f64; N], y: &[f64; N], h: f64) -> [f64; N] {
    let add = |a: &[f64; N], k: &[f64; N], s: f64| -> [f64; N] { std::array::from_fn(|i| a[i] + s * k[i]) };
    let k1 = f(y);
    let k2 = f(&add(y, &k1, h / 2.0));
    let k3 = f(&add(y, &k2, h / 2.0));
    let k4 = f(&add(y, &k3, h));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

/// Adaptive stepper holding the current step size.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub cfg: TracerConfig,
    pub h: f64,
    pub steps: usize,
}

impl Stepper {
    pub fn new(cfg: TracerConfig) -> Self {
        Stepper { h: cfg.fixed_step.unwrap_or(cfg.h_init), cfg, steps: 0 }
    }

    /// Advances by one accepted step, never beyond `h_cap`.
    ///
    /// `err` maps the full-step and two-half-step results to a scalar error.
    /// Returns the new state and the step actually taken.
    pub fn step<const N: usize>(
        &mut self,
        f: &impl Fn(&[f64; N]) -> [f64; N],
        err: &impl Fn(&[f64; N], &[f64; N]) -> f64,
        y: &[f64; N],
        t: f64,
        h_cap: f64,
    ) -> Result<([f64; N], f64)> {
        self.steps += 1;
        if self.steps > self.cfg.max_steps {
            return Err(Error::StepUnderflow { t });
        }
        if let Some(h) = self.cfg.fixed_step {
            let h = h.min(h_cap);
            return Ok((rk4_step(f, y, h), h));
        }
        loop {
            let h = self.h.min(self.cfg.h_max).min(h_cap);
            let full = rk4_step(f, y, h);
            let half = rk4_step(f, y, h / 2.0);
            let two = rk4_step(f, &half, h / 2.0);
            let e = err(&full, &two);
            let factor = if e == 0.0 { 4.0 } else { (0.9 * (self.cfg.tol / e).powf(0.2)).clamp(0.2, 4.0) };
            if e <= self.cfg.tol {
                // A step shortened by the cap says nothing about the next one.
                if h == self.h.min(self.cfg.h_max) {
                    self.h = (h * factor).min(self.cfg.h_max);
                }
                return Ok((two, h));
            }
            if h <= self.cfg.h_min {
                return Err(Error::StepUnderflow { t });
            }
            self.h = (h * factor).max(self.cfg.h_min);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_is_fourth_order_on_exponential() {
        let f = |y: &[f64; 1]| [y[0]];
        let err = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = [1.0];
            for _ in 0..n {
                y = rk4_step(&f, &y, h);
            }
            (y[0] - 1f64.exp()).abs()
        };
        let order = (err(10) / err(20)).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn adaptive_harmonic_oscillator() {
        let f = |y: &[f64; 2]| [y[1], -y[0]];
        let e = |a: &[f64; 2], b: &[f64; 2]| (a[0] - b[0]).abs().max((a[1] - b[1]).abs());
        let mut s = Stepper::new(TracerConfig { tol: 1e-12, ..Default::default() });
        let (mut y, mut t) = ([1.0, 0.0], 0.0);
        while t < 10.0 {
            let (ny, h) = s.step(&f, &e, &y, t, 10.0 - t).unwrap();
            y = ny;
            t += h;
        }
        assert!((y[0] - 10f64.cos()).abs() < 1e-9);
        assert!((t - 10.0).abs() < 1e-12);
    }
}
