//! Material parameters and radially symmetric models.

use serde::{Deserialize, Serialize};

pub use crate::error::Speed;
use crate::error::{Error, Result};

fn positive(v: f64, field: &'static str) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::NonPositive { field })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolidParams {
    pub lambda_s: f64,
    pub mu_s: f64,
    pub rho_s: f64,
}

impl SolidParams {
    pub fn new(lambda_s: f64, mu_s: f64, rho_s: f64) -> Result<Self> {
        let p = SolidParams { lambda_s, mu_s, rho_s };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive(self.lambda_s, "lambda_s")?;
        positive(self.mu_s, "mu_s")?;
        positive(self.rho_s, "rho_s")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidParams {
    pub lambda_f: f64,
    pub rho_f: f64,
}

impl FluidParams {
    pub fn new(lambda_f: f64, rho_f: f64) -> Result<Self> {
        let p = FluidParams { lambda_f, rho_f };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive(self.lambda_f, "lambda_f")?;
        positive(self.rho_f, "rho_f")?;
        Ok(())
    }
}

/// Returns `(c_s, c_p)`.
pub fn solid_speeds(p: &SolidParams) -> Result<(f64, f64)> {
    p.validate()?;
    let c_s = (p.mu_s / p.rho_s).sqrt();
    let c_p = ((p.lambda_s + 2.0 * p.mu_s) / p.rho_s).sqrt();
    Ok((c_s, c_p))
}

pub fn fluid_speed(p: &FluidParams) -> Result<f64> {
    p.validate()?;
    Ok((p.lambda_f / p.rho_f).sqrt())
}

/// Solid and fluid parameters on either side of one interface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialPoint {
    pub solid: SolidParams,
    pub fluid: FluidParams,
    pub c_s: f64,
    pub c_p: f64,
    pub c_f: f64,
}

impl MaterialPoint {
    /// Parameters are already validated by their constructors.
    pub fn new(solid: SolidParams, fluid: FluidParams) -> Self {
        let (c_s, c_p) = solid_speeds(&solid).expect("validated solid parameters");
        let c_f = fluid_speed(&fluid).expect("validated fluid parameters");
        MaterialPoint { solid, fluid, c_s, c_p, c_f }
    }

    pub fn try_new(solid: SolidParams, fluid: FluidParams) -> Result<Self> {
        solid.validate()?;
        fluid.validate()?;
        Ok(Self::new(solid, fluid))
    }

    /// Builds a material from speeds and densities.
    pub fn from_speeds(c_s: f64, c_p: f64, c_f: f64, rho_s: f64, rho_f: f64) -> Result<Self> {
        positive(c_s, "c_s")?;
        positive(c_p, "c_p")?;
        positive(c_f, "c_f")?;
        positive(rho_s, "rho_s")?;
        positive(rho_f, "rho_f")?;
        let mu_s = rho_s * c_s * c_s;
        let lambda_s = rho_s * (c_p * c_p - 2.0 * c_s * c_s);
        Self::try_new(SolidParams::new(lambda_s, mu_s, rho_s)?, FluidParams::new(rho_f * c_f * c_f, rho_f)?)
    }

    pub fn speed(&self, s: Speed) -> f64 {
        match s {
            Speed::S => self.c_s,
            Speed::P => self.c_p,
            Speed::F => self.c_f,
        }
    }

    pub fn lambda_s(&self) -> f64 {
        self.solid.lambda_s
    }

    pub fn mu(&self) -> f64 {
        self.solid.mu_s
    }

    pub fn rho_s(&self) -> f64 {
        self.solid.rho_s
    }

    pub fn rho_f(&self) -> f64 {
        self.fluid.rho_f
    }
}

/// Monotone piecewise cubic Hermite interpolant (Fritsch–Carlson slopes).
///
/// Outside the sample range the end cubics are continued.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(points: &[(f64, f64)]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidModel("profile needs at least two samples".into()));
        }
        let x: Vec<f64> = points.iter().map(|p| p.0).collect();
        let y: Vec<f64> = points.iter().map(|p| p.1).collect();
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidModel("profile samples must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidModel("profile radii must be strictly increasing".into()));
        }
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for k in 1..n - 1 {
                if delta[k - 1] * delta[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Pchip { x, y, d })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn segment(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    /// Value and derivative at `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let k = self.segment(t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1, d0, d1) = (self.y[k], self.y[k + 1], self.d[k] * h, self.d[k + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let v = (2.0 * s3 - 3.0 * s2 + 1.0) * y0
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * y1
            + (s3 - s2) * d1;
        let dv = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * d0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * d1)
            / h;
        (v, dv)
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

/// Radial speed profile.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Constant(f64),
    /// `c(r) = a + b r`.
    Linear { a: f64, b: f64 },
    Tabulated(Pchip),
}

impl Profile {
    pub fn tabulated(points: &[(f64, f64)]) -> Result<Self> {
        Ok(Profile::Tabulated(Pchip::new(points)?))
    }

    /// Speed and radial derivative at `r`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        match self {
            Profile::Constant(c) => (*c, 0.0),
            Profile::Linear { a, b } => (a + b * r, *b),
            Profile::Tabulated(p) => p.eval(r),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.eval(r).0
    }
}

/// Layered ball: solid shell on `[r_core, r_outer]` around a fluid core on `[0, r_core]`.
///
/// `r_core == 0` describes a homogeneous solid ball without a fluid core.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialModel {
    pub r_outer: f64,
    pub r_core: f64,
    pub c_p: Profile,
    pub c_s: Profile,
    pub c_f: Option<Profile>,
    /// One-sided limits of the material at `r = r_core`.
    pub interface: Option<MaterialPoint>,
}

const PROFILE_CHECKS: usize = 200;

impl RadialModel {
    pub fn solid_ball(r_outer: f64, c_p: Profile, c_s: Profile) -> Result<Self> {
        positive(r_outer, "R_outer")?;
        let m = RadialModel { r_outer, r_core: 0.0, c_p, c_s, c_f: None, interface: None };
        m.check_profiles()?;
        Ok(m)
    }

    /// The interface material is derived from the profile limits at `r_core`
    /// together with the two interface densities.
    pub fn layered(
        r_outer: f64,
        r_core: f64,
        c_p: Profile,
        c_s: Profile,
        c_f: Profile,
        rho_s: f64,
        rho_f: f64,
    ) -> Result<Self> {
        positive(r_outer, "R_outer")?;
        positive(r_core, "R_core")?;
        if r_core >= r_outer {
            return Err(Error::InvalidModel("R_core must be smaller than R_outer".into()));
        }
        let interface = MaterialPoint::from_speeds(
            c_s.value(r_core),
            c_p.value(r_core),
            c_f.value(r_core),
            rho_s,
            rho_f,
        )?;
        let m = RadialModel { r_outer, r_core, c_p, c_s, c_f: Some(c_f), interface: Some(interface) };
        m.check_profiles()?;
        Ok(m)
    }

    /// `c_s = 1`, `c_p = 2` in the shell `[0.5, 1]`, `c_f(r) = 1.8 − 0.6 r` in the core.
    pub fn canonical_layered() -> Self {
        Self::layered(
            1.0,
            0.5,
            Profile::Constant(2.0),
            Profile::Constant(1.0),
            Profile::Linear { a: 1.8, b: -0.6 },
            1.0,
            1.0,
        )
        .expect("canonical layered model")
    }

    pub fn has_core(&self) -> bool {
        self.c_f.is_some()
    }

    fn check_profiles(&self) -> Result<()> {
        let check = |p: &Profile, lo: f64, hi: f64, name: &'static str| -> Result<()> {
            for k in 0..=PROFILE_CHECKS {
                let r = lo + (hi - lo) * k as f64 / PROFILE_CHECKS as f64;
                let (c, dc) = p.eval(r);
                if !(c.is_finite() && c > 0.0 && dc.is_finite()) {
                    return Err(Error::InvalidModel(format!("{name} not positive at r = {r}")));
                }
            }
            Ok(())
        };
        check(&self.c_p, self.r_core, self.r_outer, "c_p")?;
        check(&self.c_s, self.r_core, self.r_outer, "c_s")?;
        for k in 0..=PROFILE_CHECKS {
            let r = self.r_core + (self.r_outer - self.r_core) * k as f64 / PROFILE_CHECKS as f64;
            if self.c_s.value(r) >= self.c_p.value(r) {
                return Err(Error::InvalidModel(format!("c_s >= c_p at r = {r}")));
            }
        }
        if let Some(cf) = &self.c_f {
            check(cf, 0.0, self.r_core, "c_f")?;
        }
        Ok(())
    }

    /// Speed and radial derivative of the given wave type at radius `r`.
    ///
    /// Fluid speeds are only meaningful inside the core and solid speeds in the shell;
    /// the caller is responsible for asking on the right side.
    pub fn speed(&self, s: Speed, r: f64) -> (f64, f64) {
        match s {
            Speed::P => self.c_p.eval(r),
            Speed::S => self.c_s.eval(r),
            Speed::F => self.c_f.as_ref().map_or((f64::NAN, f64::NAN), |p| p.eval(r)),
        }
    }

    /// Speed ordering `c_s < c_f` across the interface.
    pub fn satisfies_cond_g(&self) -> bool {
        match &self.c_f {
            Some(cf) => self.c_s.value(self.r_core) < cf.value(self.r_core),
            None => false,
        }
    }

    /// Checks `d/dr (r / c) > 0` on every layer for every wave type.
    pub fn check_convexity(&self) -> Result<()> {
        let test = |p: &Profile, lo: f64, hi: f64, name: &str| -> Result<()> {
            for k in 0..=PROFILE_CHECKS {
                let r = lo + (hi - lo) * k as f64 / PROFILE_CHECKS as f64;
                let (c, dc) = p.eval(r);
                if c - r * dc <= 0.0 {
                    return Err(Error::FoliationViolated(format!("d/dr(r/{name}) <= 0 at r = {r}")));
                }
            }
            Ok(())
        };
        test(&self.c_p, self.r_core, self.r_outer, "c_p")?;
        test(&self.c_s, self.r_core, self.r_outer, "c_s")?;
        if let Some(cf) = &self.c_f {
            test(cf, 0.0, self.r_core, "c_f")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub solid: SolidParams,
    pub fluid: FluidParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radial: Option<RadialSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialSpec {
    #[serde(rename = "R_outer")]
    pub r_outer: f64,
    #[serde(rename = "R_core", default)]
    pub r_core: f64,
    pub profiles: ProfileSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub c_p: Vec<(f64, f64)>,
    pub c_s: Vec<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_f: Option<Vec<(f64, f64)>>,
}

/// A parsed and validated model file.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub material: MaterialPoint,
    pub radial: Option<RadialModel>,
}

impl ModelFile {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidModel(e.to_string()))
    }

    pub fn build(&self) -> Result<Model> {
        let material = MaterialPoint::try_new(self.solid, self.fluid)?;
        let radial = match &self.radial {
            None => None,
            Some(spec) => {
                let c_p = Profile::tabulated(&spec.profiles.c_p)?;
                let c_s = Profile::tabulated(&spec.profiles.c_s)?;
                Some(match &spec.profiles.c_f {
                    Some(cf) if spec.r_core > 0.0 => RadialModel::layered(
                        spec.r_outer,
                        spec.r_core,
                        c_p,
                        c_s,
                        Profile::tabulated(cf)?,
                        self.solid.rho_s,
                        self.fluid.rho_f,
                    )?,
                    Some(_) => return Err(Error::InvalidModel("c_f profile given without R_core".into())),
                    None if spec.r_core > 0.0 => {
                        return Err(Error::InvalidModel("R_core given without c_f profile".into()))
                    }
                    None => RadialModel::solid_ball(spec.r_outer, c_p, c_s)?,
                })
            }
        };
        Ok(Model { material, radial })
    }
}

impl Model {
    pub fn from_json(s: &str) -> Result<Self> {
        ModelFile::from_json(s)?.build()
    }
}
