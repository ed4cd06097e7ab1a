//! Kinematic ray tracing in radially symmetric layered balls.
//!
//! Rays live in a great-circle plane, so positions and covectors are 2-vectors.
//! The source sits at `(0, R_outer)`; epicentral angles are measured from the
//! source toward `+x`. Along a ray `τ` is fixed (normally `−1`) and the flow of
//! `H = ½(c²|ξ|² − τ²)` is integrated in the time variable:
//! `ẋ = c²ξ/|τ|`, `ξ̇ = −c|ξ|²∇c/|τ|`.

mod integrator;
mod radial;
mod shooting;
mod surface;

pub use integrator::{rk4_step, Stepper, TracerConfig};
pub use radial::{
    free_surface_reflect, interface_branch, source_state, trace_phase, trace_segment, trace_tree, Branch, PhaseRay,
    RayTree, Segment, StopReason, TreeSegment,
};
pub use shooting::{separation, two_point_time, PhaseShooter, ShotResult};
pub use surface::{
    surface_ray, ConstantSpeed, FnSpeed, MaterialSpeedField, SurfaceRay, SurfaceSample, SurfaceSpeed,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Speed};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    P,
    SV,
    SH,
    F,
}

impl Mode {
    pub fn speed(self) -> Speed {
        match self {
            Mode::P => Speed::P,
            Mode::SV | Mode::SH => Speed::S,
            Mode::F => Speed::F,
        }
    }

    pub fn is_solid(self) -> bool {
        !matches!(self, Mode::F)
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::P => "P",
            Mode::SV => "S",
            Mode::SH => "SH",
            Mode::F => "F",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P" => Some(Mode::P),
            "S" | "SV" => Some(Mode::SV),
            "SH" => Some(Mode::SH),
            "F" => Some(Mode::F),
            _ => None,
        }
    }
}

/// A point on a ray.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayState {
    pub x: [f64; 2],
    pub xi: [f64; 2],
    pub tau: f64,
    pub t: f64,
    pub mode: Mode,
}

impl RayState {
    pub fn radius(&self) -> f64 {
        self.x[0].hypot(self.x[1])
    }

    /// `(τ² − c²|ξ|²)/τ²` for speed `c`.
    pub fn shell_defect(&self, c: f64) -> f64 {
        let xi2 = self.xi[0] * self.xi[0] + self.xi[1] * self.xi[1];
        (self.tau * self.tau - c * c * xi2) / (self.tau * self.tau)
    }

    /// Outward unit normal and tangent `(−n_y, n_x)` at the current position.
    pub fn frame(&self) -> ([f64; 2], [f64; 2]) {
        let r = self.radius();
        let n = [self.x[0] / r, self.x[1] / r];
        (n, [-n[1], n[0]])
    }

    /// Covector component along the local tangent.
    pub fn tangential_xi(&self) -> f64 {
        let (_, t) = self.frame();
        self.xi[0] * t[0] + self.xi[1] * t[1]
    }

    pub fn normal_xi(&self) -> f64 {
        let (n, _) = self.frame();
        self.xi[0] * n[0] + self.xi[1] * n[1]
    }

    /// Epicentral angle from the source direction `+y` toward `+x`, in `(−π, π]`.
    pub fn angle(&self) -> f64 {
        self.x[0].atan2(self.x[1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    InterfaceHit,
    SurfaceHit,
    Transmit,
    Reflect,
    Convert,
    TotalReflect,
    EvanescentBranchDropped,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayEvent {
    pub kind: EventKind,
    pub location: [f64; 2],
    pub t: f64,
    pub incident: Mode,
    pub emergent: Option<Mode>,
    pub amplitude: C64,
    /// Tangential covector component before and after the event.
    pub xi_tangential: (f64, f64),
}

/// A parsed phase: the sequence of legs separated by interactions with the interface.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Phase {
    pub legs: Vec<Mode>,
}

impl Phase {
    /// Parses `"P->F->S"`-style strings; `→` is accepted as well as `->`.
    pub fn parse(s: &str) -> Result<Phase> {
        let norm = s.replace('→', "->");
        let legs: Vec<Mode> = norm
            .split("->")
            .map(|tok| Mode::parse(tok).ok_or_else(|| Error::InvalidPhase(format!("unknown leg {tok:?} in {s:?}"))))
            .collect::<Result<_>>()?;
        let p = Phase { legs };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let (first, last) = match (self.legs.first(), self.legs.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => return Err(Error::InvalidPhase("empty phase".into())),
        };
        if !first.is_solid() || !last.is_solid() {
            return Err(Error::InvalidPhase("phases start and end in the solid".into()));
        }
        for w in self.legs.windows(2) {
            if (w[0] == Mode::SH) != (w[1] == Mode::SH) {
                return Err(Error::InvalidPhase("SH decouples and converts to no other mode".into()));
            }
        }
        Ok(())
    }

    pub fn is_direct(&self) -> bool {
        self.legs.len() == 1
    }

    /// True when every leg stays in the solid, i.e. all interactions are reflections.
    pub fn is_solid_reflection(&self) -> bool {
        self.legs.len() > 1 && self.legs.iter().all(|m| m.is_solid())
    }

    pub fn enters_fluid(&self) -> bool {
        self.legs.iter().any(|m| !m.is_solid())
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let names: Vec<&str> = self.legs.iter().map(|m| m.name()).collect();
        f.write_str(&names.join("->"))
    }
}
