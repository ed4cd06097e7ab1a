use std::fmt;

use thiserror::Error;

/// Wave speeds that define the region boundaries on the interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Speed {
    S,
    P,
    F,
}

impl fmt::Display for Speed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Speed::S => "s",
            Speed::P => "p",
            Speed::F => "f",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field} must be positive")]
    NonPositive { field: &'static str },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("covector is zero")]
    ZeroCovector,

    #[error("covector is {0}-glancing")]
    Glancing(Speed),

    #[error("region mismatch: {0}")]
    RegionMismatch(String),

    #[error("incoming amplitude {component} is not admitted in the {case} region")]
    InadmissibleIncoming { component: &'static str, case: String },

    #[error("system is not elliptic: |det| = {det:e}")]
    EllipticityFailure { det: f64 },

    #[error("rank deficiency: numeric rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },

    #[error("the elliptic-elliptic system is homogeneous; use the Scholte solver")]
    HomogeneousSystem,

    #[error("secular argument z = {z} outside the real branch (0, {max})")]
    SecularDomain { z: f64, max: f64 },

    #[error("no Scholte root found in (0, {max})")]
    NoRootFound { max: f64 },

    #[error("interface kernel has dimension {0}, expected 1")]
    NullspaceDimension(usize),

    #[error("ray left the domain of the speed profile at r = {r}")]
    LeftDomain { r: f64 },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("invalid phase specification: {0}")]
    InvalidPhase(String),

    #[error("phase {phase} not reachable at delta = {delta_deg} deg")]
    NotReachable { phase: String, delta_deg: f64 },

    #[error("foliation-type condition violated: {0}")]
    FoliationViolated(String),

    #[error("speed ordering condition violated: {0}")]
    SpeedOrderingViolated(String),

    #[error("no interface signature in travel-time table")]
    NoInterfaceSignature,

    #[error("insufficient data coverage: {0}")]
    InsufficientCoverage(String),
}

pub type Result<T> = std::result::Result<T, Error>;
