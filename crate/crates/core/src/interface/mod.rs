//! The six non-glancing transmission systems in the reduced frame `ξ₂ = 0`.
//!
//! Unknowns are potential amplitudes: `b₁` (SH) and `b₂` (SV) for the shear
//! potential, `b_p` for the pressure potential and `b_f` for the fluid
//! potential. Each system is `A_out x = A_in b_in`, where `x` holds the
//! outgoing or evanescent `(b₂, b_p, b_f)` and the SH component decouples.
//!
//! In the `MH` and `ME` cases the evanescent pressure column appears in both
//! the outgoing and incoming traces, so the solved `b_p` is half of the
//! physical evanescent potential amplitude.

mod closed_form;
mod control;
mod general;
mod scan;

pub use closed_form::{closed_form_determinant, secular_bracket};
pub use control::{
    control_fluid_to_sv, control_matrix_hh, control_matrix_mh, control_matrix_mh2, control_solid_to_fluid,
    mh_control2_det_closed, mh_control_det_closed, ControlSolution,
};
pub use general::{general_frame_system, solve_general, GeneralSystem};
pub use scan::{angle_scan, Incident, ScanRow};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm_inf, CMat};
use crate::media::MaterialPoint;
use crate::microlocal::{
    classify, rotate_to_frame, vertical_wavenumbers, BoundaryCovector, FluidRegion, SolidRegion, TauSign,
    DEFAULT_EPS_G,
};
use crate::C64;

/// Ratio `|det| / Π‖row‖` below which a solve is flagged as ill conditioned.
pub const CONDITIONING_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    HH,
    MH,
    EH,
    HE,
    ME,
    EE,
}

impl Case {
    pub const ALL: [Case; 6] = [Case::HH, Case::MH, Case::EH, Case::HE, Case::ME, Case::EE];

    pub fn from_regions(solid: SolidRegion, fluid: FluidRegion) -> Result<Case> {
        use FluidRegion as F;
        use SolidRegion as S;
        Ok(match (solid, fluid) {
            (S::Hyperbolic, F::Hyperbolic) => Case::HH,
            (S::Mixed, F::Hyperbolic) => Case::MH,
            (S::Elliptic, F::Hyperbolic) => Case::EH,
            (S::Hyperbolic, F::Elliptic) => Case::HE,
            (S::Mixed, F::Elliptic) => Case::ME,
            (S::Elliptic, F::Elliptic) => Case::EE,
            (s, f) => return Err(Error::RegionMismatch(format!("glancing region ({s:?}, {f:?})"))),
        })
    }

    pub fn regions(self) -> (SolidRegion, FluidRegion) {
        use FluidRegion as F;
        use SolidRegion as S;
        match self {
            Case::HH => (S::Hyperbolic, F::Hyperbolic),
            Case::MH => (S::Mixed, F::Hyperbolic),
            Case::EH => (S::Elliptic, F::Hyperbolic),
            Case::HE => (S::Hyperbolic, F::Elliptic),
            Case::ME => (S::Mixed, F::Elliptic),
            Case::EE => (S::Elliptic, F::Elliptic),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Case::HH => "HH",
            Case::MH => "MH",
            Case::EH => "EH",
            Case::HE => "HE",
            Case::ME => "ME",
            Case::EE => "EE",
        }
    }

    pub fn parse(s: &str) -> Option<Case> {
        Case::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }

    /// Incoming components the case admits.
    pub fn admitted_incoming(self) -> &'static [Component] {
        use Component::*;
        match self {
            Case::HH => &[B1S, B2S, BP, BF],
            Case::MH => &[B1S, B2S, BF],
            Case::EH => &[BF],
            Case::HE => &[B1S, B2S, BP],
            Case::ME => &[B1S, B2S],
            Case::EE => &[],
        }
    }

    /// Direction tags of the unknowns `(b₂, b_p, b_f)`.
    pub fn unknown_directions(self) -> [Direction; 3] {
        use Direction::*;
        match self {
            Case::HH => [Out, Out, Out],
            Case::MH => [Out, Ev, Out],
            Case::EH => [Ev, Ev, Out],
            Case::HE => [Out, Out, Ev],
            Case::ME => [Out, Ev, Ev],
            Case::EE => [Ev, Ev, Ev],
        }
    }

    /// True when SH waves reflect (`b₁_out = −b₁_in`); false when only an evanescent SH exists.
    pub fn has_sh_reflection(self) -> bool {
        matches!(self, Case::HH | Case::MH | Case::HE | Case::ME)
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CaseLabel {
    pub case: Case,
    pub tau_sign: TauSign,
}

/// Classifies the covector and maps the region pair to a case.
pub fn case_of(cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<CaseLabel> {
    let l = classify(cov, mat, DEFAULT_EPS_G)?;
    Ok(CaseLabel { case: Case::from_regions(l.solid, l.fluid)?, tau_sign: l.tau_sign })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
    Ev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    B1S,
    B2S,
    BP,
    BF,
}

impl Component {
    pub const ALL: [Component; 4] = [Component::B1S, Component::B2S, Component::BP, Component::BF];

    pub fn name(self) -> &'static str {
        match self {
            Component::B1S => "b1s",
            Component::B2S => "b2s",
            Component::BP => "bp",
            Component::BF => "bf",
        }
    }

    pub fn parse(s: &str) -> Option<Component> {
        Component::ALL.into_iter().find(|c| c.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub value: C64,
    pub dir: Direction,
}

/// Potential amplitudes; absent components are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AmplitudeSet {
    pub b1_s: Option<Amplitude>,
    pub b2_s: Option<Amplitude>,
    pub b_p: Option<Amplitude>,
    pub b_f: Option<Amplitude>,
}

impl AmplitudeSet {
    /// All four components tagged incoming.
    pub fn incoming(b1_s: C64, b2_s: C64, b_p: C64, b_f: C64) -> Self {
        let a = |v| Some(Amplitude { value: v, dir: Direction::In });
        AmplitudeSet { b1_s: a(b1_s), b2_s: a(b2_s), b_p: a(b_p), b_f: a(b_f) }
    }

    /// A single unit incoming component.
    pub fn unit(c: Component) -> Self {
        let mut s = AmplitudeSet::default();
        s.set(c, Amplitude { value: C64::new(1.0, 0.0), dir: Direction::In });
        s
    }

    pub fn get(&self, c: Component) -> Option<Amplitude> {
        match c {
            Component::B1S => self.b1_s,
            Component::B2S => self.b2_s,
            Component::BP => self.b_p,
            Component::BF => self.b_f,
        }
    }

    pub fn set(&mut self, c: Component, a: Amplitude) {
        let slot = match c {
            Component::B1S => &mut self.b1_s,
            Component::B2S => &mut self.b2_s,
            Component::BP => &mut self.b_p,
            Component::BF => &mut self.b_f,
        };
        *slot = Some(a);
    }

    /// Value of a component, zero if absent.
    pub fn value(&self, c: Component) -> C64 {
        self.get(c).map_or(C64::new(0.0, 0.0), |a| a.value)
    }

    pub fn values(&self) -> [C64; 4] {
        Component::ALL.map(|c| self.value(c))
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.values())
    }

    pub fn conj(&self) -> Self {
        let f = |a: Option<Amplitude>| a.map(|a| Amplitude { value: a.value.conj(), dir: a.dir });
        AmplitudeSet { b1_s: f(self.b1_s), b2_s: f(self.b2_s), b_p: f(self.b_p), b_f: f(self.b_f) }
    }
}

/// One of the six reduced systems.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSystem {
    pub label: CaseLabel,
    /// Reduced-frame covector (`ξ₂ = 0`).
    pub covector: BoundaryCovector,
    pub material: MaterialPoint,
    pub a_out: CMat,
    pub a_in: CMat,
    /// Incoming component feeding each column of `a_in`.
    pub in_components: Vec<Component>,
    pub sh_factor: f64,
}

impl InterfaceSystem {
    /// `A_in · b_in`; zero for the homogeneous elliptic-elliptic system.
    pub fn rhs(&self, incoming: &AmplitudeSet) -> Vec<C64> {
        let b: Vec<C64> = self.in_components.iter().map(|&c| incoming.value(c)).collect();
        if b.is_empty() {
            vec![C64::new(0.0, 0.0); 3]
        } else {
            self.a_in.mul_vec(&b)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionSolution {
    pub label: CaseLabel,
    pub outgoing: AmplitudeSet,
    pub residual: f64,
    pub det_numeric: C64,
    pub det_closed_form: C64,
    pub conditioning_warning: bool,
}

fn r(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Assembles the reduced system for `case` at a covector with arbitrary `ξ₂`.
pub fn assemble(case: Case, cov: &BoundaryCovector, mat: &MaterialPoint) -> Result<InterfaceSystem> {
    let frame = rotate_to_frame(cov);
    let red = frame.covector;
    let label = case_of(&red, mat)?;
    if label.case != case {
        return Err(Error::RegionMismatch(format!("requested {case} but covector lies in {}", label.case)));
    }
    let neg = red.with_negative_tau();
    let w = vertical_wavenumbers(&neg, mat)?;
    let (xs, xp, xf) = (w.xi3_s(), w.xi3_p(), w.xi3_f());
    let (x1, t) = (neg.xi1, neg.tau);
    let mu = mat.mu();
    let rho = mat.rho_s();
    let rfi = 1.0 / mat.rho_f();
    let b = 2.0 * mu * x1 * x1 - rho * t * t;
    let z = r(0.0);
    use Component::*;
    let (a_out, a_in, in_components) = match case {
        Case::HH => (
            CMat::from_rows(&[[r(t * x1), t * xp, -rfi * xf], [r(b), 2.0 * mu * x1 * xp, z], [2.0 * mu * x1 * xs, r(-b), r(t)]]),
            CMat::from_rows(&[[r(-t * x1), t * xp, -rfi * xf], [r(-b), 2.0 * mu * x1 * xp, z], [2.0 * mu * x1 * xs, r(b), r(-t)]]),
            vec![B2S, BP, BF],
        ),
        Case::MH => (
            CMat::from_rows(&[
                [r(t * x1), 2.0 * t * xp, -rfi * xf],
                [r(b), 4.0 * mu * x1 * xp, z],
                [2.0 * mu * x1 * xs, r(-2.0 * b), r(t)],
            ]),
            CMat::from_rows(&[[r(-t * x1), -rfi * xf], [r(-b), z], [2.0 * mu * x1 * xs, r(-t)]]),
            vec![B2S, BF],
        ),
        Case::EH => (
            CMat::from_rows(&[[r(t * x1), t * xp, -rfi * xf], [r(b), 2.0 * mu * x1 * xp, z], [2.0 * mu * x1 * xs, r(-b), r(t)]]),
            CMat::from_rows(&[[-rfi * xf], [z], [r(-t)]]),
            vec![BF],
        ),
        Case::HE => (
            CMat::from_rows(&[[r(t * x1), t * xp, -rfi * xf], [r(b), 2.0 * mu * x1 * xp, z], [2.0 * mu * x1 * xs, r(-b), r(t)]]),
            CMat::from_rows(&[[r(-t * x1), t * xp], [r(-b), 2.0 * mu * x1 * xp], [2.0 * mu * x1 * xs, r(b)]]),
            vec![B2S, BP],
        ),
        Case::ME => (
            CMat::from_rows(&[
                [r(t * x1), 2.0 * t * xp, -rfi * xf],
                [r(b), 4.0 * mu * x1 * xp, z],
                [2.0 * mu * x1 * xs, r(-2.0 * b), r(t)],
            ]),
            CMat::from_rows(&[[r(-t * x1)], [r(-b)], [2.0 * mu * x1 * xs]]),
            vec![B2S],
        ),
        Case::EE => (
            CMat::from_rows(&[[r(t * x1), t * xp, -rfi * xf], [r(b), 2.0 * mu * x1 * xp, z], [2.0 * mu * x1 * xs, r(-b), r(t)]]),
            CMat::zeros(3, 0),
            vec![],
        ),
    };
    let (a_out, a_in) = if cov.tau > 0.0 { (a_out.conj(), a_in.conj()) } else { (a_out, a_in) };
    Ok(InterfaceSystem {
        label,
        covector: red,
        material: *mat,
        a_out,
        a_in,
        in_components,
        sh_factor: -mu * x1 * x1 + rho * t * t,
    })
}

fn check_incoming(case: Case, incoming: &AmplitudeSet) -> Result<()> {
    for c in Component::ALL {
        if let Some(a) = incoming.get(c) {
            if a.value != C64::new(0.0, 0.0) && !case.admitted_incoming().contains(&c) {
                return Err(Error::InadmissibleIncoming { component: c.name(), case: case.to_string() });
            }
        }
    }
    Ok(())
}

/// Solves the reduced system for the outgoing and evanescent amplitudes.
pub fn solve_outgoing(sys: &InterfaceSystem, incoming: &AmplitudeSet) -> Result<TransmissionSolution> {
    let case = sys.label.case;
    if case == Case::EE {
        return Err(Error::HomogeneousSystem);
    }
    if sys.sh_factor == 0.0 {
        return Err(Error::EllipticityFailure { det: 0.0 });
    }
    check_incoming(case, incoming)?;
    let lu = sys.a_out.lu().ok_or(Error::EllipticityFailure { det: 0.0 })?;
    let det_numeric = lu.det();
    let rhs = sys.rhs(incoming);
    let x = lu.solve(&rhs);
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::EllipticityFailure { det: det_numeric.norm() });
    }
    let ax = sys.a_out.mul_vec(&x);
    let residual = norm_inf(&ax.iter().zip(&rhs).map(|(a, b)| a - b).collect::<Vec<_>>());
    let scale: f64 = sys.a_out.row_norms().iter().product();
    let conditioning_warning = det_numeric.norm() < CONDITIONING_GUARD * scale;
    if conditioning_warning {
        log::warn!(
            "{case} system near glancing at xi1 = {}, tau = {}: |det| = {:e}",
            sys.covector.xi1,
            sys.covector.tau,
            det_numeric.norm()
        );
    }
    let det_closed_form = closed_form_determinant(case, &sys.covector, &sys.material)?;

    let dirs = case.unknown_directions();
    let mut out = AmplitudeSet::default();
    let b1 = if case.has_sh_reflection() {
        Amplitude { value: -incoming.value(Component::B1S), dir: Direction::Out }
    } else {
        Amplitude { value: C64::new(0.0, 0.0), dir: Direction::Ev }
    };
    out.set(Component::B1S, b1);
    for (k, c) in [Component::B2S, Component::BP, Component::BF].into_iter().enumerate() {
        out.set(c, Amplitude { value: x[k], dir: dirs[k] });
    }
    Ok(TransmissionSolution {
        label: sys.label,
        outgoing: out,
        residual,
        det_numeric,
        det_closed_form,
        conditioning_warning,
    })
}

/// Solves at an arbitrary covector.
///
/// Incoming and outgoing shear amplitudes are given in the original
/// tangential frame; they are rotated into the reduced frame and back.
pub fn solve(cov: &BoundaryCovector, mat: &MaterialPoint, incoming: &AmplitudeSet) -> Result<TransmissionSolution> {
    let frame = rotate_to_frame(cov);
    let label = case_of(&frame.covector, mat)?;
    let sys = assemble(label.case, &frame.covector, mat)?;
    let v = frame.rotate_vector([
        incoming.value(Component::B1S),
        incoming.value(Component::B2S),
        incoming.value(Component::BP),
    ]);
    let mut reduced = *incoming;
    for (c, val) in [Component::B1S, Component::B2S].into_iter().zip(v) {
        if let Some(a) = reduced.get(c) {
            reduced.set(c, Amplitude { value: val, dir: a.dir });
        } else if val != C64::new(0.0, 0.0) {
            reduced.set(c, Amplitude { value: val, dir: Direction::In });
        }
    }
    let mut sol = solve_outgoing(&sys, &reduced)?;
    let o = &sol.outgoing;
    let back = frame.rotate_vector_back([o.value(Component::B1S), o.value(Component::B2S), o.value(Component::BP)]);
    for (c, val) in [Component::B1S, Component::B2S].into_iter().zip(back) {
        let dir = sol.outgoing.get(c).map_or(Direction::Out, |a| a.dir);
        sol.outgoing.set(c, Amplitude { value: val, dir });
    }
    Ok(sol)
}
