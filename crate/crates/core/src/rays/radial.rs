//! Ray segments inside one layer, branching at the interface and at the free surface.

use crate::error::{Error, Result};
use crate::interface::{assemble, case_of, solve_outgoing, Component, Direction};
use crate::media::{MaterialPoint, RadialModel};
use crate::microlocal::{BoundaryCovector, DEFAULT_EPS_G};
use crate::C64;

use super::integrator::{rk4_step, Stepper, TracerConfig};
use super::{EventKind, Mode, Phase, RayEvent, RayState};

/// Tolerance on the boundary radius when locating a crossing, relative to `R_outer`.
const CROSSING_TOL: f64 = 1e-12;
const CROSSING_ITERS: usize = 200;
/// Bisection steps locating a turning point inside one step.
const TURNING_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Interface,
    Surface,
    MaxTime,
}

/// Accepted integration states of one leg, ending on a boundary or at `t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub mode: Mode,
    pub samples: Vec<RayState>,
    pub stop: StopReason,
}

impl Segment {
    pub fn last(&self) -> &RayState {
        self.samples.last().expect("segments hold at least the start state")
    }
}

/// One outcome of a boundary interaction; `state` is `None` for dropped evanescent branches.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub event: RayEvent,
    pub state: Option<RayState>,
}

fn pack(s: &RayState) -> [f64; 4] {
    [s.x[0], s.x[1], s.xi[0], s.xi[1]]
}

fn speed_at(model: &RadialModel, mode: Mode, x: &[f64]) -> (f64, [f64; 2]) {
    let r = x[0].hypot(x[1]);
    let (c, dc) = model.speed(mode.speed(), r);
    if r < 1e-300 {
        return (c, [0.0, 0.0]);
    }
    (c, [dc * x[0] / r, dc * x[1] / r])
}

fn renormalize(model: &RadialModel, mode: Mode, tau: f64, y: &mut [f64; 4]) {
    let (c, _) = speed_at(model, mode, &y[..2]);
    let norm = y[2].hypot(y[3]);
    if norm > 0.0 {
        let s = tau.abs() / (c * norm);
        y[2] *= s;
        y[3] *= s;
    }
}

/// Integrates one leg from `start` until it leaves its layer or `cfg.t_max` elapses.
///
/// Solid legs live on `[R_core, R_outer]`, fluid legs on `[0, R_core]`.
pub fn trace_segment(model: &RadialModel, start: &RayState, cfg: &TracerConfig) -> Result<Segment> {
    let mode = start.mode;
    let tau = start.tau;
    let (inner, outer) = if mode.is_solid() {
        (model.has_core().then_some(model.r_core), model.r_outer)
    } else {
        if !model.has_core() {
            return Err(Error::InvalidModel("fluid leg in a model without a fluid core".into()));
        }
        (None, model.r_core)
    };
    let at = tau.abs();
    let f = |y: &[f64; 4]| -> [f64; 4] {
        let (c, g) = speed_at(model, mode, &y[..2]);
        let xi2 = y[2] * y[2] + y[3] * y[3];
        let a = c * c / at;
        let b = -c * xi2 / at;
        [a * y[2], a * y[3], b * g[0], b * g[1]]
    };
    let len = model.r_outer;
    let err = |a: &[f64; 4], b: &[f64; 4]| {
        let dx = (a[0] - b[0]).hypot(a[1] - b[1]) / len;
        let dxi = (a[2] - b[2]).hypot(a[3] - b[3]) / b[2].hypot(b[3]);
        dx.max(dxi)
    };
    let exit = |y: &[f64; 4]| -> Option<(StopReason, f64)> {
        let r = y[0].hypot(y[1]);
        match inner {
            Some(ri) if r < ri => return Some((StopReason::Interface, ri)),
            _ => {}
        }
        if r > outer {
            let reason = if mode.is_solid() { StopReason::Surface } else { StopReason::Interface };
            return Some((reason, outer));
        }
        None
    };

    let mut stepper = Stepper::new(*cfg);
    let mut samples = vec![*start];
    let mut y = pack(start);
    let mut t = start.t;
    let t_end = start.t + cfg.t_max;
    let state = |y: &[f64; 4], t: f64| RayState { x: [y[0], y[1]], xi: [y[2], y[3]], tau, t, mode };
    loop {
        if t >= t_end {
            return Ok(Segment { mode, samples, stop: StopReason::MaxTime });
        }
        let (mut next, h) = stepper.step(&f, &err, &y, t, t_end - t)?;
        let crossing = exit(&next).map(|(reason, rb)| (reason, rb, h)).or_else(|| {
            // A ray can enter and leave a thin cap of a neighbouring layer within one
            // step; check the extremal radius when the radial velocity changes sign.
            let radial = |z: &[f64; 4]| z[0] * z[2] + z[1] * z[3];
            let (v0, v1) = (radial(&y), radial(&next));
            if v0.signum() == v1.signum() {
                return None;
            }
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..TURNING_ITERS {
                let mid = 0.5 * (lo + hi);
                if radial(&rk4_step(&f, &y, mid)).signum() == v0.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let turn = rk4_step(&f, &y, lo);
            exit(&turn).map(|(reason, rb)| (reason, rb, lo))
        });
        if let Some((reason, rb, h)) = crossing {
            let next = rk4_step(&f, &y, h);
            // Signed distance to the boundary, positive inside the layer.
            let inside = if reason == StopReason::Interface && inner == Some(rb) { 1.0 } else { -1.0 };
            let g = |s: f64| {
                let z = rk4_step(&f, &y, s);
                (inside * (z[0].hypot(z[1]) - rb), z)
            };
            let (mut lo, mut hi) = (0.0, h);
            let mut hit = next;
            let mut s_hit = h;
            for _ in 0..CROSSING_ITERS {
                let mid = 0.5 * (lo + hi);
                let (gm, z) = g(mid);
                hit = z;
                s_hit = mid;
                if gm.abs() <= CROSSING_TOL * len {
                    break;
                }
                if gm > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r = hit[0].hypot(hit[1]);
            hit[0] *= rb / r;
            hit[1] *= rb / r;
            if cfg.renormalize {
                renormalize(model, mode, tau, &mut hit);
            }
            samples.push(state(&hit, t + s_hit));
            return Ok(Segment { mode, samples, stop: reason });
        }
        if cfg.renormalize {
            renormalize(model, mode, tau, &mut next);
        }
        y = next;
        t += h;
        samples.push(state(&y, t));
    }
}

fn component(mode: Mode) -> Component {
    match mode {
        Mode::P => Component::BP,
        Mode::SV => Component::B2S,
        Mode::SH => Component::B1S,
        Mode::F => Component::BF,
    }
}

/// Emergent state with the same tangential covector, moving away from the boundary.
///
/// `outward` selects the sign of the normal component.
fn emergent_state(s: &RayState, mode: Mode, c: f64, xi_t: f64, outward: bool) -> RayState {
    let (n, tt) = s.frame();
    let kn = (s.tau * s.tau / (c * c) - xi_t * xi_t).max(0.0).sqrt();
    let kn = if outward { kn } else { -kn };
    RayState {
        x: s.x,
        xi: [xi_t * tt[0] + kn * n[0], xi_t * tt[1] + kn * n[1]],
        tau: s.tau,
        t: s.t,
        mode,
    }
}

fn event_kind(incident: Mode, emergent: Mode) -> EventKind {
    if incident.is_solid() != emergent.is_solid() {
        EventKind::Transmit
    } else if incident == emergent {
        EventKind::Reflect
    } else {
        EventKind::Convert
    }
}

fn interface_material(model: &RadialModel) -> Result<MaterialPoint> {
    model.interface.ok_or_else(|| Error::InvalidModel("model has no interface".into()))
}

/// Branches a ray arriving at the interface.
///
/// The incident mode carries unit amplitude; emergent amplitudes come from the
/// reduced transmission system at the local boundary covector `(|ξ_t|, 0, τ)`.
/// SH only reflects, with amplitude `−1`.
pub fn interface_branch(model: &RadialModel, s: &RayState) -> Result<Vec<Branch>> {
    let mat = interface_material(model)?;
    let xi_t = s.tangential_xi();
    let cov = BoundaryCovector::new(xi_t.abs(), 0.0, s.tau);
    let label = case_of(&cov, &mat)?;
    let sys = assemble(label.case, &cov, &mat)?;
    let incoming = crate::interface::AmplitudeSet::unit(component(s.mode));
    let sol = solve_outgoing(&sys, &incoming)?;
    let candidates: &[Mode] = if s.mode == Mode::SH { &[Mode::SH] } else { &[Mode::SV, Mode::P, Mode::F] };
    let mut out = Vec::new();
    for &m in candidates {
        let Some(a) = sol.outgoing.get(component(m)) else { continue };
        let mut event = RayEvent {
            kind: event_kind(s.mode, m),
            location: s.x,
            t: s.t,
            incident: s.mode,
            emergent: Some(m),
            amplitude: a.value,
            xi_tangential: (xi_t, xi_t),
        };
        if a.dir != Direction::Out {
            event.kind = EventKind::EvanescentBranchDropped;
            out.push(Branch { event, state: None });
            continue;
        }
        if m == Mode::SH {
            event.kind = EventKind::TotalReflect;
        }
        let st = emergent_state(s, m, mat.speed(m.speed()), xi_t, m.is_solid());
        event.xi_tangential.1 = st.tangential_xi();
        out.push(Branch { event, state: Some(st) });
    }
    Ok(out)
}

/// Kinematic reflection at the traction-free outer surface.
///
/// P and SV both convert into every propagating P/SV mode; SH reflects as SH.
/// All emergent branches carry unit amplitude.
pub fn free_surface_reflect(model: &RadialModel, s: &RayState) -> Result<Vec<Branch>> {
    let xi_t = s.tangential_xi();
    let r = s.radius();
    let modes: &[Mode] = if s.mode == Mode::SH { &[Mode::SH] } else { &[Mode::P, Mode::SV] };
    let mut out = Vec::new();
    for &m in modes {
        let c = model.speed(m.speed(), r).0;
        let (a, b) = (s.tau * s.tau, c * c * xi_t * xi_t);
        if (a - b).abs() <= DEFAULT_EPS_G * (a + b) {
            return Err(Error::Glancing(m.speed()));
        }
        let mut event = RayEvent {
            kind: event_kind(s.mode, m),
            location: s.x,
            t: s.t,
            incident: s.mode,
            emergent: Some(m),
            amplitude: C64::new(1.0, 0.0),
            xi_tangential: (xi_t, xi_t),
        };
        if a < b {
            event.kind = EventKind::EvanescentBranchDropped;
            out.push(Branch { event, state: None });
            continue;
        }
        let st = emergent_state(s, m, c, xi_t, false);
        event.xi_tangential.1 = st.tangential_xi();
        out.push(Branch { event, state: Some(st) });
    }
    Ok(out)
}

/// A ray following a prescribed phase from the source back to the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseRay {
    pub takeoff: f64,
    pub segments: Vec<Segment>,
    pub events: Vec<RayEvent>,
    pub amplitude: C64,
    pub arrival: RayState,
    /// Unwrapped epicentral angle of the arrival.
    pub theta: f64,
}

impl PhaseRay {
    pub fn time(&self) -> f64 {
        self.arrival.t
    }
}

/// Initial state at the source `(0, R_outer)`; `takeoff` is measured from the inward normal.
pub fn source_state(model: &RadialModel, mode: Mode, takeoff: f64) -> RayState {
    let c = model.speed(mode.speed(), model.r_outer).0;
    let tau: f64 = -1.0;
    let k = tau.abs() / c;
    RayState {
        x: [0.0, model.r_outer],
        xi: [k * takeoff.sin(), -k * takeoff.cos()],
        tau,
        t: 0.0,
        mode,
    }
}

/// Reduces an angle to `(−π, π]`, so a ray through the centre continues with `+π`.
fn wrap(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    a - tau * ((a - std::f64::consts::PI) / tau).ceil()
}

/// Traces `phase` from the source at the given takeoff angle.
///
/// Returns `Ok(None)` when the ray does not realise the phase, e.g. a required
/// branch is evanescent or the ray reaches the surface before its last leg.
pub fn trace_phase(model: &RadialModel, phase: &Phase, takeoff: f64, cfg: &TracerConfig) -> Result<Option<PhaseRay>> {
    if phase.enters_fluid() && !model.has_core() {
        return Err(Error::InvalidPhase(format!("{phase} needs a fluid core")));
    }
    let mut state = source_state(model, phase.legs[0], takeoff);
    let mut segments = Vec::with_capacity(phase.legs.len());
    let mut events = Vec::new();
    let mut amplitude = C64::new(1.0, 0.0);
    let mut theta = 0.0;
    let mut prev_angle = state.angle();
    for (k, &mode) in phase.legs.iter().enumerate() {
        debug_assert_eq!(state.mode, mode);
        let seg = trace_segment(model, &state, cfg)?;
        for s in &seg.samples[1..] {
            let a = s.angle();
            theta += wrap(a - prev_angle);
            prev_angle = a;
        }
        let end = *seg.last();
        let stop = seg.stop;
        segments.push(seg);
        let last_leg = k + 1 == phase.legs.len();
        match (stop, last_leg) {
            (StopReason::Surface, true) => {
                events.push(RayEvent {
                    kind: EventKind::SurfaceHit,
                    location: end.x,
                    t: end.t,
                    incident: mode,
                    emergent: None,
                    amplitude,
                    xi_tangential: (end.tangential_xi(), end.tangential_xi()),
                });
                return Ok(Some(PhaseRay { takeoff, segments, events, amplitude, arrival: end, theta }));
            }
            (StopReason::Interface, false) => {
                let next = phase.legs[k + 1];
                let branches = interface_branch(model, &end)?;
                let Some(b) = branches.into_iter().find(|b| b.event.emergent == Some(next)) else {
                    return Ok(None);
                };
                events.push(b.event);
                match b.state {
                    Some(s) => {
                        amplitude *= b.event.amplitude;
                        state = s;
                    }
                    None => return Ok(None),
                }
            }
            _ => return Ok(None),
        }
    }
    Ok(None)
}

/// One segment of a branching ray tree.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSegment {
    pub segment: Segment,
    pub parent: Option<usize>,
    /// Event that spawned this segment; `None` for the root.
    pub event: Option<RayEvent>,
    pub amplitude: C64,
    pub depth: usize,
}

/// All branches of a ray from the source, up to `max_events` boundary interactions per path.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RayTree {
    pub segments: Vec<TreeSegment>,
    /// Evanescent branches that were not propagated.
    pub dropped: Vec<RayEvent>,
    /// Branches terminated by an error, e.g. glancing incidence.
    pub diagnostics: Vec<String>,
}

pub fn trace_tree(
    model: &RadialModel,
    mode: Mode,
    takeoff: f64,
    max_events: usize,
    cfg: &TracerConfig,
) -> Result<RayTree> {
    let mut tree = RayTree::default();
    let mut queue = std::collections::VecDeque::new();
    queue.push_back((source_state(model, mode, takeoff), None, None::<RayEvent>, C64::new(1.0, 0.0), 0usize));
    while let Some((state, parent, event, amplitude, depth)) = queue.pop_front() {
        let segment = trace_segment(model, &state, cfg)?;
        let end = *segment.last();
        let stop = segment.stop;
        let id = tree.segments.len();
        tree.segments.push(TreeSegment { segment, parent, event, amplitude, depth });
        if depth >= max_events {
            continue;
        }
        let branches = match stop {
            StopReason::Interface => interface_branch(model, &end),
            StopReason::Surface => free_surface_reflect(model, &end),
            StopReason::MaxTime => continue,
        };
        match branches {
            Ok(bs) => {
                for b in bs {
                    match b.state {
                        Some(s) => queue.push_back((s, Some(id), Some(b.event), amplitude * b.event.amplitude, depth + 1)),
                        None => tree.dropped.push(b.event),
                    }
                }
            }
            Err(e) => tree.diagnostics.push(format!("segment {id} at t = {}: {e}", end.t)),
        }
    }
    Ok(tree)
}
