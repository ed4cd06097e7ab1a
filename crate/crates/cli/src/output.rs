//! Serialized result types. Every type round-trips through JSON unchanged.

use std::collections::BTreeMap;

use interface_lab::interface::{AmplitudeSet, Case, Component, Direction, ScanRow, TransmissionSolution};
use interface_lab::inverse::RecoveryReport;
use interface_lab::microlocal::{FluidRegion, RegionLabel, SolidRegion, TauSign};
use interface_lab::rays::{EventKind, Mode, RayEvent, RayTree, StopReason};
use interface_lab::scholte::ScholteMode;
use interface_lab::C64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for Cx {
    fn from(z: C64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regions {
    pub solid: SolidRegion,
    pub fluid: FluidRegion,
}

impl From<RegionLabel> for Regions {
    fn from(l: RegionLabel) -> Self {
        Regions { solid: l.solid, fluid: l.fluid }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeOut {
    pub value: Cx,
    pub dir: Direction,
}

/// Present components keyed by name (`b1s`, `b2s`, `bp`, `bf`).
pub fn amplitudes(set: &AmplitudeSet) -> BTreeMap<String, AmplitudeOut> {
    Component::ALL
        .into_iter()
        .filter_map(|c| set.get(c).map(|a| (c.name().to_string(), AmplitudeOut { value: a.value.into(), dir: a.dir })))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub case: Case,
    pub tau_sign: TauSign,
    pub incoming: BTreeMap<String, AmplitudeOut>,
    pub outgoing: BTreeMap<String, AmplitudeOut>,
    pub residual: f64,
    pub det_numeric: Cx,
    pub det_closed_form: Cx,
    pub conditioning_warning: bool,
}

impl Solution {
    pub fn new(incoming: &AmplitudeSet, s: &TransmissionSolution) -> Self {
        Solution {
            case: s.label.case,
            tau_sign: s.label.tau_sign,
            incoming: amplitudes(incoming),
            outgoing: amplitudes(&s.outgoing),
            residual: s.residual,
            det_numeric: s.det_numeric.into(),
            det_closed_form: s.det_closed_form.into(),
            conditioning_warning: s.conditioning_warning,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScholteOut {
    pub c_sc: f64,
    pub c_sc_sq: f64,
    /// Secular function at the root.
    pub residual: f64,
    pub bracket: (f64, f64),
    pub mode: ScholteModeOut,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScholteModeOut {
    /// Covector `(ξ₁, ξ₂, τ)` at which the kernel was computed.
    pub covector: [f64; 3],
    pub amplitudes: BTreeMap<String, AmplitudeOut>,
    pub kernel_residual: f64,
    pub singular_values: [f64; 3],
}

impl From<&ScholteMode> for ScholteOut {
    fn from(m: &ScholteMode) -> Self {
        ScholteOut {
            c_sc: m.root.c_sc(),
            c_sc_sq: m.root.c_sc_sq,
            residual: m.root.residual,
            bracket: m.root.bracket,
            mode: ScholteModeOut {
                covector: [m.covector.xi1, m.covector.xi2, m.covector.tau],
                amplitudes: amplitudes(&m.amplitudes),
                kernel_residual: m.residual,
                singular_values: m.singular_values,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventOut {
    pub kind: EventKind,
    pub location: [f64; 2],
    pub t: f64,
    pub incident: Mode,
    pub emergent: Option<Mode>,
    pub amplitude: Cx,
    pub xi_tangential: [f64; 2],
}

impl From<&RayEvent> for EventOut {
    fn from(e: &RayEvent) -> Self {
        EventOut {
            kind: e.kind,
            location: e.location,
            t: e.t,
            incident: e.incident,
            emergent: e.emergent,
            amplitude: e.amplitude.into(),
            xi_tangential: [e.xi_tangential.0, e.xi_tangential.1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentOut {
    pub mode: Mode,
    /// `[t, x, y]` per accepted step.
    pub samples: Vec<[f64; 3]>,
    pub stop: String,
    /// Event that spawned the segment; `null` for the source leg.
    pub event: Option<EventOut>,
    pub parent: Option<usize>,
    pub amplitude: Cx,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOut {
    pub mode: Mode,
    pub takeoff_deg: f64,
    pub segments: Vec<SegmentOut>,
    pub dropped: Vec<EventOut>,
    pub diagnostics: Vec<String>,
}

impl TraceOut {
    pub fn new(mode: Mode, takeoff_deg: f64, tree: &RayTree) -> Self {
        let segments = tree
            .segments
            .iter()
            .map(|s| SegmentOut {
                mode: s.segment.mode,
                samples: s.segment.samples.iter().map(|r| [r.t, r.x[0], r.x[1]]).collect(),
                stop: match s.segment.stop {
                    StopReason::Interface => "interface",
                    StopReason::Surface => "surface",
                    StopReason::MaxTime => "max_time",
                }
                .to_string(),
                event: s.event.as_ref().map(EventOut::from),
                parent: s.parent,
                amplitude: s.amplitude.into(),
                depth: s.depth,
            })
            .collect();
        TraceOut {
            mode,
            takeoff_deg,
            segments,
            dropped: tree.dropped.iter().map(EventOut::from).collect(),
            diagnostics: tree.diagnostics.clone(),
        }
    }
}

/// One row of a travel-time table CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub delta_deg: f64,
    pub phase: String,
    pub time: f64,
    pub takeoff_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    /// `fluid` for refracted core phases, `direct` for a solid ball.
    pub method: String,
    pub records_used: usize,
    pub report: RecoveryReport,
}

pub const SCAN_HEADER: [&str; 17] = [
    "theta_deg", "xi1", "case", "b1s_re", "b1s_im", "b1s_dir", "b2s_re", "b2s_im", "b2s_dir", "bp_re", "bp_im",
    "bp_dir", "bf_re", "bf_im", "bf_dir", "det_abs", "skipped",
];

/// CSV fields of a scan row in `SCAN_HEADER` order.
pub fn scan_record(row: &ScanRow) -> Vec<String> {
    let mut rec = vec![row.theta_deg.to_string(), row.xi1.to_string(), row.case.map_or(String::new(), |c| c.name().into())];
    for c in Component::ALL {
        match row.outgoing.and_then(|o| o.get(c)) {
            Some(a) => {
                rec.push(a.value.re.to_string());
                rec.push(a.value.im.to_string());
                rec.push(format!("{:?}", a.dir).to_lowercase());
            }
            None => rec.extend([String::new(), String::new(), String::new()]),
        }
    }
    rec.push(row.det_abs.map_or(String::new(), |d| d.to_string()));
    rec.push(row.skipped.clone().unwrap_or_default());
    rec
}
