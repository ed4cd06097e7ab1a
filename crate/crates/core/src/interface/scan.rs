use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::media::MaterialPoint;
use crate::microlocal::BoundaryCovector;

use super::{case_of, solve, AmplitudeSet, Case, Component};

/// Incident wave for an angle scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Incident {
    P,
    Sv,
    Sh,
    F,
}

impl Incident {
    pub fn component(self) -> Component {
        match self {
            Incident::P => Component::BP,
            Incident::Sv => Component::B2S,
            Incident::Sh => Component::B1S,
            Incident::F => Component::BF,
        }
    }

    pub fn speed(self, mat: &MaterialPoint) -> f64 {
        match self {
            Incident::P => mat.c_p,
            Incident::Sv | Incident::Sh => mat.c_s,
            Incident::F => mat.c_f,
        }
    }

    pub fn parse(s: &str) -> Option<Incident> {
        match s.to_ascii_lowercase().as_str() {
            "p" => Some(Incident::P),
            "sv" | "s" => Some(Incident::Sv),
            "sh" => Some(Incident::Sh),
            "f" | "fluid" => Some(Incident::F),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub theta_deg: f64,
    pub xi1: f64,
    pub case: Option<Case>,
    pub outgoing: Option<AmplitudeSet>,
    pub det_abs: Option<f64>,
    /// Why the angle was skipped (glancing or inadmissible incidence).
    pub skipped: Option<String>,
}

/// Reflection/transmission amplitudes against incidence angle.
///
/// Angle `θ` maps to `ξ₁ = |τ| sin θ / c_incident`; a unit amplitude of the
/// incident mode is imposed. Rows keep the order of `angles_deg`.
pub fn angle_scan(mat: &MaterialPoint, incident: Incident, angles_deg: &[f64], tau: f64) -> Vec<ScanRow> {
    let c = incident.speed(mat);
    angles_deg
        .par_iter()
        .map(|&deg| {
            let xi1 = tau.abs() * deg.to_radians().sin() / c;
            let cov = BoundaryCovector::new(xi1, 0.0, tau);
            let skip = |why: String| ScanRow { theta_deg: deg, xi1, case: None, outgoing: None, det_abs: None, skipped: Some(why) };
            let label = match case_of(&cov, mat) {
                Ok(l) => l,
                Err(e) => return skip(e.to_string()),
            };
            match solve(&cov, mat, &AmplitudeSet::unit(incident.component())) {
                Ok(sol) => ScanRow {
                    theta_deg: deg,
                    xi1,
                    case: Some(label.case),
                    outgoing: Some(sol.outgoing),
                    det_abs: Some(sol.det_numeric.norm()),
                    skipped: None,
                },
                Err(e) => ScanRow { case: Some(label.case), ..skip(e.to_string()) },
            }
        })
        .collect()
}
