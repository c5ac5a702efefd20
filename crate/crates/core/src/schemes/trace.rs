use serde::{Deserialize, Serialize};

use super::Scheme;
use crate::hilbert::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `|x_n - S u_n|`
    pub x_su: f64,
    /// `|y_n - x_n|`
    pub y_x: f64,
    /// `|x_n - u_n|`
    pub x_u: f64,
    /// `|u_n - S u_n|`
    pub u_su: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.x_su.max(self.y_x).max(self.x_u).max(self.u_su)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.x_su, self.y_x, self.x_u, self.u_su]
    }

    pub const NAMES: [&'static str; 4] = ["res_x_Su", "res_y_x", "res_x_u", "res_u_Su"];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vector>,
    pub alpha: f64,
    pub beta: f64,
    pub r: f64,
    pub residuals: Residuals,
    /// `|x_n - q|` for the problem's known solution `q`.
    pub dist_q: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalStatus {
    Converged,
    MaxIter,
    InnerSolverFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMode {
    #[default]
    Full,
    /// Keeps schedule values and residuals only.
    Thin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub scheme: Scheme,
    pub dim: usize,
    pub mode: TraceMode,
    pub records: Vec<Record>,
    /// Last iterate whose residuals were recorded.
    pub final_x: Vector,
    /// The iterate produced by the last recorded step; absent after an
    /// inner solver failure.
    pub next_x: Option<Vector>,
    pub status: TerminalStatus,
    #[serde(default)]
    pub failure: Option<String>,
    #[serde(default)]
    pub advisories: Vec<String>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&Record> {
        self.records.last()
    }

    /// `x_1, ..., x_N` followed by `x_{N+1}` when known, or by the unrecorded
    /// iterate the inner solver failed on; `None` in thin mode.
    pub fn iterates(&self) -> Option<Vec<&Vector>> {
        let mut xs = self.records.iter().map(|r| r.x.as_ref()).collect::<Option<Vec<_>>>()?;
        match (&self.next_x, self.status) {
            (Some(next), _) => xs.push(next),
            (None, TerminalStatus::InnerSolverFailure) => xs.push(&self.final_x),
            (None, _) => {}
        }
        Some(xs)
    }

    /// Residual series in the order of [`Residuals::NAMES`].
    pub fn residual_series(&self) -> [Vec<f64>; 4] {
        let mut out: [Vec<f64>; 4] = Default::default();
        for record in &self.records {
            for (series, value) in out.iter_mut().zip(record.residuals.as_array()) {
                series.push(value);
            }
        }
        out
    }
}
