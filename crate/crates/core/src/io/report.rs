//! Versioned JSON report emitted by every CLI command.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::graph::Graph;
use crate::spectral::Spectrum;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub spec: String,
    pub n: usize,
    pub edges: usize,
    pub fingerprint: String,
    /// Distinct eigenvalues with multiplicities, descending.
    pub spectrum: Vec<(f64, usize)>,
}

impl GraphSummary {
    pub fn new(spec: &str, graph: &Graph, spectrum: &Spectrum) -> Self {
        GraphSummary {
            spec: spec.to_string(),
            n: graph.n(),
            edges: graph.edge_count(),
            fingerprint: graph.fingerprint(),
            spectrum: spectrum.eigenvalues().iter().copied().zip(spectrum.multiplicities().iter().copied()).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eigen_tol: f64,
    pub zero_tol: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Value,
    pub graph: Option<GraphSummary>,
    pub tolerances: Tolerances,
    pub results: Value,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Report> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_is_byte_identical() {
        let g = crate::graph::GeneratorSpec::Petersen.build().unwrap();
        let report = Report {
            schema_version: SCHEMA_VERSION,
            command: json!({"verb": "check", "time": "2pi/3"}),
            graph: Some(GraphSummary::new("petersen", &g, &crate::spectral::decompose(&g, None).unwrap())),
            tolerances: Tolerances { eigen_tol: 3e-8, zero_tol: 1e-9 },
            results: json!({"residual": 0.1 + 0.2, "tiny": 1.2345678901234567e-300, "holds": false}),
            warnings: vec!["borderline entry".into()],
        };
        let text = report.to_json().unwrap();
        let back = Report::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json().unwrap(), text);
    }
}
