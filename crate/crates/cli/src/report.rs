//! The JSON report written by every subcommand.

use qrlab::analysis::{EquiReport, FastGrowthVerdict, GrowthReport, HigherIntegrabilityReport, HolderReport, SignVerdict};
use qrlab::curves::{DistortionReport, ObstructionSet, ProbeResult};
use qrlab::exterior::ComassResult;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub pass: bool,
    pub summary: String,
    pub seed: u64,
    pub body: ReportBody,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum ReportBody {
    Comass { result: ComassResult, pointwise: f64 },
    Distortion(DistortionReport),
    Growth { growth: GrowthReport, fast_growth: Option<FastGrowthVerdict> },
    Rhi(HolderReport),
    Prop4(HolderReport),
    Higherint(HigherIntegrabilityReport),
    Equi(EquiReport),
    Density { probe: ProbeResult, obstruction: Option<ObstructionSet>, threshold: f64, rational: bool },
    Signed { verdict: SignVerdict, reconstruction_error: Option<f64> },
}

impl RunReport {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }
}

/// Plot data: a fixed header per subcommand and one row per radius or ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn to_csv(&self) -> csv::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}
