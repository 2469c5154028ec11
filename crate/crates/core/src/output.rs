//! Result records and their CSV/JSON encodings.
//!
//! Floats are always written with 17 significant digits and a lowercase `e`
//! exponent, so identical records give byte-identical files and every value
//! reads back bit-exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use serde::ser::Serialize;
use serde::Deserialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::collapse::Answer;
use crate::config::{OutputFormat, ScenarioConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::estimates::EstimateReport;
use crate::zeno::{ProtocolEcho, TrajectoryRecord};

pub const CSV_HEADER: &str = "scenario,N,d,survival,stderr,seed";

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct ResultPoint {
    pub event_count: usize,
    pub interval: f64,
    pub survival: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct SweepSummary {
    pub slope: f64,
    pub intercept: f64,
    pub doubling_ratios: Vec<(usize, f64)>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct BranchSummary {
    pub terminal_count: u32,
    pub release_probability: f64,
    pub trace: f64,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct PipelineRecord {
    pub step: usize,
    pub op: String,
    pub time: f64,
    pub trace: f64,
    pub projector: String,
    pub probability_yes: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<Answer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_probability: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize, Deserialize)]
pub struct ResultRecord {
    pub scenario: ScenarioConfig,
    pub library_version: String,
    pub points: Vec<ResultPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub protocol: Option<ProtocolEcho>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_yes_counts: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<Vec<TrajectoryRecord>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Vec<PipelineRecord>>,
    /// Kept out of the files so that reruns are byte-identical.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ResultRecord {
    pub fn new(scenario: ScenarioConfig) -> Self {
        ResultRecord {
            scenario,
            library_version: crate::VERSION.to_string(),
            points: Vec::new(),
            protocol: None,
            sweep: None,
            event_yes_counts: None,
            trajectories: None,
            estimate: None,
            branch: None,
            pipeline: None,
            wall_time: Duration::ZERO,
        }
    }
}

/// 17 significant digits, lowercase exponent.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with fixed float formatting.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// CSV encoding. Curve scenarios use [`CSV_HEADER`]; `calcium` writes
/// `quantity,value,unit` rows and `branch` writes `pattern,releases,weight`.
pub fn to_csv_string(r: &ResultRecord) -> String {
    let mut out = String::new();
    match (&r.estimate, &r.branch) {
        (Some(e), _) if r.scenario.scenario == ScenarioKind::Calcium => {
            out.push_str("quantity,value,unit\n");
            let rows = [
                ("delta_v", e.delta_v, "m/s"),
                ("v_thermal", e.v_thermal, "m/s"),
                ("velocity_ratio", e.velocity_ratio, "1"),
                ("transit_time", e.transit_time, "s"),
                ("spread_at_trigger", e.spread_at_trigger, "m"),
                ("spread_to_ion_size", e.spread_to_ion_size, "1"),
            ];
            for (name, v, unit) in rows {
                out.push_str(&format!("{name},{},{unit}\n", format_f64(v)));
            }
        }
        (_, Some(b)) if r.scenario.scenario == ScenarioKind::Branch => {
            out.push_str("pattern,releases,weight\n");
            for (pattern, w) in b.weights.iter().enumerate() {
                out.push_str(&format!("{pattern},{},{}\n", pattern.count_ones(), format_f64(*w)));
            }
        }
        _ => {
            out.push_str(CSV_HEADER);
            out.push('\n');
            let name = r.scenario.scenario.name();
            for p in &r.points {
                out.push_str(&format!(
                    "{name},{},{},{},{},{}\n",
                    p.event_count,
                    format_f64(p.interval),
                    format_f64(p.survival),
                    opt_f64(p.stderr),
                    p.seed.map(|s| s.to_string()).unwrap_or_default(),
                ));
            }
        }
    }
    out
}

pub fn render(r: &ResultRecord, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(to_csv_string(r)),
        OutputFormat::Json => to_json_string(r),
    }
}

/// Writes the record to `path` in the given format.
pub fn emit_results(r: &ResultRecord, format: OutputFormat, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let text = render(r, format)?;
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes()).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Reads a JSON result file back.
pub fn read_json_record(path: &Path) -> Result<ResultRecord> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(serde_json::from_str(&text)?)
}
