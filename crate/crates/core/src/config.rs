//! Scenario configuration (a single JSON document) and its validation into
//! library types. Every validation failure is an [`Error::Config`] naming the
//! offending field.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channels::{BranchConfig, DephasingChannel, Hamiltonian};
use crate::error::{Error, Result};
use crate::estimates::{IonParameters, ATOMIC_MASS_UNIT};
use crate::opalg::{random_hermitian, ComplexMatrix, Projector, WeightOperator};
use crate::zeno::{effort_to_interval, EffortSetting, RunMode, ZenoProtocol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Zeno,
    ZenoSweep,
    Calcium,
    Branch,
    CustomPipeline,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Zeno => "zeno",
            ScenarioKind::ZenoSweep => "zeno-sweep",
            ScenarioKind::Calcium => "calcium",
            ScenarioKind::Branch => "branch",
            ScenarioKind::CustomPipeline => "custom-pipeline",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Expected,
    Sampled,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Json,
}

impl OutputFormat {
    /// `.csv` means CSV; anything else JSON.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => OutputFormat::Csv,
            _ => OutputFormat::Json,
        }
    }
}

/// A complex entry written as `[re, im]`.
pub type Entry = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HamiltonianConfig {
    /// `(ω/2) σ_x` on two levels.
    Rabi { omega: f64 },
    /// Entries uniform in the unit square, times `scale` (default 1).
    RandomHermitian {
        seed: u64,
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    /// Rows of `[re, im]` entries.
    Explicit { entries: Vec<Vec<Entry>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProjectorConfig {
    /// Projector onto computational basis vectors.
    Basis {
        indices: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
    Explicit {
        entries: Vec<Vec<Entry>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        label: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum StateConfig {
    Basis { index: usize },
    Diagonal { weights: Vec<f64> },
    Pure { amplitudes: Vec<Entry> },
    Explicit { entries: Vec<Vec<Entry>> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingConfig {
    pub rate: f64,
    /// Unitary whose columns are the pointer vectors; computational basis
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Entry>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EffortConfig {
    pub effort: f64,
    pub rate_min: f64,
    pub rate_max: f64,
}

/// Ion parameters in lab-friendly units; calcium defaults for missing fields.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IonConfig {
    pub mass_u: f64,
    pub temperature_k: f64,
    pub channel_width_nm: f64,
    pub transit_distance_nm: f64,
    pub ion_diameter_nm: f64,
}

impl Default for IonConfig {
    fn default() -> Self {
        let ca = IonParameters::calcium();
        IonConfig {
            mass_u: ca.mass / ATOMIC_MASS_UNIT,
            temperature_k: ca.temperature,
            channel_width_nm: ca.confinement_width * 1e9,
            transit_distance_nm: ca.transit_distance * 1e9,
            ion_diameter_nm: ca.ion_diameter * 1e9,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub terminal_count: u32,
    pub release_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PipelineStep {
    /// Unitary step under the configured Hamiltonian.
    Evolve { duration: f64 },
    /// Dephasing under the configured channel.
    Dephase { duration: f64 },
    /// Process 1 with the current projector.
    Process1,
    /// Imposes an answer without sampling, then renormalizes.
    Answer { value: crate::collapse::Answer },
    /// Samples Nature's answer for the current projector, then renormalizes.
    Sample,
    /// Replaces the current projector with the candidate of largest weight.
    Select { candidates: Vec<ProjectorConfig> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hamiltonian: Option<HamiltonianConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub projector: Option<ProjectorConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dephasing: Option<DephasingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_state: Option<StateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effort: Option<EffortConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectories: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root_seed: Option<u64>,
    #[serde(default)]
    pub record_events: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ion: Option<IonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<BranchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<Vec<PipelineStep>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

impl ScenarioConfig {
    /// Empty config of the given kind; every optional field unset.
    pub fn new(scenario: ScenarioKind) -> Self {
        ScenarioConfig {
            scenario,
            hamiltonian: None,
            projector: None,
            dephasing: None,
            initial_state: None,
            total_time: None,
            event_count: None,
            effort: None,
            counts: None,
            mode: None,
            trajectories: None,
            root_seed: None,
            record_events: false,
            ion: None,
            branch: None,
            pipeline: None,
            output: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::config("<document>", e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
            field: "--config".into(),
            reason: format!("{}: {e}", path.display()),
        })?;
        Self::from_json(&text)
    }

    pub fn output_path(&self) -> Option<&Path> {
        self.output.as_ref().and_then(|o| o.path.as_deref())
    }

    /// Explicit format, else inferred from the output path, else JSON.
    pub fn output_format(&self) -> OutputFormat {
        match &self.output {
            Some(OutputConfig { format: Some(f), .. }) => *f,
            Some(OutputConfig { path: Some(p), .. }) => OutputFormat::from_path(p),
            _ => OutputFormat::Json,
        }
    }

    pub fn mode(&self) -> ModeName {
        self.mode.unwrap_or(ModeName::Expected)
    }

    /// Builds every module value the scenario needs, rejecting the first
    /// invariant violation.
    pub fn validate(&self) -> Result<()> {
        match self.scenario {
            ScenarioKind::Zeno => {
                self.zeno_protocol()?;
            }
            ScenarioKind::ZenoSweep => {
                self.sweep_counts()?;
                self.zeno_protocol()?;
            }
            ScenarioKind::Calcium => {
                self.ion_parameters()?;
            }
            ScenarioKind::Branch => {
                self.branch_config()?;
            }
            ScenarioKind::CustomPipeline => {
                self.pipeline_setup()?;
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian> {
        let cfg = self
            .hamiltonian
            .as_ref()
            .ok_or_else(|| Error::config("hamiltonian", "required for this scenario"))?;
        let field = "hamiltonian";
        match cfg {
            HamiltonianConfig::Rabi { omega } => {
                if !omega.is_finite() {
                    return Err(Error::config("hamiltonian.omega", "must be finite"));
                }
                Ok(Hamiltonian::rabi(*omega))
            }
            HamiltonianConfig::RandomHermitian { seed, dim, scale } => {
                if *dim == 0 {
                    return Err(Error::config("hamiltonian.dim", "must be at least 1"));
                }
                let scale = scale.unwrap_or(1.0);
                if !scale.is_finite() {
                    return Err(Error::config("hamiltonian.scale", "must be finite"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Hamiltonian::new(random_hermitian(&mut rng, *dim).scale(scale))
                    .map_err(|e| Error::config(field, e.to_string()))
            }
            HamiltonianConfig::Explicit { entries } => {
                let m = matrix_from_entries(entries, "hamiltonian.entries")?;
                Hamiltonian::new(m).map_err(|e| Error::config(field, e.to_string()))
            }
        }
    }

    pub fn projector(&self) -> Result<Projector> {
        let cfg = self
            .projector
            .as_ref()
            .ok_or_else(|| Error::config("projector", "required for this scenario"))?;
        let dim = self.dim()?;
        build_projector(cfg, dim, "projector")
    }

    /// System dimension, taken from the Hamiltonian.
    pub fn dim(&self) -> Result<usize> {
        Ok(self.hamiltonian()?.dim())
    }

    pub fn dephasing(&self) -> Result<Option<DephasingChannel>> {
        let Some(cfg) = &self.dephasing else {
            return Ok(None);
        };
        let dim = self.dim()?;
        let basis = match &cfg.basis {
            Some(entries) => matrix_from_entries(entries, "dephasing.basis")?,
            None => ComplexMatrix::identity(dim),
        };
        if basis.dim() != dim {
            return Err(Error::config(
                "dephasing.basis",
                format!("dimension {} does not match system dimension {dim}", basis.dim()),
            ));
        }
        DephasingChannel::new(basis, cfg.rate)
            .map(Some)
            .map_err(|e| Error::config("dephasing", e.to_string()))
    }

    /// Initial state; defaults to the first basis vector of a basis projector.
    pub fn initial_state(&self) -> Result<WeightOperator> {
        let dim = self.dim()?;
        let field = "initial_state";
        let cfg = match (&self.initial_state, &self.projector) {
            (Some(s), _) => s.clone(),
            (None, Some(ProjectorConfig::Basis { indices, .. })) if !indices.is_empty() => {
                StateConfig::Basis { index: indices[0] }
            }
            _ => {
                return Err(Error::config(
                    field,
                    "required unless the projector is a basis projector",
                ))
            }
        };
        let state = match &cfg {
            StateConfig::Basis { index } => WeightOperator::basis_state(dim, *index),
            StateConfig::Diagonal { weights } => {
                if weights.len() != dim {
                    return Err(Error::config(
                        "initial_state.weights",
                        format!("expected {dim} weights, got {}", weights.len()),
                    ));
                }
                WeightOperator::new(ComplexMatrix::from_diagonal(weights))
            }
            StateConfig::Pure { amplitudes } => {
                if amplitudes.len() != dim {
                    return Err(Error::config(
                        "initial_state.amplitudes",
                        format!("expected {dim} amplitudes, got {}", amplitudes.len()),
                    ));
                }
                let v: Vec<Complex64> = amplitudes.iter().map(|e| Complex64::new(e[0], e[1])).collect();
                WeightOperator::pure(&v)
            }
            StateConfig::Explicit { entries } => {
                let m = matrix_from_entries(entries, "initial_state.entries")?;
                if m.dim() != dim {
                    return Err(Error::config(
                        "initial_state.entries",
                        format!("dimension {} does not match system dimension {dim}", m.dim()),
                    ));
                }
                WeightOperator::new(m)
            }
        };
        state.map_err(|e| Error::config(field, e.to_string()))
    }

    pub fn total_time(&self) -> Result<f64> {
        let t = self
            .total_time
            .ok_or_else(|| Error::config("total_time", "required for this scenario"))?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::config("total_time", format!("{t} must be positive")));
        }
        Ok(t)
    }

    /// `event_count`, or the count implied by `effort`; exactly one is allowed.
    pub fn event_count(&self) -> Result<usize> {
        match (self.event_count, &self.effort) {
            (Some(_), Some(_)) => Err(Error::config("effort", "give either event_count or effort, not both")),
            (Some(0), None) => Err(Error::config("event_count", "must be at least 1")),
            (Some(n), None) => Ok(n),
            (None, Some(e)) => {
                let setting = EffortSetting::new(e.effort, e.rate_min, e.rate_max)
                    .map_err(|err| Error::config("effort", err.to_string()))?;
                Ok(effort_to_interval(&setting, self.total_time()?))
            }
            (None, None) => Err(Error::config("event_count", "event_count or effort is required")),
        }
    }

    pub fn run_mode(&self) -> Result<RunMode> {
        match self.mode() {
            ModeName::Expected => Ok(RunMode::Expected),
            ModeName::Sampled => {
                let trajectories = self
                    .trajectories
                    .ok_or_else(|| Error::config("trajectories", "required in sampled mode"))?;
                if trajectories == 0 {
                    return Err(Error::config("trajectories", "must be at least 1"));
                }
                let root_seed = self
                    .root_seed
                    .ok_or_else(|| Error::config("root_seed", "required in sampled mode"))?;
                Ok(RunMode::Sampled {
                    trajectories,
                    root_seed,
                })
            }
        }
    }

    /// Protocol and initial state. For sweeps the event count is a
    /// placeholder replaced per sweep point.
    pub fn zeno_protocol(&self) -> Result<(ZenoProtocol, WeightOperator)> {
        let h = self.hamiltonian()?;
        let p = self.projector()?;
        let t = self.total_time()?;
        let n = match self.scenario {
            ScenarioKind::ZenoSweep => 1,
            _ => self.event_count()?,
        };
        let mut protocol = ZenoProtocol::new(t, n, h, p).map_err(|e| Error::config("protocol", e.to_string()))?;
        if let Some(ch) = self.dephasing()? {
            protocol = protocol
                .with_dephasing(ch)
                .map_err(|e| Error::config("dephasing", e.to_string()))?;
        }
        protocol = protocol
            .with_mode(self.run_mode()?)
            .map_err(|e| Error::config("mode", e.to_string()))?;
        let initial = self.initial_state()?;
        let inside = initial.matrix().trace_product(protocol.projector().matrix()).re;
        if (initial.trace() - inside).abs() > crate::opalg::VALIDITY_TOL * initial.trace() {
            return Err(Error::config(
                "initial_state",
                "must lie inside the projector's subspace",
            ));
        }
        Ok((protocol, initial))
    }

    pub fn sweep_counts(&self) -> Result<Vec<usize>> {
        let counts = self
            .counts
            .clone()
            .ok_or_else(|| Error::config("counts", "required for zeno-sweep"))?;
        if counts.len() < 2 {
            return Err(Error::config("counts", "at least two event counts required"));
        }
        if counts.contains(&0) {
            return Err(Error::config("counts", "event counts must be at least 1"));
        }
        if self.mode() == ModeName::Sampled {
            return Err(Error::config("mode", "zeno-sweep runs in expected mode only"));
        }
        Ok(counts)
    }

    pub fn ion_parameters(&self) -> Result<IonParameters> {
        let c = self.ion.unwrap_or_default();
        IonParameters::new(
            c.mass_u * ATOMIC_MASS_UNIT,
            c.temperature_k,
            c.channel_width_nm * 1e-9,
            c.transit_distance_nm * 1e-9,
            c.ion_diameter_nm * 1e-9,
        )
        .map_err(|e| match e {
            Error::InvalidArgument { field, reason } => Error::config(format!("ion.{field}"), reason),
            other => Error::config("ion", other.to_string()),
        })
    }

    pub fn branch_config(&self) -> Result<BranchConfig> {
        let b = self
            .branch
            .ok_or_else(|| Error::config("branch", "required for the branch scenario"))?;
        BranchConfig::new(b.terminal_count, b.release_probability).map_err(|e| match e {
            Error::InvalidArgument { field, reason } => Error::config(format!("branch.{field}"), reason),
            other => Error::config("branch.terminal_count", other.to_string()),
        })
    }

    /// Validated pipeline: steps, initial projector, candidate projector
    /// lists per `select` step, and the initial state.
    pub(crate) fn pipeline_setup(&self) -> Result<PipelineSetup> {
        let steps = self
            .pipeline
            .clone()
            .ok_or_else(|| Error::config("pipeline", "required for custom-pipeline"))?;
        if self.mode() == ModeName::Sampled {
            return Err(Error::config(
                "mode",
                "custom-pipeline samples through `sample` steps, not the mode field",
            ));
        }
        let hamiltonian = self.hamiltonian()?;
        let dim = hamiltonian.dim();
        let projector = self.projector()?;
        let dephasing = self.dephasing()?;
        let state = self.initial_state()?;
        let mut candidates = Vec::new();
        for (i, step) in steps.iter().enumerate() {
            match step {
                PipelineStep::Evolve { duration } | PipelineStep::Dephase { duration } => {
                    if !(*duration >= 0.0 && duration.is_finite()) {
                        return Err(Error::config(
                            format!("pipeline[{i}].duration"),
                            "must be finite and >= 0",
                        ));
                    }
                    if matches!(step, PipelineStep::Dephase { .. }) && dephasing.is_none() {
                        return Err(Error::config(
                            "dephasing",
                            format!("pipeline[{i}] dephases but no channel is configured"),
                        ));
                    }
                }
                PipelineStep::Sample => {
                    if self.root_seed.is_none() {
                        return Err(Error::config("root_seed", format!("pipeline[{i}] samples an answer")));
                    }
                }
                PipelineStep::Select { candidates: list } => {
                    if list.is_empty() {
                        return Err(Error::config(
                            format!("pipeline[{i}].candidates"),
                            "candidate list is empty",
                        ));
                    }
                    let built = list
                        .iter()
                        .enumerate()
                        .map(|(k, c)| build_projector(c, dim, &format!("pipeline[{i}].candidates[{k}]")))
                        .collect::<Result<Vec<_>>>()?;
                    candidates.push(built);
                }
                PipelineStep::Process1 | PipelineStep::Answer { .. } => {}
            }
        }
        Ok(PipelineSetup {
            steps,
            hamiltonian,
            projector,
            dephasing,
            state,
            candidates,
            root_seed: self.root_seed.unwrap_or(0),
        })
    }
}

pub(crate) struct PipelineSetup {
    pub steps: Vec<PipelineStep>,
    pub hamiltonian: Hamiltonian,
    pub projector: Projector,
    pub dephasing: Option<DephasingChannel>,
    pub state: WeightOperator,
    pub candidates: Vec<Vec<Projector>>,
    pub root_seed: u64,
}

fn build_projector(cfg: &ProjectorConfig, dim: usize, field: &str) -> Result<Projector> {
    match cfg {
        ProjectorConfig::Basis { indices, label } => {
            if indices.is_empty() {
                return Err(Error::config(format!("{field}.indices"), "at least one index required"));
            }
            let label = label.clone().unwrap_or_else(|| format!("basis{indices:?}"));
            Projector::onto_basis(dim, indices, label)
                .map_err(|e| Error::config(format!("{field}.indices"), e.to_string()))
        }
        ProjectorConfig::Explicit { entries, label } => {
            let m = matrix_from_entries(entries, &format!("{field}.entries"))?;
            if m.dim() != dim {
                return Err(Error::config(
                    format!("{field}.entries"),
                    format!("dimension {} does not match system dimension {dim}", m.dim()),
                ));
            }
            Projector::new(m, label.clone().unwrap_or_else(|| "P".into()))
                .map_err(|e| Error::config(field.to_string(), e.to_string()))
        }
    }
}

fn matrix_from_entries(rows: &[Vec<Entry>], field: &str) -> Result<ComplexMatrix> {
    let dim = rows.len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::config(field, "entries must form a non-empty square matrix"));
    }
    let flat: Vec<Complex64> = rows.iter().flatten().map(|e| Complex64::new(e[0], e[1])).collect();
    ComplexMatrix::from_row_major(dim, &flat).map_err(|e| Error::config(field, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeno_json() -> &'static str {
        r#"{
            "scenario": "zeno",
            "hamiltonian": {"preset": "rabi", "omega": 1.0},
            "projector": {"kind": "basis", "indices": [0]},
            "total_time": 3.141592653589793,
            "event_count": 100
        }"#
    }

    fn field_of(e: Error) -> String {
        match e {
            Error::Config { field, .. } => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn parses_and_validates_zeno() {
        let cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.validate().unwrap();
        let (p, s) = cfg.zeno_protocol().unwrap();
        assert_eq!(p.event_count(), 100);
        assert_eq!(s, WeightOperator::basis_state(2, 0).unwrap());
    }

    #[test]
    fn unknown_field_rejected() {
        let err = ScenarioConfig::from_json(r#"{"scenario": "zeno", "bogus": 1}"#).unwrap_err();
        assert!(err.is_config_error());
    }

    #[test]
    fn sampled_mode_needs_seed_and_trajectories() {
        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.mode = Some(ModeName::Sampled);
        cfg.trajectories = Some(10);
        assert_eq!(field_of(cfg.validate().unwrap_err()), "root_seed");
        cfg.root_seed = Some(1);
        cfg.trajectories = None;
        assert_eq!(field_of(cfg.validate().unwrap_err()), "trajectories");
    }

    #[test]
    fn rejections_name_the_field() {
        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.total_time = Some(-1.0);
        assert_eq!(field_of(cfg.validate().unwrap_err()), "total_time");

        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.projector = Some(ProjectorConfig::Basis {
            indices: vec![5],
            label: None,
        });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "projector.indices");

        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.hamiltonian = Some(HamiltonianConfig::Explicit {
            entries: vec![vec![[0.0, 0.0], [1.0, 0.0]], vec![[0.0, 0.0], [0.0, 0.0]]],
        });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "hamiltonian");

        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.initial_state = Some(StateConfig::Basis { index: 1 });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "initial_state");

        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.dephasing = Some(DephasingConfig {
            rate: -2.0,
            basis: None,
        });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "dephasing");

        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.effort = Some(EffortConfig {
            effort: 0.5,
            rate_min: 1.0,
            rate_max: 2.0,
        });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "effort");
    }

    #[test]
    fn effort_sets_event_count() {
        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.event_count = None;
        let t = cfg.total_time.unwrap();
        cfg.effort = Some(EffortConfig {
            effort: 1.0,
            rate_min: 1.0 / t,
            rate_max: 100.0 / t,
        });
        assert_eq!(cfg.event_count().unwrap(), 100);
    }

    #[test]
    fn branch_and_ion_rejections() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Branch);
        assert_eq!(field_of(cfg.validate().unwrap_err()), "branch");
        cfg.branch = Some(BranchSpec {
            terminal_count: 25,
            release_probability: 0.5,
        });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "branch.terminal_count");
        cfg.branch = Some(BranchSpec {
            terminal_count: 2,
            release_probability: 2.0,
        });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "branch.release_probability");

        let mut cfg = ScenarioConfig::new(ScenarioKind::Calcium);
        cfg.validate().unwrap();
        cfg.ion = Some(IonConfig {
            temperature_k: 0.0,
            ..IonConfig::default()
        });
        assert_eq!(field_of(cfg.validate().unwrap_err()), "ion.temperature");
    }

    #[test]
    fn sweep_needs_counts() {
        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.scenario = ScenarioKind::ZenoSweep;
        assert_eq!(field_of(cfg.validate().unwrap_err()), "counts");
        cfg.counts = Some(vec![100]);
        assert_eq!(field_of(cfg.validate().unwrap_err()), "counts");
        cfg.counts = Some(vec![100, 200]);
        cfg.validate().unwrap();
    }

    #[test]
    fn pipeline_validation() {
        let mut cfg = ScenarioConfig::from_json(zeno_json()).unwrap();
        cfg.scenario = ScenarioKind::CustomPipeline;
        cfg.pipeline = Some(vec![PipelineStep::Sample]);
        assert_eq!(field_of(cfg.validate().unwrap_err()), "root_seed");
        cfg.pipeline = Some(vec![PipelineStep::Dephase { duration: 1.0 }]);
        assert_eq!(field_of(cfg.validate().unwrap_err()), "dephasing");
        cfg.pipeline = Some(vec![PipelineStep::Select { candidates: vec![] }]);
        assert_eq!(field_of(cfg.validate().unwrap_err()), "pipeline[0].candidates");
    }

    #[test]
    fn format_inference() {
        let mut cfg = ScenarioConfig::new(ScenarioKind::Calcium);
        assert_eq!(cfg.output_format(), OutputFormat::Json);
        cfg.output = Some(OutputConfig {
            path: Some("out.CSV".into()),
            format: None,
        });
        assert_eq!(cfg.output_format(), OutputFormat::Csv);
        cfg.output = Some(OutputConfig {
            path: Some("out.csv".into()),
            format: Some(OutputFormat::Json),
        });
        assert_eq!(cfg.output_format(), OutputFormat::Json);
    }
}
