//! Scenario dispatch for the CLI and for library callers that want the same
//! end-to-end behaviour.

use std::time::Instant;

use crate::channels::{apply_dephasing, evolve_unitary, release_branch_mixture};
use crate::collapse::{apply_answer, probability_yes, process1, sample_answer, select_event_index};
use crate::config::{PipelineStep, ScenarioConfig, ScenarioKind};
use crate::error::{Error, Result};
use crate::estimates::spread_at_trigger;
use crate::output::{emit_results, BranchSummary, PipelineRecord, ResultPoint, ResultRecord, SweepSummary};
use crate::zeno::{leakage_sweep, run_expected, run_sampled, trajectory_rng, RunMode};

/// Validates, runs and (when an output path is configured) writes the result.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ResultRecord> {
    let record = execute(cfg)?;
    if let Some(path) = cfg.output_path() {
        emit_results(&record, cfg.output_format(), path)?;
    }
    Ok(record)
}

/// Runs the scenario without writing anything.
pub fn execute(cfg: &ScenarioConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    let started = Instant::now();
    let mut record = ResultRecord::new(cfg.clone());
    let outcome = match cfg.scenario {
        ScenarioKind::Zeno => run_zeno(cfg, &mut record),
        ScenarioKind::ZenoSweep => run_sweep(cfg, &mut record),
        ScenarioKind::Calcium => run_calcium(cfg, &mut record),
        ScenarioKind::Branch => run_branch(cfg, &mut record),
        ScenarioKind::CustomPipeline => run_pipeline(cfg, &mut record),
    };
    outcome.map_err(|e| match e {
        Error::Config { .. } => e,
        other => Error::Scenario {
            scenario: cfg.scenario.name().to_string(),
            source: Box::new(other),
        },
    })?;
    record.wall_time = started.elapsed();
    Ok(record)
}

fn run_zeno(cfg: &ScenarioConfig, record: &mut ResultRecord) -> Result<()> {
    let (protocol, initial) = cfg.zeno_protocol()?;
    record.protocol = Some(protocol.echo());
    match protocol.mode() {
        RunMode::Expected => {
            let run = run_expected(&protocol, &initial)?;
            record.points.push(ResultPoint {
                event_count: run.point.event_count,
                interval: run.point.interval,
                survival: run.point.survival,
                stderr: None,
                seed: None,
                trajectories: None,
            });
        }
        RunMode::Sampled {
            trajectories,
            root_seed,
        } => {
            let run = run_sampled(&protocol, &initial)?;
            record.points.push(ResultPoint {
                event_count: run.point.event_count,
                interval: run.point.interval,
                survival: run.point.survival,
                stderr: run.point.stderr,
                seed: Some(root_seed),
                trajectories: Some(trajectories),
            });
            record.event_yes_counts = Some(run.yes_counts);
            if cfg.record_events {
                record.trajectories = Some(run.trajectories);
            }
        }
    }
    Ok(())
}

fn run_sweep(cfg: &ScenarioConfig, record: &mut ResultRecord) -> Result<()> {
    let (protocol, initial) = cfg.zeno_protocol()?;
    let counts = cfg.sweep_counts()?;
    let sweep = leakage_sweep(&protocol, &initial, &counts)?;
    record.protocol = Some(sweep.curve.metadata.clone());
    record.points = sweep
        .curve
        .points
        .iter()
        .map(|p| ResultPoint {
            event_count: p.event_count,
            interval: p.interval,
            survival: p.survival,
            stderr: None,
            seed: None,
            trajectories: None,
        })
        .collect();
    record.sweep = Some(SweepSummary {
        slope: sweep.slope,
        intercept: sweep.intercept,
        doubling_ratios: sweep.doubling_ratios,
    });
    Ok(())
}

fn run_calcium(cfg: &ScenarioConfig, record: &mut ResultRecord) -> Result<()> {
    record.estimate = Some(spread_at_trigger(&cfg.ion_parameters()?));
    Ok(())
}

fn run_branch(cfg: &ScenarioConfig, record: &mut ResultRecord) -> Result<()> {
    let branch = cfg.branch_config()?;
    let mixture = release_branch_mixture(&branch);
    record.branch = Some(BranchSummary {
        terminal_count: branch.terminal_count(),
        release_probability: branch.release_probability(),
        trace: mixture.trace(),
        weights: mixture.weights().to_vec(),
    });
    Ok(())
}

fn run_pipeline(cfg: &ScenarioConfig, record: &mut ResultRecord) -> Result<()> {
    let setup = cfg.pipeline_setup()?;
    let mut rng = trajectory_rng(setup.root_seed, 0);
    let mut state = setup.state;
    let mut projector = setup.projector;
    let mut candidate_lists = setup.candidates.into_iter();
    let mut time = 0.0;
    let mut log = Vec::with_capacity(setup.steps.len());

    for (i, step) in setup.steps.iter().enumerate() {
        let (mut answer, mut answer_probability) = (None, None);
        let op = match step {
            PipelineStep::Evolve { duration } => {
                state = evolve_unitary(&state, &setup.hamiltonian, *duration)?;
                time += duration;
                "evolve"
            }
            PipelineStep::Dephase { duration } => {
                let ch = setup.dephasing.as_ref().expect("validated");
                state = apply_dephasing(&state, ch, *duration)?;
                "dephase"
            }
            PipelineStep::Process1 => {
                state = process1(&state, &projector)?;
                "process1"
            }
            PipelineStep::Answer { value } => {
                answer_probability = Some(probability_yes(&state, &projector)?);
                answer = Some(*value);
                state = apply_answer(&state, &projector, *value)?.normalized();
                "answer"
            }
            PipelineStep::Sample => {
                let drawn = sample_answer(&state, &projector, &mut rng)?;
                answer_probability = Some(drawn.probability_yes);
                answer = Some(drawn.value);
                state = apply_answer(&state, &projector, drawn.value)?.normalized();
                "sample"
            }
            PipelineStep::Select { .. } => {
                let list = candidate_lists.next().expect("one list per select step");
                let best = select_event_index(&state, &list)?;
                projector = list[best].clone();
                "select"
            }
        };
        let probability = probability_yes(&state, &projector)?;
        record.points.push(ResultPoint {
            event_count: i + 1,
            interval: time,
            survival: probability,
            stderr: None,
            seed: if matches!(step, PipelineStep::Sample) {
                cfg.root_seed
            } else {
                None
            },
            trajectories: None,
        });
        log.push(PipelineRecord {
            step: i + 1,
            op: op.to_string(),
            time,
            trace: state.trace(),
            projector: projector.label().to_string(),
            probability_yes: probability,
            answer,
            answer_probability,
        });
    }
    record.pipeline = Some(log);
    Ok(())
}
