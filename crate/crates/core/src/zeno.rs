//! Repeated process 1 at a fixed interval `d = T / N`.
//!
//! Each interval is split as: unitary step over `d`, optional dephasing over
//! `d`, then the event. Expected mode propagates the answer-agnostic state
//! (process 1); sampled mode draws Nature's answer per trajectory.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_dephasing, DephasingChannel, Hamiltonian, Propagator};
use crate::collapse::{apply_answer, probability_yes, process1, sample_answer, Answer};
use crate::error::{Error, Result};
use crate::opalg::{ComplexMatrix, Projector, WeightOperator, CONSERVATION_TOL, VALIDITY_TOL};

/// Largest `spectral width · d` accepted by [`leakage_sweep`].
pub const SMALL_ANGLE_LIMIT: f64 = 0.3;
/// Bound on `|w_with - w_without|` asserted by [`mixture_robustness_check`].
pub const ROBUSTNESS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum RunMode {
    Expected,
    Sampled { trajectories: u64, root_seed: u64 },
}

#[derive(Clone, Debug)]
pub struct ZenoProtocol {
    total_time: f64,
    event_count: usize,
    hamiltonian: Hamiltonian,
    projector: Projector,
    dephasing: Option<DephasingChannel>,
    mode: RunMode,
}

impl ZenoProtocol {
    pub fn new(total_time: f64, event_count: usize, hamiltonian: Hamiltonian, projector: Projector) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::invalid("total_time", format!("{total_time} must be positive")));
        }
        if event_count == 0 {
            return Err(Error::invalid("event_count", "must be at least 1"));
        }
        if hamiltonian.dim() != projector.dim() {
            return Err(Error::DimensionMismatch {
                context: "hamiltonian vs projector",
                expected: projector.dim(),
                actual: hamiltonian.dim(),
            });
        }
        Ok(ZenoProtocol {
            total_time,
            event_count,
            hamiltonian,
            projector,
            dephasing: None,
            mode: RunMode::Expected,
        })
    }

    pub fn with_dephasing(mut self, channel: DephasingChannel) -> Result<Self> {
        if channel.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "dephasing channel vs protocol",
                expected: self.dim(),
                actual: channel.dim(),
            });
        }
        self.dephasing = Some(channel);
        Ok(self)
    }

    pub fn without_dephasing(&self) -> Self {
        ZenoProtocol {
            dephasing: None,
            ..self.clone()
        }
    }

    pub fn with_mode(mut self, mode: RunMode) -> Result<Self> {
        if let RunMode::Sampled { trajectories: 0, .. } = mode {
            return Err(Error::invalid("trajectories", "sampled mode needs at least 1"));
        }
        self.mode = mode;
        Ok(self)
    }

    pub fn with_event_count(&self, event_count: usize) -> Result<Self> {
        if event_count == 0 {
            return Err(Error::invalid("event_count", "must be at least 1"));
        }
        Ok(ZenoProtocol {
            event_count,
            ..self.clone()
        })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn event_count(&self) -> usize {
        self.event_count
    }

    /// `d = T / N`.
    pub fn interval(&self) -> f64 {
        self.total_time / self.event_count as f64
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn projector(&self) -> &Projector {
        &self.projector
    }

    pub fn dephasing(&self) -> Option<&DephasingChannel> {
        self.dephasing.as_ref()
    }

    pub fn mode(&self) -> RunMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }

    pub fn echo(&self) -> ProtocolEcho {
        let (trajectories, root_seed) = match self.mode {
            RunMode::Expected => (None, None),
            RunMode::Sampled {
                trajectories,
                root_seed,
            } => (Some(trajectories), Some(root_seed)),
        };
        ProtocolEcho {
            dim: self.dim(),
            total_time: self.total_time,
            projector_label: self.projector.label().to_string(),
            projector_rank: self.projector.rank(),
            dephasing_rate: self.dephasing.as_ref().map(DephasingChannel::rate),
            mode: match self.mode {
                RunMode::Expected => "expected".into(),
                RunMode::Sampled { .. } => "sampled".into(),
            },
            trajectories,
            root_seed,
        }
    }

    fn check_initial(&self, initial: &WeightOperator) -> Result<()> {
        initial.check_dim(self.dim(), "initial state vs protocol")?;
        let tr = initial.trace();
        let inside = initial.matrix().trace_product(self.projector.matrix()).re;
        if (tr - inside).abs() > VALIDITY_TOL * tr {
            return Err(Error::Precondition(format!(
                "initial state must lie in the `{}` subspace (weight outside {:.3e})",
                self.projector.label(),
                (tr - inside) / tr
            )));
        }
        Ok(())
    }

    fn advance(&self, propagator: &Propagator, s: &WeightOperator) -> Result<WeightOperator> {
        let evolved = propagator.apply(s)?;
        match &self.dephasing {
            Some(ch) => apply_dephasing(&evolved, ch, self.interval()),
            None => Ok(evolved),
        }
    }
}

/// Protocol parameters echoed into result records.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProtocolEcho {
    pub dim: usize,
    pub total_time: f64,
    pub projector_label: String,
    pub projector_rank: usize,
    pub dephasing_rate: Option<f64>,
    pub mode: String,
    pub trajectories: Option<u64>,
    pub root_seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub event_count: usize,
    pub interval: f64,
    pub survival: f64,
    pub stderr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalCurve {
    pub points: Vec<CurvePoint>,
    pub metadata: ProtocolEcho,
}

#[derive(Clone, Debug)]
pub struct ExpectedRun {
    pub point: CurvePoint,
    pub final_state: WeightOperator,
    /// Yes probability at each event, i.e. the expected Yes frequency over
    /// an ensemble of sampled trajectories.
    pub event_probabilities: Vec<f64>,
    /// `|Tr S_T - Tr S_0|`.
    pub trace_drift: f64,
}

/// Deterministic propagation of the answer-agnostic state.
pub fn run_expected(protocol: &ZenoProtocol, initial: &WeightOperator) -> Result<ExpectedRun> {
    protocol.check_initial(initial)?;
    let propagator = protocol.hamiltonian.propagator(protocol.interval())?;
    let mut s = initial.clone();
    let mut event_probabilities = Vec::with_capacity(protocol.event_count);
    for _ in 0..protocol.event_count {
        s = protocol.advance(&propagator, &s)?;
        event_probabilities.push(probability_yes(&s, &protocol.projector)?);
        s = process1(&s, &protocol.projector)?;
    }
    let survival = probability_yes(&s, &protocol.projector)?;
    Ok(ExpectedRun {
        point: CurvePoint {
            event_count: protocol.event_count,
            interval: protocol.interval(),
            survival,
            stderr: None,
        },
        trace_drift: (s.trace() - initial.trace()).abs(),
        final_state: s,
        event_probabilities,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub timestamp: f64,
    pub answer: Answer,
    pub probability_yes: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub index: u64,
    /// Yes at every event, the last of which falls at `T`.
    pub survived: bool,
    pub events: Vec<EventRecord>,
}

#[derive(Clone, Debug)]
pub struct SampledRun {
    /// Survival is the all-Yes fraction; stderr is its binomial standard error.
    pub point: CurvePoint,
    pub survivors: u64,
    /// Number of trajectories answering Yes at each event.
    pub yes_counts: Vec<u64>,
    pub trajectories: Vec<TrajectoryRecord>,
}

/// Generator for trajectory `index`: ChaCha8 seeded from `root_seed`, with
/// the trajectory index as the stream number.
pub fn trajectory_rng(root_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(root_seed);
    rng.set_stream(index);
    rng
}

fn run_trajectory(
    protocol: &ZenoProtocol,
    propagator: &Propagator,
    initial: &WeightOperator,
    root_seed: u64,
    index: u64,
) -> Result<TrajectoryRecord> {
    let mut rng = trajectory_rng(root_seed, index);
    let d = protocol.interval();
    let mut s = initial.normalized();
    let mut events = Vec::with_capacity(protocol.event_count);
    for k in 1..=protocol.event_count {
        s = protocol.advance(propagator, &s)?;
        let answer = sample_answer(&s, &protocol.projector, &mut rng)?;
        s = apply_answer(&s, &protocol.projector, answer.value)?.normalized();
        events.push(EventRecord {
            timestamp: k as f64 * d,
            answer: answer.value,
            probability_yes: answer.probability_yes,
        });
    }
    let survived = events.iter().all(|e| e.answer == Answer::Yes);
    Ok(TrajectoryRecord {
        index,
        survived,
        events,
    })
}

/// Monte Carlo over independent trajectories. Trajectories run in parallel;
/// aggregation is over integer counts, so results do not depend on scheduling.
pub fn run_sampled(protocol: &ZenoProtocol, initial: &WeightOperator) -> Result<SampledRun> {
    let RunMode::Sampled {
        trajectories,
        root_seed,
    } = protocol.mode
    else {
        return Err(Error::Precondition("run_sampled requires sampled mode".into()));
    };
    protocol.check_initial(initial)?;
    let propagator = protocol.hamiltonian.propagator(protocol.interval())?;
    let records = (0..trajectories)
        .into_par_iter()
        .map(|i| run_trajectory(protocol, &propagator, initial, root_seed, i))
        .collect::<Result<Vec<_>>>()?;

    let mut yes_counts = vec![0u64; protocol.event_count];
    let mut survivors = 0u64;
    for r in &records {
        survivors += u64::from(r.survived);
        for (count, e) in yes_counts.iter_mut().zip(&r.events) {
            *count += u64::from(e.answer == Answer::Yes);
        }
    }
    let n = trajectories as f64;
    let fraction = survivors as f64 / n;
    Ok(SampledRun {
        point: CurvePoint {
            event_count: protocol.event_count,
            interval: protocol.interval(),
            survival: fraction,
            stderr: Some((fraction * (1.0 - fraction) / n).sqrt()),
        },
        survivors,
        yes_counts,
        trajectories: records,
    })
}

/// Expected-mode survival for each event count, at fixed `T`.
pub fn survival_curve(base: &ZenoProtocol, initial: &WeightOperator, counts: &[usize]) -> Result<SurvivalCurve> {
    let points = counts
        .iter()
        .map(|&n| run_expected(&base.with_event_count(n)?, initial).map(|r| r.point))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve {
        points,
        metadata: base.echo(),
    })
}

#[derive(Clone, Debug)]
pub struct LeakageSweep {
    pub curve: SurvivalCurve,
    /// Least-squares slope of `ln(1 - w)` against `ln N`.
    pub slope: f64,
    pub intercept: f64,
    /// `(N, leakage(2N) / leakage(N))` for every doubled pair in the sweep.
    pub doubling_ratios: Vec<(usize, f64)>,
}

/// Least-squares line through `(x, y)`; returns `(slope, intercept)`.
pub fn fit_line(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let n = points.len();
    if n < 2 {
        return Err(Error::DegenerateFit { valid: n });
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit { valid: 1 });
    }
    let slope = sxy / sxx;
    Ok((slope, mean_y - slope * mean_x))
}

/// Fixed-`T` sweep over event counts and a log-log fit of total leakage.
pub fn leakage_sweep(base: &ZenoProtocol, initial: &WeightOperator, counts: &[usize]) -> Result<LeakageSweep> {
    if counts.len() < 2 {
        return Err(Error::Precondition(
            "leakage sweep needs at least two event counts".into(),
        ));
    }
    let width = base.hamiltonian.spectral_width();
    for &n in counts {
        let angle = width * base.total_time / n.max(1) as f64;
        if angle >= SMALL_ANGLE_LIMIT {
            return Err(Error::Precondition(format!(
                "N = {n} gives spectral width x d = {angle:.3}, outside the small-angle regime (< {SMALL_ANGLE_LIMIT})"
            )));
        }
    }
    let curve = survival_curve(base, initial, counts)?;
    let leakage = |p: &CurvePoint| 1.0 - p.survival;
    let valid: Vec<(f64, f64)> = curve
        .points
        .iter()
        .filter(|p| leakage(p) > CONSERVATION_TOL)
        .map(|p| ((p.event_count as f64).ln(), leakage(p).ln()))
        .collect();
    let (slope, intercept) = fit_line(&valid).map_err(|_| Error::DegenerateFit { valid: valid.len() })?;

    let mut doubling_ratios = Vec::new();
    for p in &curve.points {
        if let Some(q) = curve.points.iter().find(|q| q.event_count == 2 * p.event_count) {
            if leakage(p) > CONSERVATION_TOL {
                doubling_ratios.push((p.event_count, leakage(q) / leakage(p)));
            }
        }
    }
    Ok(LeakageSweep {
        curve,
        slope,
        intercept,
        doubling_ratios,
    })
}

/// Effort in `[0, 1]` mapped linearly onto an event rate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffortSetting {
    effort: f64,
    rate_min: f64,
    rate_max: f64,
}

impl EffortSetting {
    pub fn new(effort: f64, rate_min: f64, rate_max: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&effort) {
            return Err(Error::invalid("effort", format!("{effort} is outside [0, 1]")));
        }
        if !(rate_min > 0.0 && rate_min.is_finite()) {
            return Err(Error::invalid("rate_min", format!("{rate_min} must be positive")));
        }
        if !(rate_max >= rate_min && rate_max.is_finite()) {
            return Err(Error::invalid("rate_max", format!("{rate_max} must be >= rate_min")));
        }
        Ok(EffortSetting {
            effort,
            rate_min,
            rate_max,
        })
    }

    pub fn effort(&self) -> f64 {
        self.effort
    }

    /// Events per unit time.
    pub fn rate(&self) -> f64 {
        self.rate_min + self.effort * (self.rate_max - self.rate_min)
    }

    /// Time between events, `1 / rate`.
    pub fn interval(&self) -> f64 {
        1.0 / self.rate()
    }
}

/// `N = max(1, round(T · rate(effort)))`.
pub fn effort_to_interval(setting: &EffortSetting, total_time: f64) -> usize {
    let n = (total_time * setting.rate()).round();
    if n >= 1.0 {
        n as usize
    } else {
        1
    }
}

/// One interval written out term by term:
/// `P U M U† P + (1-P) U M U† (1-P)` with `M = P S P + (1-P) S (1-P)` and
/// `U = exp(-iHd)`.
pub fn literal_single_step(s: &WeightOperator, h: &Hamiltonian, p: &Projector, d: f64) -> Result<WeightOperator> {
    s.check_dim(p.dim(), "state vs projector")?;
    s.check_dim(h.dim(), "state vs hamiltonian")?;
    let propagator = h.propagator(d)?;
    let u = propagator.unitary();
    let u_adj = u.adjoint();
    let pm = p.matrix();
    let qm: ComplexMatrix = pm.complement();
    let sm = s.matrix();

    let inner = &(&(pm * sm) * pm) + &(&(&qm * sm) * &qm);
    let yes_term = &(&(&(pm * u) * &inner) * &u_adj) * pm;
    let no_term = &(&(&(&qm * u) * &inner) * &u_adj) * &qm;
    WeightOperator::new(&yes_term + &no_term)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub survival_with_dephasing: f64,
    pub survival_without_dephasing: f64,
    pub difference: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
}

/// Every pointer vector must lie wholly inside `P` or wholly inside `1 - P`.
pub fn is_block_compatible(channel: &DephasingChannel, p: &Projector) -> bool {
    let u = channel.pointer_basis().as_dmatrix();
    let pm = p.matrix().as_dmatrix();
    (0..u.ncols()).all(|k| {
        let col = u.column(k);
        let weight = (col.adjoint() * pm * col)[(0, 0)].re;
        weight <= VALIDITY_TOL || weight >= 1.0 - VALIDITY_TOL
    })
}

/// Expected-mode survival from `mixture` with and without the protocol's
/// dephasing channel.
pub fn mixture_robustness_check(protocol: &ZenoProtocol, mixture: &WeightOperator) -> Result<RobustnessReport> {
    let channel = protocol
        .dephasing()
        .ok_or_else(|| Error::Precondition("protocol has no dephasing channel".into()))?;
    if !is_block_compatible(channel, protocol.projector()) {
        return Err(Error::Precondition(
            "pointer basis is not block-compatible with the projector".into(),
        ));
    }
    let with = run_expected(protocol, mixture)?.point.survival;
    let without = run_expected(&protocol.without_dephasing(), mixture)?.point.survival;
    let difference = (with - without).abs();
    Ok(RobustnessReport {
        survival_with_dephasing: with,
        survival_without_dephasing: without,
        difference,
        tolerance: ROBUSTNESS_TOL,
        within_tolerance: difference <= ROBUSTNESS_TOL,
    })
}
