//! Projection events: Yes/No reduction, the probability rule, process 1 and
//! candidate selection. Branch states are left unnormalized so their trace
//! is the branch weight.

use std::fmt;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opalg::{ComplexMatrix, Projector, WeightOperator};

/// Branches lighter than this are refused rather than renormalized.
pub const DEGENERATE_BRANCH_TRACE: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
        })
    }
}

/// Nature's answer together with the Yes probability it was drawn from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NatureAnswer {
    pub value: Answer,
    pub probability_yes: f64,
}

/// Occurrence of an experience at a given time.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperienceEvent {
    pub projector: Projector,
    pub timestamp: f64,
}

fn check_dims(s: &WeightOperator, p: &Projector) -> Result<()> {
    s.check_dim(p.dim(), "state vs projector")
}

/// `Tr(S P) / Tr(S)`, clamped to `[0, 1]`.
pub fn probability_yes(s: &WeightOperator, p: &Projector) -> Result<f64> {
    check_dims(s, p)?;
    let tr = s.trace();
    if tr.is_nan() || tr <= 0.0 {
        return Err(Error::InvalidState(format!("trace {tr:.3e} must be positive")));
    }
    let raw = s.matrix().trace_product(p.matrix()).re / tr;
    Ok(raw.clamp(0.0, 1.0))
}

/// `P S P` on Yes, `(1-P) S (1-P)` on No. The result is not renormalized.
pub fn apply_answer(s: &WeightOperator, p: &Projector, answer: Answer) -> Result<WeightOperator> {
    check_dims(s, p)?;
    let q = match answer {
        Answer::Yes => p.matrix().clone(),
        Answer::No => p.matrix().complement(),
    };
    let out = q.sandwich(s.matrix());
    let trace = out.trace().re;
    if trace < DEGENERATE_BRANCH_TRACE {
        return Err(Error::DegenerateBranch {
            trace,
            threshold: DEGENERATE_BRANCH_TRACE,
        });
    }
    Ok(WeightOperator::from_trusted(out))
}

/// Process 1: `P S P + (1-P) S (1-P)`.
pub fn process1(s: &WeightOperator, p: &Projector) -> Result<WeightOperator> {
    check_dims(s, p)?;
    Ok(WeightOperator::from_trusted(process1_matrix(s.matrix(), p.matrix())))
}

pub(crate) fn process1_matrix(s: &ComplexMatrix, p: &ComplexMatrix) -> ComplexMatrix {
    let q = p.complement();
    &p.sandwich(s) + &q.sandwich(s)
}

/// Index of the candidate with the largest `Tr(S P) / Tr(S)`; ties go to
/// the lowest index.
pub fn select_event_index(s: &WeightOperator, candidates: &[Projector]) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::config("candidates", "candidate list is empty"));
    }
    let mut best = 0;
    let mut best_weight = f64::NEG_INFINITY;
    for (i, p) in candidates.iter().enumerate() {
        let w = probability_yes(s, p)?;
        if w > best_weight {
            best = i;
            best_weight = w;
        }
    }
    Ok(best)
}

/// The candidate experience `E(t)` maximizing `Tr S P(E)`.
pub fn select_event<'a>(s: &WeightOperator, candidates: &'a [Projector]) -> Result<&'a Projector> {
    select_event_index(s, candidates).map(|i| &candidates[i])
}

/// Draws Yes with probability [`probability_yes`]. One uniform draw per call.
pub fn sample_answer<R: Rng + ?Sized>(s: &WeightOperator, p: &Projector, rng: &mut R) -> Result<NatureAnswer> {
    let probability_yes = probability_yes(s, p)?;
    let u: f64 = rng.random();
    let value = if u < probability_yes { Answer::Yes } else { Answer::No };
    Ok(NatureAnswer { value, probability_yes })
}
