//! Turn an aggregated direction score into a causal verdict.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pair::Direction;

/// Verdict for one pair: direction, the raw score, and the symmetric
/// confidence max(score, 1 - score).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CausalDecision {
    pub direction: Direction,
    pub score: f64,
    pub confidence: f64,
}

/// Scores above 0.5 decide X -> Y, below 0.5 decide Y -> X, exactly 0.5 is
/// undecided.
pub fn decide(score: f64) -> Result<CausalDecision> {
    if !(0.0..=1.0).contains(&score) {
        return Err(Error::ProbabilityOutOfRange {
            value: score,
            bounds: "[0, 1]",
        });
    }
    let direction = if score > 0.5 {
        Direction::XToY
    } else if score < 0.5 {
        Direction::YToX
    } else {
        Direction::Undecided
    };
    Ok(CausalDecision {
        direction,
        score,
        confidence: score.max(1.0 - score),
    })
}
