//! Shared bivariate data types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Causal direction between the two columns of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "x->y")]
    XToY,
    #[serde(rename = "y->x")]
    YToX,
    #[serde(rename = "undecided")]
    Undecided,
}

impl Direction {
    pub fn reversed(self) -> Self {
        match self {
            Direction::XToY => Direction::YToX,
            Direction::YToX => Direction::XToY,
            Direction::Undecided => Direction::Undecided,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Direction::XToY => "x->y",
            Direction::YToX => "y->x",
            Direction::Undecided => "undecided",
        };
        f.write_str(s)
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "x->y" => Ok(Direction::XToY),
            "y->x" => Ok(Direction::YToX),
            "undecided" => Ok(Direction::Undecided),
            other => Err(Error::Graph(format!("unknown direction {other:?}"))),
        }
    }
}

/// One bivariate dataset: two numeric columns of equal length.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Pair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::SampleTooSmall { min: 2, got: x.len() });
        }
        for (index, v) in x.iter().chain(y.iter()).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: index % x.len() });
            }
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// The same data with the columns exchanged.
    pub fn swapped(&self) -> Pair {
        Pair {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

/// A pair with ground truth and evaluation weight.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabeledPair {
    pub id: String,
    pub pair: Pair,
    /// Which column causes which, referring to the stored column order.
    pub truth: Direction,
    pub weight: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_validates() {
        assert!(Pair::new(vec![1.0, 2.0], vec![3.0, 4.0]).is_ok());
        assert!(Pair::new(vec![1.0], vec![3.0]).is_err());
        assert!(Pair::new(vec![1.0, 2.0], vec![3.0]).is_err());
        assert!(Pair::new(vec![1.0, f64::NAN], vec![3.0, 4.0]).is_err());
    }

    #[test]
    fn direction_round_trips() {
        for d in [Direction::XToY, Direction::YToX, Direction::Undecided] {
            assert_eq!(d.to_string().parse::<Direction>().unwrap(), d);
        }
        assert_eq!(Direction::XToY.reversed(), Direction::YToX);
        assert_eq!(Direction::Undecided.reversed(), Direction::Undecided);
    }
}
