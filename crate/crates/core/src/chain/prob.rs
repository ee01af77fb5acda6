use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::ChainError;

/// Slack used by every prefix-sum comparison.
pub const DOMINANCE_SLACK: f64 = 1e-12;

/// A probability vector over the states of a chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbVector(Vec<f64>);

impl ProbVector {
    /// Checked constructor: entries must be nonnegative and sum to one
    /// within `1e-12`.
    pub fn new(entries: Vec<f64>) -> Result<Self, ChainError> {
        if entries.is_empty() {
            return Err(ChainError::InvalidVector("empty".into()));
        }
        if let Some((i, x)) = entries
            .iter()
            .enumerate()
            .find(|(_, x)| !x.is_finite() || **x < 0.0)
        {
            return Err(ChainError::InvalidVector(format!("entry {i} = {x}")));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ChainError::InvalidVector(format!("sums to {total}")));
        }
        Ok(ProbVector(entries))
    }

    /// Point mass on `state`.
    pub fn unit(len: usize, state: usize) -> Self {
        let mut v = vec![0.0; len];
        v[state] = 1.0;
        ProbVector(v)
    }

    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        ProbVector(entries)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }
}

impl Deref for ProbVector {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// `v ≳ w`: every prefix sum of `v` is at least the matching prefix sum of
/// `w`, up to [`DOMINANCE_SLACK`]. Since state 0 is the best state, this
/// reads "v puts more mass on better states".
pub fn prefix_dominates(v: &[f64], w: &[f64]) -> Result<bool, ChainError> {
    if v.len() != w.len() {
        return Err(ChainError::VectorLength {
            left: v.len(),
            right: w.len(),
        });
    }
    let mut sv = 0.0;
    let mut sw = 0.0;
    for (a, b) in v.iter().zip(w) {
        sv += a;
        sw += b;
        if sv + DOMINANCE_SLACK < sw {
            return Ok(false);
        }
    }
    Ok(true)
}
