//! Birth-death Markov chains and the prefix-sum dominance order.
//!
//! A birth-death chain on `M` states only moves one step up or down per
//! transition, so its transition matrix is tridiagonal and is stored as two
//! vectors: `up[k] = P(k, k+1)` and `down[k] = P(k+1, k)`. Stay
//! probabilities are implied. States are indexed from 0; state 0 is the
//! best state (highest reward) under the monotone-reward assumption.
//!
//! Birth-death chains are reversible, so `V⁻¹ P V` is symmetric for the
//! diagonal similarity `V = diag(1, sqrt(down[0]/up[0]), ...)`. That gives
//! real eigenvalues and a cheap, stable computation of the second-largest
//! eigenvalue modulus ([`BirthDeathChain::slem`]).

mod instance;
mod power;
mod prob;

pub use instance::{
    d_min, validate_assumptions, Arm, ArmReport, AssumptionCheck, InstanceFile, RestlessInstance,
    ValidationReport,
};
pub use power::{PowerCache, DEFAULT_POWER_CAP};
pub use prob::{prefix_dominates, ProbVector, DOMINANCE_SLACK};

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used when checking that user-supplied probabilities form a
/// valid row.
pub const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("chain must have at least one state")]
    Empty,

    #[error("up has length {up} and down has length {down}; both must equal num_states - 1")]
    LengthMismatch { up: usize, down: usize },

    #[error("probability {value} at {field}[{index}] is outside [0, 1]")]
    OutOfRange {
        field: &'static str,
        index: usize,
        value: f64,
    },

    #[error("row {row} has negative stay probability {value}")]
    NegativeStay { row: usize, value: f64 },

    #[error("degenerate chain: down[{index}] = 0 so the chain is not ergodic")]
    Degenerate { index: usize },

    #[error("vector lengths differ: {left} vs {right}")]
    VectorLength { left: usize, right: usize },

    #[error("invalid probability vector: {0}")]
    InvalidVector(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("instance file: {0}")]
    Parse(String),
}

/// Tridiagonal transition matrix on `M` states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct BirthDeathChain {
    up: Vec<f64>,
    down: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawChain {
    up: Vec<f64>,
    down: Vec<f64>,
}

impl TryFrom<RawChain> for BirthDeathChain {
    type Error = ChainError;
    fn try_from(raw: RawChain) -> Result<Self, Self::Error> {
        BirthDeathChain::new(raw.up, raw.down)
    }
}

impl From<BirthDeathChain> for RawChain {
    fn from(c: BirthDeathChain) -> Self {
        RawChain {
            up: c.up,
            down: c.down,
        }
    }
}

impl BirthDeathChain {
    /// Builds a chain from `up[k] = P(k, k+1)` and `down[k] = P(k+1, k)`.
    pub fn new(up: Vec<f64>, down: Vec<f64>) -> Result<Self, ChainError> {
        if up.len() != down.len() {
            return Err(ChainError::LengthMismatch {
                up: up.len(),
                down: down.len(),
            });
        }
        for (field, values) in [("up", &up), ("down", &down)] {
            for (index, &value) in values.iter().enumerate() {
                if !(0.0..=1.0).contains(&value) || value.is_nan() {
                    return Err(ChainError::OutOfRange {
                        field,
                        index,
                        value,
                    });
                }
            }
        }
        let chain = BirthDeathChain { up, down };
        for row in 0..chain.num_states() {
            let stay = chain.stay(row);
            if stay < -PROB_TOLERANCE {
                return Err(ChainError::NegativeStay { row, value: stay });
            }
        }
        Ok(chain)
    }

    /// Single-state chain (always stays).
    pub fn trivial() -> Self {
        BirthDeathChain {
            up: Vec::new(),
            down: Vec::new(),
        }
    }

    /// Two-state chain from its diagonal `P(0,0)` and `P(1,1)`.
    pub fn two_state(stay_first: f64, stay_second: f64) -> Result<Self, ChainError> {
        Self::new(vec![1.0 - stay_first], vec![1.0 - stay_second])
    }

    pub fn num_states(&self) -> usize {
        self.up.len() + 1
    }

    pub fn up(&self) -> &[f64] {
        &self.up
    }

    pub fn down(&self) -> &[f64] {
        &self.down
    }

    /// `P(k, k+1)`, zero at the top state.
    #[inline]
    pub fn up_prob(&self, k: usize) -> f64 {
        self.up.get(k).copied().unwrap_or(0.0)
    }

    /// `P(k, k-1)`, zero at state 0.
    #[inline]
    pub fn down_prob(&self, k: usize) -> f64 {
        if k == 0 {
            0.0
        } else {
            self.down[k - 1]
        }
    }

    #[inline]
    pub fn stay(&self, k: usize) -> f64 {
        1.0 - self.up_prob(k) - self.down_prob(k)
    }

    /// Entry `P(j, k)`.
    pub fn prob(&self, j: usize, k: usize) -> f64 {
        if j == k {
            self.stay(j)
        } else if k == j + 1 {
            self.up_prob(j)
        } else if j == k + 1 {
            self.down_prob(j)
        } else {
            0.0
        }
    }

    /// Row `j` of the transition matrix as a dense vector.
    pub fn row(&self, j: usize) -> ProbVector {
        let mut e = vec![0.0; self.num_states()];
        e[j] = 1.0;
        let mut out = vec![0.0; self.num_states()];
        self.step_into(&e, &mut out);
        ProbVector::from_raw(out)
    }

    /// Writes `v · P` into `out`.
    pub fn step_into(&self, v: &[f64], out: &mut [f64]) {
        let m = self.num_states();
        debug_assert_eq!(v.len(), m);
        debug_assert_eq!(out.len(), m);
        for k in 0..m {
            let mut acc = v[k] * self.stay(k);
            if k > 0 {
                acc += v[k - 1] * self.up[k - 1];
            }
            if k + 1 < m {
                acc += v[k + 1] * self.down[k];
            }
            out[k] = acc;
        }
    }

    /// Samples the successor of `state` from a uniform draw `u ∈ [0, 1)`.
    /// Successors are ordered by index: down, stay, up.
    #[inline]
    pub fn next_state(&self, state: usize, u: f64) -> usize {
        let down = self.down_prob(state);
        if u < down {
            return state - 1;
        }
        let up = self.up_prob(state);
        if u < down + self.stay(state) || up == 0.0 {
            state
        } else {
            state + 1
        }
    }

    /// `e_s · P^tau` by repeated vector-matrix multiplication.
    pub fn row_power(&self, s: usize, tau: usize) -> ProbVector {
        let m = self.num_states();
        let mut cur = vec![0.0; m];
        cur[s] = 1.0;
        let mut next = vec![0.0; m];
        for _ in 0..tau {
            self.step_into(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        ProbVector::from_raw(cur)
    }

    /// Stationary distribution from detailed balance,
    /// `d[k+1] / d[k] = up[k] / down[k]`.
    pub fn stationary_distribution(&self) -> Result<ProbVector, ChainError> {
        let m = self.num_states();
        let mut d = Vec::with_capacity(m);
        d.push(1.0);
        for k in 0..m - 1 {
            if self.down[k] == 0.0 {
                return Err(ChainError::Degenerate { index: k });
            }
            let prev = d[k];
            d.push(prev * self.up[k] / self.down[k]);
        }
        let total: f64 = d.iter().sum();
        d.iter_mut().for_each(|x| *x /= total);
        Ok(ProbVector::from_raw(d))
    }

    /// Second-largest eigenvalue modulus.
    pub fn slem(&self) -> Result<f64, ChainError> {
        let m = self.num_states();
        if m == 1 {
            return Ok(0.0);
        }
        if let Some(index) = self.down.iter().position(|&d| d == 0.0) {
            return Err(ChainError::Degenerate { index });
        }
        let sym = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                self.stay(i)
            } else if j == i + 1 {
                (self.up[i] * self.down[i]).sqrt()
            } else if i == j + 1 {
                (self.up[j] * self.down[j]).sqrt()
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(sym);
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        // The Perron eigenvalue 1 is the largest; drop one copy of it.
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(values[1..].iter().fold(0.0_f64, |acc, v| acc.max(v.abs())))
    }

    /// Dense row-major copy of the transition matrix.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let m = self.num_states();
        (0..m)
            .map(|j| (0..m).map(|k| self.prob(j, k)).collect())
            .collect()
    }

    /// Optimistic shift: moves `delta` of probability mass from each up
    /// transition to the matching down transition, row by row. Interior
    /// rows keep their stay probability; row 0 gains the removed up mass
    /// as stay and the top row loses `delta` of stay to its down move.
    /// Each per-row shift is clamped so all entries stay in `[0, 1]`.
    pub fn shifted_toward_low(&self, delta: f64) -> BirthDeathChain {
        let m = self.num_states();
        if m == 1 {
            return self.clone();
        }
        let mut up = self.up.clone();
        let mut down = self.down.clone();
        for k in 0..m {
            if k + 1 < m {
                let d = delta.min(self.up[k]);
                up[k] -= d;
                if k > 0 {
                    down[k - 1] += d;
                }
            } else {
                let d = delta.min(self.stay(k).max(0.0));
                down[k - 1] += d;
            }
        }
        for x in up.iter_mut().chain(down.iter_mut()) {
            *x = x.clamp(0.0, 1.0);
        }
        BirthDeathChain { up, down }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve_stationary_dense(p: &[Vec<f64>]) -> Vec<f64> {
        // d (P - I) = 0 with sum(d) = 1: replace last equation by the sum.
        let m = p.len();
        let mut a = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                a[(j, i)] = p[i][j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        for i in 0..m {
            a[(m - 1, i)] = 1.0;
        }
        let mut b = nalgebra::DVector::zeros(m);
        b[m - 1] = 1.0;
        a.lu().solve(&b).unwrap().iter().copied().collect()
    }

    #[test]
    fn stationary_two_state_matches_linear_solve() {
        let chain = BirthDeathChain::two_state(0.7, 0.8).unwrap();
        let d = chain.stationary_distribution().unwrap();
        let oracle = solve_stationary_dense(&chain.dense());
        assert!((oracle[0] - 0.4).abs() < 1e-12);
        assert!((d[0] - oracle[0]).abs() < 1e-12 && (d[1] - oracle[1]).abs() < 1e-12);

        let chain = BirthDeathChain::two_state(0.5, 0.6).unwrap();
        let d = chain.stationary_distribution().unwrap();
        let oracle = solve_stationary_dense(&chain.dense());
        assert!((oracle[0] - 4.0 / 9.0).abs() < 1e-12);
        assert!((d[0] - 4.0 / 9.0).abs() < 1e-12 && (d[1] - 5.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn single_state_chain() {
        let chain = BirthDeathChain::trivial();
        assert_eq!(chain.stationary_distribution().unwrap().as_slice(), &[1.0]);
        assert_eq!(chain.slem().unwrap(), 0.0);
        assert_eq!(chain.row_power(0, 17).as_slice(), &[1.0]);
    }

    #[test]
    fn degenerate_chain_is_reported() {
        let chain = BirthDeathChain::new(vec![0.3, 0.2], vec![0.0, 0.4]).unwrap();
        assert_eq!(
            chain.stationary_distribution(),
            Err(ChainError::Degenerate { index: 0 })
        );
        assert!(chain.slem().is_err());
    }

    #[test]
    fn slem_two_state_closed_form() {
        // eigenvalues of a 2x2 stochastic matrix are {1, P(0,0) + P(1,1) - 1}
        let chain = BirthDeathChain::two_state(0.7, 0.8).unwrap();
        assert!((chain.slem().unwrap() - 0.5).abs() < 1e-12);
        let chain = BirthDeathChain::two_state(0.5, 0.6).unwrap();
        assert!((chain.slem().unwrap() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn slem_matches_dense_eigensolve() {
        let third = 1.0 / 3.0;
        let chain = BirthDeathChain::new(vec![third, third], vec![third, third]).unwrap();
        let dense = DMatrix::from_fn(3, 3, |i, j| chain.prob(i, j));
        let mut moduli: Vec<f64> = dense
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .collect();
        moduli.sort_by(|a, b| b.total_cmp(a));
        assert!((chain.slem().unwrap() - moduli[1]).abs() < 1e-10);
    }

    #[test]
    fn row_power_examples() {
        let chain = BirthDeathChain::two_state(0.7, 0.8).unwrap();
        assert_eq!(chain.row_power(0, 0).as_slice(), &[1.0, 0.0]);
        // [0.7 0.3; 0.2 0.8]^2 first row = (0.49 + 0.06, 0.21 + 0.24)
        let r = chain.row_power(0, 2);
        assert!((r[0] - 0.55).abs() < 1e-15 && (r[1] - 0.45).abs() < 1e-15);
        let far = chain.row_power(1, 200);
        let d = chain.stationary_distribution().unwrap();
        assert!((far[0] - d[0]).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            BirthDeathChain::new(vec![0.7], vec![0.5, 0.1]),
            Err(ChainError::LengthMismatch { .. })
        ));
        assert!(matches!(
            BirthDeathChain::new(vec![1.2], vec![0.5]),
            Err(ChainError::OutOfRange { field: "up", .. })
        ));
        assert!(matches!(
            BirthDeathChain::new(vec![0.6, 0.5], vec![0.6, 0.2]),
            Err(ChainError::NegativeStay { row: 1, .. })
        ));
    }

    #[test]
    fn next_state_follows_row_order() {
        let chain = BirthDeathChain::new(vec![0.3, 0.2], vec![0.1, 0.4]).unwrap();
        // row 1 = (0.1, 0.7, 0.2)
        assert_eq!(chain.next_state(1, 0.05), 0);
        assert_eq!(chain.next_state(1, 0.5), 1);
        assert_eq!(chain.next_state(1, 0.85), 2);
        assert_eq!(chain.next_state(0, 0.99), 1);
        assert_eq!(chain.next_state(2, 0.99), 2);
    }

    #[test]
    fn shift_keeps_rows_stochastic_and_clamps() {
        let chain = BirthDeathChain::new(vec![0.01, 0.3], vec![0.2, 0.3]).unwrap();
        let shifted = chain.shifted_toward_low(0.05);
        // up[0] clamped to zero, interior row moves 0.05 to down
        assert_eq!(shifted.up()[0], 0.0);
        for j in 0..3 {
            let s: f64 = (0..3).map(|k| shifted.prob(j, k)).sum();
            assert!((s - 1.0).abs() < 1e-12);
            for k in 0..3 {
                assert!((0.0..=1.0).contains(&shifted.prob(j, k)));
            }
        }
        assert_eq!(chain.shifted_toward_low(0.0), chain);
    }
}
