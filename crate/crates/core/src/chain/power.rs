use super::{BirthDeathChain, ProbVector};

/// Default largest `tau` kept in a [`PowerCache`].
pub const DEFAULT_POWER_CAP: usize = 4096;

/// Lazily extended table of `e_s · P^tau` rows for one chain.
///
/// Rows are produced by the same repeated multiplication as
/// [`BirthDeathChain::row_power`], so cached rows are bit-identical to the
/// uncached computation for every `tau <= cap`. Past the cap the stationary
/// distribution is returned instead. The cache is owned, not shared: give
/// each thread its own.
#[derive(Debug, Clone)]
pub struct PowerCache {
    chain: BirthDeathChain,
    cap: usize,
    rows: Vec<Vec<Vec<f64>>>,
    stationary: Vec<f64>,
}

impl PowerCache {
    pub fn new(chain: BirthDeathChain) -> Self {
        Self::with_cap(chain, DEFAULT_POWER_CAP)
    }

    pub fn with_cap(chain: BirthDeathChain, cap: usize) -> Self {
        let m = chain.num_states();
        let rows = (0..m)
            .map(|s| vec![ProbVector::unit(m, s).into_inner()])
            .collect();
        let stationary = match chain.stationary_distribution() {
            Ok(d) => d.into_inner(),
            // Non-ergodic chains have no unique limit; fall back to the
            // row at the cap.
            Err(_) => Vec::new(),
        };
        PowerCache {
            chain,
            cap,
            rows,
            stationary,
        }
    }

    pub fn chain(&self) -> &BirthDeathChain {
        &self.chain
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `e_s · P^tau`.
    pub fn row(&mut self, s: usize, tau: usize) -> &[f64] {
        if tau > self.cap && !self.stationary.is_empty() {
            return &self.stationary;
        }
        let tau = tau.min(self.cap);
        let m = self.chain.num_states();
        let rows = &mut self.rows[s];
        while rows.len() <= tau {
            let mut next = vec![0.0; m];
            self.chain.step_into(rows.last().unwrap(), &mut next);
            rows.push(next);
        }
        &rows[tau]
    }

    /// Expected value of `values` under `e_s · P^tau`.
    pub fn expectation(&mut self, s: usize, tau: usize, values: &[f64]) -> f64 {
        self.row(s, tau)
            .iter()
            .zip(values)
            .map(|(p, r)| p * r)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cached_rows_are_bit_identical() {
        let chain = BirthDeathChain::new(vec![0.3, 0.25, 0.1], vec![0.2, 0.4, 0.35]).unwrap();
        let mut cache = PowerCache::with_cap(chain.clone(), 64);
        // Fill out of order to exercise lazy extension.
        for &(s, tau) in &[(2, 40), (0, 3), (1, 64), (3, 0), (0, 63)] {
            let cached = cache.row(s, tau).to_vec();
            let direct = chain.row_power(s, tau);
            assert_eq!(cached.as_slice(), direct.as_slice());
        }
    }

    #[test]
    fn past_cap_returns_stationary() {
        let chain = BirthDeathChain::two_state(0.7, 0.8).unwrap();
        let mut cache = PowerCache::with_cap(chain.clone(), 8);
        let d = chain.stationary_distribution().unwrap();
        assert_eq!(cache.row(0, 9), d.as_slice());
        assert_eq!(cache.row(1, 8), chain.row_power(1, 8).as_slice());
    }
}
