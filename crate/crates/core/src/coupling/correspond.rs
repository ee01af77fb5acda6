use rand::Rng;

use super::CouplingError;

fn check(v: &[f64], v_prime: &[f64], k: usize) -> Result<(f64, f64), CouplingError> {
    if v.len() != v_prime.len() {
        return Err(crate::chain::ChainError::VectorLength {
            left: v.len(),
            right: v_prime.len(),
        }
        .into());
    }
    if k >= v.len() {
        return Err(CouplingError::StateOutOfRange { k, len: v.len() });
    }
    let start: f64 = v_prime[..k].iter().sum();
    let end = start + v_prime[k];
    if end - start <= 0.0 {
        return Err(CouplingError::ZeroMass { k });
    }
    Ok((start, end))
}

/// Maps a state `k` drawn from `v_prime` to a state distributed as `v`.
///
/// `U` is uniform on the slice `(CDF_v'(k-1), CDF_v'(k)]` and the result is
/// the generalized inverse of `CDF_v` at `U`. If `k ~ v_prime` then `U` is
/// uniform on `(0, 1]`, so the result has law `v`. When `v_prime ≳ v` the
/// result is never below `k`.
pub fn correspond<R: Rng + ?Sized>(
    v: &[f64],
    v_prime: &[f64],
    k: usize,
    rng: &mut R,
) -> Result<usize, CouplingError> {
    let (start, end) = check(v, v_prime, k)?;
    let u = 1.0 - rng.random::<f64>();
    let target = start + u * (end - start);
    let mut cdf = 0.0;
    for (j, p) in v.iter().enumerate() {
        cdf += p;
        if cdf >= target {
            return Ok(j);
        }
    }
    Ok(v.len() - 1)
}

/// Exact law of [`correspond`]: entry `j` is
/// `(min(CDF_v(j), end) - max(CDF_v(j-1), start))+ / (end - start)`.
pub fn correspond_probabilities(
    v: &[f64],
    v_prime: &[f64],
    k: usize,
) -> Result<Vec<f64>, CouplingError> {
    let (start, end) = check(v, v_prime, k)?;
    let mut lo = 0.0;
    let mut out = Vec::with_capacity(v.len());
    for p in v {
        let hi = lo + p;
        out.push(((hi.min(end) - lo.max(start)).max(0.0)) / (end - start));
        lo = hi;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identical_vectors_give_identity() {
        let v = [0.2, 0.5, 0.3];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 0..3 {
            let p = correspond_probabilities(&v, &v, k).unwrap();
            assert!((p[k] - 1.0).abs() < 1e-12, "{p:?}");
            for _ in 0..1000 {
                assert_eq!(correspond(&v, &v, k, &mut rng).unwrap(), k);
            }
        }
    }

    #[test]
    fn two_state_example() {
        let v = [0.25, 0.75];
        let vp = [0.5, 0.5];
        assert_eq!(
            correspond_probabilities(&v, &vp, 0).unwrap(),
            vec![0.5, 0.5]
        );
        assert_eq!(
            correspond_probabilities(&v, &vp, 1).unwrap(),
            vec![0.0, 1.0]
        );
    }

    #[test]
    fn zero_mass_and_range_errors() {
        assert!(matches!(
            correspond_probabilities(&[0.5, 0.5], &[1.0, 0.0], 1),
            Err(CouplingError::ZeroMass { k: 1 })
        ));
        assert!(matches!(
            correspond_probabilities(&[0.5, 0.5], &[0.5, 0.5], 2),
            Err(CouplingError::StateOutOfRange { .. })
        ));
    }

    #[test]
    fn mixture_over_k_recovers_v() {
        let v = [0.1, 0.3, 0.4, 0.2];
        let vp = [0.3, 0.3, 0.2, 0.2];
        let mut mix = [0.0; 4];
        for k in 0..4 {
            let q = correspond_probabilities(&v, &vp, k).unwrap();
            for j in 0..4 {
                mix[j] += vp[k] * q[j];
            }
        }
        for j in 0..4 {
            assert!((mix[j] - v[j]).abs() < 1e-12);
        }
    }
}
