//! Independent reference computations for checking the fast paths:
//! Monte-Carlo simulation of the channel, exhaustive pattern enumeration,
//! direct mutual information, and grid-search capacity for binary inputs.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{apply_pattern, BitString, ChannelSpec, RepetitionPattern};
use crate::dmc::{check_distribution, Dmc};
use crate::error::{Error, Result};
use crate::poisson::{self, PoissonParams};

/// Largest pattern space [`enumerate_transition`] will walk.
pub const MAX_ENUMERATED_PATTERNS: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    pub samples_per_input: u64,
}

impl SimConfig {
    /// Random stream for input `x_j`: ChaCha8 keyed by `seed`, stream number
    /// `j`. Streams depend only on the input index, never on scheduling.
    pub fn stream(&self, input_index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(input_index);
        rng
    }
}

/// Draws a `Poisson(λ)` count by inverting the CDF.
pub fn sample_poisson<R: Rng + ?Sized>(params: PoissonParams, rng: &mut R) -> u32 {
    let lambda = params.lambda();
    if lambda == 0.0 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k = 0u32;
    let mut term = (-lambda).exp();
    let mut cdf = term;
    while u > cdf {
        k += 1;
        term *= lambda / f64::from(k);
        let next = cdf + term;
        if next == cdf {
            // remaining mass is below rounding
            break;
        }
        cdf = next;
    }
    k
}

/// Passes `x` through the channel once; also returns the repetition pattern.
pub fn simulate_with_pattern<R: Rng + ?Sized>(
    x: BitString,
    lambda: f64,
    rng: &mut R,
) -> Result<(BitString, RepetitionPattern)> {
    let params = PoissonParams::new(lambda)?;
    let pattern = RepetitionPattern(x.bits().map(|_| sample_poisson(params, rng)).collect());
    let y = apply_pattern(x, &pattern)?;
    Ok((y, pattern))
}

/// Passes `x` through the channel once.
pub fn simulate<R: Rng + ?Sized>(x: BitString, lambda: f64, rng: &mut R) -> Result<BitString> {
    simulate_with_pattern(x, lambda, rng).map(|(y, _)| y)
}

/// Outcome counts for one input under rejection of invalid patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalRow {
    pub input: BitString,
    pub samples: u64,
    /// Samples whose pattern satisfied every cap.
    pub accepted: u64,
    pub counts: BTreeMap<BitString, u64>,
}

impl EmpiricalRow {
    pub fn frequency(&self, y: BitString) -> f64 {
        if self.accepted == 0 {
            return 0.0;
        }
        self.counts.get(&y).copied().unwrap_or(0) as f64 / self.accepted as f64
    }
}

/// Simulates every input of `spec` and tallies outputs of the patterns that
/// satisfy the per-bit and total caps. Patterns exceeding 64 output bits are
/// rejected without being materialized.
pub fn empirical_matrix(spec: &ChannelSpec, config: &SimConfig) -> Result<Vec<EmpiricalRow>> {
    spec.validate()?;
    let params = spec.params();
    (0..spec.num_inputs() as u64)
        .into_par_iter()
        .map(|j| {
            let x = BitString::new(spec.block_len as usize, j)?;
            let mut rng = config.stream(j);
            let mut row = EmpiricalRow {
                input: x,
                samples: config.samples_per_input,
                accepted: 0,
                counts: BTreeMap::new(),
            };
            for _ in 0..config.samples_per_input {
                let pattern =
                    RepetitionPattern(x.bits().map(|_| sample_poisson(params, &mut rng)).collect());
                let capped = spec.per_bit_cap.is_some_and(|c| pattern.max_count() > c);
                if capped || pattern.total() > u64::from(spec.max_output_len) {
                    continue;
                }
                let y = apply_pattern(x, &pattern)?;
                row.accepted += 1;
                *row.counts.entry(y).or_insert(0) += 1;
            }
            Ok(row)
        })
        .collect()
}

/// `p(y | x)` by walking all `(cap + 1)^L` capped repetition patterns.
pub fn enumerate_transition(x: BitString, y: BitString, lambda: f64, per_bit_cap: u32) -> Result<f64> {
    let params = PoissonParams::new(lambda)?;
    let l = x.len();
    let size = u128::from(per_bit_cap + 1).checked_pow(l as u32);
    match size {
        Some(n) if n <= MAX_ENUMERATED_PATTERNS => {}
        Some(n) => return Err(Error::InstanceTooLarge(n)),
        None => return Err(Error::InstanceTooLarge(u128::MAX)),
    }
    let table = poisson::pmf_table(per_bit_cap as usize + 1, params);
    let mut counts = vec![0u32; l];
    let mut total = 0.0;
    loop {
        if counts.iter().map(|&c| c as usize).sum::<usize>() == y.len() {
            let out = apply_pattern(x, &RepetitionPattern(counts.clone()))?;
            if out == y {
                total += counts.iter().map(|&c| table[c as usize]).product::<f64>();
            }
        }
        // odometer increment
        let mut i = 0;
        loop {
            if i == l {
                return Ok(total);
            }
            if counts[i] < per_bit_cap {
                counts[i] += 1;
                break;
            }
            counts[i] = 0;
            i += 1;
        }
    }
}

/// `I(X; Y) = H(Y) − H(Y | X)` straight from the definition.
pub fn mutual_information(dmc: &Dmc, input_dist: &[f64]) -> Result<f64> {
    check_distribution(input_dist, dmc.num_inputs(), 1e-9)?;
    let plogp = |p: f64| if p > 0.0 { p * p.log2() } else { 0.0 };
    let mut py = vec![0.0; dmc.num_outputs()];
    let mut h_y_given_x = 0.0;
    for (j, &q) in input_dist.iter().enumerate() {
        let mut h_row = 0.0;
        for i in 0..dmc.num_outputs() {
            let p = dmc.entry(j, i);
            py[i] += q * p;
            h_row -= plogp(p);
        }
        h_y_given_x += q * h_row;
    }
    let h_y: f64 = -py.iter().map(|&p| plogp(p)).sum::<f64>();
    Ok(h_y - h_y_given_x)
}

/// Largest mutual information over `P(X = x_1) ∈ {0, 1/n, …, 1}` for a
/// two-input channel.
pub fn grid_capacity(dmc: &Dmc, grid_steps: usize) -> Result<f64> {
    if dmc.num_inputs() != 2 {
        return Err(Error::NotBinaryInput(dmc.num_inputs()));
    }
    let steps = grid_steps.max(1);
    (0..=steps)
        .map(|k| {
            let a = k as f64 / steps as f64;
            mutual_information(dmc, &[a, 1.0 - a])
        })
        .try_fold(f64::NEG_INFINITY, |best, mi| mi.map(|m| best.max(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_matrix, transition_prob, DEFAULT_MEMORY_BUDGET};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn zero_rate_deletes_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(simulate(bs("0110"), 0.0, &mut rng).unwrap(), BitString::EMPTY);
        }
    }

    #[test]
    fn single_bit_mean_length() {
        let lambda = 1.7;
        let n = 200_000u64;
        let mut rng = SimConfig { seed: 9, samples_per_input: n }.stream(0);
        let mut sum = 0.0;
        for _ in 0..n {
            let y = simulate(bs("0"), lambda, &mut rng).unwrap();
            assert!(y.bits().all(|b| !b));
            sum += y.len() as f64;
        }
        let mean = sum / n as f64;
        let sigma = (lambda / n as f64).sqrt();
        assert!((mean - lambda).abs() < 4.0 * sigma, "{mean}");
    }

    #[test]
    fn streams_are_reproducible() {
        let cfg = SimConfig { seed: 42, samples_per_input: 10 };
        let a: Vec<u32> = (0..20).map(|_| cfg.stream(3).random()).collect();
        let b: Vec<u32> = (0..20).map(|_| cfg.stream(3).random()).collect();
        assert_eq!(a, b);
        let mut s3 = cfg.stream(3);
        let mut s4 = cfg.stream(4);
        assert_ne!(s3.random::<u64>(), s4.random::<u64>());
    }

    #[test]
    fn enumeration_examples() {
        let lambda: f64 = 0.6;
        let e = (-lambda).exp();
        let v = enumerate_transition(bs("11"), bs("11"), lambda, 1).unwrap();
        assert!((v - (lambda * e).powi(2)).abs() < 1e-15);
        assert_eq!(enumerate_transition(bs("01"), bs("11"), lambda, 1).unwrap(), 0.0);
        assert_eq!(enumerate_transition(bs("010"), bs("0000000"), lambda, 2).unwrap(), 0.0);
        assert!(matches!(
            enumerate_transition(BitString::new(20, 0).unwrap(), bs("0"), 1.0, 3),
            Err(Error::InstanceTooLarge(_))
        ));
    }

    #[test]
    fn mutual_information_cases() {
        let id = Dmc::from_dense(vec![
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!((mutual_information(&id, &[0.25; 4]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(mutual_information(&id, &[0.0, 1.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(mutual_information(&id, &[0.5, 0.5]).is_err());
    }

    #[test]
    fn grid_capacity_erasure() {
        let bec = Dmc::from_dense(vec![vec![0.7, 0.3, 0.0], vec![0.0, 0.3, 0.7]]).unwrap();
        assert!((grid_capacity(&bec, 4000).unwrap() - 0.7).abs() < 1e-4);
        let three = Dmc::from_dense(vec![vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(grid_capacity(&three, 10), Err(Error::NotBinaryInput(3))));
    }

    #[test]
    fn grid_capacity_single_bit_prc() {
        let lambda: f64 = 1.0;
        let spec = ChannelSpec {
            lambda,
            block_len: 1,
            max_output_len: 8,
            per_bit_cap: None,
            conditioned: true,
        };
        let m = build_matrix(&spec, DEFAULT_MEMORY_BUDGET).unwrap();
        let f = poisson::cdf(8, PoissonParams::new(lambda).unwrap());
        let exact = 1.0 - (-lambda).exp() / f;
        assert!((exact - 0.632_120_144_889_188_97).abs() < 1e-12);
        assert!((grid_capacity(m.dmc(), 4000).unwrap() - exact).abs() < 1e-4);
    }

    #[test]
    fn dp_matches_enumeration_small() {
        for l in 1..=3 {
            for x in BitString::all_of_len(l) {
                for n in 0..=(2 * l) {
                    for y in BitString::all_of_len(n) {
                        let a = enumerate_transition(x, y, 0.9, 2).unwrap();
                        let b = transition_prob(x, y, 0.9, Some(2));
                        assert!((a - b).abs() < 1e-12, "{x} {y}");
                    }
                }
            }
        }
    }
}
