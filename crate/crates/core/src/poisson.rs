//! Poisson distribution primitives.
//!
//! Everything here is a pure function of its arguments. Probabilities are
//! returned in linear space; values below [`UNDERFLOW`] are flushed to zero so
//! downstream logarithms never see denormals.

use std::f64::consts::{E, LOG2_E, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Probabilities smaller than this are stored as exact zeros.
pub const UNDERFLOW: f64 = 1e-300;

/// Default tail tolerance for [`entropy`].
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Rate parameter of a Poisson distribution (expected repetitions per bit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonParams {
    lambda: f64,
}

impl PoissonParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "poisson rate must be finite and nonnegative, got {lambda}"
            )));
        }
        Ok(Self { lambda })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }

    /// Parameter of the sum of `n` independent copies.
    pub fn scaled(self, n: u32) -> Self {
        Self {
            lambda: self.lambda * f64::from(n),
        }
    }
}

/// `ln P(Z = r)`, or `-inf` when the mass is exactly zero.
pub fn ln_pmf(r: u32, params: PoissonParams) -> f64 {
    let lambda = params.lambda;
    if lambda == 0.0 {
        return if r == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let r = f64::from(r);
    r * lambda.ln() - lambda - ln_gamma(r + 1.0)
}

/// `P(Z = r) = e^{-λ} λ^r / r!`, evaluated in log space.
pub fn pmf(r: u32, params: PoissonParams) -> f64 {
    let p = ln_pmf(r, params).exp();
    if p < UNDERFLOW {
        0.0
    } else {
        p
    }
}

/// The first `n` pmf values `P(Z = 0..n)`.
pub fn pmf_table(n: usize, params: PoissonParams) -> Vec<f64> {
    (0..n as u32).map(|r| pmf(r, params)).collect()
}

/// `F(R; λ) = P(Z ≤ R)`.
///
/// Summed with the forward recurrence `t_{k+1} = t_k λ / (k + 1)`. For rates
/// large enough that `e^{-λ}` underflows the terms are taken from [`pmf`]
/// directly instead.
pub fn cdf(r: u32, params: PoissonParams) -> f64 {
    let lambda = params.lambda;
    if lambda == 0.0 {
        return 1.0;
    }
    let start = (-lambda).exp();
    let sum = if start > UNDERFLOW {
        let mut term = start;
        let mut sum = start;
        for k in 1..=r {
            term *= lambda / f64::from(k);
            sum += term;
        }
        sum
    } else {
        (0..=r).map(|k| pmf(k, params)).sum()
    };
    sum.min(1.0)
}

/// Shannon entropy of `Poisson(λ)` in bits.
///
/// The series is cut once the geometric majorant of the remaining mass drops
/// below `tail_tol`; past the cut each term ratio is at most
/// `ρ = λ / (R + 2) < 1`, so with `a = P(Z = R + 1) < 1/e` the omitted entropy
/// is at most `a (−log2 a) / (1 − ρ) + a (−log2 ρ) ρ / (1 − ρ)²`. That bound is
/// added to the partial sum, so the result over-estimates the true entropy by
/// at most `O(tail_tol · log2(1 / tail_tol))` bits.
pub fn entropy(params: PoissonParams, tail_tol: f64) -> f64 {
    let lambda = params.lambda;
    if lambda == 0.0 {
        return 0.0;
    }
    let tail_tol = if tail_tol > 0.0 { tail_tol } else { DEFAULT_TAIL_TOL };
    let mut sum = 0.0;
    let mut r: u32 = 0;
    loop {
        let lp = ln_pmf(r, params);
        let p = lp.exp();
        if p > 0.0 {
            sum -= p * lp * LOG2_E;
        }
        let next = f64::from(r) + 1.0;
        if next + 1.0 > lambda {
            let rho = lambda / (next + 1.0);
            let a = ln_pmf(r + 1, params).exp();
            let tail_mass = a / (1.0 - rho);
            if tail_mass < tail_tol && a < 1.0 / E {
                if a > 0.0 {
                    let la = -a.log2();
                    sum += a * la / (1.0 - rho);
                    if rho > 0.0 {
                        sum += a * (-rho.log2()) * rho / ((1.0 - rho) * (1.0 - rho));
                    }
                }
                return sum;
            }
        }
        r += 1;
    }
}

/// Gaussian-style upper bound on Poisson entropy, `½ log2(2πe(λ + 1/12))`.
pub fn entropy_upper_adell(params: PoissonParams) -> Result<f64> {
    if params.lambda == 0.0 {
        return Err(Error::InvalidParameter(
            "entropy bound requires a positive rate".into(),
        ));
    }
    Ok(0.5 * (2.0 * PI * E * (params.lambda + 1.0 / 12.0)).log2())
}

/// Entropy of a Bernoulli(`p`) variable in bits, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// Distribution of the total repetition count of a block, restricted to
/// patterns that satisfy the per-bit and total caps.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSumDistribution {
    /// `probs[s]` is the probability that the block repeats `s` times in
    /// total and every cap holds.
    pub probs: Vec<f64>,
    pub total_mass: f64,
}

/// Distribution of `R = r_1 + … + r_L` over i.i.d. Poisson counts, keeping only
/// patterns with `r_i ≤ per_bit_cap` and `R ≤ total_cap`.
pub fn truncated_sum_distribution(
    block_len: u32,
    params: PoissonParams,
    per_bit_cap: Option<u32>,
    total_cap: u32,
) -> Result<TruncatedSumDistribution> {
    if block_len == 0 {
        return Err(Error::InvalidParameter("block length must be positive".into()));
    }
    let bit_max = per_bit_cap.map_or(total_cap, |c| c.min(total_cap)) as usize;
    let single = pmf_table(bit_max + 1, params);
    let width = total_cap as usize + 1;

    let mut acc = vec![0.0; width];
    acc[..single.len()].copy_from_slice(&single);
    for _ in 1..block_len {
        let mut next = vec![0.0; width];
        for (s, &p) in acc.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for (r, &q) in single.iter().enumerate().take(width - s) {
                next[s + r] += p * q;
            }
        }
        acc = next;
    }
    let total_mass = acc.iter().sum::<f64>().min(1.0);
    Ok(TruncatedSumDistribution {
        probs: acc,
        total_mass,
    })
}
