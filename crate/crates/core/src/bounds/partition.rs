//! Output partitioning of a finite channel.
//!
//! For disjoint output sets `B_k` covering the alphabet and a fixed input
//! distribution, the mutual information splits as
//! `I(X; Y) = Σ_k P(B_k) · R_k`, where `R_k` is the rate of the channel
//! restricted to `B_k` with every probability divided by `P(B_k)`.

use crate::dmc::{check_distribution, Dmc};
use crate::error::{Error, Result};
use crate::oracle;

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Rate of `dmc` restricted to `outputs`, renormalized by the set's total
/// output probability. Returns `(P(B), R)`; `R` is zero when `P(B) = 0`.
pub fn restricted_rate(dmc: &Dmc, outputs: &[usize], input_dist: &[f64]) -> (f64, f64) {
    let py: Vec<f64> = outputs
        .iter()
        .map(|&i| {
            input_dist
                .iter()
                .enumerate()
                .map(|(j, &q)| q * dmc.entry(j, i))
                .sum()
        })
        .collect();
    let mass: f64 = py.iter().sum();
    if mass <= 0.0 {
        return (0.0, 0.0);
    }
    let h_out: f64 = -py.iter().map(|&p| plogp(p / mass)).sum::<f64>();
    let h_cond: f64 = input_dist
        .iter()
        .enumerate()
        .map(|(j, &q)| {
            -q * outputs
                .iter()
                .map(|&i| plogp(dmc.entry(j, i) / mass))
                .sum::<f64>()
        })
        .sum();
    (mass, h_out - h_cond)
}

/// Both sides of the partition identity: `(I(X; Y), Σ_k P(B_k) R_k)`.
pub fn partition_identity(
    dmc: &Dmc,
    partitions: &[Vec<usize>],
    input_dist: &[f64],
) -> Result<(f64, f64)> {
    check_distribution(input_dist, dmc.num_inputs(), 1e-9)?;
    let n = dmc.num_outputs();
    let mut owner = vec![None; n];
    for (k, part) in partitions.iter().enumerate() {
        for &i in part {
            if i >= n {
                return Err(Error::InvalidPartition(format!("output {i} out of range")));
            }
            if let Some(prev) = owner[i].replace(k) {
                return Err(Error::InvalidPartition(format!(
                    "output {i} is in sets {prev} and {k}"
                )));
            }
        }
    }
    if let Some(i) = owner.iter().position(Option::is_none) {
        return Err(Error::InvalidPartition(format!("output {i} is not covered")));
    }

    let lhs = oracle::mutual_information(dmc, input_dist)?;
    let rhs = partitions
        .iter()
        .map(|part| {
            let (mass, rate) = restricted_rate(dmc, part, input_dist);
            mass * rate
        })
        .sum();
    Ok((lhs, rhs))
}
