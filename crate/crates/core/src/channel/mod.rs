//! Truncated block channels of the Poisson-repeat channel.
//!
//! An `L`-bit input block passes through the channel with each bit repeated
//! `r_i ~ Poisson(λ)` times independently. Restricting to outputs of length at
//! most `R_m` (and optionally to patterns with every `r_i ≤ R̄_m`) leaves a
//! finite channel with `2^L` inputs, built here as a [`TransitionMatrix`].

mod bits;
pub mod cache;

use rayon::prelude::*;

pub use bits::{apply_pattern, BitString, RepetitionPattern, MAX_BITS};

use crate::dmc::{Dmc, Row};
use crate::error::{Error, Result};
use crate::poisson::{self, PoissonParams, UNDERFLOW};

/// Largest supported block length.
pub const MAX_BLOCK_LEN: u32 = 24;

/// Default memory budget for a single matrix: 8 GiB.
pub const DEFAULT_MEMORY_BUDGET: u64 = 8 << 30;

/// Identifies one truncated block channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub lambda: f64,
    pub block_len: u32,
    pub max_output_len: u32,
    pub per_bit_cap: Option<u32>,
    /// Whether rows are divided by the probability of the validity event.
    pub conditioned: bool,
}

impl ChannelSpec {
    pub fn validate(&self) -> Result<()> {
        PoissonParams::new(self.lambda)?;
        if self.block_len == 0 || self.block_len > MAX_BLOCK_LEN {
            return Err(Error::InvalidParameter(format!(
                "block length must be in 1..={MAX_BLOCK_LEN}, got {}",
                self.block_len
            )));
        }
        if self.max_output_len as usize > MAX_BITS {
            return Err(Error::InvalidParameter(format!(
                "maximum output length must be at most {MAX_BITS}, got {}",
                self.max_output_len
            )));
        }
        Ok(())
    }

    pub fn params(&self) -> PoissonParams {
        PoissonParams::new(self.lambda).expect("validated rate")
    }

    pub fn num_inputs(&self) -> usize {
        1usize << self.block_len
    }

    /// Largest repetition count any single bit can contribute.
    fn bit_limit(&self) -> u32 {
        self.per_bit_cap
            .map_or(self.max_output_len, |c| c.min(self.max_output_len))
    }

    /// Probability that a block's repetition pattern satisfies every cap.
    ///
    /// Without a per-bit cap this is `F(R_m; Lλ)`; with one it is `P_s`.
    pub fn validity_mass(&self) -> f64 {
        let params = self.params();
        match self.per_bit_cap {
            None => poisson::cdf(self.max_output_len, params.scaled(self.block_len)),
            Some(cap) => {
                poisson::truncated_sum_distribution(
                    self.block_len,
                    params,
                    Some(cap),
                    self.max_output_len,
                )
                .expect("validated block length")
                .total_mass
            }
        }
    }
}

/// Probability that input `x` produces exactly `y`, summed over every
/// repetition pattern that maps `x` to `y` (and respects `per_bit_cap`).
///
/// Prefix dynamic program: `dp[i][j]` is the probability that the first `i`
/// input bits produce the first `j` output bits.
pub fn transition_prob(x: BitString, y: BitString, lambda: f64, per_bit_cap: Option<u32>) -> f64 {
    let params = PoissonParams::new(lambda).expect("nonnegative rate");
    let n = y.len();
    let cap = per_bit_cap.map_or(n, |c| (c as usize).min(n));
    let table = poisson::pmf_table(cap + 1, params);
    let ybits: Vec<bool> = y.bits().collect();

    let mut prev = vec![0.0; n + 1];
    prev[0] = 1.0;
    for b in x.bits() {
        let mut cur = vec![0.0; n + 1];
        for j in 0..=n {
            let mut acc = prev[j] * table[0];
            for r in 1..=cap.min(j) {
                if ybits[j - r] != b {
                    break;
                }
                acc += table[r] * prev[j - r];
            }
            cur[j] = acc;
        }
        prev = cur;
    }
    prev[n]
}

/// Every output of length at most `R_m` that some input can produce, in
/// canonical order.
///
/// An output with runs of lengths `s_1 … s_k` needs `⌈s_t / R̄_m⌉` input bits
/// for run `t` (one bit per run without a cap), and is reachable exactly when
/// those sum to at most `L`; any leftover input bits are deleted.
pub fn enumerate_outputs(spec: &ChannelSpec) -> Result<Vec<BitString>> {
    spec.validate()?;
    let mut out = vec![BitString::EMPTY];
    let cap = spec.per_bit_cap.map(|c| c as usize);
    if cap == Some(0) {
        return Ok(out);
    }
    let max_len = spec.max_output_len as usize;
    let budget = spec.block_len as usize;

    // depth-first over run decompositions; each string has exactly one
    let mut stack: Vec<(BitString, Option<bool>, usize)> = vec![(BitString::EMPTY, None, 0)];
    while let Some((s, last, used)) = stack.pop() {
        let bits: &[bool] = match last {
            None => &[false, true],
            Some(false) => &[true],
            Some(true) => &[false],
        };
        for &b in bits {
            for t in 1..=(max_len - s.len()) {
                let cost = cap.map_or(1, |c| t.div_ceil(c));
                if used + cost > budget {
                    break;
                }
                let next = s.push_run_unchecked(b, t);
                out.push(next);
                stack.push((next, Some(b), used + cost));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Row-stochastic (after conditioning) matrix of a truncated block channel.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub spec: ChannelSpec,
    /// Output alphabet in canonical order; every column has a nonzero entry.
    pub outputs: Vec<BitString>,
    /// Common row sum before conditioning.
    pub row_mass: f64,
    dmc: Dmc,
}

impl TransitionMatrix {
    pub(crate) fn from_parts(
        spec: ChannelSpec,
        outputs: Vec<BitString>,
        row_mass: f64,
        dmc: Dmc,
    ) -> Self {
        Self {
            spec,
            outputs,
            row_mass,
            dmc,
        }
    }

    pub fn dmc(&self) -> &Dmc {
        &self.dmc
    }

    pub fn into_dmc(self) -> Dmc {
        self.dmc
    }

    pub fn column_of(&self, y: BitString) -> Option<usize> {
        self.outputs.binary_search(&y).ok()
    }

    /// `p(y | x)` as stored (zero for outputs outside the alphabet).
    pub fn prob(&self, x: BitString, y: BitString) -> f64 {
        debug_assert_eq!(x.len(), self.spec.block_len as usize);
        self.column_of(y)
            .map_or(0.0, |c| self.dmc.entry(x.value() as usize, c))
    }
}

/// All outputs of input `x` with their probabilities, in canonical order.
///
/// Expands the output prefix one input bit at a time, merging identical
/// prefixes; equivalent to summing [`transition_prob`] over every output.
fn expand_row(x: BitString, spec: &ChannelSpec, table: &[f64]) -> Vec<(BitString, f64)> {
    let max_len = spec.max_output_len as usize;
    let bit_limit = spec.bit_limit() as usize;
    let mut states = vec![(BitString::EMPTY, 1.0)];
    let mut scratch: Vec<(BitString, f64)> = Vec::new();
    for b in x.bits() {
        scratch.clear();
        for &(s, p) in &states {
            let room = bit_limit.min(max_len - s.len());
            for (r, &w) in table.iter().enumerate().take(room + 1) {
                if w == 0.0 {
                    continue;
                }
                scratch.push((s.push_run_unchecked(b, r), p * w));
            }
        }
        // stable, so equal keys are summed in generation order
        scratch.sort_by_key(|&(s, _)| s);
        states.clear();
        for &(s, p) in &scratch {
            match states.last_mut() {
                Some((last, acc)) if *last == s => *acc += p,
                _ => states.push((s, p)),
            }
        }
    }
    states
}

/// Builds the transition matrix of `spec`, failing if its dense footprint
/// `2^L × |outputs| × 8` bytes exceeds `memory_budget`.
pub fn build_matrix(spec: &ChannelSpec, memory_budget: u64) -> Result<TransitionMatrix> {
    let candidates = enumerate_outputs(spec)?;
    let required = (spec.num_inputs() as u64)
        .saturating_mul(candidates.len() as u64)
        .saturating_mul(8);
    if required > memory_budget {
        return Err(Error::MemoryBudget {
            required,
            available: memory_budget,
        });
    }

    let table = poisson::pmf_table(spec.bit_limit() as usize + 1, spec.params());
    let raw: Vec<Vec<(BitString, f64)>> = (0..spec.num_inputs())
        .into_par_iter()
        .map(|j| {
            let x = BitString::new(spec.block_len as usize, j as u64).expect("block fits");
            expand_row(x, spec, &table)
        })
        .collect();

    let mut used = vec![false; candidates.len()];
    for row in &raw {
        for &(y, p) in row {
            if p >= UNDERFLOW {
                let c = candidates
                    .binary_search(&y)
                    .expect("expanded output is structurally reachable");
                used[c] = true;
            }
        }
    }
    let mut column = vec![u32::MAX; candidates.len()];
    let mut outputs = Vec::new();
    for (c, y) in candidates.iter().enumerate() {
        if used[c] {
            column[c] = outputs.len() as u32;
            outputs.push(*y);
        }
    }
    drop(used);

    let row_mass = spec.validity_mass();
    let scale = if spec.conditioned && row_mass > 0.0 {
        1.0 / row_mass
    } else {
        1.0
    };
    let num_outputs = outputs.len();
    let rows: Vec<Row> = raw
        .into_par_iter()
        .map(|row| {
            let entries: Vec<(u32, f64)> = row
                .into_iter()
                .filter(|&(_, p)| p >= UNDERFLOW)
                .map(|(y, p)| {
                    let c = candidates.binary_search(&y).expect("reachable");
                    (column[c], p * scale)
                })
                .filter(|&(_, p)| p >= UNDERFLOW)
                .collect();
            Row::from_sorted_entries(num_outputs, &entries)
        })
        .collect();

    let dmc = Dmc::new(num_outputs, rows)?;
    Ok(TransitionMatrix::from_parts(*spec, outputs, row_mass, dmc))
}
