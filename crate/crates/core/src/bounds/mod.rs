//! Capacity bounds for the Poisson-repeat channel, per input bit.
//!
//! With side information revealing each block's output length, the block
//! channel restricted to valid repetition patterns has a capacity `f` that
//! the Blahut–Arimoto solver brackets. With `P` the probability of the
//! validity event (`F(R_m; Lλ)` for a pure length cap, `P_s` with a per-bit
//! cap as well):
//!
//! * upper bound: `(1/L) · P · (f + ε) + 1 − P`,
//! * lower bound: `(1/L) · (P_s · f − h(P_s) − H(V))`, with `V ~ Poisson(Lλ)`
//!   the block output length.
//!
//! Both bounds are normalized per input bit. Upper bounds add the solver
//! precision `ε` to the lower bracket (or use the upper bracket when the
//! solver did not converge); lower bounds use the lower bracket as is.

pub mod partition;
pub mod reference;
pub mod sweep;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

pub use partition::{partition_identity, restricted_rate};
pub use sweep::{sweep, EnvelopePoint, SweepRequest, SweepResult};

use crate::baa::{self, BaaResult};
use crate::channel::{build_matrix, cache::MatrixCache, ChannelSpec, DEFAULT_MEMORY_BUDGET};
use crate::error::{Error, Result};
use crate::poisson::{self, PoissonParams};

/// Block parameters `(L, R̄_m, R_m)` of one truncated channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BlockSpec {
    pub block_len: u32,
    pub per_bit_cap: Option<u32>,
    pub max_output_len: u32,
}

impl BlockSpec {
    pub fn new(block_len: u32, per_bit_cap: Option<u32>, max_output_len: u32) -> Self {
        Self {
            block_len,
            per_bit_cap,
            max_output_len,
        }
    }

    pub fn channel(&self, lambda: f64) -> ChannelSpec {
        ChannelSpec {
            lambda,
            block_len: self.block_len,
            max_output_len: self.max_output_len,
            per_bit_cap: self.per_bit_cap,
            conditioned: true,
        }
    }

    /// The upper-bound kind that applies to this block.
    pub fn upper_kind(&self) -> BoundKind {
        if self.per_bit_cap.is_some() {
            BoundKind::CappedUpper
        } else {
            BoundKind::LengthUpper
        }
    }
}

impl fmt::Display for BlockSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.per_bit_cap {
            Some(c) => write!(f, "{},{},{}", self.block_len, c, self.max_output_len),
            None => write!(f, "{},{}", self.block_len, self.max_output_len),
        }
    }
}

impl FromStr for BlockSpec {
    type Err = Error;

    /// Parses `L,Rm` or `L,Rbar,Rm`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::InvalidParameter(format!("bad block spec {s:?}: {e}")))?;
        match parts[..] {
            [l, rm] => Ok(Self::new(l, None, rm)),
            [l, cap, rm] => Ok(Self::new(l, Some(cap), rm)),
            _ => Err(Error::InvalidParameter(format!(
                "block spec {s:?} must be L,Rm or L,Rbar,Rm"
            ))),
        }
    }
}

/// Which bound a report carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum BoundKind {
    /// Upper bound from the output-length-truncated channel.
    #[serde(rename = "upper9")]
    LengthUpper,
    /// Upper bound from the channel conditioned on per-bit and length caps.
    #[serde(rename = "upper15")]
    CappedUpper,
    /// Lower bound from the capped channel minus side-information entropy.
    #[serde(rename = "lower23")]
    SideInfoLower,
}

impl BoundKind {
    pub const ALL: [BoundKind; 3] = [
        BoundKind::LengthUpper,
        BoundKind::CappedUpper,
        BoundKind::SideInfoLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundKind::LengthUpper => "upper9",
            BoundKind::CappedUpper => "upper15",
            BoundKind::SideInfoLower => "lower23",
        }
    }

    pub fn is_upper(self) -> bool {
        !matches!(self, BoundKind::SideInfoLower)
    }

    /// Whether this kind is computed for `block`.
    pub fn applies_to(self, block: &BlockSpec) -> bool {
        match self {
            BoundKind::LengthUpper => block.per_bit_cap.is_none(),
            BoundKind::CappedUpper => block.per_bit_cap.is_some(),
            BoundKind::SideInfoLower => true,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s.trim())
            .ok_or_else(|| Error::InvalidParameter(format!("unknown bound kind {s:?}")))
    }
}

/// Numerical settings shared by every bound computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Blahut–Arimoto bracket width `ε`.
    pub epsilon: f64,
    pub max_iters: usize,
    pub memory_budget: u64,
    /// Tail tolerance for the side-information entropy.
    pub entropy_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            epsilon: baa::DEFAULT_EPSILON,
            max_iters: baa::DEFAULT_MAX_ITERS,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            entropy_tol: poisson::DEFAULT_TAIL_TOL,
        }
    }
}

/// Solved block channel: validity probabilities and the capacity bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSolution {
    pub lambda: f64,
    pub block: BlockSpec,
    /// `F(R_m; Lλ)`.
    pub p_b1: f64,
    /// Probability of the validity event (equals `p_b1` without a per-bit cap).
    pub p_s: f64,
    pub baa: BaaResult,
    pub num_outputs: usize,
    /// Whether the matrix was read from the on-disk cache.
    pub cached: bool,
    pub wall_time: f64,
}

impl BlockSolution {
    /// Capacity value certified to be at least `f`.
    fn f_upper(&self) -> f64 {
        if self.baa.converged {
            self.baa.cap_lower + self.baa.epsilon
        } else {
            self.baa.cap_upper
        }
    }

    fn block_len(&self) -> f64 {
        f64::from(self.block.block_len)
    }

    pub fn upper_bound(&self) -> f64 {
        let l = self.block_len();
        (self.p_s * self.f_upper() + (1.0 - self.p_s) * l) / l
    }

    pub fn side_info_entropy(&self, tail_tol: f64) -> f64 {
        let params = PoissonParams::new(self.lambda).expect("validated rate");
        poisson::entropy(params.scaled(self.block.block_len), tail_tol)
    }

    pub fn validity_entropy(&self) -> f64 {
        poisson::binary_entropy(self.p_s)
    }

    pub fn lower_bound(&self, tail_tol: f64) -> f64 {
        let l = self.block_len();
        (self.p_s * self.baa.cap_lower - self.validity_entropy() - self.side_info_entropy(tail_tol)) / l
    }

    pub fn report(&self, kind: BoundKind, opts: &SolverOptions) -> BoundReport {
        let value = if kind.is_upper() {
            self.upper_bound()
        } else {
            self.lower_bound(opts.entropy_tol)
        };
        BoundReport {
            lambda: self.lambda,
            block: self.block,
            kind,
            p_b1: self.p_b1,
            p_s: self.p_s,
            f_lo: self.baa.cap_lower,
            f_hi: self.baa.cap_upper,
            value,
            value_clamped: value.clamp(0.0, 1.0),
            h_s: self.validity_entropy(),
            h_v: self.side_info_entropy(opts.entropy_tol),
            converged: self.baa.converged,
            cached: self.cached,
            wall_time: self.wall_time,
            error: None,
        }
    }
}

/// One computed bound at one rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub lambda: f64,
    pub block: BlockSpec,
    pub kind: BoundKind,
    pub p_b1: f64,
    pub p_s: f64,
    /// Lower capacity bracket of the block channel (bits per block).
    pub f_lo: f64,
    /// Upper capacity bracket of the block channel (bits per block).
    pub f_hi: f64,
    /// Bound in bits per input bit, unclamped.
    pub value: f64,
    /// `value` clamped to `[0, 1]`.
    pub value_clamped: f64,
    pub h_s: f64,
    pub h_v: f64,
    pub converged: bool,
    pub cached: bool,
    pub wall_time: f64,
    /// Set when this point failed; numeric fields are then NaN.
    pub error: Option<String>,
}

impl BoundReport {
    pub fn failed(lambda: f64, block: BlockSpec, kind: BoundKind, error: String, wall_time: f64) -> Self {
        Self {
            lambda,
            block,
            kind,
            p_b1: f64::NAN,
            p_s: f64::NAN,
            f_lo: f64::NAN,
            f_hi: f64::NAN,
            value: f64::NAN,
            value_clamped: f64::NAN,
            h_s: f64::NAN,
            h_v: f64::NAN,
            converged: false,
            cached: false,
            wall_time,
            error: Some(error),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Builds (or loads) the conditioned block channel and brackets its capacity.
pub fn solve_block(
    lambda: f64,
    block: BlockSpec,
    opts: &SolverOptions,
    cache: Option<&MatrixCache>,
) -> Result<BlockSolution> {
    let start = Instant::now();
    let spec = block.channel(lambda);
    spec.validate()?;
    let cached_matrix = match cache {
        Some(c) => c.load(&spec)?,
        None => None,
    };
    let cached = cached_matrix.is_some();
    let matrix = match cached_matrix {
        Some(m) => m,
        None => {
            let m = build_matrix(&spec, opts.memory_budget)?;
            if let Some(c) = cache {
                c.store(&m)?;
            }
            m
        }
    };
    let params = spec.params();
    let p_b1 = poisson::cdf(block.max_output_len, params.scaled(block.block_len));
    let p_s = matrix.row_mass;
    let num_outputs = matrix.outputs.len();
    let baa = baa::capacity(matrix.dmc(), opts.epsilon, opts.max_iters)?;
    Ok(BlockSolution {
        lambda,
        block,
        p_b1,
        p_s,
        baa,
        num_outputs,
        cached,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

/// Upper bound from the channel truncated to outputs of length ≤ `R_m`.
pub fn upper_bound_length_truncated(
    lambda: f64,
    block_len: u32,
    max_output_len: u32,
    opts: &SolverOptions,
) -> Result<BoundReport> {
    let block = BlockSpec::new(block_len, None, max_output_len);
    Ok(solve_block(lambda, block, opts, None)?.report(BoundKind::LengthUpper, opts))
}

/// Upper bound from the channel conditioned on every `r_i ≤ R̄_m` and
/// `Σ r_i ≤ R_m`.
pub fn upper_bound_capped(
    lambda: f64,
    block_len: u32,
    per_bit_cap: u32,
    max_output_len: u32,
    opts: &SolverOptions,
) -> Result<BoundReport> {
    let block = BlockSpec::new(block_len, Some(per_bit_cap), max_output_len);
    Ok(solve_block(lambda, block, opts, None)?.report(BoundKind::CappedUpper, opts))
}

/// Lower bound from the capped channel minus the entropy of the validity
/// indicator and of the block output length.
pub fn lower_bound_side_info(
    lambda: f64,
    block_len: u32,
    per_bit_cap: u32,
    max_output_len: u32,
    opts: &SolverOptions,
) -> Result<BoundReport> {
    let block = BlockSpec::new(block_len, Some(per_bit_cap), max_output_len);
    Ok(solve_block(lambda, block, opts, None)?.report(BoundKind::SideInfoLower, opts))
}
