//! Blahut–Arimoto capacity solver with a certified bracket.
//!
//! Each iteration computes, for the current input distribution `q`,
//!
//! ```text
//! D_j = Σ_i p_ji log2(p_ji / Σ_k q_k p_ki)
//! ```
//!
//! and the classical bracket `log2 Σ_j q_j 2^{D_j} ≤ C ≤ max_j D_j`. The solver
//! stops once the bracket is narrower than the requested precision, so the
//! lower end is a value `f_BAA` with `0 ≤ C − f_BAA ≤ ε`.

use rayon::prelude::*;

use crate::dmc::Dmc;
use crate::error::Result;

/// Default bracket width.
pub const DEFAULT_EPSILON: f64 = 0.005;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// Tolerance on row sums accepted by the solver.
pub const ROW_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BaaResult {
    pub input_dist: Vec<f64>,
    /// Output distribution induced by `input_dist`.
    pub output_dist: Vec<f64>,
    /// Capacity lower bracket in bits per channel use.
    pub cap_lower: f64,
    /// Capacity upper bracket in bits per channel use.
    pub cap_upper: f64,
    pub iterations: usize,
    pub epsilon: f64,
    pub converged: bool,
}

impl BaaResult {
    pub fn width(&self) -> f64 {
        self.cap_upper - self.cap_lower
    }
}

/// Bracket produced by one solver iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

/// Iteration state; [`capacity`] drives it to convergence.
pub struct BaaSolver<'a> {
    dmc: &'a Dmc,
    /// `Σ_i p_ji log2 p_ji` per input.
    neg_entropy: Vec<f64>,
    q: Vec<f64>,
    output: Vec<f64>,
    log_output: Vec<f64>,
    divergence: Vec<f64>,
    iterations: usize,
}

impl<'a> BaaSolver<'a> {
    /// Starts from the uniform input distribution. Rows must be stochastic.
    pub fn new(dmc: &'a Dmc) -> Result<Self> {
        dmc.check_stochastic(ROW_SUM_TOL)?;
        let n = dmc.num_inputs();
        let neg_entropy = dmc
            .rows()
            .par_iter()
            .map(|row| row.nonzeros().map(|(_, p)| p * p.log2()).sum())
            .collect();
        Ok(Self {
            dmc,
            neg_entropy,
            q: vec![1.0 / n as f64; n],
            output: vec![0.0; dmc.num_outputs()],
            log_output: vec![0.0; dmc.num_outputs()],
            divergence: vec![0.0; n],
            iterations: 0,
        })
    }

    pub fn input_dist(&self) -> &[f64] {
        &self.q
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Evaluates the bracket at the current distribution, then moves the
    /// distribution one multiplicative update forward.
    pub fn step(&mut self) -> Bracket {
        self.output = self.dmc.output_distribution(&self.q);
        for (lo, &p) in self.log_output.iter_mut().zip(&self.output) {
            *lo = if p > 0.0 { p.log2() } else { 0.0 };
        }
        let log_output = &self.log_output;
        self.divergence
            .par_iter_mut()
            .zip(self.dmc.rows().par_iter())
            .zip(self.neg_entropy.par_iter())
            .for_each(|((d, row), &ne)| {
                let cross: f64 = row.nonzeros().map(|(c, p)| p * log_output[c]).sum();
                *d = ne - cross;
            });

        let upper = self
            .divergence
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        // shift by the max so 2^{D_j - upper} ≤ 1
        let mut total = 0.0;
        for (q, &d) in self.q.iter_mut().zip(&self.divergence) {
            *q *= (d - upper).exp2();
            total += *q;
        }
        let lower = upper + total.log2();
        for q in &mut self.q {
            *q /= total;
        }
        self.iterations += 1;
        // C ≤ log2 min(|X|, |Y|) always
        let alphabet = (self.dmc.num_inputs().min(self.dmc.num_outputs()) as f64).log2();
        Bracket {
            lower: lower.max(0.0),
            upper: upper.min(alphabet).max(lower.max(0.0)),
        }
    }
}

/// Capacity of `dmc` to within `epsilon` bits.
///
/// Returns the last bracket with `converged = false` when `max_iters`
/// iterations are not enough.
pub fn capacity(dmc: &Dmc, epsilon: f64, max_iters: usize) -> Result<BaaResult> {
    if !(epsilon > 0.0) {
        return Err(crate::Error::InvalidParameter(format!(
            "precision must be positive, got {epsilon}"
        )));
    }
    let mut solver = BaaSolver::new(dmc)?;
    let mut bracket = Bracket {
        lower: 0.0,
        upper: f64::INFINITY,
    };
    // distribution at which `bracket` was evaluated
    let mut at = solver.q.clone();
    let mut converged = false;
    while solver.iterations < max_iters.max(1) {
        at.copy_from_slice(&solver.q);
        bracket = solver.step();
        if bracket.upper - bracket.lower <= epsilon {
            converged = true;
            break;
        }
    }
    let output_dist = dmc.output_distribution(&at);
    Ok(BaaResult {
        input_dist: at,
        output_dist,
        cap_lower: bracket.lower,
        cap_upper: bracket.upper,
        iterations: solver.iterations,
        epsilon,
        converged,
    })
}
