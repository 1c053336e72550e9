//! Bounds over a grid of rates and block specs.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{solve_block, BlockSolution, BlockSpec, BoundKind, BoundReport, SolverOptions};
use crate::channel::cache::MatrixCache;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SweepRequest {
    pub grid: Vec<f64>,
    pub blocks: Vec<BlockSpec>,
    pub kinds: Vec<BoundKind>,
    pub options: SolverOptions,
    /// Worker threads; results do not depend on this.
    pub jobs: usize,
    pub cache: Option<MatrixCache>,
}

/// Smallest upper bound over all blocks at one rate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopePoint {
    pub lambda: f64,
    pub value: f64,
    /// Block attaining the minimum.
    pub block: BlockSpec,
    pub kind: BoundKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    /// Ordered by rate, then block, then kind.
    pub reports: Vec<BoundReport>,
    /// One point per rate that has at least one successful upper bound.
    pub envelope: Vec<EnvelopePoint>,
}

impl SweepResult {
    pub fn all_ok(&self) -> bool {
        self.reports.iter().all(BoundReport::is_ok)
    }
}

type Key = (u64, BlockSpec);
type Slot = Arc<OnceLock<std::result::Result<BlockSolution, String>>>;

/// Computes every requested bound for every `(λ, block)` pair.
///
/// Per-point failures are recorded in the report rather than aborting the
/// sweep. Each distinct `(λ, block)` channel is solved once even if it
/// appears several times.
pub fn sweep(request: &SweepRequest) -> Result<SweepResult> {
    if request.grid.is_empty() {
        return Err(Error::InvalidParameter("rate grid is empty".into()));
    }
    if request.blocks.is_empty() {
        return Err(Error::InvalidParameter("no block specs given".into()));
    }
    let mut kinds = request.kinds.clone();
    kinds.sort();
    kinds.dedup();

    let points: Vec<(f64, BlockSpec)> = request
        .grid
        .iter()
        .flat_map(|&l| request.blocks.iter().map(move |&b| (l, b)))
        .filter(|(_, b)| kinds.iter().any(|k| k.applies_to(b)))
        .collect();

    let slots: Mutex<HashMap<Key, Slot>> = Mutex::new(HashMap::new());
    let opts = &request.options;
    let cache = request.cache.as_ref();
    let run = || -> Vec<Vec<BoundReport>> {
        points
            .par_iter()
            .map(|&(lambda, block)| {
                let start = Instant::now();
                let slot = slots
                    .lock()
                    .expect("slot map poisoned")
                    .entry((lambda.to_bits(), block))
                    .or_default()
                    .clone();
                let solved = slot.get_or_init(|| {
                    solve_block(lambda, block, opts, cache).map_err(|e| e.to_string())
                });
                kinds
                    .iter()
                    .filter(|k| k.applies_to(&block))
                    .map(|&kind| match solved {
                        Ok(sol) => sol.report(kind, opts),
                        Err(msg) => BoundReport::failed(
                            lambda,
                            block,
                            kind,
                            msg.clone(),
                            start.elapsed().as_secs_f64(),
                        ),
                    })
                    .collect()
            })
            .collect()
    };
    let nested = rayon::ThreadPoolBuilder::new()
        .num_threads(request.jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
        .install(run);
    let reports: Vec<BoundReport> = nested.into_iter().flatten().collect();

    let mut envelope: Vec<EnvelopePoint> = Vec::new();
    for &lambda in &request.grid {
        if envelope.iter().any(|e| e.lambda.to_bits() == lambda.to_bits()) {
            continue;
        }
        let best = reports
            .iter()
            .filter(|r| r.lambda.to_bits() == lambda.to_bits() && r.kind.is_upper() && r.is_ok())
            .min_by(|a, b| a.value.total_cmp(&b.value));
        if let Some(r) = best {
            envelope.push(EnvelopePoint {
                lambda,
                value: r.value,
                block: r.block,
                kind: r.kind,
            });
        }
    }
    Ok(SweepResult { reports, envelope })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(grid: Vec<f64>, blocks: Vec<BlockSpec>, kinds: Vec<BoundKind>) -> SweepRequest {
        SweepRequest {
            grid,
            blocks,
            kinds,
            options: SolverOptions::default(),
            jobs: 1,
            cache: None,
        }
    }

    #[test]
    fn zero_rate_single_report() {
        let r = sweep(&request(
            vec![0.0],
            vec![BlockSpec::new(2, None, 4)],
            vec![BoundKind::LengthUpper],
        ))
        .unwrap();
        assert_eq!(r.reports.len(), 1);
        assert!((r.reports[0].value - 0.0025).abs() < 1e-15);
        assert_eq!(r.envelope.len(), 1);
    }

    #[test]
    fn cardinality_and_envelope() {
        let blocks = vec![BlockSpec::new(2, None, 6), BlockSpec::new(3, Some(2), 6)];
        let r = sweep(&request(
            vec![0.3, 0.9, 1.4],
            blocks,
            vec![BoundKind::LengthUpper, BoundKind::CappedUpper],
        ))
        .unwrap();
        assert_eq!(r.reports.len(), 6);
        assert_eq!(r.envelope.len(), 3);
        for e in &r.envelope {
            for rep in r.reports.iter().filter(|x| x.lambda == e.lambda) {
                assert!(e.value <= rep.value);
            }
        }
    }

    #[test]
    fn failures_are_recorded() {
        let mut req = request(
            vec![0.5, 1.0],
            vec![BlockSpec::new(3, None, 6)],
            vec![BoundKind::LengthUpper],
        );
        req.options.memory_budget = 64;
        let r = sweep(&req).unwrap();
        assert_eq!(r.reports.len(), 2);
        assert!(!r.all_ok());
        assert!(r.reports[0].error.as_deref().unwrap().contains("memory budget"));
        assert!(r.envelope.is_empty());
    }

    #[test]
    fn rejects_empty_grid() {
        assert!(sweep(&request(vec![], vec![BlockSpec::new(1, None, 2)], vec![BoundKind::LengthUpper])).is_err());
    }

    #[test]
    fn job_count_does_not_change_values() {
        let blocks = vec![BlockSpec::new(3, Some(2), 7), BlockSpec::new(2, None, 5)];
        let kinds = BoundKind::ALL.to_vec();
        let mut a = request(vec![0.4, 1.1], blocks.clone(), kinds.clone());
        let mut b = request(vec![0.4, 1.1], blocks, kinds);
        a.jobs = 1;
        b.jobs = 3;
        let ra = sweep(&a).unwrap();
        let rb = sweep(&b).unwrap();
        for (x, y) in ra.reports.iter().zip(&rb.reports) {
            assert_eq!(x.value.to_bits(), y.value.to_bits());
            assert_eq!(x.f_lo.to_bits(), y.f_lo.to_bits());
        }
    }
}
