//! Capacity bounds for the Poisson-repeat channel.
//!
//! Each input bit of a Poisson-repeat channel is emitted `r ~ Poisson(λ)`
//! times independently, so a bit may be deleted (`r = 0`) or repeated. This
//! crate bounds the channel capacity by splitting the input into blocks of `L`
//! bits, truncating each block channel to a finite output alphabet, and
//! solving the truncated channels with the Blahut–Arimoto algorithm.
//!
//! * [`poisson`]: pmf, CDF, entropy and truncated sums.
//! * [`channel`]: block channel construction and the on-disk matrix cache.
//! * [`baa`]: capacity solver with a certified bracket.
//! * [`bounds`]: upper and lower bound assembly and rate sweeps.
//! * [`oracle`]: independent reference computations used by the tests.
//! * [`cli`]: the `prc-bounds` command line front end.

pub mod baa;
pub mod bounds;
pub mod channel;
pub mod cli;
pub mod dmc;
mod error;
pub mod oracle;
pub mod poisson;

pub use error::{Error, Result};
