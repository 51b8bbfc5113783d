//! Certified numerics: exact dyadic numbers with directed rounding, real and
//! complex interval arithmetic, root isolation and factorization.

pub mod dense;
pub mod dyadic;
pub mod factor;
pub mod interval;
pub mod roots;

pub use dyadic::{Dyadic, Round};
pub use interval::{CInterval, Interval};
pub use roots::RootDisk;

/// Default bit cap for adaptive precision.
pub const DEFAULT_PRECISION_CAP: u64 = 4096;

/// The bit cap, overridden by `ECHOLAB_PRECISION_CAP` when it holds a number of at least 64.
pub fn precision_cap() -> u64 {
    std::env::var("ECHOLAB_PRECISION_CAP")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .filter(|&c| c >= 64)
        .unwrap_or(DEFAULT_PRECISION_CAP)
}
