use crate::{Error, Result};

/// Numerical thresholds shared by every decision in the crate.
///
/// `rank` is relative (scaled by the largest column norm or singular value
/// in play), `eq` is the entrywise agreement threshold, `eig` the eigenvalue
/// threshold separating "frame" from "not a frame".
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rank: f64,
    pub eq: f64,
    pub eig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rank: 1e-10, eq: 1e-9, eig: 1e-9 }
    }
}

impl Tolerances {
    /// All three thresholds must be finite and strictly positive.
    pub fn new(rank: f64, eq: f64, eig: f64) -> Result<Self> {
        for t in [rank, eq, eig] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::BadTolerance);
            }
        }
        Ok(Tolerances { rank, eq, eig })
    }
}
