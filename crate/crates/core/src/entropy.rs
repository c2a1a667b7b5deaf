//! Sample entropy: the regularity statistic used to decide which
//! decomposition modes to keep.

use thiserror::Error;

use crate::signal::std_dev;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// No template pair matched at length `m`; the statistic is undefined
    /// for this series and tolerance.
    #[error("sample entropy undefined: no template matches at length m")]
    Undefined,
}

/// Tolerance radius policy for template matching.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    /// Radius in absolute amplitude units.
    Absolute(f64),
    /// Radius as a fraction of the series' standard deviation, resolved per
    /// series. Makes the statistic scale-invariant.
    FractionOfStd(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct SampEnParams {
    /// Embedding dimension (template length).
    pub m: usize,
    pub r: Tolerance,
}

impl Default for SampEnParams {
    fn default() -> Self {
        SampEnParams {
            m: 2,
            r: Tolerance::FractionOfStd(0.2),
        }
    }
}

impl SampEnParams {
    /// Resolve the tolerance against a concrete series.
    pub fn resolve_r(&self, x: &[f64]) -> Result<f64, EntropyError> {
        let r = match self.r {
            Tolerance::Absolute(r) => r,
            Tolerance::FractionOfStd(f) => f * std_dev(x),
        };
        if !(r > 0.0) {
            return Err(EntropyError::InvalidInput(format!(
                "tolerance resolved to {r}; must be positive"
            )));
        }
        Ok(r)
    }
}

/// Sample entropy `-ln(A/B)`.
///
/// `B` counts ordered pairs `i != j` of `m`-length templates within
/// Chebyshev distance `r`, `A` the same for `(m+1)`-length templates.
/// Both counts run over the first `N - m` template start positions so a
/// length-`m` match always has a defined continuation; self-matches are
/// excluded. Returns `+inf` when `A = 0` with `B > 0`.
///
/// Deterministic O(N^2); series handled here are at most a few thousand
/// samples.
pub fn sample_entropy(x: &[f64], p: &SampEnParams) -> Result<f64, EntropyError> {
    if p.m < 1 {
        return Err(EntropyError::InvalidInput("m must be >= 1".into()));
    }
    let n = x.len();
    if n <= p.m + 1 {
        return Err(EntropyError::InvalidInput(format!(
            "series length {n} too short for m = {}",
            p.m
        )));
    }
    let r = p.resolve_r(x)?;

    let m = p.m;
    let count = n - m; // template start positions compared at both lengths
    let mut b: u64 = 0;
    let mut a: u64 = 0;
    for i in 0..count {
        for j in (i + 1)..count {
            let mut matches_m = true;
            for k in 0..m {
                if (x[i + k] - x[j + k]).abs() > r {
                    matches_m = false;
                    break;
                }
            }
            if matches_m {
                b += 1;
                if (x[i + m] - x[j + m]).abs() <= r {
                    a += 1;
                }
            }
        }
    }
    // Unordered pairs scale both counts by the same factor, so the ratio is
    // unchanged; keep the raw counts.
    if b == 0 {
        return Err(EntropyError::Undefined);
    }
    if a == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(-((a as f64 / b as f64).ln()))
}
