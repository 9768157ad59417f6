//! Phase unwrapping along theta-cuts and phase statistics.
//!
//! Unwrapping is 1-D per phi-cut only: each cut starts at theta = 0 and
//! successive samples are adjusted by multiples of 360° so adjacent steps
//! stay below 180° in magnitude. No cross-cut consistency is enforced.

use std::sync::Arc;

use thiserror::Error;

use crate::farfield::SphericalGrid;

#[derive(Debug, Error)]
pub enum PhaseError {
    #[error("pattern is already unwrapped")]
    AlreadyUnwrapped,
    #[error("empty region: statistics need at least one sample")]
    EmptyRegion,
    #[error("non-finite value in input")]
    NonFinite,
}

/// Real-valued (possibly unwrapped) phase samples on a grid, in degrees.
#[derive(Debug, Clone)]
pub struct PhasePattern {
    grid: Arc<SphericalGrid>,
    values: Vec<f64>,
    unwrapped: bool,
    invalid: Vec<bool>,
}

impl PhasePattern {
    /// Wrapped-phase constructor; valid values must be in (−180°, 180°].
    pub fn wrapped(grid: Arc<SphericalGrid>, values: Vec<f64>, invalid: Vec<bool>) -> Self {
        assert_eq!(values.len(), grid.len());
        assert_eq!(invalid.len(), grid.len());
        Self {
            grid,
            values,
            unwrapped: false,
            invalid,
        }
    }

    pub fn grid(&self) -> &Arc<SphericalGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_unwrapped(&self) -> bool {
        self.unwrapped
    }

    pub fn invalid_mask(&self) -> &[bool] {
        &self.invalid
    }

    pub fn invalid_count(&self) -> usize {
        self.invalid.iter().filter(|b| **b).count()
    }

    /// Add a constant to every valid sample.
    pub fn offset(&self, delta: f64) -> Self {
        let mut out = self.clone();
        for (v, inv) in out.values.iter_mut().zip(&out.invalid) {
            if !inv {
                *v += delta;
            }
        }
        out
    }

    /// Add per-sample deltas at the given flat indices.
    pub fn offset_at(&self, indices: &[usize], deltas: &[f64]) -> Self {
        assert_eq!(indices.len(), deltas.len());
        let mut out = self.clone();
        for (&i, &d) in indices.iter().zip(deltas) {
            out.values[i] += d;
        }
        out
    }
}

/// Wrap a finite angle into (−180°, 180°]. The result differs from the
/// input by an exact multiple of 360°.
pub fn wrap(value: f64) -> f64 {
    let r = value.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Warning emitted when an invalid sample splits a phi-cut during unwrap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnwrapWarning {
    pub phi_index: usize,
    pub theta_index: usize,
}

/// Unwrap each phi-cut independently along theta.
///
/// The first valid sample of each cut is unchanged; each following sample
/// gets the integer number of turns that keeps the step below 180° in
/// magnitude. An invalid sample splits the cut: unwrapping restarts after
/// it and a warning is reported. Output values may exceed ±180°.
pub fn unwrap_theta(
    pattern: &PhasePattern,
) -> Result<(PhasePattern, Vec<UnwrapWarning>), PhaseError> {
    if pattern.unwrapped {
        return Err(PhaseError::AlreadyUnwrapped);
    }
    let grid = pattern.grid.clone();
    let mut values = pattern.values.clone();
    let mut warnings = Vec::new();
    for pi in 0..grid.n_phi() {
        let mut turns: i64 = 0;
        let mut prev: Option<f64> = None;
        for ti in 0..grid.n_theta() {
            let idx = grid.index(pi, ti);
            if pattern.invalid[idx] {
                if prev.is_some() {
                    warnings.push(UnwrapWarning {
                        phi_index: pi,
                        theta_index: ti,
                    });
                }
                // restart the run after the invalid sample
                turns = 0;
                prev = None;
                continue;
            }
            let v = pattern.values[idx];
            if let Some(p) = prev {
                let delta = v - p;
                if delta > 180.0 {
                    turns -= 1;
                } else if delta <= -180.0 {
                    turns += 1;
                }
            }
            values[idx] = v + 360.0 * turns as f64;
            prev = Some(v);
        }
    }
    let out = PhasePattern {
        grid,
        values,
        unwrapped: true,
        invalid: pattern.invalid.clone(),
    };
    Ok((out, warnings))
}

/// Arithmetic mean and un-normalized variance Σ(x_n − μ)² of phase samples.
/// The sum of squared deviations is not divided by N; any positive scaling
/// leaves the variance argmin unchanged.
pub fn mean_and_variance(values: &[f64]) -> Result<(f64, f64), PhaseError> {
    if values.is_empty() {
        return Err(PhaseError::EmptyRegion);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(PhaseError::NonFinite);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    Ok((mean, variance))
}
