//! Derivative-free Nelder-Mead simplex minimization.
//!
//! Implements the ordering / reflect / expand / contract / shrink cycle
//! with the standard coefficients ρ=1, χ=2, γ=0.5, σ=0.5. The search is
//! fully deterministic: ties in vertex ordering break toward the lower
//! insertion index, so identical inputs give bit-identical traces.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error("objective returned a non-finite value at {x:?}")]
    NonFiniteObjective { x: Vec<f64> },
    #[error("invalid simplex configuration: {0}")]
    InvalidConfig(String),
}

/// Simplex coefficients and termination settings.
#[derive(Debug, Clone)]
pub struct SimplexConfig {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    pub max_iterations: usize,
    /// Simplex diameter threshold (same units as x).
    pub x_tolerance: f64,
    /// Objective spread threshold across the simplex.
    pub f_tolerance: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Record one [`TraceRecord`] per iteration in the result.
    pub record_trace: bool,
}

impl Default for SimplexConfig {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            max_iterations: 2000,
            x_tolerance: 1e-9,
            f_tolerance: 1e-12,
            initial_step: 0.0414 / 20.0,
            record_trace: false,
        }
    }
}

impl SimplexConfig {
    fn validate(&self) -> Result<(), OptimizerError> {
        let bad = |msg: &str| Err(OptimizerError::InvalidConfig(msg.into()));
        if !self.reflection.is_finite() || self.reflection <= 0.0 {
            return bad("reflection must be > 0");
        }
        if !self.expansion.is_finite() || self.expansion <= 1.0 {
            return bad("expansion must be > 1");
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return bad("contraction must be in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink must be in (0, 1)");
        }
        if !(self.x_tolerance > 0.0 && self.f_tolerance > 0.0 && self.initial_step > 0.0) {
            return bad("tolerances and initial_step must be > 0");
        }
        Ok(())
    }
}

/// Why the search stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    XTol,
    FTol,
    MaxIter,
}

/// Per-iteration diagnostics record.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub iteration: usize,
    pub best_f: f64,
    pub simplex_diameter: f64,
    pub best_x: Vec<f64>,
}

impl TraceRecord {
    /// Line-delimited diagnostic form: `iter=<n> f=<best> diam=<d>`.
    pub fn to_line(&self) -> String {
        format!(
            "iter={} f={} diam={}",
            self.iteration, self.best_f, self.simplex_diameter
        )
    }
}

#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub x_min: Vec<f64>,
    pub f_min: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub termination_reason: TerminationReason,
    pub trace: Vec<TraceRecord>,
}

struct Vertex {
    x: Vec<f64>,
    f: f64,
    id: usize,
}

/// Minimize `objective` starting from `x0`.
///
/// The initial simplex is x0 plus n vertices x0 + initial_step·e_i.
/// Terminates when the simplex diameter drops below `x_tolerance` and the
/// objective spread below `f_tolerance` (a spread of exactly zero, as for
/// a constant objective, converges immediately), or at `max_iterations`.
/// The returned vertex is the best evaluation seen anywhere in the run.
pub fn minimize<F>(
    mut objective: F,
    x0: &[f64],
    config: &SimplexConfig,
) -> Result<OptimizeResult, OptimizerError>
where
    F: FnMut(&[f64]) -> f64,
{
    config.validate()?;
    let n = x0.len();
    assert!(n >= 1, "dimension must be at least 1");

    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> Result<f64, OptimizerError> {
        let f = objective(x);
        *evals += 1;
        if !f.is_finite() {
            return Err(OptimizerError::NonFiniteObjective { x: x.to_vec() });
        }
        Ok(f)
    };

    let mut next_id = 0usize;
    let mut simplex: Vec<Vertex> = Vec::with_capacity(n + 1);
    {
        let f0 = eval(x0, &mut evaluations)?;
        simplex.push(Vertex {
            x: x0.to_vec(),
            f: f0,
            id: next_id,
        });
        next_id += 1;
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += config.initial_step;
            let f = eval(&x, &mut evaluations)?;
            simplex.push(Vertex { x, f, id: next_id });
            next_id += 1;
        }
    }

    let mut best_x = simplex[0].x.clone();
    let mut best_f = simplex[0].f;
    let record_best = |x: &[f64], f: f64, bx: &mut Vec<f64>, bf: &mut f64| {
        if f < *bf {
            *bf = f;
            bx.clear();
            bx.extend_from_slice(x);
        }
    };
    for v in &simplex[1..] {
        record_best(&v.x, v.f, &mut best_x, &mut best_f);
    }

    let diameter = |s: &[Vertex]| -> f64 {
        let mut d = 0.0f64;
        for i in 0..s.len() {
            for j in (i + 1)..s.len() {
                let dist: f64 = s[i]
                    .x
                    .iter()
                    .zip(&s[j].x)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                d = d.max(dist);
            }
        }
        d
    };

    let mut trace = Vec::new();
    let mut iterations = 0usize;
    let (converged, termination_reason) = loop {
        // order: ascending f, ties toward the lower insertion id
        simplex.sort_by(|a, b| {
            a.f.partial_cmp(&b.f)
                .unwrap()
                .then_with(|| a.id.cmp(&b.id))
        });

        let f_spread = simplex[n].f - simplex[0].f;
        let diam = diameter(&simplex);
        if config.record_trace {
            trace.push(TraceRecord {
                iteration: iterations,
                best_f: simplex[0].f,
                simplex_diameter: diam,
                best_x: simplex[0].x.clone(),
            });
        }
        if f_spread == 0.0 {
            break (true, TerminationReason::FTol);
        }
        if diam < config.x_tolerance && f_spread < config.f_tolerance {
            break (true, TerminationReason::XTol);
        }
        if iterations >= config.max_iterations {
            break (false, TerminationReason::MaxIter);
        }
        iterations += 1;

        // centroid of the n best vertices
        let mut centroid = vec![0.0f64; n];
        for v in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(&v.x) {
                *c += xi;
            }
        }
        for c in centroid.iter_mut() {
            *c /= n as f64;
        }

        let worst = &simplex[n];
        let point_along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&worst.x)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let x_reflect = point_along(config.reflection);
        let f_reflect = eval(&x_reflect, &mut evaluations)?;
        record_best(&x_reflect, f_reflect, &mut best_x, &mut best_f);

        let replacement = if f_reflect < simplex[0].f {
            // try to expand
            let x_expand = point_along(config.reflection * config.expansion);
            let f_expand = eval(&x_expand, &mut evaluations)?;
            record_best(&x_expand, f_expand, &mut best_x, &mut best_f);
            if f_expand < f_reflect {
                Some((x_expand, f_expand))
            } else {
                Some((x_reflect, f_reflect))
            }
        } else if f_reflect < simplex[n - 1].f {
            Some((x_reflect, f_reflect))
        } else if f_reflect < simplex[n].f {
            // outside contraction
            let x_con = point_along(config.reflection * config.contraction);
            let f_con = eval(&x_con, &mut evaluations)?;
            record_best(&x_con, f_con, &mut best_x, &mut best_f);
            if f_con <= f_reflect {
                Some((x_con, f_con))
            } else {
                None
            }
        } else {
            // inside contraction
            let x_con = point_along(-config.contraction);
            let f_con = eval(&x_con, &mut evaluations)?;
            record_best(&x_con, f_con, &mut best_x, &mut best_f);
            if f_con < simplex[n].f {
                Some((x_con, f_con))
            } else {
                None
            }
        };

        match replacement {
            Some((x, f)) => {
                simplex[n] = Vertex { x, f, id: next_id };
                next_id += 1;
            }
            None => {
                // shrink toward the best vertex
                let x_best = simplex[0].x.clone();
                for v in simplex[1..].iter_mut() {
                    for (xi, bi) in v.x.iter_mut().zip(&x_best) {
                        *xi = bi + config.shrink * (*xi - bi);
                    }
                    v.f = eval(&v.x, &mut evaluations)?;
                    v.id = next_id;
                    next_id += 1;
                    record_best(&v.x, v.f, &mut best_x, &mut best_f);
                }
            }
        }
    };

    Ok(OptimizeResult {
        x_min: best_x,
        f_min: best_f,
        iterations,
        evaluations,
        converged,
        termination_reason,
        trace,
    })
}
