//! FISTA for the synthesis-sparse recovery problem
//!
//! `min_C ||S_W^T(C) - Y||_F^2 + gamma ||C||_1`
//!
//! with `S_W^T` the frame synthesis operator. The gradient of the smooth part
//! is `2 S_W(S_W^T C - Y)` with Lipschitz constant `2B` (B the upper frame
//! bound), so the automatic step size is `nu = 1/(2B)`. The proximal step is
//! plain elementwise soft thresholding with the step-scaled threshold
//! `nu * gamma`.
//!
//! FISTA is non-monotone per step, so the solver tracks the best objective
//! seen (seeded with the zero tensor, whose objective is `||Y||^2`) and
//! returns that iterate along with its KKT residual:
//! `|grad_i + gamma sign(C_i)|` on the support, `max(|grad_i| - gamma, 0)`
//! off it.

use ndarray::{Array, Array3, Dimension};

use crate::error::{DgwError, Result};
use crate::frame::{CoefficientTensor, DgwFrame};
use crate::time_vertex::TimeVertexSignal;

/// Solver configuration. `step = None` selects `nu = 1/(2B)` automatically.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// l1 regularization weight.
    pub gamma: f64,
    /// Iteration cap J.
    pub max_iters: usize,
    /// Relative stopping tolerance on `||c_{j+1} - c_j||^2 / (||c_j||^2 + delta)`.
    pub tolerance: f64,
    /// Small guard against division by zero in the stopping rule.
    pub delta: f64,
    /// Explicit step size; `None` for `1/(2B)`.
    pub step: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            gamma: 0.1,
            max_iters: 500,
            tolerance: 1e-10,
            delta: 1e-12,
            step: None,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(DgwError::InvalidParameter(format!(
                "gamma = {} must be > 0",
                self.gamma
            )));
        }
        if self.max_iters == 0 {
            return Err(DgwError::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(DgwError::InvalidParameter(format!(
                "tolerance = {} must be > 0",
                self.tolerance
            )));
        }
        if self.delta < 0.0 {
            return Err(DgwError::InvalidParameter(format!(
                "delta = {} must be >= 0",
                self.delta
            )));
        }
        if let Some(step) = self.step {
            if !(step > 0.0) {
                return Err(DgwError::InvalidParameter(format!(
                    "step = {step} must be > 0"
                )));
            }
        }
        Ok(())
    }
}

/// Solver outcome: the returned (best-objective) iterate plus diagnostics.
#[derive(Debug, Clone)]
pub struct SolverResult {
    pub coefficients: CoefficientTensor,
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_residual: f64,
}

/// Elementwise soft thresholding `sign(c) * max(|c| - threshold, 0)`.
pub fn soft_threshold<D: Dimension>(c: &Array<f64, D>, threshold: f64) -> Array<f64, D> {
    debug_assert!(threshold >= 0.0);
    c.mapv(|v| {
        let shrunk = v.abs() - threshold;
        if shrunk > 0.0 {
            shrunk * v.signum()
        } else {
            0.0
        }
    })
}

/// Gradient of the fidelity term: `2 S_W(S_W^T(C) - Y)`.
pub fn gradient_g(
    frame: &DgwFrame,
    c: &CoefficientTensor,
    y: &TimeVertexSignal,
) -> Result<CoefficientTensor> {
    let residual = residual_signal(frame, c, y)?;
    let mut grad = frame.analyze(&residual)?;
    grad = CoefficientTensor::new(grad.into_values() * 2.0, frame.scales().to_vec())?;
    Ok(grad)
}

fn residual_signal(
    frame: &DgwFrame,
    c: &CoefficientTensor,
    y: &TimeVertexSignal,
) -> Result<TimeVertexSignal> {
    if y.n_vertices() != frame.n_vertices() || y.n_steps() != frame.n_steps() {
        return Err(DgwError::DimensionMismatch(format!(
            "observation is {}x{}, frame expects {}x{}",
            y.n_vertices(),
            y.n_steps(),
            frame.n_vertices(),
            frame.n_steps()
        )));
    }
    let synth = frame.synthesize(c)?;
    TimeVertexSignal::new(synth.values() - y.values())
}

fn objective(frame: &DgwFrame, values: &Array3<f64>, y: &TimeVertexSignal, gamma: f64) -> Result<f64> {
    let c = CoefficientTensor::new(values.clone(), frame.scales().to_vec())?;
    let r = residual_signal(frame, &c, y)?;
    let fidelity: f64 = r.values().iter().map(|v| v * v).sum();
    let l1: f64 = values.iter().map(|v| v.abs()).sum();
    Ok(fidelity + gamma * l1)
}

/// KKT residual (infinity norm) of the l1 subgradient optimality conditions
/// at `c`. Zero at an exact minimizer.
pub fn kkt_residual(
    frame: &DgwFrame,
    c: &CoefficientTensor,
    y: &TimeVertexSignal,
    gamma: f64,
) -> Result<f64> {
    let grad = gradient_g(frame, c, y)?;
    let mut worst = 0.0_f64;
    for (g, v) in grad.values().iter().zip(c.values().iter()) {
        let r = if *v != 0.0 {
            (g + gamma * v.signum()).abs()
        } else {
            (g.abs() - gamma).max(0.0)
        };
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Accelerated proximal gradient iteration on the synthesis-sparse problem.
///
/// Initialization lifts the observation into coefficient space,
/// `c_1 = S_W(Y)`, and momentum follows the standard
/// `t_{j+1} = (1 + sqrt(1 + 4 t_j^2))/2` schedule without restarts.
pub fn fista(frame: &DgwFrame, y: &TimeVertexSignal, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let bounds = frame.frame_bounds();
    let nu = match cfg.step {
        Some(step) => step,
        None => {
            if !(bounds.upper > 0.0) {
                return Err(DgwError::Numeric(
                    "upper frame bound is zero; cannot pick a step size".into(),
                ));
            }
            1.0 / (2.0 * bounds.upper)
        }
    };
    let threshold = nu * cfg.gamma;

    let y_energy: f64 = y.values().iter().map(|v| v * v).sum();
    let dims = (frame.n_scales(), frame.n_vertices(), frame.n_steps());

    // c_1 = analyze(y); u_0 = c_1
    let mut c = frame.analyze(y)?.into_values();
    let mut u_prev = c.clone();
    let mut t = 1.0_f64;

    // Best-objective tracking, seeded with the zero solution (objective ||Y||^2).
    let mut best_values = Array3::<f64>::zeros(dims);
    let mut best_obj = y_energy;

    let mut objective_history = Vec::with_capacity(cfg.max_iters.min(1024));
    let mut converged = false;
    let mut iterations = 0;

    for _ in 0..cfg.max_iters {
        iterations += 1;

        let c_tensor = CoefficientTensor::new(c.clone(), frame.scales().to_vec())?;
        let grad = gradient_g(frame, &c_tensor, y)?.into_values();
        let stepped = &c - &(grad * nu);
        let u_next = soft_threshold(&stepped, threshold);

        let obj = objective(frame, &u_next, y, cfg.gamma)?;
        if !obj.is_finite() {
            return Err(DgwError::Numeric(format!(
                "objective diverged (non-finite) at iteration {iterations}; step size nu = {nu}"
            )));
        }
        objective_history.push(obj);
        if obj < best_obj {
            best_obj = obj;
            best_values.assign(&u_next);
        }

        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let momentum = (t - 1.0) / t_next;
        let c_next = &u_next + &((&u_next - &u_prev) * momentum);

        let diff_sq: f64 = (&c_next - &c).iter().map(|v| v * v).sum();
        let c_sq: f64 = c.iter().map(|v| v * v).sum();
        let stop = diff_sq / (c_sq + cfg.delta) < cfg.tolerance;

        u_prev = u_next;
        c = c_next;
        t = t_next;

        if stop {
            converged = true;
            break;
        }
    }

    let coefficients = CoefficientTensor::new(best_values, frame.scales().to_vec())?;
    let kkt = kkt_residual(frame, &coefficients, y, cfg.gamma)?;
    Ok(SolverResult {
        coefficients,
        objective_history,
        iterations,
        converged,
        kkt_residual: kkt,
    })
}
