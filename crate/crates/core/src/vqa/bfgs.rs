//! BFGS with a strong-Wolfe line search.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Something with a value and gradient.
pub trait Objective {
    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;
}

impl Objective for super::GibbsObjective {
    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        super::GibbsObjective::value_and_gradient(self, x)
    }
}

/// Objective built from a cost closure and a gradient closure.
pub struct FnObjective<F, G> {
    pub cost: F,
    pub grad: G,
}

impl<F, G> Objective for FnObjective<F, G>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    fn value_and_gradient(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(((self.cost)(x), (self.grad)(x)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BfgsOptions {
    /// Stop when `max |g_i|` falls to this.
    pub gtol: f64,
    /// Stop when a step moves `x` by at most `xtol * (1 + max |x_i|)`.
    pub xtol: f64,
    /// Stop when an accepted step lowers `f` by at most `ftol * (1 + |f|)`.
    pub ftol: f64,
    pub max_iterations: usize,
    /// Sufficient-decrease constant.
    pub c1: f64,
    /// Curvature constant.
    pub c2: f64,
    pub max_line_search: usize,
    /// Record `(iteration, cost, gradient norm)` after every iteration.
    pub record_trace: bool,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            gtol: 1e-8,
            xtol: 1e-12,
            ftol: 1e-12,
            max_iterations: 2000,
            c1: 1e-4,
            c2: 0.9,
            max_line_search: 40,
            record_trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    GradientTolerance,
    StepTolerance,
    FunctionTolerance,
    MaxIterations,
    LineSearchFailed,
}

impl Termination {
    pub fn converged(self) -> bool {
        matches!(self, Termination::GradientTolerance | Termination::StepTolerance | Termination::FunctionTolerance)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub cost: f64,
    pub gradient_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub gradient: Vec<f64>,
    pub initial_cost: f64,
    pub iterations: usize,
    pub gradient_evaluations: usize,
    pub converged: bool,
    pub termination: Termination,
    /// Accepted costs are nonincreasing along the trace.
    pub trace: Vec<TracePoint>,
}

/// Closure form: minimize `cost` with gradient `grad` from `x0`.
pub fn bfgs_minimize<F, G>(cost: F, grad: G, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsResult>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
{
    bfgs(&FnObjective { cost, grad }, x0, opts)
}

fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

struct Counter<'a, O: ?Sized> {
    obj: &'a O,
    calls: usize,
}

impl<O: Objective + ?Sized> Counter<'_, O> {
    fn eval(&mut self, x: &DVector<f64>) -> Result<(f64, DVector<f64>)> {
        self.calls += 1;
        let (f, g) = self.obj.value_and_gradient(x.as_slice())?;
        Ok((f, DVector::from_vec(g)))
    }
}

/// Quasi-Newton minimization with inverse-Hessian updates.
pub fn bfgs<O: Objective + ?Sized>(obj: &O, x0: &[f64], opts: &BfgsOptions) -> Result<BfgsResult> {
    if x0.iter().any(|v| !v.is_finite()) {
        return invalid("starting point must be finite");
    }
    let n = x0.len();
    let mut counter = Counter { obj, calls: 0 };
    let mut x = DVector::from_column_slice(x0);
    let (mut f, mut g) = counter.eval(&x)?;
    if !f.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return invalid("cost or gradient is not finite at the starting point");
    }
    let initial_cost = f;
    let mut h = DMatrix::<f64>::identity(n, n);
    let mut scaled = false;
    let mut trace = Vec::new();
    let mut iterations = 0;
    let push_trace = |trace: &mut Vec<TracePoint>, it: usize, f: f64, g: &DVector<f64>| {
        if opts.record_trace {
            trace.push(TracePoint { iteration: it, cost: f, gradient_norm: g.norm() });
        }
    };
    push_trace(&mut trace, 0, f, &g);

    let termination = loop {
        if inf_norm(&g) <= opts.gtol {
            break Termination::GradientTolerance;
        }
        if iterations >= opts.max_iterations {
            break Termination::MaxIterations;
        }
        let mut p = -(&h * &g);
        let mut slope = p.dot(&g);
        if !(slope < 0.0) {
            // Lost positive definiteness; fall back to steepest descent.
            h = DMatrix::identity(n, n);
            scaled = false;
            p = -g.clone();
            slope = p.dot(&g);
        }
        let mut step = line_search(&mut counter, &x, f, &g, &p, slope, opts)?;
        if step.is_none() && scaled {
            // Retry once from a fresh, unscaled metric.
            h = DMatrix::identity(n, n);
            scaled = false;
            p = -g.clone();
            slope = p.dot(&g);
            step = line_search(&mut counter, &x, f, &g, &p, slope, opts)?;
        }
        let Some((alpha, f_new, g_new)) = step else {
            break Termination::LineSearchFailed;
        };
        iterations += 1;
        let s = &p * alpha;
        let y = &g_new - &g;
        let x_new = &x + &s;
        let df = f - f_new;
        let step_size = inf_norm(&s);
        x = x_new;
        let f_old = f;
        f = f_new;
        g = g_new;
        push_trace(&mut trace, iterations, f, &g);

        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            if !scaled {
                h *= sy / y.dot(&y);
                scaled = true;
            }
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            // H+ = H - rho (s y^T H + H y s^T) + (rho^2 y^T H y + rho) s s^T
            h -= (&s * hy.transpose() + &hy * s.transpose()) * rho;
            h += (&s * s.transpose()) * (rho * rho * yhy + rho);
        }

        if inf_norm(&g) <= opts.gtol {
            break Termination::GradientTolerance;
        }
        if step_size <= opts.xtol * (1.0 + inf_norm(&x)) {
            break Termination::StepTolerance;
        }
        if df.abs() <= opts.ftol * (1.0 + f_old.abs()) {
            break Termination::FunctionTolerance;
        }
    };

    Ok(BfgsResult {
        x: x.as_slice().to_vec(),
        f,
        gradient: g.as_slice().to_vec(),
        initial_cost,
        iterations,
        gradient_evaluations: counter.calls,
        converged: termination.converged(),
        termination,
        trace,
    })
}

struct Sample {
    alpha: f64,
    f: f64,
    slope: f64,
    g: DVector<f64>,
}

/// Strong-Wolfe bracketing and zoom. Returns `(alpha, f, g)` or `None` if no
/// acceptable point was found; any returned point has `f` below `f0`.
fn line_search<O: Objective + ?Sized>(
    counter: &mut Counter<'_, O>,
    x: &DVector<f64>,
    f0: f64,
    g0: &DVector<f64>,
    p: &DVector<f64>,
    slope0: f64,
    opts: &BfgsOptions,
) -> Result<Option<(f64, f64, DVector<f64>)>> {
    let mut eval = |alpha: f64| -> Result<Sample> {
        let (f, g) = counter.eval(&(x + p * alpha))?;
        let slope = g.dot(p);
        Ok(Sample { alpha, f, slope, g })
    };
    let accept = |s: Sample| Some((s.alpha, s.f, s.g));
    let sufficient = |s: &Sample| s.f.is_finite() && s.f <= f0 + opts.c1 * s.alpha * slope0;
    let curvature = |s: &Sample| s.slope.abs() <= -opts.c2 * slope0;

    let mut prev = Sample { alpha: 0.0, f: f0, slope: slope0, g: g0.clone() };
    let mut alpha = 1.0;
    let mut evals = 0;
    let (mut lo, mut hi) = loop {
        if evals >= opts.max_line_search {
            return Ok(if prev.alpha > 0.0 { accept(prev) } else { None });
        }
        let cur = eval(alpha)?;
        evals += 1;
        if !sufficient(&cur) || (evals > 1 && cur.f >= prev.f) {
            break (prev, cur);
        }
        if curvature(&cur) {
            return Ok(accept(cur));
        }
        if cur.slope >= 0.0 {
            break (cur, prev);
        }
        alpha = 2.0 * cur.alpha;
        prev = cur;
    };

    // Invariant: lo satisfies sufficient decrease with the lowest f so far,
    // and the minimizer lies between lo and hi.
    while evals < opts.max_line_search {
        let a = interpolate(&lo, &hi);
        let cur = eval(a)?;
        evals += 1;
        if !sufficient(&cur) || cur.f >= lo.f {
            hi = cur;
        } else {
            if curvature(&cur) {
                return Ok(accept(cur));
            }
            if cur.slope * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = cur;
        }
        if (hi.alpha - lo.alpha).abs() <= 1e-16 * lo.alpha.abs().max(1.0) {
            break;
        }
    }
    // Settle for sufficient decrease if the curvature test never passed.
    if lo.alpha > 0.0 && lo.f < f0 {
        return Ok(accept(lo));
    }
    Ok(None)
}

/// Cubic interpolation between two samples, safeguarded toward bisection.
fn interpolate(a: &Sample, b: &Sample) -> f64 {
    let (lo, hi) = (a.alpha.min(b.alpha), a.alpha.max(b.alpha));
    let width = hi - lo;
    let mid = 0.5 * (lo + hi);
    if !(a.f.is_finite() && b.f.is_finite()) {
        return mid;
    }
    let d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.slope * b.slope;
    if disc < 0.0 {
        return mid;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let t = b.alpha - (b.alpha - a.alpha) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
    if t.is_finite() && t > lo + 0.1 * width && t < hi - 0.1 * width {
        t
    } else {
        mid
    }
}
