//! Levenberg–Marquardt fit of the damped cos² model.
//!
//! Internally t_d is fitted as ln t_d and a free stretch exponent as a logistic
//! map onto [N_MIN, N_MAX], so the optimizer itself is unconstrained.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{DampedSinusoidParams, RabiTrace};
use crate::error::{Error, Result};
use crate::model::TWO_PI;

pub const N_MIN: f64 = 0.5;
pub const N_MAX: f64 = 3.0;
pub const MAX_ITERATIONS: usize = 500;
pub const COST_TOL: f64 = 1e-10;
const LAMBDA_MAX: f64 = 1e16;
/// Zero-padding factor of the frequency initializer.
const DFT_OVERSAMPLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamErrors {
    pub s0: f64,
    pub t_d: f64,
    /// Zero when n was held fixed.
    pub n: f64,
    pub omega: f64,
    pub baseline: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: DampedSinusoidParams,
    pub std_errors: ParamErrors,
    pub residual_rms: f64,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Copy)]
struct Layout {
    fixed_n: Option<f64>,
}

impl Layout {
    fn encode(&self, p: &DampedSinusoidParams) -> DVector<f64> {
        let mut v = vec![p.s0, p.t_d.ln()];
        if self.fixed_n.is_none() {
            let frac = ((p.n - N_MIN) / (N_MAX - N_MIN)).clamp(1e-6, 1.0 - 1e-6);
            v.push((frac / (1.0 - frac)).ln());
        }
        v.push(p.omega);
        v.push(p.baseline);
        DVector::from_vec(v)
    }

    fn decode(&self, u: &DVector<f64>) -> DampedSinusoidParams {
        let (n, rest) = match self.fixed_n {
            Some(n) => (n, 2),
            None => (N_MIN + (N_MAX - N_MIN) * sigmoid(u[2]), 3),
        };
        DampedSinusoidParams {
            s0: u[0],
            t_d: u[1].exp(),
            n,
            omega: u[rest],
            baseline: u[rest + 1],
        }
    }

    /// d(natural)/d(internal) for each free parameter.
    fn chain(&self, u: &DVector<f64>) -> Vec<f64> {
        let mut c = vec![1.0, u[1].exp()];
        if self.fixed_n.is_none() {
            let s = sigmoid(u[2]);
            c.push((N_MAX - N_MIN) * s * (1.0 - s));
        }
        c.extend([1.0, 1.0]);
        c
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Partial derivatives of the model in natural parameters (s0, t_d, n, Ω, baseline).
fn gradient(p: &DampedSinusoidParams, t: f64) -> [f64; 5] {
    let x = t / p.t_d;
    let xn = if x > 0.0 { x.powf(p.n) } else { 0.0 };
    let env = (-xn).exp();
    let half = 0.5 * p.omega * t;
    let c2 = half.cos().powi(2);
    let d_td = p.s0 * c2 * env * p.n * xn / p.t_d;
    let d_n = if x > 0.0 { -p.s0 * c2 * env * xn * x.ln() } else { 0.0 };
    let d_omega = -p.s0 * env * 0.5 * t * (p.omega * t).sin();
    [env * c2, d_td, d_n, d_omega, 1.0]
}

struct Problem<'a> {
    trace: &'a RabiTrace,
    layout: Layout,
}

impl Problem<'_> {
    fn residuals(&self, u: &DVector<f64>) -> DVector<f64> {
        let p = self.layout.decode(u);
        DVector::from_iterator(
            self.trace.len(),
            self.trace.times.iter().zip(&self.trace.signal).map(|(&t, &y)| p.value(t) - y),
        )
    }

    fn cost(&self, u: &DVector<f64>) -> f64 {
        0.5 * self.residuals(u).norm_squared()
    }

    fn jacobian(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let p = self.layout.decode(u);
        let chain = self.layout.chain(u);
        let cols = free_columns(self.layout);
        let mut j = DMatrix::zeros(self.trace.len(), cols.len());
        for (r, &t) in self.trace.times.iter().enumerate() {
            let g = gradient(&p, t);
            for (c, &k) in cols.iter().enumerate() {
                j[(r, c)] = g[k] * chain[c];
            }
        }
        j
    }
}

fn free_columns(layout: Layout) -> Vec<usize> {
    if layout.fixed_n.is_some() {
        vec![0, 1, 3, 4]
    } else {
        vec![0, 1, 2, 3, 4]
    }
}

struct Run {
    u: DVector<f64>,
    cost: f64,
    iterations: usize,
    converged: bool,
}

fn levenberg_marquardt(problem: &Problem, start: DVector<f64>) -> Run {
    let mut u = start;
    let mut cost = problem.cost(&u);
    let mut lambda = 0.0;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let j = problem.jacobian(&u);
        let r = problem.residuals(&u);
        let jtj = j.transpose() * &j;
        let g = j.transpose() * r;
        let diag_max = jtj.diagonal().max();
        if lambda == 0.0 {
            lambda = 1e-3;
        }
        loop {
            let mut a = jtj.clone();
            for k in 0..a.nrows() {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-12 * diag_max.max(1e-300));
            }
            let step = a.cholesky().map(|ch| ch.solve(&(-&g)));
            if let Some(step) = step {
                let trial = &u + &step;
                let trial_cost = problem.cost(&trial);
                if trial_cost.is_finite() && trial_cost < cost {
                    let rel = (cost - trial_cost) / cost;
                    u = trial;
                    cost = trial_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    if rel < COST_TOL || cost == 0.0 {
                        return Run {
                            u,
                            cost,
                            iterations,
                            converged: true,
                        };
                    }
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > LAMBDA_MAX {
                // no descent direction left at this precision
                return Run {
                    u,
                    cost,
                    iterations,
                    converged: true,
                };
            }
        }
    }
    Run {
        u,
        cost,
        iterations,
        converged: false,
    }
}

/// Fits S(t) = baseline + s0 exp(−(t/t_d)^n) cos²(Ωt/2). `fix_n` holds the
/// stretch exponent at the given value.
pub fn fit_damped_sinusoid(trace: &RabiTrace, fix_n: Option<f64>) -> Result<FitResult> {
    trace.validate()?;
    if let Some(n) = fix_n {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid(format!("fixed stretch exponent {n} must be positive")));
        }
    }
    let (lo, hi) = trace
        .signal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    if hi - lo <= 1e-14 * scale {
        return Err(Error::invalid("signal is constant"));
    }

    let layout = Layout { fixed_n: fix_n };
    let problem = Problem { trace, layout };
    let init = initial_guess(trace, fix_n.unwrap_or(1.0));

    // A free exponent is released only after a fit with n held at a start
    // value: the logistic map otherwise tends to pin n at a bound early on.
    let n_starts: &[f64] = if fix_n.is_some() { &[init.n] } else { &[1.0, 2.0] };
    let mut omegas: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|f| f * init.omega).collect();
    omegas.push(0.0);
    let mut runs = Vec::new();
    for &n in n_starts {
        for &omega in &omegas {
            let start = DampedSinusoidParams { omega, n, ..init };
            let staged = Layout { fixed_n: Some(n) };
            let first = levenberg_marquardt(&Problem { trace, layout: staged }, staged.encode(&start));
            let run = if fix_n.is_some() {
                first
            } else {
                let mut second = levenberg_marquardt(&problem, layout.encode(&staged.decode(&first.u)));
                second.iterations += first.iterations;
                second
            };
            runs.push(run);
        }
    }
    let pick = |want_converged: bool| {
        runs.iter()
            .filter(|r| !want_converged || r.converged)
            .min_by(|a, b| a.cost.total_cmp(&b.cost))
    };
    let best = pick(true).or_else(|| pick(false)).expect("at least one start");

    let mut params = layout.decode(&best.u);
    params.omega = params.omega.abs();
    let std_errors = standard_errors(trace, layout, &params, best.cost);
    Ok(FitResult {
        params,
        std_errors,
        residual_rms: (2.0 * best.cost / trace.len() as f64).sqrt(),
        converged: best.converged,
        iterations: best.iterations,
    })
}

/// σ² (JᵀJ)⁻¹ in natural parameters with σ² = RSS / (N − p). Parameters whose
/// Jacobian column vanishes, or any parameter when JᵀJ is singular, get an
/// infinite error. So does Ω when the record holds less than half an
/// oscillation, since the frequency is then not identifiable.
fn standard_errors(trace: &RabiTrace, layout: Layout, p: &DampedSinusoidParams, cost: f64) -> ParamErrors {
    let cols = free_columns(layout);
    let rows: Vec<[f64; 5]> = trace.times.iter().map(|&t| gradient(p, t)).collect();
    let col_norm = |k: usize| rows.iter().map(|g| g[k] * g[k]).sum::<f64>().sqrt();
    let max_norm = cols.iter().map(|&k| col_norm(k)).fold(0.0, f64::max);
    let live: Vec<usize> = cols
        .iter()
        .copied()
        .filter(|&k| col_norm(k) > 1e-10 * max_norm)
        .collect();

    let mut errors = [f64::INFINITY; 5];
    if layout.fixed_n.is_some() {
        errors[2] = 0.0;
    }
    let dof = trace.len() as f64 - cols.len() as f64;
    if dof > 0.0 && !live.is_empty() {
        let sigma2 = 2.0 * cost / dof;
        let j = DMatrix::from_fn(rows.len(), live.len(), |r, c| rows[r][live[c]]);
        if let Some(inv) = (j.transpose() * j).try_inverse() {
            for (c, &k) in live.iter().enumerate() {
                let var = sigma2 * inv[(c, c)];
                errors[k] = if var >= 0.0 { var.sqrt() } else { f64::INFINITY };
            }
        }
    }
    let span = trace.times[trace.len() - 1] - trace.times[0];
    if p.omega.abs() * span < PI {
        errors[3] = f64::INFINITY;
    }
    ParamErrors {
        s0: errors[0],
        t_d: errors[1],
        n: errors[2],
        omega: errors[3],
        baseline: errors[4],
    }
}

fn initial_guess(trace: &RabiTrace, n: f64) -> DampedSinusoidParams {
    let t = &trace.times;
    let y = &trace.signal;
    let len = t.len();
    let span = t[len - 1] - t[0];
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let quarter = (len / 4).max(2);
    let head = y[..quarter].iter().copied().fold(f64::NEG_INFINITY, f64::max) - lo;
    let tail = y[len - quarter..].iter().copied().fold(f64::NEG_INFINITY, f64::max) - lo;
    let gap = 0.5 * (t[len - 1] + t[len - quarter]) - 0.5 * (t[0] + t[quarter - 1]);
    let t_d = if head > 0.0 && tail > 0.0 && tail < head {
        (gap / (head / tail).ln()).clamp(0.05 * span, 20.0 * span)
    } else {
        10.0 * span
    };

    DampedSinusoidParams {
        s0: hi - lo,
        t_d,
        n,
        omega: TWO_PI * dominant_frequency(t, y),
        baseline: lo,
    }
}

/// Frequency (cycles per time unit) of the strongest DFT peak of the
/// mean-subtracted signal outside the zero-frequency lobe, up to Nyquist. A
/// fast decay leaks power into the lowest bins, so the search starts past the
/// first local minimum after that lobe. For cos²(Ωt/2) = (1 + cos Ωt)/2
/// the peak sits at Ω/2π.
fn dominant_frequency(t: &[f64], y: &[f64]) -> f64 {
    let len = t.len();
    let span = t[len - 1] - t[0];
    let mean = y.iter().sum::<f64>() / len as f64;
    let dt = span / (len - 1) as f64;
    let df = 1.0 / (DFT_OVERSAMPLE as f64 * span);
    let last = ((0.5 / dt) / df).floor().max(1.0) as usize;
    let power: Vec<f64> = (0..=last)
        .map(|k| {
            let f = k as f64 * df;
            let (mut re, mut im) = (0.0, 0.0);
            for (&tk, &yk) in t.iter().zip(y) {
                let phase = 2.0 * PI * f * (tk - t[0]);
                re += (yk - mean) * phase.cos();
                im -= (yk - mean) * phase.sin();
            }
            re * re + im * im
        })
        .collect();
    // climb the lobe, then descend to its first minimum
    let mut first = 0;
    while first < last && power[first + 1] >= power[first] {
        first += 1;
    }
    while first < last && power[first + 1] < power[first] {
        first += 1;
    }
    // at least one cycle over the record
    let first = first.max(DFT_OVERSAMPLE.min(last));
    let best = (first..=last).max_by(|&a, &b| power[a].total_cmp(&power[b])).unwrap_or(first);
    best as f64 * df
}
