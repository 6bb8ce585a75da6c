//! Nuclear Rabi oscillations: the stretched-exponential damped cos² model,
//! deterministic synthetic traces, least-squares fitting and the
//! normalization used to compare fitted data against augmentation curves.

mod fit;
mod normalize;

pub use fit::{fit_damped_sinusoid, FitResult, ParamErrors};
pub use normalize::{normalize_dataset, FitRecord, GroupKey, NormalizedPoint, QuantityKind, Reference, ANCHOR_FIELD_G};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::augmentation::RfDrive;
use crate::error::{Error, Result};
use crate::labeling::Label;
use crate::model::{OrientationClass, TWO_PI};

/// Minimum number of samples in a trace.
pub const MIN_TRACE_LEN: usize = 8;

/// S(t) = baseline + s0 · exp(−(t/t_d)^n) · cos²(Ω t / 2)
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DampedSinusoidParams {
    pub s0: f64,
    /// µs
    pub t_d: f64,
    pub n: f64,
    /// Rabi angular frequency, rad/µs.
    pub omega: f64,
    pub baseline: f64,
}

impl DampedSinusoidParams {
    pub fn value(&self, t: f64) -> f64 {
        let envelope = (-(t / self.t_d).powf(self.n)).exp();
        let c = (0.5 * self.omega * t).cos();
        self.baseline + self.s0 * envelope * c * c
    }

    /// Ω/2π in MHz.
    pub fn rabi_frequency_mhz(&self) -> f64 {
        self.omega.abs() / TWO_PI
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.s0, self.t_d, self.n, self.omega, self.baseline];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("damped sinusoid parameters must be finite"));
        }
        if self.t_d <= 0.0 || self.n <= 0.0 {
            return Err(Error::invalid(format!(
                "decay time {} µs and stretch exponent {} must be positive",
                self.t_d, self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub transition: (Label, Label),
    /// Gauss
    pub field: f64,
    pub orientation: OrientationClass,
    pub drive: RfDrive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RabiTrace {
    /// µs, strictly increasing
    pub times: Vec<f64>,
    pub signal: Vec<f64>,
    pub meta: Option<TraceMeta>,
}

impl RabiTrace {
    pub fn new(times: Vec<f64>, signal: Vec<f64>) -> Result<Self> {
        let t = RabiTrace {
            times,
            signal,
            meta: None,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.signal.len() {
            return Err(Error::invalid(format!(
                "trace has {} times but {} signal values",
                self.times.len(),
                self.signal.len()
            )));
        }
        if self.times.len() < MIN_TRACE_LEN {
            return Err(Error::invalid(format!(
                "trace needs at least {MIN_TRACE_LEN} samples, got {}",
                self.times.len()
            )));
        }
        if self.times.iter().chain(&self.signal).any(|v| !v.is_finite()) {
            return Err(Error::invalid("trace contains non-finite values"));
        }
        if let Some(k) = self.times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!("times not strictly increasing at row {}", k + 1)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Ω/2π in MHz for augmentation `alpha_raw`, γ_N/2π in MHz/G and rf amplitude in G.
pub fn rabi_frequency(alpha_raw: f64, gamma_n: f64, b_rf: f64) -> f64 {
    alpha_raw * gamma_n.abs() * b_rf
}

/// rf amplitude (G) that produces Rabi frequency `target_mhz` for `alpha_raw`.
pub fn calibrate_b_rf(alpha_raw: f64, gamma_n: f64, target_mhz: f64) -> Result<f64> {
    let denom = alpha_raw * gamma_n.abs();
    if !(denom > 0.0 && denom.is_finite()) {
        return Err(Error::invalid("cannot calibrate against a vanishing coupling"));
    }
    Ok(target_mhz / denom)
}

/// Evaluates the model on `times` and adds N(0, noise_sigma²) noise drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn simulate_trace(params: &DampedSinusoidParams, times: &[f64], noise_sigma: f64, seed: u64) -> Result<RabiTrace> {
    params.validate()?;
    if !(noise_sigma >= 0.0 && noise_sigma.is_finite()) {
        return Err(Error::invalid(format!("noise sigma {noise_sigma} must be nonnegative")));
    }
    let mut signal: Vec<f64> = times.iter().map(|&t| params.value(t)).collect();
    if noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, noise_sigma).map_err(|e| Error::invalid(e.to_string()))?;
        for s in &mut signal {
            *s += normal.sample(&mut rng);
        }
    }
    RabiTrace::new(times.to_vec(), signal)
}

/// `samples` evenly spaced times on [0, t_max].
pub fn uniform_times(t_max: f64, samples: usize) -> Vec<f64> {
    crate::labeling::linspace(0.0, t_max, samples)
}
