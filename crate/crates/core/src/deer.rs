//! DEER spectra: stick lines for both orientation classes and a broadened trace.
//!
//! Line contrast is modeled as orientation degeneracy × |⟨a|H̃_rf|b⟩| with
//! uniform level populations, normalized so the strongest weighted line is 1.

use serde::{Deserialize, Serialize};

use crate::augmentation::{DriveCoupling, RfDrive};
use crate::error::{Error, Result};
use crate::labeling::{label_states, Label};
use crate::model::{OrientationClass, P1Parameters};
use crate::transitions::{transition_table, TransitionClass};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralLine {
    /// MHz
    pub frequency: f64,
    pub amplitude: f64,
    pub from: Label,
    pub to: Label,
    pub class: TransitionClass,
    pub orientation: OrientationClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Lineshape {
    Lorentzian,
    Gaussian,
}

impl Lineshape {
    /// Unit peak height profile at detuning `x` for full width at half maximum `fwhm`.
    pub fn profile(self, x: f64, fwhm: f64) -> f64 {
        let u = 2.0 * x / fwhm;
        match self {
            Lineshape::Lorentzian => 1.0 / (1.0 + u * u),
            Lineshape::Gaussian => (-std::f64::consts::LN_2 * u * u).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumConfig {
    /// MHz
    pub f_min: f64,
    /// MHz
    pub f_max: f64,
    pub samples: usize,
    /// Full width at half maximum, MHz.
    pub linewidth: f64,
    pub lineshape: Lineshape,
    /// Sticks weaker than this are left out of `Spectrum::sticks`.
    pub amplitude_floor: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            f_min: 0.0,
            f_max: 400.0,
            samples: 4001,
            linewidth: 1.0,
            lineshape: Lineshape::Lorentzian,
            amplitude_floor: 0.0,
        }
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_min.is_finite() && self.f_max.is_finite() && self.f_min < self.f_max) {
            return Err(Error::invalid(format!(
                "spectrum window {}..{} MHz is empty",
                self.f_min, self.f_max
            )));
        }
        if self.samples < 2 {
            return Err(Error::invalid("spectrum needs at least 2 samples"));
        }
        if !(self.linewidth > 0.0 && self.linewidth.is_finite()) {
            return Err(Error::invalid(format!("linewidth {} MHz must be positive", self.linewidth)));
        }
        if !self.amplitude_floor.is_finite() || self.amplitude_floor < 0.0 {
            return Err(Error::invalid("amplitude floor must be nonnegative"));
        }
        Ok(())
    }

    pub fn frequencies(&self) -> Vec<f64> {
        crate::labeling::linspace(self.f_min, self.f_max, self.samples)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub config: SpectrumConfig,
    pub sticks: Vec<SpectralLine>,
    /// (MHz, contrast)
    pub curve: Vec<(f64, f64)>,
}

/// Stick lines for the on-axis and off-axis classes at `field` gauss.
pub fn stick_spectrum(params: &P1Parameters, field: f64, drive: &RfDrive) -> Result<Vec<SpectralLine>> {
    stick_spectrum_for(params, field, drive, &OrientationClass::both())
}

pub fn stick_spectrum_for(
    params: &P1Parameters,
    field: f64,
    drive: &RfDrive,
    orientations: &[OrientationClass],
) -> Result<Vec<SpectralLine>> {
    let coupling = DriveCoupling::new(params, drive)?;
    let mut lines = Vec::with_capacity(15 * orientations.len());
    for o in orientations {
        let sys = label_states(params, field, o)?;
        for t in transition_table(&sys) {
            let weight = o.degeneracy as f64 * coupling.coupling(&sys, t.from, t.to);
            lines.push(SpectralLine {
                frequency: t.frequency,
                amplitude: weight,
                from: t.from,
                to: t.to,
                class: t.class,
                orientation: *o,
            });
        }
    }
    let max = lines.iter().map(|l| l.amplitude).fold(0.0, f64::max);
    if max > 0.0 {
        for l in &mut lines {
            l.amplitude /= max;
        }
    }
    Ok(lines)
}

/// Largest amplitude among lines of `class`, or zero.
pub fn max_amplitude(lines: &[SpectralLine], class: TransitionClass) -> f64 {
    lines
        .iter()
        .filter(|l| l.class == class)
        .map(|l| l.amplitude)
        .fold(0.0, f64::max)
}

/// Sums unit-height profiles scaled by each line amplitude. Lines more than ten
/// linewidths outside the window are skipped.
pub fn broaden(sticks: &[SpectralLine], config: &SpectrumConfig) -> Result<Spectrum> {
    config.validate()?;
    let margin = 10.0 * config.linewidth;
    let relevant: Vec<&SpectralLine> = sticks
        .iter()
        .filter(|l| l.frequency >= config.f_min - margin && l.frequency <= config.f_max + margin)
        .collect();
    let curve = config
        .frequencies()
        .into_iter()
        .map(|f| {
            let v: f64 = relevant
                .iter()
                .map(|l| l.amplitude * config.lineshape.profile(f - l.frequency, config.linewidth))
                .sum();
            (f, v)
        })
        .collect();
    let kept = sticks
        .iter()
        .filter(|l| l.amplitude >= config.amplitude_floor)
        .copied()
        .collect();
    Ok(Spectrum {
        config: *config,
        sticks: kept,
        curve,
    })
}
