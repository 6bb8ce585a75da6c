//! Hyperfine enhancement of the nuclear coupling to an rf field.
//!
//! The drive operator B_rf (γ_e S·n + γ_N I·n) is rotated into the labeled
//! eigenbasis, H̃ = P† H_rf P, and the transition matrix element is expressed
//! in units of the bare nuclear coupling γ_N B_rf. The full (non-rotating)
//! operator is used; any rotating-frame factor of two is left to the Rabi
//! frequency convention.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labeling::{label_sweep, linspace, Label, LabeledEigensystem};
use crate::linalg::CMatrix;
use crate::model::{basis_index, OrientationClass, P1Parameters, ProductOperators, TWO_PI};

/// Linearly polarized rf drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfDrive {
    /// Gauss.
    pub amplitude: f64,
    /// Unit vector in the defect frame.
    pub polarization: [f64; 3],
}

impl RfDrive {
    /// Normalizes `polarization`; a zero vector is rejected.
    pub fn new(amplitude: f64, polarization: [f64; 3]) -> Result<Self> {
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(Error::invalid(format!("rf amplitude {amplitude} G must be nonnegative")));
        }
        let n = polarization.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::invalid("rf polarization must be a nonzero finite vector"));
        }
        Ok(RfDrive {
            amplitude,
            polarization: polarization.map(|c| c / n),
        })
    }

    pub fn x(amplitude: f64) -> Self {
        RfDrive {
            amplitude,
            polarization: [1.0, 0.0, 0.0],
        }
    }
}

impl Default for RfDrive {
    fn default() -> Self {
        RfDrive::x(1.0)
    }
}

/// H_rf = B_rf (γ_e S·n + γ_N I·n), rad/µs.
pub fn rf_hamiltonian(params: &P1Parameters, drive: &RfDrive) -> Result<CMatrix> {
    let drive = RfDrive::new(drive.amplitude, drive.polarization)?;
    Ok(coupling_operator(&ProductOperators::new(), params, drive.polarization).scale(TWO_PI * drive.amplitude))
}

/// γ_e S·n + γ_N I·n in MHz/G.
fn coupling_operator(ops: &ProductOperators, params: &P1Parameters, n: [f64; 3]) -> CMatrix {
    &ops.s_along(n).scale(params.gamma_e) + &ops.i_along(n).scale(params.gamma_n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationResult {
    pub from: Label,
    pub to: Label,
    /// |⟨from|H̃_rf|to⟩| / (2π γ_N B_rf)
    pub alpha_raw: f64,
    /// alpha_raw over the same matrix element between the bare product states
    /// named by the asymptotic ids; `None` when that element vanishes.
    pub alpha_norm: Option<f64>,
    /// |⟨from|H̃_rf|to⟩| / (2π B_rf), MHz/G.
    pub coupling: f64,
    /// Gauss.
    pub field: f64,
    pub orientation: OrientationClass,
}

/// Precomputed drive operator for repeated evaluation on labeled systems.
#[derive(Debug, Clone)]
pub struct DriveCoupling {
    params: P1Parameters,
    /// γ_e S·n + γ_N I·n, MHz/G
    operator: CMatrix,
    /// (γ_e/γ_N) S·n + I·n, dimensionless
    bare: CMatrix,
}

impl DriveCoupling {
    pub fn new(params: &P1Parameters, drive: &RfDrive) -> Result<Self> {
        params.validate()?;
        let drive = RfDrive::new(drive.amplitude, drive.polarization)?;
        if drive.amplitude == 0.0 {
            return Err(Error::invalid("augmentation needs a nonzero rf amplitude"));
        }
        let ops = ProductOperators::new();
        let operator = coupling_operator(&ops, params, drive.polarization);
        let bare = &ops.s_along(drive.polarization).scale(params.gamma_e / params.gamma_n)
            + &ops.i_along(drive.polarization);
        Ok(DriveCoupling {
            params: *params,
            operator,
            bare,
        })
    }

    /// |⟨from|γ_e S·n + γ_N I·n|to⟩| in MHz/G. The rf amplitude cancels.
    pub fn coupling(&self, sys: &LabeledEigensystem, from: Label, to: Label) -> f64 {
        self.operator.sandwich(&sys.state(from), &sys.state(to)).norm()
    }

    /// The eigenbasis drive matrix P† (γ_e S·n + γ_N I·n) P, MHz/G.
    pub fn eigenbasis_operator(&self, sys: &LabeledEigensystem) -> CMatrix {
        &(&sys.states.adjoint() * &self.operator) * &sys.states
    }

    pub fn evaluate(&self, sys: &LabeledEigensystem, from: Label, to: Label) -> Result<AugmentationResult> {
        if from == to {
            return Err(Error::invalid(format!("transition {from}{to} needs two distinct labels")));
        }
        let coupling = self.coupling(sys, from, to);
        let alpha_raw = coupling / self.params.gamma_n.abs();
        let (ia, ib) = (sys.asymptotic_id(from), sys.asymptotic_id(to));
        let bare = self.bare[(basis_index(ia.two_ms, ia.mi), basis_index(ib.two_ms, ib.mi))].norm();
        let alpha_norm = (bare > 1e-12).then(|| alpha_raw / bare);
        Ok(AugmentationResult {
            from,
            to,
            alpha_raw,
            alpha_norm,
            coupling,
            field: sys.field.magnitude,
            orientation: sys.orientation,
        })
    }
}

pub fn augmentation_factor(
    params: &P1Parameters,
    field_magnitude: f64,
    orientation: &OrientationClass,
    drive: &RfDrive,
    from: Label,
    to: Label,
) -> Result<AugmentationResult> {
    let coupling = DriveCoupling::new(params, drive)?;
    if from == to {
        return Err(Error::invalid(format!("transition {from}{to} needs two distinct labels")));
    }
    let sys = crate::labeling::label_states(params, field_magnitude, orientation)?;
    coupling.evaluate(&sys, from, to)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaSample {
    pub field: f64,
    pub alpha_raw: f64,
    pub alpha_norm: Option<f64>,
    /// alpha_raw divided by its maximum over the sweep.
    pub relative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationCurve {
    pub from: Label,
    pub to: Label,
    pub orientation: OrientationClass,
    pub samples: Vec<AlphaSample>,
}

/// Augmentation factor on a uniform field grid. `points == 1` requires
/// `b_min == b_max` and yields a single sample.
pub fn alpha_sweep(
    params: &P1Parameters,
    b_min: f64,
    b_max: f64,
    points: usize,
    orientation: &OrientationClass,
    drive: &RfDrive,
    transition: (Label, Label),
) -> Result<AugmentationCurve> {
    let valid = match points {
        0 => false,
        1 => b_min >= 0.0 && b_min == b_max,
        _ => b_min >= 0.0 && b_min < b_max && b_max.is_finite(),
    };
    if !valid {
        return Err(Error::invalid(format!(
            "invalid field grid {b_min}..{b_max} with {points} points"
        )));
    }
    alpha_curve(params, &linspace(b_min, b_max, points), orientation, drive, transition)
}

/// Augmentation factor at strictly increasing `fields`.
pub fn alpha_curve(
    params: &P1Parameters,
    fields: &[f64],
    orientation: &OrientationClass,
    drive: &RfDrive,
    (from, to): (Label, Label),
) -> Result<AugmentationCurve> {
    if fields.is_empty() || fields.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("fields must be nonempty and strictly increasing"));
    }
    let coupling = DriveCoupling::new(params, drive)?;
    let systems = label_sweep(params, fields, orientation)?;
    let results = systems
        .iter()
        .map(|sys| coupling.evaluate(sys, from, to))
        .collect::<Result<Vec<_>>>()?;
    let max = results.iter().map(|r| r.alpha_raw).fold(0.0, f64::max);
    let samples = results
        .iter()
        .map(|r| AlphaSample {
            field: r.field,
            alpha_raw: r.alpha_raw,
            alpha_norm: r.alpha_norm,
            relative: if max > 0.0 { r.alpha_raw / max } else { 0.0 },
        })
        .collect();
    Ok(AugmentationCurve {
        from,
        to,
        orientation: *orientation,
        samples,
    })
}

/// Applies a per-state phase e^{iφ_k} to the columns of a labeled system.
#[doc(hidden)]
pub fn rephase(sys: &LabeledEigensystem, phases: &[f64; 6]) -> LabeledEigensystem {
    let mut out = sys.clone();
    for (k, &ph) in phases.iter().enumerate() {
        let col: Vec<Complex64> = sys.states.column(k).iter().map(|z| z * Complex64::from_polar(1.0, ph)).collect();
        out.states.set_column(k, &col);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labeling::label_states;

    #[test]
    fn x_drive_has_zero_diagonal() {
        let h = rf_hamiltonian(&P1Parameters::default(), &RfDrive::x(0.7)).unwrap();
        assert!(h.is_hermitian(1e-15));
        for i in 0..6 {
            assert_eq!(h[(i, i)].norm(), 0.0);
        }
    }

    #[test]
    fn zero_amplitude_gives_zero_matrix() {
        let h = rf_hamiltonian(&P1Parameters::default(), &RfDrive::x(0.0)).unwrap();
        assert_eq!(h.max_abs(), 0.0);
    }

    #[test]
    fn largest_element_is_electron() {
        let h = rf_hamiltonian(&P1Parameters::default(), &RfDrive::x(1.0)).unwrap();
        assert!((h.max_abs() - TWO_PI * 1.4).abs() < 1e-12);
    }

    #[test]
    fn zero_polarization_rejected() {
        assert!(RfDrive::new(1.0, [0.0; 3]).is_err());
        let d = RfDrive {
            amplitude: 1.0,
            polarization: [0.0; 3],
        };
        assert!(rf_hamiltonian(&P1Parameters::default(), &d).is_err());
    }

    #[test]
    fn polarization_normalized() {
        let d = RfDrive::new(2.0, [3.0, 4.0, 0.0]).unwrap();
        let n: f64 = d.polarization.iter().map(|c| c * c).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_labels_rejected() {
        let p = P1Parameters::default();
        let r = augmentation_factor(&p, 30.0, &OrientationClass::on_axis(), &RfDrive::x(1.0), Label::A, Label::A);
        assert!(r.is_err());
    }

    #[test]
    fn amplitude_cancels() {
        let p = P1Parameters::default();
        let o = OrientationClass::off_axis();
        let a = augmentation_factor(&p, 35.0, &o, &RfDrive::x(1.0), Label::D, Label::E).unwrap();
        let b = augmentation_factor(&p, 35.0, &o, &RfDrive::x(2.0), Label::D, Label::E).unwrap();
        assert!((a.alpha_raw - b.alpha_raw).abs() <= 1e-12 * a.alpha_raw);
    }

    #[test]
    fn symmetric_in_labels_and_phase_free() {
        let p = P1Parameters::default();
        let sys = label_states(&p, 27.0, &OrientationClass::off_axis()).unwrap();
        let dc = DriveCoupling::new(&p, &RfDrive::x(1.0)).unwrap();
        let shifted = rephase(&sys, &[0.3, 1.1, -2.0, 0.7, 2.9, -0.4]);
        for &i in &Label::ALL {
            for &j in &Label::ALL {
                if i == j {
                    continue;
                }
                let ij = dc.evaluate(&sys, i, j).unwrap().alpha_raw;
                let ji = dc.evaluate(&sys, j, i).unwrap().alpha_raw;
                assert!((ij - ji).abs() <= 1e-12 * ij.max(1e-300));
                let ph = dc.evaluate(&shifted, i, j).unwrap().alpha_raw;
                assert!((ij - ph).abs() <= 1e-10 * ij.max(1e-10));
            }
        }
    }

    #[test]
    fn single_point_curve() {
        let p = P1Parameters::default();
        let c = alpha_sweep(&p, 40.0, 40.0, 1, &OrientationClass::on_axis(), &RfDrive::x(1.0), (Label::A, Label::B)).unwrap();
        assert_eq!(c.samples.len(), 1);
        assert_eq!(c.samples[0].relative, 1.0);
        assert!(alpha_sweep(&p, 40.0, 50.0, 1, &OrientationClass::on_axis(), &RfDrive::x(1.0), (Label::A, Label::B)).is_err());
    }
}
