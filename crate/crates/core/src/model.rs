//! The P1 center Hamiltonian: electron spin 1/2 coupled to a ¹⁴N nucleus (I = 1).
//!
//! Product basis |m_S, m_I⟩ with m_S ∈ {+1/2, −1/2} outer and
//! m_I ∈ {+1, 0, −1} inner. Matrices are in angular frequency (rad/µs);
//! everything user-facing is in MHz and gauss.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, CMatrix};
use crate::spin::{spin_operators, Spin, SpinOperatorSet};

pub const TWO_PI: f64 = 2.0 * PI;
pub const DIM: usize = 6;

/// Tetrahedral angle arccos(−1/3), in degrees.
pub fn tetrahedral_angle_deg() -> f64 {
    (-1.0f64 / 3.0).acos().to_degrees()
}

/// Field azimuth used for the off-axis class. With the default x̂ drive this
/// keeps the rf field perpendicular to the static field for both classes.
pub const OFF_AXIS_AZIMUTH_DEG: f64 = 90.0;

/// Spin-Hamiltonian constants, all divided by 2π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P1Parameters {
    /// Electron gyromagnetic ratio, MHz/G (signed).
    pub gamma_e: f64,
    /// ¹⁴N gyromagnetic ratio, MHz/G (signed).
    pub gamma_n: f64,
    /// Axial hyperfine coupling, MHz.
    pub a_par: f64,
    /// Transverse hyperfine coupling, MHz.
    pub a_perp: f64,
    /// Nuclear quadrupole coupling, MHz.
    pub q: f64,
}

impl Default for P1Parameters {
    fn default() -> Self {
        P1Parameters {
            gamma_e: -2.8,
            gamma_n: 3.077e-4,
            a_par: 114.0,
            a_perp: 81.34,
            q: -4.2,
        }
    }
}

impl P1Parameters {
    pub fn validate(&self) -> Result<()> {
        let all = [self.gamma_e, self.gamma_n, self.a_par, self.a_perp, self.q];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("P1 parameters must be finite"));
        }
        if self.gamma_n == 0.0 {
            return Err(Error::invalid("gamma_n must be nonzero"));
        }
        Ok(())
    }
}

/// Static field magnitude and direction in the defect frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    /// Gauss.
    pub magnitude: f64,
    /// Degrees from the defect axis.
    pub polar_theta: f64,
    /// Degrees.
    pub azimuth_phi: f64,
}

impl FieldConfig {
    pub fn new(magnitude: f64, polar_theta: f64, azimuth_phi: f64) -> Result<Self> {
        let f = FieldConfig {
            magnitude,
            polar_theta,
            azimuth_phi,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.magnitude.is_finite() || self.magnitude < 0.0 {
            return Err(Error::invalid(format!(
                "field magnitude {} G must be finite and nonnegative",
                self.magnitude
            )));
        }
        if !(0.0..=180.0).contains(&self.polar_theta) || !self.azimuth_phi.is_finite() {
            return Err(Error::invalid(format!(
                "field angles θ={} φ={} out of range",
                self.polar_theta, self.azimuth_phi
            )));
        }
        Ok(())
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (th, ph) = (self.polar_theta.to_radians(), self.azimuth_phi.to_radians());
        [th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]
    }

    /// Field vector in gauss.
    pub fn vector(&self) -> [f64; 3] {
        self.unit_vector().map(|c| c * self.magnitude)
    }

    pub fn with_magnitude(&self, magnitude: f64) -> Self {
        FieldConfig { magnitude, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationKind {
    OnAxis,
    OffAxis,
}

impl fmt::Display for OrientationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrientationKind::OnAxis => "on-axis",
            OrientationKind::OffAxis => "off-axis",
        })
    }
}

/// Jahn–Teller orientation class relative to the applied field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrientationClass {
    pub kind: OrientationKind,
    /// Degrees.
    pub theta: f64,
    /// Field azimuth in the defect frame, degrees.
    pub phi: f64,
    pub degeneracy: u32,
}

impl OrientationClass {
    pub fn on_axis() -> Self {
        OrientationClass {
            kind: OrientationKind::OnAxis,
            theta: 0.0,
            phi: 0.0,
            degeneracy: 1,
        }
    }

    pub fn off_axis() -> Self {
        OrientationClass {
            kind: OrientationKind::OffAxis,
            theta: tetrahedral_angle_deg(),
            phi: OFF_AXIS_AZIMUTH_DEG,
            degeneracy: 3,
        }
    }

    pub fn both() -> [Self; 2] {
        [Self::on_axis(), Self::off_axis()]
    }

    pub fn from_kind(kind: OrientationKind) -> Self {
        match kind {
            OrientationKind::OnAxis => Self::on_axis(),
            OrientationKind::OffAxis => Self::off_axis(),
        }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        OrientationClass { theta, ..self }
    }

    pub fn with_azimuth(self, phi: f64) -> Self {
        OrientationClass { phi, ..self }
    }

    pub fn field(&self, magnitude: f64) -> FieldConfig {
        FieldConfig {
            magnitude,
            polar_theta: self.theta,
            azimuth_phi: self.phi,
        }
    }
}

/// Electron and nuclear operators lifted to the six-dimensional product space.
#[derive(Debug, Clone)]
pub struct ProductOperators {
    pub s: [CMatrix; 3],
    pub i: [CMatrix; 3],
}

impl ProductOperators {
    pub fn new() -> Self {
        let e = spin_operators(Spin::HALF);
        let n = spin_operators(Spin::ONE);
        let id2 = CMatrix::identity(2);
        let id3 = CMatrix::identity(3);
        let lift_s = |ops: &SpinOperatorSet| [&ops.x, &ops.y, &ops.z].map(|m| kron(m, &id3));
        let lift_i = |ops: &SpinOperatorSet| [&ops.x, &ops.y, &ops.z].map(|m| kron(&id2, m));
        ProductOperators {
            s: lift_s(&e),
            i: lift_i(&n),
        }
    }

    pub fn s_along(&self, v: [f64; 3]) -> CMatrix {
        dot(&self.s, v)
    }

    pub fn i_along(&self, v: [f64; 3]) -> CMatrix {
        dot(&self.i, v)
    }
}

impl Default for ProductOperators {
    fn default() -> Self {
        Self::new()
    }
}

fn dot(ops: &[CMatrix; 3], v: [f64; 3]) -> CMatrix {
    let mut out = ops[0].scale(v[0]);
    out = &out + &ops[1].scale(v[1]);
    &out + &ops[2].scale(v[2])
}

/// Basis index of |m_S, m_I⟩.
pub fn basis_index(two_ms: i8, mi: i8) -> usize {
    let s = if two_ms > 0 { 0 } else { 3 };
    s + (1 - mi) as usize
}

/// Static Hamiltonian in rad/µs:
/// −γ_e B·S − γ_N B·I + A∥ S_z I_z + A⊥ (S_x I_x + S_y I_y) + Q I_z².
pub fn build_hamiltonian(params: &P1Parameters, field: &FieldConfig) -> CMatrix {
    build_with(&ProductOperators::new(), params, field)
}

pub(crate) fn build_with(ops: &ProductOperators, params: &P1Parameters, field: &FieldConfig) -> CMatrix {
    let b = field.vector();
    let mut h = ops.s_along(b).scale(-params.gamma_e);
    h = &h + &ops.i_along(b).scale(-params.gamma_n);
    h = &h + &(&ops.s[2] * &ops.i[2]).scale(params.a_par);
    let transverse = &(&ops.s[0] * &ops.i[0]) + &(&ops.s[1] * &ops.i[1]);
    h = &h + &transverse.scale(params.a_perp);
    h = &h + &(&ops.i[2] * &ops.i[2]).scale(params.q);
    h.scale(TWO_PI)
}
