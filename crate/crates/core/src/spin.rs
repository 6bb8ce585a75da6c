use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// A spin quantum number stored as 2s so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Spin(u32);

impl Spin {
    pub const HALF: Spin = Spin(1);
    pub const ONE: Spin = Spin(2);

    pub fn from_twice(two_s: u32) -> Self {
        Spin(two_s)
    }

    /// Accepts any s with 2s a nonnegative integer.
    pub fn new(s: f64) -> Result<Self> {
        let two = 2.0 * s;
        if !two.is_finite() || two < 0.0 || (two - two.round()).abs() > 1e-12 {
            return Err(Error::invalid(format!("spin {s} is not a nonnegative half-integer")));
        }
        Ok(Spin(two.round() as u32))
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.0 as usize + 1
    }

    /// m values in basis order (descending).
    pub fn projections(self) -> Vec<f64> {
        let s = self.value();
        (0..self.dim()).map(|k| s - k as f64).collect()
    }
}

/// Cartesian angular-momentum matrices in the |s, m⟩ basis, m descending.
#[derive(Debug, Clone)]
pub struct SpinOperatorSet {
    pub spin: Spin,
    pub x: CMatrix,
    pub y: CMatrix,
    pub z: CMatrix,
}

impl SpinOperatorSet {
    /// n·S for a (not necessarily unit) vector n.
    pub fn along(&self, n: [f64; 3]) -> CMatrix {
        let mut out = self.x.scale(n[0]);
        out = &out + &self.y.scale(n[1]);
        &out + &self.z.scale(n[2])
    }

    pub fn casimir(&self) -> CMatrix {
        let xx = &self.x * &self.x;
        let yy = &self.y * &self.y;
        let zz = &self.z * &self.z;
        &(&xx + &yy) + &zz
    }
}

/// Builds Sx, Sy, Sz from the raising operator ⟨m+1|S+|m⟩ = √(s(s+1) − m(m+1)).
pub fn spin_operators(spin: Spin) -> SpinOperatorSet {
    let s = spin.value();
    let m = spin.projections();
    let d = spin.dim();
    let mut raise = CMatrix::zeros(d, d);
    for k in 1..d {
        let mk = m[k];
        raise[(k - 1, k)] = Complex64::new((s * (s + 1.0) - mk * (mk + 1.0)).sqrt(), 0.0);
    }
    let lower = raise.adjoint();
    let x = (&raise + &lower).scale(0.5);
    let y = (&raise - &lower).scale_complex(Complex64::new(0.0, -0.5));
    let z = CMatrix::from_real_diagonal(&m);
    SpinOperatorSet { spin, x, y, z }
}
