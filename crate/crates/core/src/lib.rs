//! Coupled electron–nuclear spin model of the diamond P1 center.
//!
//! The crate builds the six-level spin Hamiltonian for the two Jahn–Teller
//! orientation classes, labels its eigenstates by high-field continuation,
//! evaluates the hyperfine-enhanced nuclear coupling to an rf drive, synthesizes
//! DEER stick and broadened spectra, and simulates and fits nuclear Rabi
//! oscillations.

pub mod augmentation;
pub mod deer;
pub mod error;
pub mod labeling;
pub mod linalg;
pub mod model;
pub mod rabi;
pub mod spin;
pub mod transitions;

pub use augmentation::{
    alpha_sweep, augmentation_factor, rf_hamiltonian, AlphaSample, AugmentationCurve, AugmentationResult, RfDrive,
};
pub use deer::{broaden, stick_spectrum, Lineshape, SpectralLine, Spectrum, SpectrumConfig};
pub use error::{Error, Result};
pub use labeling::{energy_sweep, label_states, label_sweep, AsymptoticId, Label, LabeledEigensystem};
pub use linalg::{hermitian_eig, kron, CMatrix, EigenDecomposition};
pub use model::{build_hamiltonian, FieldConfig, OrientationClass, OrientationKind, P1Parameters};
pub use spin::{spin_operators, Spin, SpinOperatorSet};
pub use transitions::{transition_table, TransitionClass, TransitionRecord};
