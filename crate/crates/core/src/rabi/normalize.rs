use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FitResult;
use crate::error::{Error, Result};
use crate::labeling::Label;
use crate::model::OrientationKind;

/// Field of the per-group scaling anchor, gauss.
pub const ANCHOR_FIELD_G: f64 = 35.0;
const ANCHOR_TOL_G: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRecord {
    /// Gauss
    pub field: f64,
    pub transition: (Label, Label),
    pub orientation: OrientationKind,
    pub fit: FitResult,
}

impl FitRecord {
    pub fn group(&self) -> GroupKey {
        GroupKey {
            transition: self.transition,
            orientation: self.orientation,
        }
    }

    /// Ω/2π in MHz.
    pub fn frequency(&self) -> f64 {
        self.fit.params.rabi_frequency_mhz()
    }

    pub fn amplitude(&self) -> f64 {
        self.fit.params.s0.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub transition: (Label, Label),
    pub orientation: OrientationKind,
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{} {}", self.transition.0, self.transition.1, self.orientation)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    /// Divide by the largest frequency and the largest amplitude in the dataset.
    DatasetMax,
    /// Theory value per group at the anchor field; each group is scaled so its
    /// anchor point lands on that value.
    At35G(BTreeMap<GroupKey, f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantityKind {
    Frequency,
    Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPoint {
    pub field: f64,
    pub value: f64,
    pub kind: QuantityKind,
    pub transition: (Label, Label),
    pub orientation: OrientationKind,
}

/// Emits one frequency and one amplitude point per record, frequencies first,
/// each in input order.
pub fn normalize_dataset(fits: &[FitRecord], reference: &Reference) -> Result<Vec<NormalizedPoint>> {
    if fits.is_empty() {
        return Err(Error::invalid("cannot normalize an empty dataset"));
    }
    // (divisor, multiplier) per record and quantity
    let scale: Box<dyn Fn(&FitRecord, QuantityKind) -> (f64, f64)> = match reference {
        Reference::DatasetMax => {
            let f_max = fits.iter().map(FitRecord::frequency).fold(0.0, f64::max);
            let a_max = fits.iter().map(FitRecord::amplitude).fold(0.0, f64::max);
            if f_max <= 0.0 || a_max <= 0.0 {
                return Err(Error::invalid("dataset maximum frequency or amplitude is zero"));
            }
            Box::new(move |_, kind| match kind {
                QuantityKind::Frequency => (f_max, 1.0),
                QuantityKind::Amplitude => (a_max, 1.0),
            })
        }
        Reference::At35G(theory) => {
            let mut factors: BTreeMap<GroupKey, (f64, f64, f64)> = BTreeMap::new();
            for key in fits.iter().map(FitRecord::group) {
                if factors.contains_key(&key) {
                    continue;
                }
                let anchor = fits
                    .iter()
                    .find(|r| r.group() == key && (r.field - ANCHOR_FIELD_G).abs() <= ANCHOR_TOL_G)
                    .ok_or_else(|| Error::invalid(format!("group {key} has no {ANCHOR_FIELD_G} G anchor point")))?;
                let target = *theory
                    .get(&key)
                    .ok_or_else(|| Error::invalid(format!("no theory value supplied for group {key}")))?;
                let (f, a) = (anchor.frequency(), anchor.amplitude());
                if f <= 0.0 || a <= 0.0 {
                    return Err(Error::invalid(format!("group {key} has a vanishing anchor fit")));
                }
                factors.insert(key, (f, a, target));
            }
            Box::new(move |r, kind| {
                let (f, a, target) = factors[&r.group()];
                match kind {
                    QuantityKind::Frequency => (f, target),
                    QuantityKind::Amplitude => (a, target),
                }
            })
        }
    };

    let mut out = Vec::with_capacity(2 * fits.len());
    for kind in [QuantityKind::Frequency, QuantityKind::Amplitude] {
        for r in fits {
            let raw = match kind {
                QuantityKind::Frequency => r.frequency(),
                QuantityKind::Amplitude => r.amplitude(),
            };
            let (div, mul) = scale(r, kind);
            out.push(NormalizedPoint {
                field: r.field,
                value: raw / div * mul,
                kind,
                transition: r.transition,
                orientation: r.orientation,
            });
        }
    }
    Ok(out)
}
