use std::fmt;

use serde::{Deserialize, Serialize};

use crate::labeling::{AsymptoticId, Label, LabeledEigensystem};
use crate::model::OrientationClass;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TransitionClass {
    /// |Δm_S| = 1, Δm_I = 0
    ElectronSQ,
    /// Δm_S = 0, |Δm_I| = 1
    NuclearSQ,
    DoubleQuantum,
}

impl TransitionClass {
    pub fn classify(from: AsymptoticId, to: AsymptoticId) -> Self {
        let dms = (from.two_ms - to.two_ms).abs();
        let dmi = (from.mi - to.mi).abs();
        match (dms, dmi) {
            (2, 0) => TransitionClass::ElectronSQ,
            (0, 1) => TransitionClass::NuclearSQ,
            _ => TransitionClass::DoubleQuantum,
        }
    }
}

impl fmt::Display for TransitionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TransitionClass::ElectronSQ => "electron",
            TransitionClass::NuclearSQ => "nuclear",
            TransitionClass::DoubleQuantum => "double-quantum",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub from: Label,
    pub to: Label,
    /// MHz, nonnegative.
    pub frequency: f64,
    pub class: TransitionClass,
    /// m_S(to) − m_S(from)
    pub delta_ms: f64,
    /// m_I(to) − m_I(from)
    pub delta_mi: i8,
    pub orientation: OrientationClass,
}

impl TransitionRecord {
    pub fn name(&self) -> String {
        format!("{}{}", self.from, self.to)
    }
}

/// All fifteen unordered label pairs, in (a,b), (a,c), …, (e,f) order.
pub fn transition_table(sys: &LabeledEigensystem) -> Vec<TransitionRecord> {
    let mut out = Vec::with_capacity(15);
    for (i, &from) in Label::ALL.iter().enumerate() {
        for &to in &Label::ALL[i + 1..] {
            out.push(record(sys, from, to));
        }
    }
    out
}

pub fn record(sys: &LabeledEigensystem, from: Label, to: Label) -> TransitionRecord {
    let (a, b) = (sys.asymptotic_id(from), sys.asymptotic_id(to));
    TransitionRecord {
        from,
        to,
        frequency: (sys.energy(from) - sys.energy(to)).abs(),
        class: TransitionClass::classify(a, b),
        delta_ms: b.ms() - a.ms(),
        delta_mi: b.mi - a.mi,
        orientation: sys.orientation,
    }
}

/// Parses a two-letter transition name such as "de".
pub fn parse_transition(name: &str) -> Option<(Label, Label)> {
    let mut chars = name.trim().chars();
    let a = Label::from_char(chars.next()?)?;
    let b = Label::from_char(chars.next()?)?;
    if chars.next().is_some() || a == b {
        return None;
    }
    Some((a, b))
}
