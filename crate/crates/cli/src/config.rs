//! Run configuration: TOML file plus `--set section.key=value` overrides.

use p1spin::deer::Lineshape;
use p1spin::model::{tetrahedral_angle_deg, OFF_AXIS_AZIMUTH_DEG};
use p1spin::transitions::parse_transition;
use p1spin::{Label, OrientationClass, OrientationKind, P1Parameters, RfDrive, SpectrumConfig};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub model: ModelSection,
    pub geometry: GeometrySection,
    pub sweep: SweepSection,
    pub drive: DriveSection,
    pub alpha: AlphaSection,
    pub deer: DeerSection,
    pub rabi_sim: RabiSimSection,
    pub rabi_fit: RabiFitSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub gamma_e: f64,
    pub gamma_n: f64,
    pub a_par: f64,
    pub a_perp: f64,
    pub q: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        let p = P1Parameters::default();
        ModelSection {
            gamma_e: p.gamma_e,
            gamma_n: p.gamma_n,
            a_par: p.a_par,
            a_perp: p.a_perp,
            q: p.q,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationChoice {
    Both,
    OnAxis,
    OffAxis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub orientation: OrientationChoice,
    pub off_axis_theta: f64,
    pub off_axis_phi: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        GeometrySection {
            orientation: OrientationChoice::Both,
            off_axis_theta: tetrahedral_angle_deg(),
            off_axis_phi: OFF_AXIS_AZIMUTH_DEG,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub b_min: f64,
    pub b_max: f64,
    pub points: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            b_min: 0.0,
            b_max: 100.0,
            points: 101,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DriveSection {
    pub b_rf: f64,
    pub polarization: [f64; 3],
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection {
            b_rf: 1.0,
            polarization: [1.0, 0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlphaSection {
    pub transition: String,
}

impl Default for AlphaSection {
    fn default() -> Self {
        AlphaSection {
            transition: "de".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeerSection {
    pub field: f64,
    pub f_min: f64,
    pub f_max: f64,
    pub samples: usize,
    pub linewidth: f64,
    pub lineshape: Lineshape,
    pub amplitude_floor: f64,
}

impl Default for DeerSection {
    fn default() -> Self {
        let s = SpectrumConfig::default();
        DeerSection {
            field: 35.0,
            f_min: s.f_min,
            f_max: s.f_max,
            samples: s.samples,
            linewidth: s.linewidth,
            lineshape: s.lineshape,
            amplitude_floor: s.amplitude_floor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RabiSimSection {
    pub transition: String,
    pub orientation: OrientationKind,
    pub field: f64,
    /// Overrides the α γ_N B_rf frequency when positive.
    pub rabi_mhz: f64,
    pub s0: f64,
    pub t_d: f64,
    pub n: f64,
    pub baseline: f64,
    pub t_max: f64,
    pub samples: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for RabiSimSection {
    fn default() -> Self {
        RabiSimSection {
            transition: "de".into(),
            orientation: OrientationKind::OffAxis,
            field: 20.0,
            rabi_mhz: 0.0,
            s0: 0.012,
            t_d: 5.0,
            n: 1.0,
            baseline: 0.988,
            t_max: 5.0,
            samples: 200,
            noise_sigma: 0.0,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RabiFitSection {
    /// Holds the stretch exponent fixed when positive.
    pub fix_n: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub format: Format,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { format: Format::Csv }
    }
}

/// Every key with its unit, for `--help`.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("model.gamma_e", "MHz/G", "electron gyromagnetic ratio / 2π (signed)"),
    ("model.gamma_n", "MHz/G", "14N gyromagnetic ratio / 2π (signed)"),
    ("model.a_par", "MHz", "axial hyperfine coupling / 2π"),
    ("model.a_perp", "MHz", "transverse hyperfine coupling / 2π"),
    ("model.q", "MHz", "nuclear quadrupole coupling / 2π"),
    ("geometry.orientation", "-", "both | on-axis | off-axis"),
    ("geometry.off_axis_theta", "deg", "polar angle of the field for the off-axis class"),
    ("geometry.off_axis_phi", "deg", "azimuth of the field for the off-axis class"),
    ("sweep.b_min", "G", "first field of the levels/alpha grid"),
    ("sweep.b_max", "G", "last field of the grid (equal to b_min when points = 1)"),
    ("sweep.points", "-", "number of grid points"),
    ("drive.b_rf", "G", "rf amplitude"),
    ("drive.polarization", "-", "rf direction [x, y, z] in the defect frame"),
    ("alpha.transition", "-", "two labels, e.g. \"de\""),
    ("deer.field", "G", "static field of the spectrum"),
    ("deer.f_min", "MHz", "lower edge of the broadened curve"),
    ("deer.f_max", "MHz", "upper edge of the broadened curve"),
    ("deer.samples", "-", "points on the broadened curve"),
    ("deer.linewidth", "MHz", "full width at half maximum"),
    ("deer.lineshape", "-", "lorentzian | gaussian"),
    ("deer.amplitude_floor", "-", "sticks below this relative amplitude are not listed"),
    ("rabi_sim.transition", "-", "driven transition"),
    ("rabi_sim.orientation", "-", "on-axis | off-axis"),
    ("rabi_sim.field", "G", "static field"),
    ("rabi_sim.rabi_mhz", "MHz", "Rabi frequency override; 0 derives it from alpha and drive.b_rf"),
    ("rabi_sim.s0", "contrast", "oscillation amplitude"),
    ("rabi_sim.t_d", "µs", "decay time"),
    ("rabi_sim.n", "-", "stretch exponent"),
    ("rabi_sim.baseline", "contrast", "offset"),
    ("rabi_sim.t_max", "µs", "last sample time"),
    ("rabi_sim.samples", "-", "number of samples from t = 0"),
    ("rabi_sim.noise_sigma", "contrast", "standard deviation of added Gaussian noise"),
    ("rabi_sim.seed", "-", "noise generator seed"),
    ("rabi_fit.fix_n", "-", "fixed stretch exponent; 0 fits it"),
    ("output.format", "-", "csv | json"),
];

pub fn keys_help() -> String {
    let mut s = String::from("Configuration keys (TOML file sections, or --set section.key=value):\n");
    for (key, unit, what) in KEYS {
        s.push_str(&format!("  {key:<26} [{unit}] {what}\n"));
    }
    s
}

impl RunConfig {
    /// Parses `text` as TOML, applies `overrides` and validates the result.
    pub fn load(text: Option<&str>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = match text {
            Some(t) => t.parse().map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?,
            None => toml::Table::new(),
        };
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        check_keys(&table)?;
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn params(&self) -> P1Parameters {
        let m = &self.model;
        P1Parameters {
            gamma_e: m.gamma_e,
            gamma_n: m.gamma_n,
            a_par: m.a_par,
            a_perp: m.a_perp,
            q: m.q,
        }
    }

    fn off_axis(&self) -> OrientationClass {
        OrientationClass::off_axis()
            .with_theta(self.geometry.off_axis_theta)
            .with_azimuth(self.geometry.off_axis_phi)
    }

    pub fn orientation(&self, kind: OrientationKind) -> OrientationClass {
        match kind {
            OrientationKind::OnAxis => OrientationClass::on_axis(),
            OrientationKind::OffAxis => self.off_axis(),
        }
    }

    pub fn orientations(&self) -> Vec<OrientationClass> {
        match self.geometry.orientation {
            OrientationChoice::Both => vec![OrientationClass::on_axis(), self.off_axis()],
            OrientationChoice::OnAxis => vec![OrientationClass::on_axis()],
            OrientationChoice::OffAxis => vec![self.off_axis()],
        }
    }

    pub fn drive(&self) -> Result<RfDrive, CliError> {
        RfDrive::new(self.drive.b_rf, self.drive.polarization).map_err(|e| CliError::Config(format!("drive: {e}")))
    }

    pub fn spectrum(&self) -> SpectrumConfig {
        let d = &self.deer;
        SpectrumConfig {
            f_min: d.f_min,
            f_max: d.f_max,
            samples: d.samples,
            linewidth: d.linewidth,
            lineshape: d.lineshape,
            amplitude_floor: d.amplitude_floor,
        }
    }

    pub fn alpha_transition(&self) -> (Label, Label) {
        parse_transition(&self.alpha.transition).expect("validated")
    }

    pub fn rabi_transition(&self) -> (Label, Label) {
        parse_transition(&self.rabi_sim.transition).expect("validated")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, why: String| Err(CliError::Config(format!("{key}: {why}")));
        self.params().validate().or_else(|e| bad("model", e.to_string()))?;
        for (key, v) in [("geometry.off_axis_theta", self.geometry.off_axis_theta), ("geometry.off_axis_phi", self.geometry.off_axis_phi)] {
            if !v.is_finite() {
                return bad(key, "must be finite".into());
            }
        }
        if !(0.0..=180.0).contains(&self.geometry.off_axis_theta) {
            return bad("geometry.off_axis_theta", "must lie in [0, 180] degrees".into());
        }
        let s = &self.sweep;
        let grid_ok = match s.points {
            0 => false,
            1 => s.b_min >= 0.0 && s.b_min == s.b_max,
            _ => s.b_min >= 0.0 && s.b_min < s.b_max && s.b_max.is_finite(),
        };
        if !grid_ok {
            return bad(
                "sweep",
                format!("need 0 <= b_min < b_max with points >= 2, or b_min == b_max with points = 1 (got {}..{} x {})", s.b_min, s.b_max, s.points),
            );
        }
        self.drive()?;
        for (key, t) in [("alpha.transition", &self.alpha.transition), ("rabi_sim.transition", &self.rabi_sim.transition)] {
            if parse_transition(t).is_none() {
                return bad(key, format!("{t:?} is not two distinct labels from a..f"));
            }
        }
        if !(self.deer.field >= 0.0 && self.deer.field.is_finite()) {
            return bad("deer.field", "must be a nonnegative field".into());
        }
        self.spectrum().validate().or_else(|e| bad("deer", e.to_string()))?;
        let r = &self.rabi_sim;
        if !(r.field >= 0.0 && r.field.is_finite()) {
            return bad("rabi_sim.field", "must be a nonnegative field".into());
        }
        if !(r.rabi_mhz >= 0.0 && r.rabi_mhz.is_finite()) {
            return bad("rabi_sim.rabi_mhz", "must be nonnegative".into());
        }
        if !(r.t_max > 0.0 && r.t_max.is_finite()) {
            return bad("rabi_sim.t_max", "must be positive".into());
        }
        if r.samples < p1spin::rabi::MIN_TRACE_LEN {
            return bad("rabi_sim.samples", format!("need at least {}", p1spin::rabi::MIN_TRACE_LEN));
        }
        if !(r.t_d > 0.0 && r.n > 0.0 && r.s0.is_finite() && r.baseline.is_finite()) {
            return bad("rabi_sim", "t_d and n must be positive, s0 and baseline finite".into());
        }
        if !(r.noise_sigma >= 0.0 && r.noise_sigma.is_finite()) {
            return bad("rabi_sim.noise_sigma", "must be nonnegative".into());
        }
        if !(self.rabi_fit.fix_n >= 0.0 && self.rabi_fit.fix_n.is_finite()) {
            return bad("rabi_fit.fix_n", "must be nonnegative".into());
        }
        Ok(())
    }
}

fn check_keys(table: &toml::Table) -> Result<(), CliError> {
    for (section, value) in table {
        let Some(inner) = value.as_table() else {
            return Err(CliError::Config(format!("unknown top-level key `{section}`")));
        };
        for key in inner.keys() {
            let full = format!("{section}.{key}");
            if !KEYS.iter().any(|k| k.0 == full) {
                return Err(CliError::Config(format!("unknown key `{full}`")));
            }
        }
    }
    Ok(())
}

/// `section.key=value`; the value is read as a TOML literal, falling back to a
/// plain string.
fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), CliError> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override {item:?} is not of the form section.key=value")))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| CliError::Config(format!("override key {path:?} must be section.key")))?;
    let value = parse_value(raw.trim());
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    match entry {
        toml::Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => Err(CliError::Config(format!("{section} is not a section"))),
    }
}

fn parse_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
