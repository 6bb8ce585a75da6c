//! Browser bindings: three JSON-returning calls driven by `www/app.js`.

use p1spin::deer::{broaden, stick_spectrum_for};
use p1spin::labeling::{label_sweep, linspace};
use p1spin::transitions::parse_transition;
use p1spin::{alpha_sweep, Label, Lineshape, OrientationClass, P1Parameters, RfDrive, SpectrumConfig};
use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

fn orientations(which: &str) -> Result<Vec<OrientationClass>, String> {
    match which {
        "on-axis" => Ok(vec![OrientationClass::on_axis()]),
        "off-axis" => Ok(vec![OrientationClass::off_axis()]),
        "both" => Ok(OrientationClass::both().to_vec()),
        other => Err(format!("unknown orientation {other:?}")),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Series {
    name: String,
    y: Vec<f64>,
}

#[derive(Serialize)]
struct Plot {
    x: Vec<f64>,
    series: Vec<Series>,
}

/// Energy levels (MHz) from 0 to `b_max` gauss, one series per orientation and label.
#[wasm_bindgen]
pub fn levels(b_max: f64, points: usize, orientation: &str) -> Result<String, String> {
    if !(b_max > 0.0) || points < 2 {
        return Err("need b_max > 0 and at least 2 points".into());
    }
    let p = P1Parameters::default();
    let x = linspace(0.0, b_max, points);
    let mut series = Vec::new();
    for o in orientations(orientation)? {
        let systems = label_sweep(&p, &x, &o).map_err(|e| e.to_string())?;
        for l in Label::ALL {
            series.push(Series {
                name: format!("{l} {}", o.kind),
                y: systems.iter().map(|s| s.energy(l)).collect(),
            });
        }
    }
    to_json(&Plot { x, series })
}

/// alpha_raw of `transition` over [b_min, b_max] gauss for the chosen orientation(s).
#[wasm_bindgen]
pub fn alpha(transition: &str, orientation: &str, b_min: f64, b_max: f64, points: usize) -> Result<String, String> {
    let t = parse_transition(transition).ok_or_else(|| format!("bad transition {transition:?}"))?;
    let p = P1Parameters::default();
    let mut x = Vec::new();
    let mut series = Vec::new();
    for o in orientations(orientation)? {
        let c = alpha_sweep(&p, b_min, b_max, points, &o, &RfDrive::default(), t).map_err(|e| e.to_string())?;
        x = c.samples.iter().map(|s| s.field).collect();
        series.push(Series {
            name: format!("{transition} {}", o.kind),
            y: c.samples.iter().map(|s| s.alpha_raw).collect(),
        });
    }
    to_json(&Plot { x, series })
}

#[derive(Serialize)]
struct Stick {
    frequency: f64,
    amplitude: f64,
    transition: String,
    class: String,
    orientation: String,
}

#[derive(Serialize)]
struct Deer {
    sticks: Vec<Stick>,
    x: Vec<f64>,
    y: Vec<f64>,
}

/// DEER sticks and a Lorentzian-broadened trace over 0–400 MHz.
#[wasm_bindgen]
pub fn deer(field: f64, linewidth: f64) -> Result<String, String> {
    let p = P1Parameters::default();
    let sticks =
        stick_spectrum_for(&p, field, &RfDrive::default(), &OrientationClass::both()).map_err(|e| e.to_string())?;
    let cfg = SpectrumConfig {
        samples: 2001,
        linewidth,
        lineshape: Lineshape::Lorentzian,
        ..SpectrumConfig::default()
    };
    let s = broaden(&sticks, &cfg).map_err(|e| e.to_string())?;
    to_json(&Deer {
        sticks: s
            .sticks
            .iter()
            .map(|l| Stick {
                frequency: l.frequency,
                amplitude: l.amplitude,
                transition: format!("{}{}", l.from, l.to),
                class: l.class.to_string(),
                orientation: l.orientation.kind.to_string(),
            })
            .collect(),
        x: s.curve.iter().map(|c| c.0).collect(),
        y: s.curve.iter().map(|c| c.1).collect(),
    })
}
