//! One function per subcommand; each is a pure function of config and inputs.

use std::path::Path;

use p1spin::deer::{broaden, stick_spectrum_for};
use p1spin::labeling::{label_sweep, linspace};
use p1spin::rabi::{
    fit_damped_sinusoid, rabi_frequency, simulate_trace, uniform_times, DampedSinusoidParams, RabiTrace,
};
use p1spin::{alpha_sweep, augmentation_factor, Label, OrientationKind};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, OutputTable};

const TOOL: &str = "p1spin";

fn table(cfg: &RunConfig, command: &str, columns: &[&str]) -> OutputTable {
    OutputTable::new(format!("{TOOL} {command}"), cfg.to_toml(), columns)
}

fn field_grid(cfg: &RunConfig) -> Vec<f64> {
    linspace(cfg.sweep.b_min, cfg.sweep.b_max, cfg.sweep.points)
}

fn transition_name((a, b): (Label, Label)) -> String {
    format!("{a}{b}")
}

/// Energies of all six labeled states at every grid field.
pub fn cmd_levels(cfg: &RunConfig) -> Result<OutputTable, CliError> {
    let params = cfg.params();
    let fields = field_grid(cfg);
    let mut rows: Vec<(f64, OrientationKind, Label, Vec<Cell>)> = Vec::new();
    for o in cfg.orientations() {
        for sys in label_sweep(&params, &fields, &o).map_err(CliError::from_model)? {
            for label in Label::ALL {
                let id = sys.asymptotic_id(label);
                let b = sys.field.magnitude;
                rows.push((
                    b,
                    o.kind,
                    label,
                    vec![
                        Cell::num(b),
                        Cell::text(o.kind),
                        Cell::text(label),
                        Cell::num(sys.energy(label)),
                        Cell::num(id.ms()),
                        Cell::num(id.mi as f64),
                    ],
                ));
            }
        }
    }
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut t = table(
        cfg,
        "levels",
        &["field_G", "orientation", "label", "energy_MHz", "asymptotic_mS", "asymptotic_mI"],
    );
    rows.into_iter().for_each(|r| t.push(r.3));
    Ok(t)
}

/// Augmentation factor of the configured transition over the field grid.
pub fn cmd_alpha(cfg: &RunConfig) -> Result<OutputTable, CliError> {
    let params = cfg.params();
    let drive = cfg.drive()?;
    let transition = cfg.alpha_transition();
    let s = &cfg.sweep;
    let mut rows: Vec<(f64, OrientationKind, Vec<Cell>)> = Vec::new();
    for o in cfg.orientations() {
        let curve = alpha_sweep(&params, s.b_min, s.b_max, s.points, &o, &drive, transition)
            .map_err(CliError::from_model)?;
        for p in curve.samples {
            rows.push((
                p.field,
                o.kind,
                vec![
                    Cell::num(p.field),
                    Cell::text(o.kind),
                    Cell::text(transition_name(transition)),
                    Cell::num(p.alpha_raw),
                    p.alpha_norm.map_or(Cell::Empty, Cell::num),
                    Cell::num(p.relative),
                ],
            ));
        }
    }
    rows.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut t = table(
        cfg,
        "alpha",
        &["field_G", "orientation", "transition", "alpha_raw", "alpha_norm", "relative"],
    );
    rows.into_iter().for_each(|r| t.push(r.2));
    Ok(t)
}

/// Stick lines (sorted by orientation, then transition) followed by the
/// broadened curve.
pub fn cmd_deer(cfg: &RunConfig) -> Result<OutputTable, CliError> {
    let params = cfg.params();
    let drive = cfg.drive()?;
    let sticks = stick_spectrum_for(&params, cfg.deer.field, &drive, &cfg.orientations()).map_err(CliError::from_model)?;
    let spectrum = broaden(&sticks, &cfg.spectrum()).map_err(CliError::from_model)?;
    let mut kept = spectrum.sticks.clone();
    kept.sort_by(|x, y| {
        x.orientation
            .kind
            .cmp(&y.orientation.kind)
            .then((x.from, x.to).cmp(&(y.from, y.to)))
    });
    let mut t = table(
        cfg,
        "deer",
        &["kind", "orientation", "transition", "class", "frequency_MHz", "amplitude"],
    );
    for l in kept {
        t.push(vec![
            Cell::text("stick"),
            Cell::text(l.orientation.kind),
            Cell::text(transition_name((l.from, l.to))),
            Cell::text(l.class),
            Cell::num(l.frequency),
            Cell::num(l.amplitude),
        ]);
    }
    for (f, v) in spectrum.curve {
        t.push(vec![Cell::text("curve"), Cell::Empty, Cell::Empty, Cell::Empty, Cell::num(f), Cell::num(v)]);
    }
    Ok(t)
}

/// Rabi frequency (MHz) used by `rabi-sim`.
pub fn sim_rabi_frequency(cfg: &RunConfig) -> Result<f64, CliError> {
    let r = &cfg.rabi_sim;
    if r.rabi_mhz > 0.0 {
        return Ok(r.rabi_mhz);
    }
    let params = cfg.params();
    let drive = cfg.drive()?;
    let (from, to) = cfg.rabi_transition();
    let res = augmentation_factor(&params, r.field, &cfg.orientation(r.orientation), &drive, from, to)
        .map_err(CliError::from_model)?;
    Ok(rabi_frequency(res.alpha_raw, params.gamma_n, drive.amplitude))
}

/// Synthetic damped Rabi trace.
pub fn cmd_rabi_sim(cfg: &RunConfig) -> Result<OutputTable, CliError> {
    let r = &cfg.rabi_sim;
    let f = sim_rabi_frequency(cfg)?;
    let model = DampedSinusoidParams {
        s0: r.s0,
        t_d: r.t_d,
        n: r.n,
        omega: p1spin::model::TWO_PI * f,
        baseline: r.baseline,
    };
    let trace = simulate_trace(&model, &uniform_times(r.t_max, r.samples), r.noise_sigma, r.seed)
        .map_err(CliError::from_model)?;
    let mut t = table(cfg, "rabi-sim", &["time_us", "signal"]);
    for (time, s) in trace.times.iter().zip(&trace.signal) {
        t.push(vec![Cell::num(*time), Cell::num(*s)]);
    }
    Ok(t)
}

/// Reads a `time_us,signal` CSV; `#` lines are skipped.
pub fn read_trace(path: &Path) -> Result<RabiTrace, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_trace(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_trace(text: &str) -> Result<RabiTrace, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::Input(e.to_string()))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols != ["time_us", "signal"] {
        return Err(CliError::Input(format!("expected header `time_us,signal`, found `{}`", cols.join(","))));
    }
    let (mut times, mut signal) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Input(format!("data row {}: {e}", i + 1)))?;
        let line = rec.position().map_or(0, |p| p.line());
        for (col, name) in cols.iter().enumerate() {
            let cell = rec.get(col).unwrap_or("");
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Input(format!("line {line}, column {} ({name}): `{cell}` is not a number", col + 1))
            })?;
            if !v.is_finite() {
                return Err(CliError::Input(format!("line {line}, column {} ({name}): value must be finite", col + 1)));
            }
            if col == 0 { times.push(v) } else { signal.push(v) }
        }
    }
    RabiTrace::new(times, signal).map_err(CliError::from_data)
}

/// Damped-sinusoid fit of a trace file.
pub fn cmd_rabi_fit(cfg: &RunConfig, trace_path: &Path) -> Result<OutputTable, CliError> {
    let trace = read_trace(trace_path)?;
    fit_table(cfg, &trace, &format!("rabi-fit {}", trace_path.display()))
}

pub fn fit_table(cfg: &RunConfig, trace: &RabiTrace, command: &str) -> Result<OutputTable, CliError> {
    let fix_n = (cfg.rabi_fit.fix_n > 0.0).then_some(cfg.rabi_fit.fix_n);
    let fit = fit_damped_sinusoid(trace, fix_n).map_err(CliError::from_data)?;
    let (p, e) = (fit.params, fit.std_errors);
    let hz = 1.0 / p1spin::model::TWO_PI;
    let mut t = table(
        cfg,
        command,
        &[
            "s0", "s0_err", "t_d_us", "t_d_err_us", "n", "n_err", "rabi_MHz", "rabi_err_MHz", "baseline",
            "baseline_err", "residual_rms", "converged", "iterations",
        ],
    );
    t.push(vec![
        Cell::num(p.s0),
        Cell::num(e.s0),
        Cell::num(p.t_d),
        Cell::num(e.t_d),
        Cell::num(p.n),
        Cell::num(e.n),
        Cell::num(p.omega * hz),
        Cell::num(e.omega * hz),
        Cell::num(p.baseline),
        Cell::num(e.baseline),
        Cell::num(fit.residual_rms),
        Cell::text(fit.converged),
        Cell::num(fit.iterations as f64),
    ]);
    Ok(t)
}

