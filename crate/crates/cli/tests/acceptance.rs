//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use p1spin::augmentation::{alpha_curve, DriveCoupling};
use p1spin::deer::{max_amplitude, stick_spectrum};
use p1spin::rabi::{
    calibrate_b_rf, fit_damped_sinusoid, simulate_trace, uniform_times, DampedSinusoidParams,
};
use p1spin::{
    alpha_sweep, augmentation_factor, build_hamiltonian, label_states, transition_table, FieldConfig, Label,
    OrientationClass, P1Parameters, RfDrive, TransitionClass,
};
use p1spin_cli::commands::{cmd_rabi_sim, fit_table, parse_trace};
use p1spin_cli::{Format, RunConfig};
use p1spin_oracle::{drive_mhz_per_gauss, eigenpairs, hamiltonian_mhz, sandwich, Constants, Vec6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
const DE: (Label, Label) = (Label::D, Label::E);
const AB: (Label, Label) = (Label::A, Label::B);
const MEASURED_FIELDS: [f64; 5] = [20.0, 35.0, 50.0, 75.0, 100.0];

// frozen from the reference diagonalizer's continuation at MEASURED_FIELDS
const DE_OFF: [f64; 5] = [2434.336152607946, 2134.982120983539, 1781.557667425451, 1317.497983545270, 1015.585038998691];
const DE_ON: [f64; 5] = [3289.501431751652, 2683.115178345040, 2122.021522824292, 1470.777323670847, 1090.976499127145];
const AB_ON: [f64; 5] = [1720.818057316936, 1399.603534749066, 1167.554072457637, 905.745136845836, 735.735140129664];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn constants() -> Outcome {
    let p = P1Parameters::default();
    let ok = p.gamma_e == -2.8 && p.gamma_n == 307.7e-6 && p.a_par == 114.0 && p.a_perp == 81.34 && p.q == -4.2;
    outcome(ok, format!("{p:?}"))
}

fn analytic_eigenvalue() -> Outcome {
    let sys = label_states(&P1Parameters::default(), 100.0, &OrientationClass::on_axis()).unwrap();
    let e = sys.energy(Label::A);
    outcome((e - 192.76923).abs() <= 1e-6, format!("E_a = {e:.9} MHz"))
}

fn trace_identity() -> Outcome {
    let p = P1Parameters::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let worst = (0..100)
        .map(|_| {
            let f = FieldConfig::new(rng.random_range(0.0..2000.0), rng.random_range(0.0..180.0), rng.random_range(0.0..360.0))
                .unwrap();
            (build_hamiltonian(&p, &f).trace().re / TWO_PI + 16.8).abs()
        })
        .fold(0.0, f64::max);
    outcome(worst <= 1e-9, format!("max |trace/2π + 16.8| = {worst:.2e} MHz"))
}

/// Nuclear alpha_norm → 1 and electron element / |γ_e| → 1/2 at 10⁵ G.
fn high_field_asymptotes() -> Outcome {
    let p = P1Parameters::default();
    let c = DriveCoupling::new(&p, &RfDrive::default()).unwrap();
    let (mut nuc, mut ele) = (Vec::new(), Vec::new());
    for o in OrientationClass::both() {
        let sys = label_states(&p, 1e5, &o).unwrap();
        for t in transition_table(&sys) {
            let r = c.evaluate(&sys, t.from, t.to).unwrap();
            match t.class {
                TransitionClass::NuclearSQ => nuc.push((format!("{} {}", t.name(), o.kind), r.alpha_norm.unwrap_or(f64::NAN))),
                TransitionClass::ElectronSQ => ele.push((format!("{} {}", t.name(), o.kind), r.coupling / p.gamma_e.abs())),
                TransitionClass::DoubleQuantum => {}
            }
        }
    }
    let nuc_ok = nuc.iter().all(|(_, v)| (v - 1.0).abs() <= 1e-3);
    let ele_ok = ele.iter().all(|(_, v)| (v - 0.5).abs() <= 1e-3);
    let fmt = |xs: &[(String, f64)]| xs.iter().map(|(n, v)| format!("{n}={v:.4}")).collect::<Vec<_>>().join(" ");
    outcome(
        nuc_ok && ele_ok && nuc.len() == 8 && ele.len() == 6,
        format!("alpha_norm [{}]; electron [{}]", fmt(&nuc), fmt(&ele)),
    )
}

fn oracle_equivalence() -> Outcome {
    let params = P1Parameters::default();
    let c = Constants::P1;
    let coupling = DriveCoupling::new(&params, &RfDrive::default()).unwrap();
    let drive = drive_mhz_per_gauss(&c, [1.0, 0.0, 0.0]);
    let mut worst: f64 = 0.0;
    for o in OrientationClass::both() {
        for b in [10.0, 20.0, 35.0, 50.0, 75.0, 100.0] {
            let sys = label_states(&params, b, &o).unwrap();
            let reference = eigenpairs(&hamiltonian_mhz(&c, b, o.theta, o.phi));
            let matched: Vec<&(f64, Vec6)> = Label::ALL
                .iter()
                .map(|&l| {
                    let v = sys.state(l);
                    let best = reference
                        .iter()
                        .max_by(|x, y| overlap(&x.1, &v).total_cmp(&overlap(&y.1, &v)))
                        .unwrap();
                    worst = worst.max(1.0 - overlap(&best.1, &v));
                    worst = worst.max((sys.energy(l) - best.0).abs() / best.0.abs().max(1.0));
                    best
                })
                .collect();
            for i in 0..6 {
                for j in i + 1..6 {
                    let ours = coupling.evaluate(&sys, Label::ALL[i], Label::ALL[j]).unwrap().alpha_raw;
                    let theirs = sandwich(&matched[i].1, &drive, &matched[j].1).norm() / c.gamma_n;
                    worst = worst.max((ours - theirs).abs() / theirs.max(1.0));
                }
            }
        }
    }
    outcome(worst <= 1e-8, format!("largest relative deviation {worst:.2e} over 12 field points"))
}

fn overlap(a: &Vec6, b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

fn alpha_trend() -> Outcome {
    let p = P1Parameters::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (o, t, golden) in [
        (OrientationClass::off_axis(), DE, DE_OFF),
        (OrientationClass::on_axis(), DE, DE_ON),
        (OrientationClass::on_axis(), AB, AB_ON),
    ] {
        let dense = alpha_sweep(&p, 20.0, 100.0, 161, &o, &RfDrive::default(), t).unwrap();
        ok &= dense.samples.windows(2).all(|w| w[1].alpha_raw < w[0].alpha_raw);
        let at = alpha_curve(&p, &MEASURED_FIELDS, &o, &RfDrive::default(), t).unwrap();
        ok &= at.samples.iter().zip(golden).all(|(s, g)| rel(s.alpha_raw, g) <= 1e-8);
        let last = at.samples[4].relative;
        ok &= last < 0.5;
        notes.push(format!("{}{} {} -> {last:.4}", t.0, t.1, o.kind));
    }
    outcome(ok, format!("relative value at 100 G: {}", notes.join(", ")))
}

fn deer_structure() -> Outcome {
    let p = P1Parameters::default();
    let drive = RfDrive::default();
    let mut lines = stick_spectrum(&p, 100.0, &drive).unwrap();
    lines.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    let top_six = lines[..6].iter().all(|l| l.class == TransitionClass::ElectronSQ);
    let ratios: Vec<f64> = [35.0, 50.0, 75.0, 100.0]
        .iter()
        .map(|&b| {
            let l = stick_spectrum(&p, b, &drive).unwrap();
            max_amplitude(&l, TransitionClass::NuclearSQ) / max_amplitude(&l, TransitionClass::ElectronSQ)
        })
        .collect();
    let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
    outcome(
        top_six && ratios[0] >= 0.3 && decreasing,
        format!("top six electron: {top_six}; nuclear/electron at 35/50/75/100 G = {ratios:.4?}"),
    )
}

/// Full CLI path: alpha → calibrated rabi-sim → CSV → rabi-fit.
fn rabi_anchor() -> Outcome {
    let mut cfg = RunConfig::default();
    let p = cfg.params();
    let a20 = augmentation_factor(&p, 20.0, &OrientationClass::off_axis(), &RfDrive::default(), DE.0, DE.1)
        .unwrap()
        .alpha_raw;
    cfg.drive.b_rf = calibrate_b_rf(a20, p.gamma_n, 1.82).unwrap();
    cfg.rabi_sim.field = 20.0;
    cfg.rabi_sim.noise_sigma = 0.0;
    let sim = cmd_rabi_sim(&cfg).unwrap();
    let mut buf = Vec::new();
    sim.write(Format::Csv, &mut buf).unwrap();
    let trace = parse_trace(std::str::from_utf8(&buf).unwrap()).unwrap();
    let fit = fit_table(&cfg, &trace, "rabi-fit").unwrap();
    let f = fit.rows[0][fit.column("rabi_MHz").unwrap()].as_f64().unwrap();
    outcome((f - 1.82).abs() <= 1e-4, format!("fitted Ω/2π = {f:.7} MHz at B_rf = {:.4} G", cfg.drive.b_rf))
}

fn fit_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let times = uniform_times(10.0, 200);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let truth = DampedSinusoidParams {
            s0: rng.random_range(0.005..0.05),
            t_d: rng.random_range(2.0..15.0),
            n: rng.random_range(0.7..2.5),
            omega: TWO_PI * rng.random_range(0.4..2.0),
            baseline: rng.random_range(0.9..1.0),
        };
        let fit = fit_damped_sinusoid(&simulate_trace(&truth, &times, 0.0, 0).unwrap(), None).unwrap().params;
        for (got, want) in [
            (fit.s0, truth.s0),
            (fit.t_d, truth.t_d),
            (fit.n, truth.n),
            (fit.omega, truth.omega),
            (fit.baseline, truth.baseline),
        ] {
            worst = worst.max(rel(got, want));
        }
    }
    let truth = DampedSinusoidParams {
        s0: 0.01,
        t_d: 5.0,
        n: 1.5,
        omega: TWO_PI,
        baseline: 0.99,
    };
    let inside = (0..100u64)
        .filter(|&seed| {
            let trace = simulate_trace(&truth, &times, 0.1 * truth.s0, seed).unwrap();
            let fit = fit_damped_sinusoid(&trace, None).unwrap();
            (fit.params.omega - truth.omega).abs() <= 3.0 * fit.std_errors.omega
        })
        .count();
    outcome(
        worst <= 1e-5 && inside >= 95,
        format!("noiseless worst relative error {worst:.2e}; noisy Ω within 3σ in {inside}/100"),
    )
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let exe = env!("CARGO_BIN_EXE_p1spin");
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[rabi_sim]\nnoise_sigma = 0.002\nseed = 42\n\n[sweep]\npoints = 21\n").unwrap();
    let run = |cmd: &str, out: &Path| {
        let status = Command::new(exe)
            .arg(cmd)
            .arg("--config")
            .arg(&config)
            .arg("--output")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out).unwrap()
    };
    let mut same = true;
    for cmd in ["rabi-sim", "levels", "alpha", "deer"] {
        let a = run(cmd, &dir.path().join(format!("{cmd}-1.csv")));
        let b = run(cmd, &dir.path().join(format!("{cmd}-2.csv")));
        same &= a == b && !a.is_empty();
    }
    outcome(same, "rabi-sim, levels, alpha and deer outputs byte-identical across two runs")
}

type Criterion = (u32, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, constants, Duration::from_millis(100)),
        (2, analytic_eigenvalue, Duration::from_secs(1)),
        (3, trace_identity, Duration::from_secs(1)),
        (4, high_field_asymptotes, Duration::from_secs(1)),
        (5, oracle_equivalence, Duration::from_secs(10)),
        (6, alpha_trend, Duration::from_secs(5)),
        (7, deer_structure, Duration::from_secs(5)),
        (8, rabi_anchor, Duration::from_secs(5)),
        (9, fit_suite, Duration::from_secs(60)),
        (10, determinism, Duration::from_secs(5)),
    ];
    let mut failed = 0;
    for (n, check, budget) in criteria {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= budget;
        if !pass {
            failed += 1;
        }
        let verdict = if pass { "PASS" } else { "FAIL" };
        let time = format!("{:.3} s of {} s", took.as_secs_f64(), budget.as_secs_f64());
        println!("criterion {n}: {verdict} ({}; {time})", o.detail);
    }
    println!("acceptance: {} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
