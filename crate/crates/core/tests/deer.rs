use p1spin::deer::{max_amplitude, stick_spectrum_for};
use p1spin::{
    broaden, label_states, stick_spectrum, transition_table, OrientationClass, P1Parameters, RfDrive, SpectrumConfig,
    TransitionClass,
};
use proptest::prelude::*;

fn ratio(field: f64) -> f64 {
    let lines = stick_spectrum(&P1Parameters::default(), field, &RfDrive::default()).unwrap();
    max_amplitude(&lines, TransitionClass::NuclearSQ) / max_amplitude(&lines, TransitionClass::ElectronSQ)
}

#[test]
fn six_strongest_lines_are_electronic_at_100_gauss() {
    let mut lines = stick_spectrum(&P1Parameters::default(), 100.0, &RfDrive::default()).unwrap();
    assert_eq!(lines.len(), 30);
    lines.sort_by(|a, b| b.amplitude.total_cmp(&a.amplitude));
    assert!(lines[..6].iter().all(|l| l.class == TransitionClass::ElectronSQ));
    assert_eq!(lines[0].amplitude, 1.0);
}

#[test]
fn nuclear_to_electron_ratio() {
    // frozen from the reference diagonalizer
    let golden = [(35.0, 0.49395), (50.0, 0.40566), (75.0, 0.29588), (100.0, 0.22649)];
    let mut last = f64::INFINITY;
    for (b, want) in golden {
        let r = ratio(b);
        assert!((r - want).abs() < 1e-4, "{b} G: {r}");
        assert!(r < last);
        last = r;
    }
    assert!(ratio(35.0) >= 0.3);
}

#[test]
fn sticks_follow_transition_table() {
    let p = P1Parameters::default();
    for o in OrientationClass::both() {
        let lines = stick_spectrum_for(&p, 57.0, &RfDrive::default(), &[o]).unwrap();
        let table = transition_table(&label_states(&p, 57.0, &o).unwrap());
        for (l, t) in lines.iter().zip(&table) {
            assert_eq!(l.frequency, t.frequency);
            assert_eq!((l.from, l.to, l.class), (t.from, t.to, t.class));
        }
    }
}

#[test]
fn degeneracy_weighting() {
    let p = P1Parameters::default();
    let on = OrientationClass::on_axis();
    // the same class twice with different weights isolates the weight factor
    let heavy = OrientationClass { degeneracy: 3, ..on };
    let lines = stick_spectrum_for(&p, 35.0, &RfDrive::default(), &[on, heavy]).unwrap();
    for (a, b) in lines[..15].iter().zip(&lines[15..]) {
        assert!((b.amplitude - 3.0 * a.amplitude).abs() < 1e-12);
    }
}

#[test]
fn amplitudes_independent_of_drive_strength() {
    let p = P1Parameters::default();
    let a = stick_spectrum(&p, 35.0, &RfDrive::x(0.1)).unwrap();
    let b = stick_spectrum(&p, 35.0, &RfDrive::x(7.0)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.amplitude - y.amplitude).abs() < 1e-12);
    }
}

#[test]
fn broadened_curve_shape() {
    let lines = stick_spectrum(&P1Parameters::default(), 35.0, &RfDrive::default()).unwrap();
    let s = broaden(&lines, &SpectrumConfig::default()).unwrap();
    assert_eq!(s.curve.len(), 4001);
    assert!(s.curve.iter().all(|&(_, v)| v >= 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn broadening_ignores_order(seed in any::<u64>()) {
        let mut lines = stick_spectrum(&P1Parameters::default(), 35.0, &RfDrive::default()).unwrap();
        let cfg = SpectrumConfig { samples: 801, ..SpectrumConfig::default() };
        let a = broaden(&lines, &cfg).unwrap();
        // deterministic shuffle from the seed
        let mut s = seed | 1;
        for i in (1..lines.len()).rev() {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            lines.swap(i, (s % (i as u64 + 1)) as usize);
        }
        let b = broaden(&lines, &cfg).unwrap();
        for (x, y) in a.curve.iter().zip(&b.curve) {
            prop_assert!((x.1 - y.1).abs() <= 1e-12 * x.1.max(1.0));
        }
    }
}
