use std::f64::consts::FRAC_1_SQRT_2;

use p1spin::augmentation::{alpha_curve, rephase, DriveCoupling};
use p1spin::{
    alpha_sweep, augmentation_factor, label_states, Label, OrientationClass, P1Parameters, RfDrive, TransitionClass,
};
use proptest::prelude::*;

const AB: (Label, Label) = (Label::A, Label::B);
const DE: (Label, Label) = (Label::D, Label::E);

/// alpha_raw from the reference diagonalizer at 20, 35, 50, 75, 100 G.
const MEASURED_FIELDS: [f64; 5] = [20.0, 35.0, 50.0, 75.0, 100.0];
const DE_OFF: [f64; 5] = [2434.336152607946, 2134.982120983539, 1781.557667425451, 1317.497983545270, 1015.585038998691];
const DE_ON: [f64; 5] = [3289.501431751652, 2683.115178345040, 2122.021522824292, 1470.777323670847, 1090.976499127145];
const AB_ON: [f64; 5] = [1720.818057316936, 1399.603534749066, 1167.554072457637, 905.745136845836, 735.735140129664];

#[test]
fn golden_ab_on_axis_35_gauss() {
    let r = augmentation_factor(&P1Parameters::default(), 35.0, &OrientationClass::on_axis(), &RfDrive::default(), Label::A, Label::B)
        .unwrap();
    assert!((r.alpha_raw - 1399.603534749066).abs() < 1e-8 * 1399.6);
    assert!((r.alpha_norm.unwrap() - r.alpha_raw / FRAC_1_SQRT_2).abs() < 1e-9 * r.alpha_raw);
}

#[test]
fn relative_curves_decrease_from_20_gauss() {
    let p = P1Parameters::default();
    let cases = [
        (OrientationClass::off_axis(), DE, DE_OFF),
        (OrientationClass::on_axis(), DE, DE_ON),
        (OrientationClass::on_axis(), AB, AB_ON),
    ];
    for (o, t, golden) in cases {
        let dense = alpha_sweep(&p, 20.0, 100.0, 161, &o, &RfDrive::default(), t).unwrap();
        assert!(dense.samples.windows(2).all(|w| w[1].alpha_raw < w[0].alpha_raw));
        assert_eq!(dense.samples[0].relative, 1.0);

        let at = alpha_curve(&p, &MEASURED_FIELDS, &o, &RfDrive::default(), t).unwrap();
        for (s, g) in at.samples.iter().zip(golden) {
            assert!((s.alpha_raw - g).abs() < 1e-8 * g, "{} {}{} {} G", o.kind, t.0, t.1, s.field);
            assert!((s.relative - g / golden[0]).abs() < 1e-8);
        }
        assert!(at.samples[4].relative < 0.5);
    }
}

#[test]
fn de_off_axis_stronger_at_20_than_100() {
    let p = P1Parameters::default();
    let o = OrientationClass::off_axis();
    let a20 = augmentation_factor(&p, 20.0, &o, &RfDrive::default(), Label::D, Label::E).unwrap();
    let a100 = augmentation_factor(&p, 100.0, &o, &RfDrive::default(), Label::D, Label::E).unwrap();
    assert!(a20.alpha_raw > a100.alpha_raw);
}

#[test]
fn single_point_curve() {
    let c = alpha_sweep(&P1Parameters::default(), 42.0, 42.0, 1, &OrientationClass::on_axis(), &RfDrive::default(), DE).unwrap();
    assert_eq!(c.samples.len(), 1);
    assert_eq!(c.samples[0].relative, 1.0);
}

#[test]
fn low_field_enhancement_over_asymptote() {
    let p = P1Parameters::default();
    for o in OrientationClass::both() {
        for t in [AB, DE] {
            let high = augmentation_factor(&p, 1e5, &o, &RfDrive::default(), t.0, t.1).unwrap().alpha_raw;
            let low = alpha_sweep(&p, 5.0, 50.0, 46, &o, &RfDrive::default(), t).unwrap();
            let peak = low.samples.iter().map(|s| s.alpha_raw).fold(0.0, f64::max);
            assert!(peak > 10.0 * high, "{} {}{}: {peak} vs {high}", o.kind, t.0, t.1);
        }
    }
}

/// On-axis the high-field eigenstates are product states along the drive's
/// quantization axis, so both asymptotes are reached.
#[test]
fn on_axis_high_field_asymptotes() {
    let p = P1Parameters::default();
    let o = OrientationClass::on_axis();
    let sys = label_states(&p, 1e5, &o).unwrap();
    let c = DriveCoupling::new(&p, &RfDrive::default()).unwrap();
    for t in p1spin::transition_table(&sys) {
        let r = c.evaluate(&sys, t.from, t.to).unwrap();
        if t.class == TransitionClass::ElectronSQ {
            assert!((r.coupling / p.gamma_e.abs() - 0.5).abs() < 1e-3, "{}", t.name());
        }
    }
    let ab = c.evaluate(&sys, Label::A, Label::B).unwrap();
    // alpha_norm is still far from 1 here: A⊥/(2 γ_N B) ≈ 1.3 at 10⁵ G
    assert!(ab.alpha_norm.unwrap() < 0.5);
}

#[test]
fn drive_amplitude_cancels() {
    let p = P1Parameters::default();
    let o = OrientationClass::off_axis();
    let sys = label_states(&p, 35.0, &o).unwrap();
    let one = DriveCoupling::new(&p, &RfDrive::x(1.0)).unwrap();
    let two = DriveCoupling::new(&p, &RfDrive::x(2.0)).unwrap();
    for t in p1spin::transition_table(&sys) {
        let (a, b) = (
            one.evaluate(&sys, t.from, t.to).unwrap().alpha_raw,
            two.evaluate(&sys, t.from, t.to).unwrap().alpha_raw,
        );
        assert!((a - b).abs() <= 1e-12 * a.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn symmetric_in_labels(b in 0.0f64..200.0, off in any::<bool>()) {
        let p = P1Parameters::default();
        let o = if off { OrientationClass::off_axis() } else { OrientationClass::on_axis() };
        let sys = label_states(&p, b, &o).unwrap();
        let c = DriveCoupling::new(&p, &RfDrive::default()).unwrap();
        for i in Label::ALL {
            for j in Label::ALL {
                if i != j {
                    let (x, y) = (c.evaluate(&sys, i, j).unwrap().alpha_raw, c.evaluate(&sys, j, i).unwrap().alpha_raw);
                    prop_assert!((x - y).abs() <= 1e-12 * x.max(1e-300));
                }
            }
        }
    }

    #[test]
    fn phase_convention_independent(b in 0.0f64..200.0, phases in prop::array::uniform6(0.0f64..6.3)) {
        let p = P1Parameters::default();
        let sys = label_states(&p, b, &OrientationClass::off_axis()).unwrap();
        let turned = rephase(&sys, &phases);
        let c = DriveCoupling::new(&p, &RfDrive::default()).unwrap();
        for t in p1spin::transition_table(&sys) {
            let x = c.evaluate(&sys, t.from, t.to).unwrap().alpha_raw;
            let y = c.evaluate(&turned, t.from, t.to).unwrap().alpha_raw;
            prop_assert!((x - y).abs() <= 1e-10 * x.max(1.0));
        }
    }
}
