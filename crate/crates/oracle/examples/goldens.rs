//! Prints reference values that are frozen into the test suites.
use p1spin_oracle::*;

const OFF_THETA: f64 = 109.471_220_634_490_69;

fn main() {
    let c = Constants::P1;
    let drive = drive_mhz_per_gauss(&c, [1.0, 0.0, 0.0]);
    let names = ["a", "b", "c", "d", "e", "f"];
    for (tag, theta, phi, deg) in [("on", 0.0, 0.0, 1.0), ("off", OFF_THETA, 90.0, 3.0)] {
        for b in [10.0, 20.0, 35.0, 50.0, 75.0, 100.0] {
            let p = continuation_labeled(&c, b, theta, phi);
            if theta == 0.0 {
                let direct = eigenpairs(&hamiltonian_mhz(&c, b, theta, phi));
                let lab = on_axis_labels(&direct);
                for k in 0..6 {
                    assert!((direct[lab[k]].0 - p[k].0).abs() < 1e-9);
                }
            }
            let el = |i: usize, j: usize| sandwich(&p[i].1, &drive, &p[j].1).norm();
            println!(
                "{tag} {b:>5} E=[{}]",
                p.iter().map(|x| format!("{:.10}", x.0)).collect::<Vec<_>>().join(", ")
            );
            println!(
                "    alpha ab={:.12} bc={:.12} de={:.12} ef={:.12}",
                el(0, 1) / c.gamma_n,
                el(1, 2) / c.gamma_n,
                el(3, 4) / c.gamma_n,
                el(4, 5) / c.gamma_n
            );
            let mut lines = Vec::new();
            for i in 0..6 {
                for j in i + 1..6 {
                    lines.push((names[i].to_string() + names[j], deg * el(i, j), (p[i].0 - p[j].0).abs()));
                }
            }
            println!(
                "    lines {}",
                lines.iter().map(|l| format!("{}:{:.9}@{:.9}", l.0, l.1, l.2)).collect::<Vec<_>>().join(" ")
            );
        }
    }
}
