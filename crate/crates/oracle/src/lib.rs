//! Reference diagonalization of the six-level P1 Hamiltonian that shares no
//! code with the main library.
//!
//! The Hamiltonian is written out element by element in the |m_S, m_I⟩
//! product basis (m_S ∈ {+1/2, −1/2} outer, m_I ∈ {+1, 0, −1} inner), in MHz.
//! Eigenvalues are bracketed on the characteristic polynomial (Faddeev–LeVerrier
//! coefficients) and then polished together with their eigenvectors by
//! Rayleigh-quotient inverse iteration on the matrix itself.
//!
//! Only intended for test code: it panics on anything unexpected.

use num_complex::Complex64 as C;

pub type Mat6 = [[C; 6]; 6];
pub type Vec6 = [C; 6];

#[derive(Debug, Clone, Copy)]
pub struct Constants {
    pub gamma_e: f64,
    pub gamma_n: f64,
    pub a_par: f64,
    pub a_perp: f64,
    pub q: f64,
}

impl Constants {
    pub const P1: Constants = Constants {
        gamma_e: -2.8,
        gamma_n: 307.7e-6,
        a_par: 114.0,
        a_perp: 81.34,
        q: -4.2,
    };
}

fn zero() -> Mat6 {
    [[C::new(0.0, 0.0); 6]; 6]
}

fn idx(up: bool, mi: i32) -> usize {
    let s = if up { 0 } else { 3 };
    s + (1 - mi) as usize
}

/// Adds `value` to element (row, col) and its conjugate to (col, row).
fn add_pair(m: &mut Mat6, row: usize, col: usize, value: C) {
    m[row][col] += value;
    m[col][row] += value.conj();
}

/// ⟨↑|V·S|↓⟩ = (Vx − iVy)/2 and ⟨m+1|V·I|m⟩ = (Vx − iVy)/√2 written out directly.
fn vector_coupling(ce: f64, cn: f64, v: [f64; 3]) -> Mat6 {
    let mut m = zero();
    let minus = C::new(v[0], -v[1]);
    for (up, ms) in [(true, 0.5), (false, -0.5)] {
        for mi in [1, 0, -1] {
            let k = idx(up, mi);
            m[k][k] += C::new(ce * v[2] * ms + cn * v[2] * mi as f64, 0.0);
        }
    }
    for mi in [1, 0, -1] {
        add_pair(&mut m, idx(true, mi), idx(false, mi), minus * (ce * 0.5));
    }
    for up in [true, false] {
        for mi in [0, -1] {
            add_pair(
                &mut m,
                idx(up, mi + 1),
                idx(up, mi),
                minus * (cn / 2f64.sqrt()),
            );
        }
    }
    m
}

/// Static Hamiltonian in MHz for a field of `b` gauss at polar angle `theta_deg`
/// and azimuth `phi_deg` in the defect frame.
pub fn hamiltonian_mhz(c: &Constants, b: f64, theta_deg: f64, phi_deg: f64) -> Mat6 {
    let (th, ph) = (theta_deg.to_radians(), phi_deg.to_radians());
    let field = [
        b * th.sin() * ph.cos(),
        b * th.sin() * ph.sin(),
        b * th.cos(),
    ];
    let mut h = vector_coupling(-c.gamma_e, -c.gamma_n, field);
    for (up, ms) in [(true, 0.5), (false, -0.5)] {
        for mi in [1, 0, -1] {
            let k = idx(up, mi);
            let mif = mi as f64;
            h[k][k] += C::new(c.a_par * ms * mif + c.q * mif * mif, 0.0);
        }
    }
    // A⊥/2 (S+I− + S−I+): ⟨↑, m|S+I−|↓, m+1⟩ = √2 for m ∈ {0, −1}
    for mi in [0, -1] {
        add_pair(
            &mut h,
            idx(true, mi),
            idx(false, mi + 1),
            C::new(c.a_perp / 2f64.sqrt(), 0.0),
        );
    }
    h
}

/// rf coupling operator γ_e S·n + γ_N I·n in MHz per gauss.
pub fn drive_mhz_per_gauss(c: &Constants, n: [f64; 3]) -> Mat6 {
    vector_coupling(c.gamma_e, c.gamma_n, n)
}

fn matmul(a: &Mat6, b: &Mat6) -> Mat6 {
    let mut out = zero();
    for i in 0..6 {
        for j in 0..6 {
            for k in 0..6 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Coefficients c_0..c_6 of det(λI − A), c_6 = 1.
pub fn characteristic_polynomial(a: &Mat6) -> [f64; 7] {
    let mut coeffs = [0.0; 7];
    coeffs[6] = 1.0;
    let mut m = zero();
    for k in 1..=6 {
        let mut next = matmul(a, &m);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += C::new(coeffs[7 - k], 0.0);
        }
        m = next;
        let am = matmul(a, &m);
        let tr: C = (0..6).map(|i| am[i][i]).sum();
        coeffs[6 - k] = -tr.re / k as f64;
    }
    coeffs
}

fn horner(coeffs: &[f64; 7], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn solve_shifted(h: &Mat6, shift: f64, rhs: &Vec6) -> Vec6 {
    let mut a = *h;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= C::new(shift, 0.0);
    }
    let mut b = *rhs;
    for col in 0..6 {
        let piv = (col..6)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        if a[col][col].norm() < 1e-300 {
            a[col][col] = C::new(1e-300, 0.0);
        }
        for r in col + 1..6 {
            let f = a[r][col] / a[col][col];
            for k in col..6 {
                let t = a[col][k];
                a[r][k] -= f * t;
            }
            let t = b[col];
            b[r] -= f * t;
        }
    }
    let mut x = [C::new(0.0, 0.0); 6];
    for r in (0..6).rev() {
        let mut s = b[r];
        for k in r + 1..6 {
            s -= a[r][k] * x[k];
        }
        x[r] = s / a[r][r];
    }
    x
}

fn normalize(v: &mut Vec6) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= n;
    }
}

/// ⟨u|M|v⟩.
pub fn sandwich(u: &Vec6, m: &Mat6, v: &Vec6) -> C {
    let mut acc = C::new(0.0, 0.0);
    for i in 0..6 {
        for j in 0..6 {
            acc += u[i].conj() * m[i][j] * v[j];
        }
    }
    acc
}

/// Ascending eigenpairs. Panics unless six distinct roots are bracketed.
pub fn eigenpairs(h: &Mat6) -> Vec<(f64, Vec6)> {
    let coeffs = characteristic_polynomial(h);
    let radius = h
        .iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
        * 1.001
        + 1e-9;
    let steps = 400_000;
    let mut roots = Vec::new();
    let mut x0 = -radius;
    let mut p0 = horner(&coeffs, x0);
    for k in 1..=steps {
        let x1 = -radius + 2.0 * radius * k as f64 / steps as f64;
        let p1 = horner(&coeffs, x1);
        if p0 == 0.0 {
            roots.push(x0);
        } else if p0.signum() != p1.signum() && p1 != 0.0 {
            let (mut lo, mut hi, mut plo) = (x0, x1, p0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let pm = horner(&coeffs, mid);
                if pm.signum() == plo.signum() {
                    lo = mid;
                    plo = pm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        x0 = x1;
        p0 = p1;
    }
    assert_eq!(roots.len(), 6, "oracle needs six separated eigenvalues");

    let mut out: Vec<(f64, Vec6)> = roots
        .into_iter()
        .enumerate()
        .map(|(i, mut lambda)| {
            let mut v = [C::new(0.0, 0.0); 6];
            for (k, z) in v.iter_mut().enumerate() {
                *z = C::new(1.0 + 0.1 * k as f64, 0.05 * (i + k) as f64);
            }
            normalize(&mut v);
            for _ in 0..6 {
                v = solve_shifted(h, lambda + 1e-13 * radius, &v);
                normalize(&mut v);
                lambda = sandwich(&v, h, &v).re;
            }
            (lambda, v)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Eigenpairs indexed by label a..f, found by continuation from 10^4 G (where
/// labels follow descending energy) down to `b` on a fine geometric grid.
pub fn continuation_labeled(c: &Constants, b: f64, theta_deg: f64, phi_deg: f64) -> Vec<(f64, Vec6)> {
    let mut one = zero();
    for (i, row) in one.iter_mut().enumerate() {
        row[i] = C::new(1.0, 0.0);
    }
    let mut field = 10_000.0;
    let mut pairs = eigenpairs(&hamiltonian_mhz(c, field, theta_deg, phi_deg));
    pairs.reverse();
    while field > b {
        field = (field / 1.01).min(field - 0.05).max(b);
        let next = eigenpairs(&hamiltonian_mhz(c, field, theta_deg, phi_deg));
        let mut taken = [false; 6];
        let mut out = Vec::new();
        for (_, old) in &pairs {
            let (k, ov) = (0..6)
                .filter(|k| !taken[*k])
                .map(|k| (k, sandwich(old, &one, &next[k].1).norm_sqr()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(ov > 0.9, "overlap {ov} at {field}");
            taken[k] = true;
            out.push(next[k]);
        }
        pairs = out;
    }
    pairs
}

/// For θ = 0 the projection F_z = m_S + m_I is conserved. Returns the
/// eigenpair index for each label a..f, given ascending eigenpairs.
///
/// Blocks: F=3/2 {a}, F=1/2 {b (upper), f (lower)}, F=−1/2 {c (upper),
/// e (lower)}, F=−3/2 {d}.
pub fn on_axis_labels(pairs: &[(f64, Vec6)]) -> [usize; 6] {
    let fz = |v: &Vec6| -> f64 {
        let mut acc = 0.0;
        for (up, ms) in [(true, 0.5), (false, -0.5)] {
            for mi in [1, 0, -1] {
                acc += v[idx(up, mi)].norm_sqr() * (ms + mi as f64);
            }
        }
        acc
    };
    let block = |f: f64| -> Vec<usize> {
        let mut ids: Vec<usize> = (0..6)
            .filter(|&k| (fz(&pairs[k].1) - f).abs() < 1e-6)
            .collect();
        ids.sort_by(|&x, &y| pairs[y].0.total_cmp(&pairs[x].0));
        ids
    };
    let (b32, b12, bm12, bm32) = (block(1.5), block(0.5), block(-0.5), block(-1.5));
    assert!(b32.len() == 1 && b12.len() == 2 && bm12.len() == 2 && bm32.len() == 1);
    [b32[0], b12[0], bm12[0], bm32[0], bm12[1], b12[1]]
}
