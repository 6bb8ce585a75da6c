//! Eigenstate labels |a⟩…|f⟩ assigned at high field and carried down to the
//! target field by overlap continuation.
//!
//! At the reference field the six eigenstates are close to product states and
//! are named in descending energy. The field is then stepped geometrically
//! toward the target; at each step new eigenvectors are matched to the previous
//! ones by maximum |⟨old|new⟩|², resolved greedily into a bijection. A step with
//! any matched overlap below 0.5 is halved and retried.
//!
//! Exactly degenerate eigenvalues (Kramers pairs at zero field, true crossings
//! at θ = 0) leave the eigenvector basis inside the degenerate subspace
//! arbitrary. Inside such a subspace the previous vectors are projected in and
//! re-orthonormalized, so the returned states stay continuous.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{fix_phase, hermitian_eig_named, inner, norm, CMatrix};
use crate::model::{build_with, FieldConfig, OrientationClass, P1Parameters, ProductOperators, DIM, TWO_PI};

/// Field at which labels are first assigned, gauss.
pub const REFERENCE_FIELD_G: f64 = 10_000.0;
/// Maximum ratio between consecutive continuation fields.
pub const GRID_RATIO: f64 = 1.05;
/// Steps are never shorter than this unless halved after an ambiguity, gauss.
pub const MIN_STEP_G: f64 = 0.5;
/// Halving stops here and the continuation fails, gauss.
pub const FLOOR_STEP_G: f64 = 0.01;
/// Smallest acceptable matched overlap.
pub const MIN_OVERLAP: f64 = 0.5;

const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Label {
    pub const ALL: [Label; 6] = [Label::A, Label::B, Label::C, Label::D, Label::E, Label::F];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    pub fn as_char(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_char(c: char) -> Option<Label> {
        let c = c.to_ascii_lowercase();
        if ('a'..='f').contains(&c) {
            Label::from_index((c as u8 - b'a') as usize)
        } else {
            None
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// High-field quantum numbers of a labeled state: m_S along the static field
/// and m_I along the hyperfine field seen by the m_S = +1/2 electron.
/// For θ = 0 both axes coincide with the defect axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AsymptoticId {
    pub two_ms: i8,
    pub mi: i8,
}

impl AsymptoticId {
    pub fn ms(&self) -> f64 {
        self.two_ms as f64 / 2.0
    }
}

impl fmt::Display for AsymptoticId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.two_ms > 0 { "+1/2" } else { "-1/2" };
        write!(f, "|{s}, {:+}⟩", self.mi)
    }
}

/// Six labeled energies and eigenvectors at one field point.
#[derive(Debug, Clone)]
pub struct LabeledEigensystem {
    pub field: FieldConfig,
    pub orientation: OrientationClass,
    /// MHz, indexed by label.
    pub energies: [f64; 6],
    /// Column k is the eigenvector of label k.
    pub states: CMatrix,
    pub asymptotic_ids: [AsymptoticId; 6],
}

impl LabeledEigensystem {
    pub fn energy(&self, label: Label) -> f64 {
        self.energies[label.index()]
    }

    pub fn state(&self, label: Label) -> Vec<Complex64> {
        self.states.column(label.index())
    }

    pub fn asymptotic_id(&self, label: Label) -> AsymptoticId {
        self.asymptotic_ids[label.index()]
    }

    /// Energies sorted ascending, MHz.
    pub fn sorted_energies(&self) -> Vec<f64> {
        let mut e = self.energies.to_vec();
        e.sort_by(f64::total_cmp);
        e
    }
}

/// Labels eigenstates at `field_magnitude` by continuation from the reference field.
pub fn label_states(
    params: &P1Parameters,
    field_magnitude: f64,
    orientation: &OrientationClass,
) -> Result<LabeledEigensystem> {
    let mut out = label_sweep(params, &[field_magnitude], orientation)?;
    Ok(out.remove(0))
}

/// Labeled eigensystems on a uniform grid of `points` fields from `b_min` to `b_max`.
pub fn energy_sweep(
    params: &P1Parameters,
    b_min: f64,
    b_max: f64,
    points: usize,
    orientation: &OrientationClass,
) -> Result<Vec<LabeledEigensystem>> {
    if !(b_min >= 0.0 && b_min < b_max && b_max.is_finite()) {
        return Err(Error::invalid(format!(
            "need 0 <= b_min < b_max, got {b_min}..{b_max}"
        )));
    }
    if points < 2 {
        return Err(Error::invalid("a sweep needs at least 2 points"));
    }
    label_sweep(params, &linspace(b_min, b_max, points), orientation)
}

/// Evenly spaced values; a single point yields `[start]`.
pub fn linspace(start: f64, end: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|k| {
                if k == points - 1 {
                    end
                } else {
                    start + (end - start) * k as f64 / (points - 1) as f64
                }
            })
            .collect(),
    }
}

/// Labeled eigensystems at arbitrary fields (any order), all labeled by a
/// single continuation pass. Output follows input order.
pub fn label_sweep(
    params: &P1Parameters,
    fields: &[f64],
    orientation: &OrientationClass,
) -> Result<Vec<LabeledEigensystem>> {
    params.validate()?;
    for &b in fields {
        orientation.field(b).validate()?;
    }
    let mut below: Vec<usize> = (0..fields.len()).filter(|&k| fields[k] <= REFERENCE_FIELD_G).collect();
    let mut above: Vec<usize> = (0..fields.len()).filter(|&k| fields[k] > REFERENCE_FIELD_G).collect();
    below.sort_by(|&x, &y| fields[y].total_cmp(&fields[x]));
    above.sort_by(|&x, &y| fields[x].total_cmp(&fields[y]));

    let mut out: Vec<Option<LabeledEigensystem>> = vec![None; fields.len()];
    let start = Tracker::start(params, orientation)?;
    for order in [below, above] {
        let mut tracker = start.clone();
        for k in order {
            tracker.advance_to(fields[k])?;
            out[k] = Some(tracker.snapshot());
        }
    }
    Ok(out.into_iter().map(|s| s.expect("every field visited")).collect())
}

#[derive(Clone)]
struct Tracker<'a> {
    params: &'a P1Parameters,
    orientation: OrientationClass,
    ops: ProductOperators,
    field: f64,
    /// rad/µs, label order
    eigenvalues: [f64; 6],
    vectors: Vec<Vec<Complex64>>,
    ids: [AsymptoticId; 6],
}

impl<'a> Tracker<'a> {
    fn start(params: &'a P1Parameters, orientation: &OrientationClass) -> Result<Self> {
        let ops = ProductOperators::new();
        let field = orientation.field(REFERENCE_FIELD_G);
        let h = build_with(&ops, params, &field);
        let eig = hermitian_eig_named(&h, &matrix_name(REFERENCE_FIELD_G, orientation))?;
        let mut eigenvalues = [0.0; 6];
        let mut vectors = Vec::with_capacity(DIM);
        for (slot, k) in (0..DIM).rev().enumerate() {
            eigenvalues[slot] = eig.eigenvalues[k];
            vectors.push(eig.vector(k));
        }
        let ids = asymptotic_ids(&ops, params, &field, &vectors)?;
        Ok(Tracker {
            params,
            orientation: *orientation,
            ops,
            field: REFERENCE_FIELD_G,
            eigenvalues,
            vectors,
            ids,
        })
    }

    fn advance_to(&mut self, target: f64) -> Result<()> {
        while self.field != target {
            let down = target < self.field;
            let nominal = if down {
                (self.field - self.field / GRID_RATIO).max(MIN_STEP_G)
            } else {
                (self.field * (GRID_RATIO - 1.0)).max(MIN_STEP_G)
            };
            let mut step = nominal.min((self.field - target).abs());
            loop {
                let next = if (self.field - target).abs() <= step {
                    target
                } else if down {
                    self.field - step
                } else {
                    self.field + step
                };
                if let Some((values, vectors)) = self.try_move(next)? {
                    self.field = next;
                    self.eigenvalues = values;
                    self.vectors = vectors;
                    break;
                }
                step /= 2.0;
                if step < FLOOR_STEP_G {
                    return Err(Error::TrackingFailure {
                        field_g: next,
                        reason: format!(
                            "eigenvector overlap below {MIN_OVERLAP} at the minimum step of {FLOOR_STEP_G} G"
                        ),
                    });
                }
            }
        }
        Ok(())
    }

    #[allow(clippy::type_complexity)]
    fn try_move(&self, field: f64) -> Result<Option<([f64; 6], Vec<Vec<Complex64>>)>> {
        let h = build_with(&self.ops, self.params, &self.orientation.field(field));
        let eig = hermitian_eig_named(&h, &matrix_name(field, &self.orientation))?;
        let mut fresh: Vec<Vec<Complex64>> = (0..DIM).map(|k| eig.vector(k)).collect();
        align_degenerate(&eig.eigenvalues, &mut fresh, &self.vectors, h.max_abs().max(1.0));

        let mut candidates = Vec::with_capacity(DIM * DIM);
        for (i, old) in self.vectors.iter().enumerate() {
            for (j, new) in fresh.iter().enumerate() {
                candidates.push((inner(old, new).norm_sqr(), i, j));
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut taken_old = [false; DIM];
        let mut taken_new = [false; DIM];
        let mut assignment = [usize::MAX; DIM];
        let mut worst = f64::INFINITY;
        for (ov, i, j) in candidates {
            if taken_old[i] || taken_new[j] {
                continue;
            }
            taken_old[i] = true;
            taken_new[j] = true;
            assignment[i] = j;
            worst = worst.min(ov);
        }
        if worst < MIN_OVERLAP {
            return Ok(None);
        }
        let mut values = [0.0; 6];
        let mut vectors = Vec::with_capacity(DIM);
        for (slot, &j) in assignment.iter().enumerate() {
            values[slot] = eig.eigenvalues[j];
            vectors.push(fresh[j].clone());
        }
        Ok(Some((values, vectors)))
    }

    fn snapshot(&self) -> LabeledEigensystem {
        let mut states = CMatrix::zeros(DIM, DIM);
        for (k, v) in self.vectors.iter().enumerate() {
            states.set_column(k, v);
        }
        LabeledEigensystem {
            field: self.orientation.field(self.field),
            orientation: self.orientation,
            energies: self.eigenvalues.map(|e| e / TWO_PI),
            states,
            asymptotic_ids: self.ids,
        }
    }
}

fn matrix_name(field: f64, orientation: &OrientationClass) -> String {
    format!(
        "P1 Hamiltonian at {field} G, θ={}°, φ={}°",
        orientation.theta, orientation.phi
    )
}

/// Replaces eigenvectors inside each degenerate cluster with the orthonormalized
/// projections of the previous vectors that weigh most in that subspace.
fn align_degenerate(values: &[f64], fresh: &mut [Vec<Complex64>], previous: &[Vec<Complex64>], scale: f64) {
    let tol = DEGENERACY_TOL * scale;
    let mut start = 0;
    while start < values.len() {
        let mut end = start + 1;
        while end < values.len() && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        if end - start > 1 {
            let group: Vec<usize> = (start..end).collect();
            let basis: Vec<Vec<Complex64>> = group.iter().map(|&g| fresh[g].clone()).collect();
            let project = |v: &[Complex64]| -> Vec<Complex64> {
                let mut p = vec![Complex64::new(0.0, 0.0); v.len()];
                for b in &basis {
                    let c = inner(b, v);
                    for (pk, bk) in p.iter_mut().zip(b) {
                        *pk += c * bk;
                    }
                }
                p
            };
            let mut projected: Vec<(f64, Vec<Complex64>)> = previous
                .iter()
                .map(|old| {
                    let p = project(old);
                    (norm(&p), p)
                })
                .collect();
            projected.sort_by(|a, b| b.0.total_cmp(&a.0));
            let mut aligned: Vec<Vec<Complex64>> = Vec::with_capacity(group.len());
            for (_, mut p) in projected.into_iter().take(group.len()) {
                for q in &aligned {
                    let c = inner(q, &p);
                    for (pk, qk) in p.iter_mut().zip(q) {
                        *pk -= c * qk;
                    }
                }
                let n = norm(&p);
                if n < 1e-6 {
                    break;
                }
                for pk in p.iter_mut() {
                    *pk /= n;
                }
                fix_phase(&mut p);
                aligned.push(p);
            }
            if aligned.len() == group.len() {
                for (&g, v) in group.iter().zip(aligned) {
                    fresh[g] = v;
                }
            }
        }
        start = end;
    }
}

fn asymptotic_ids(
    ops: &ProductOperators,
    params: &P1Parameters,
    field: &FieldConfig,
    vectors: &[Vec<Complex64>],
) -> Result<[AsymptoticId; 6]> {
    let b = field.unit_vector();
    let hf = [params.a_perp * b[0], params.a_perp * b[1], params.a_par * b[2]];
    let hf_norm = (hf[0] * hf[0] + hf[1] * hf[1] + hf[2] * hf[2]).sqrt();
    let axis = if hf_norm > 0.0 { hf.map(|c| c / hf_norm) } else { [0.0, 0.0, 1.0] };
    let s_b = ops.s_along(b);
    let i_h = ops.i_along(axis);
    let mut ids = [AsymptoticId { two_ms: 0, mi: 0 }; 6];
    for (slot, v) in vectors.iter().enumerate() {
        let ms = s_b.sandwich(v, v).re;
        let mi = i_h.sandwich(v, v).re;
        ids[slot] = AsymptoticId {
            two_ms: if ms >= 0.0 { 1 } else { -1 },
            mi: mi.round().clamp(-1.0, 1.0) as i8,
        };
    }
    let mut seen = std::collections::HashSet::new();
    if !ids.iter().all(|id| seen.insert(*id)) {
        return Err(Error::TrackingFailure {
            field_g: field.magnitude,
            reason: "reference-field states are not distinct product states".to_string(),
        });
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eig;
    use crate::model::build_hamiltonian;

    fn id(two_ms: i8, mi: i8) -> AsymptoticId {
        AsymptoticId { two_ms, mi }
    }

    #[test]
    fn label_chars_round_trip() {
        for l in Label::ALL {
            assert_eq!(Label::from_char(l.as_char()), Some(l));
        }
        assert_eq!(Label::from_char('g'), None);
    }

    #[test]
    fn reference_field_ids_on_axis() {
        let sys = label_states(&P1Parameters::default(), REFERENCE_FIELD_G, &OrientationClass::on_axis()).unwrap();
        let expected = [id(1, 1), id(1, 0), id(1, -1), id(-1, -1), id(-1, 0), id(-1, 1)];
        assert_eq!(sys.asymptotic_ids, expected);
        // oracle: direct diagonalization, descending order, dominant basis component
        let h = build_hamiltonian(&P1Parameters::default(), &OrientationClass::on_axis().field(REFERENCE_FIELD_G));
        let eig = hermitian_eig(&h).unwrap();
        for (slot, k) in (0..6).rev().enumerate() {
            let v = eig.vector(k);
            let dominant = (0..6).max_by(|&x, &y| v[x].norm().total_cmp(&v[y].norm())).unwrap();
            assert_eq!(dominant, crate::model::basis_index(expected[slot].two_ms, expected[slot].mi));
            assert!(v[dominant].norm_sqr() > 1.0 - 1e-3);
            assert!((sys.energies[slot] - eig.eigenvalues[k] / TWO_PI).abs() < 1e-9);
        }
    }

    #[test]
    fn reference_field_ids_off_axis() {
        let sys = label_states(&P1Parameters::default(), REFERENCE_FIELD_G, &OrientationClass::off_axis()).unwrap();
        let expected = [id(1, 1), id(1, 0), id(1, -1), id(-1, -1), id(-1, 0), id(-1, 1)];
        assert_eq!(sys.asymptotic_ids, expected);
    }

    #[test]
    fn zero_field_bijection() {
        let p = P1Parameters::default();
        for o in OrientationClass::both() {
            let sys = label_states(&p, 0.0, &o).unwrap();
            let h = build_hamiltonian(&p, &o.field(0.0));
            let eig = hermitian_eig(&h).unwrap();
            for (x, y) in sys.sorted_energies().iter().zip(&eig.eigenvalues) {
                assert!((x - y / TWO_PI).abs() < 1e-9);
            }
            let gram = &sys.states.adjoint() * &sys.states;
            assert!(gram.max_abs_diff(&CMatrix::identity(6)) < 1e-10);
            for l in Label::ALL {
                let v = sys.state(l);
                let hv = h.sandwich(&v, &v).re / TWO_PI;
                assert!((hv - sys.energy(l)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sweep_rejects_bad_grid() {
        let p = P1Parameters::default();
        let o = OrientationClass::on_axis();
        assert!(energy_sweep(&p, 10.0, 5.0, 10, &o).is_err());
        assert!(energy_sweep(&p, 0.0, 5.0, 1, &o).is_err());
        assert!(energy_sweep(&p, -1.0, 5.0, 3, &o).is_err());
    }

    #[test]
    fn above_reference_field() {
        let sys = label_states(&P1Parameters::default(), 1e5, &OrientationClass::on_axis()).unwrap();
        let e = sys.energies;
        assert!(e.windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn linspace_endpoints() {
        let g = linspace(0.0, 100.0, 11);
        assert_eq!(g.len(), 11);
        assert_eq!(g[10], 100.0);
        assert_eq!(g[3], 30.0);
        assert_eq!(linspace(5.0, 9.0, 1), vec![5.0]);
    }
}
