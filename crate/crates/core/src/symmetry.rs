//! The order-21 automorphism group of `J_2` and related invariants.
//!
//! The group is generated by the cyclic permutation `s = [y : z : x]` and a
//! diagonal map `t = diag(ζ^a, ζ^b, ζ^c)` with `ζ = e^{2πi/7}`. Words in the
//! generators act left to right: `s t s⁻¹` means apply `s`, then `t`, then `s⁻¹`.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex3::{hermitian_dot, mat_adjoint, mat_identity, mat_mul, mat_vec, Complex3, Mat3, C64};
use crate::field::{exponents, HomogeneousField};
use crate::flow::{b_residual, rho, Chart};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymmetryError {
    #[error("no diagonal order-7 symmetry preserves the field")]
    NoWeights,
}

/// A projective transformation with a unitary lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveSymmetry {
    pub matrix: Mat3,
    pub label: String,
}

fn zeta(k: i64) -> C64 {
    C64::from_polar(1.0, TAU * k.rem_euclid(7) as f64 / 7.0)
}

impl ProjectiveSymmetry {
    pub fn identity() -> Self {
        ProjectiveSymmetry {
            matrix: mat_identity(),
            label: "1".into(),
        }
    }

    pub fn apply(&self, p: &Complex3) -> Complex3 {
        mat_vec(&self.matrix, p)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &ProjectiveSymmetry) -> ProjectiveSymmetry {
        ProjectiveSymmetry {
            matrix: mat_mul(&other.matrix, &self.matrix),
            label: format!("{} {}", self.label, other.label),
        }
    }

    pub fn inverse(&self) -> ProjectiveSymmetry {
        ProjectiveSymmetry {
            matrix: mat_adjoint(&self.matrix),
            label: format!("({})⁻¹", self.label),
        }
    }

    pub fn pow(&self, n: u32) -> ProjectiveSymmetry {
        let mut m = mat_identity();
        for _ in 0..n {
            m = mat_mul(&self.matrix, &m);
        }
        ProjectiveSymmetry {
            matrix: m,
            label: format!("({})^{n}", self.label),
        }
    }

    /// Largest entry of `M*M − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = mat_mul(&mat_adjoint(&self.matrix), &self.matrix);
        let id = mat_identity();
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((p[i][j] - id[i][j]).norm());
            }
        }
        worst
    }

    /// Whether the two matrices differ by a scalar factor.
    pub fn same_projective(&self, other: &ProjectiveSymmetry, tol: f64) -> bool {
        let (mut bi, mut bj, mut best) = (0, 0, 0.0);
        for i in 0..3 {
            for j in 0..3 {
                if other.matrix[i][j].norm() > best {
                    best = other.matrix[i][j].norm();
                    (bi, bj) = (i, j);
                }
            }
        }
        if best == 0.0 {
            return false;
        }
        let lambda = self.matrix[bi][bj] / other.matrix[bi][bj];
        (0..3).all(|i| (0..3).all(|j| (self.matrix[i][j] - lambda * other.matrix[i][j]).norm() <= tol))
    }

    pub fn is_projective_identity(&self, tol: f64) -> bool {
        self.same_projective(&ProjectiveSymmetry::identity(), tol)
    }

    /// Order in PGL(3), searched up to `max`.
    pub fn projective_order(&self, max: u32) -> Option<u32> {
        let mut g = self.clone();
        for n in 1..=max {
            if g.is_projective_identity(1e-9) {
                return Some(n);
            }
            g = g.then(self);
        }
        None
    }
}

/// `(x, y, z) ↦ (y, z, x)`.
pub fn generator_s() -> ProjectiveSymmetry {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    ProjectiveSymmetry {
        matrix: [[o, l, o], [o, o, l], [l, o, o]],
        label: "s".into(),
    }
}

/// `diag(ζ^a, ζ^b, ζ^c)`.
pub fn generator_t(weights: [u32; 3]) -> ProjectiveSymmetry {
    let o = C64::new(0.0, 0.0);
    let [a, b, c] = weights.map(|w| zeta(w as i64));
    ProjectiveSymmetry {
        matrix: [[a, o, o], [o, b, o], [o, o, c]],
        label: "t".into(),
    }
}

/// Residue class `e·w − w_k (mod 7)` of each monomial, if they all agree.
///
/// A common value means `V(t·p)` is a fixed multiple of `t·V(p)`.
fn weight_shift(field: &HomogeneousField, w: [u32; 3]) -> Option<u32> {
    let mut shift = None;
    for (k, comp) in field.components().iter().enumerate() {
        for term in comp.terms() {
            let e = term.exp;
            let val = (e[0] * w[0] + e[1] * w[1] + e[2] * w[2] + 7 * 7 - w[k]) % 7;
            match shift {
                None => shift = Some(val),
                Some(s) if s != val => return None,
                _ => {}
            }
        }
    }
    shift
}

/// Weights `(a, b, c)` mod 7 for which `diag(ζ^a, ζ^b, ζ^c)` maps leaves of
/// `field` to leaves, found by testing all 343 triples on the monomials.
///
/// Among the nontrivial solutions, one that commutes exactly with `V`
/// (`V(t·p) = t·V(p)`) and has `a = 1` is returned; any such triple
/// generates the same cyclic group.
pub fn find_t_weights(field: &HomogeneousField) -> Result<[u32; 3], SymmetryError> {
    let mut exact = Vec::new();
    let mut projective = Vec::new();
    for a in 0..7 {
        for b in 0..7 {
            for c in 0..7 {
                let w = [a, b, c];
                // Scalar matrices act trivially.
                if a == b && b == c {
                    continue;
                }
                match weight_shift(field, w) {
                    Some(0) => exact.push(w),
                    Some(_) => projective.push(w),
                    None => {}
                }
            }
        }
    }
    exact
        .iter()
        .find(|w| w[0] == 1)
        .or_else(|| exact.first())
        .or_else(|| projective.first())
        .copied()
        .ok_or(SymmetryError::NoWeights)
}

/// All 21 elements `t^i s^j` of the group generated by `s` and `t`.
pub fn group_elements(weights: [u32; 3]) -> Vec<ProjectiveSymmetry> {
    let s = generator_s();
    let t = generator_t(weights);
    let mut out = Vec::with_capacity(21);
    for i in 0..7u32 {
        for j in 0..3u32 {
            let mut g = t.pow(i).then(&s.pow(j));
            g.label = match (i, j) {
                (0, 0) => "1".into(),
                (0, _) => word("s", j),
                (_, 0) => word("t", i),
                _ => format!("{} {}", word("t", i), word("s", j)),
            };
            out.push(g);
        }
    }
    out
}

fn word(g: &str, n: u32) -> String {
    if n == 1 {
        g.to_string()
    } else {
        format!("{g}^{n}")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub label: String,
    pub samples: usize,
    /// Largest `| |b(g·p)| − |b(p)| |` over the samples.
    pub b_max_error: f64,
    /// Largest chart discrepancy between `W(g·p)` and `Dg·W(p)`.
    pub w_max_error: f64,
    pub b_invariant: bool,
    pub w_equivariant: bool,
    pub worst_point: Option<Complex3>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.b_invariant && self.w_equivariant
    }
}

pub const B_TOL: f64 = 1e-10;
pub const W_TOL: f64 = 1e-8;

/// Samples `n_samples` random unit points and checks that `g` preserves `|b|`
/// and commutes with `W`.
pub fn check_invariance(
    field: &HomogeneousField,
    g: &ProjectiveSymmetry,
    n_samples: usize,
    seed: u64,
) -> InvarianceReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut b_err, mut w_err) = (0.0f64, 0.0f64);
    let mut worst: Option<(f64, Complex3)> = None;
    for _ in 0..n_samples {
        let p = random_unit(&mut rng);
        let gp = g.apply(&p);
        let eb = (b_residual(field, &gp).norm() - b_residual(field, &p).norm()).abs();
        let w_p = field.eval(&p).scale(rho(field, &p).unwrap_or_default());
        let w_gp = field.eval(&gp).scale(rho(field, &gp).unwrap_or_default());
        let chart = Chart::best_for(&gp);
        let ew = match (
            chart.push_forward(&gp, &w_gp),
            chart.push_forward(&gp, &g.apply(&w_p)),
        ) {
            (Some((a1, b1)), Some((a2, b2))) => ((a1 - a2).norm_sqr() + (b1 - b2).norm_sqr()).sqrt(),
            _ => f64::INFINITY,
        };
        b_err = b_err.max(eb);
        w_err = w_err.max(ew);
        let score = (eb / B_TOL).max(ew / W_TOL);
        if worst.map_or(true, |(s, _)| score > s) {
            worst = Some((score, p));
        }
    }
    InvarianceReport {
        label: g.label.clone(),
        samples: n_samples,
        b_max_error: b_err,
        w_max_error: w_err,
        b_invariant: b_err <= B_TOL,
        w_equivariant: w_err <= W_TOL,
        worst_point: worst.map(|(_, p)| p),
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex3 {
    loop {
        let p = Complex3([0; 3].map(|_: i32| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        if let Some(q) = p.normalized() {
            return q;
        }
    }
}

/// Weights under which the Klein quartic `xy³ + yz³ + zx³` is invariant.
pub const QUARTIC_WEIGHTS: [u32; 3] = [1, 2, 4];

/// Degree-4 monomials `x^α y^β z^γ` with `α w₀ + β w₁ + γ w₂ ≡ 0 (mod 7)`,
/// closed under cyclic permutation.
pub fn invariant_quartic_monomials_for(weights: [u32; 3]) -> BTreeSet<[u32; 3]> {
    let mut out = BTreeSet::new();
    for e in exponents(4) {
        if (e[0] * weights[0] + e[1] * weights[1] + e[2] * weights[2]) % 7 == 0 {
            out.insert(e);
        }
    }
    let cyc: Vec<[u32; 3]> = out.iter().flat_map(|e| [[e[2], e[0], e[1]], [e[1], e[2], e[0]]]).collect();
    out.extend(cyc);
    out
}

/// The invariant quartic monomials for the weights `(1, 2, 4)`: `{xy³, yz³, zx³}`.
pub fn invariant_quartic_monomials() -> BTreeSet<[u32; 3]> {
    invariant_quartic_monomials_for(QUARTIC_WEIGHTS)
}

/// `xy³ + yz³ + zx³`.
pub fn klein_quartic_eval(p: &Complex3) -> C64 {
    let (x, y, z) = (p.x(), p.y(), p.z());
    x * y * y * y + y * z * z * z + z * x * x * x
}

/// Index of the element of `group` projectively equal to `g`.
pub fn find_element(group: &[ProjectiveSymmetry], g: &ProjectiveSymmetry, tol: f64) -> Option<usize> {
    group.iter().position(|h| h.same_projective(g, tol))
}

/// Whether `group` has pairwise distinct elements and is closed under composition.
pub fn is_closed_group(group: &[ProjectiveSymmetry], tol: f64) -> bool {
    let distinct = (0..group.len()).all(|a| (0..a).all(|b| !group[a].same_projective(&group[b], tol)));
    distinct
        && group
            .iter()
            .all(|g| group.iter().all(|h| find_element(group, &g.then(h), tol).is_some()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetrySuiteReport {
    pub t_weights: [u32; 3],
    pub group_order: usize,
    pub closed: bool,
    /// `s t s⁻¹ = t²` projectively.
    pub conjugation_relation: bool,
    pub quartic_weights: [u32; 3],
    pub quartic_monomials: Vec<[u32; 3]>,
    /// Monomials for the weights found from the field.
    pub quartic_monomials_found_weights: Vec<[u32; 3]>,
    pub generators: Vec<InvarianceReport>,
    pub passed: bool,
}

const GROUP_TOL: f64 = 1e-9;

/// Order, closure, monomial filter and generator invariance in one report.
pub fn symmetry_suite(
    field: &HomogeneousField,
    n_samples: usize,
    seed: u64,
) -> Result<SymmetrySuiteReport, SymmetryError> {
    let weights = find_t_weights(field)?;
    let group = group_elements(weights);
    let closed = is_closed_group(&group, GROUP_TOL);
    let s = generator_s();
    let t = generator_t(weights);
    let conjugation_relation = s.then(&t).then(&s.inverse()).same_projective(&t.pow(2), GROUP_TOL);
    let generators = vec![
        check_invariance(field, &s, n_samples, seed),
        check_invariance(field, &t, n_samples, seed.wrapping_add(1)),
    ];
    let passed = group.len() == 21 && closed && conjugation_relation && generators.iter().all(|r| r.passed());
    Ok(SymmetrySuiteReport {
        t_weights: weights,
        group_order: group.len(),
        closed,
        conjugation_relation,
        quartic_weights: QUARTIC_WEIGHTS,
        quartic_monomials: invariant_quartic_monomials().into_iter().collect(),
        quartic_monomials_found_weights: invariant_quartic_monomials_for(weights).into_iter().collect(),
        generators,
        passed,
    })
}

/// Checks that `g` permutes `points` projectively; returns the image indices.
pub fn permutation_of(g: &ProjectiveSymmetry, points: &[Complex3], tol: f64) -> Option<Vec<usize>> {
    let unit: Vec<Complex3> = points.iter().map(|p| p.normalized().unwrap_or(*p)).collect();
    let mut image = Vec::with_capacity(points.len());
    for p in &unit {
        let q = g.apply(p);
        let hit = unit
            .iter()
            .position(|r| (1.0 - hermitian_dot(&q, r).norm()).abs() <= tol)?;
        image.push(hit);
    }
    let distinct: BTreeSet<_> = image.iter().collect();
    (distinct.len() == points.len()).then_some(image)
}
