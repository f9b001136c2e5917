//! Singular points of the foliation and their linearisation.

use serde::{Deserialize, Serialize};

use super::{rho, Chart, FlowError, ProjPoint};
use crate::complex3::{Complex3, Mat3, C64};
use crate::field::{jouanolou_field, HomogeneousField};

type Mat2 = [[C64; 2]; 2];

/// A singular point of the foliation with the linear data of `X` and `Y = ρX` there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityRecord {
    pub point: ProjPoint,
    pub chart: Chart,
    pub eigenvalues_x: [C64; 2],
    pub rho_at_s: C64,
    pub eigenvalues_y: [C64; 2],
    pub is_hyperbolic: bool,
    pub is_source_for_w: bool,
}

/// Eigen-data of a 2×2 linear chart field and of its multiple by `ρ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearAnalysis {
    pub eigenvalues_x: [C64; 2],
    pub eigenvalues_y: [C64; 2],
    pub is_hyperbolic: bool,
    pub is_source_for_w: bool,
}

/// Relative size of `Im(λ/μ)` below which the eigenvalues count as R-colinear.
const COLINEAR_TOL: f64 = 1e-12;

/// Eigenvalues of `jac`, ordered by decreasing imaginary part, together with the
/// hyperbolicity and source flags of `Re(ρ·jac)`.
pub fn analyze_linearization(jac: Mat2, rho: C64) -> LinearAnalysis {
    let tr = jac[0][0] + jac[1][1];
    let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    let half = tr * 0.5;
    let disc = (half * half - det).sqrt();
    let (mut l, mut m) = (half + disc, half - disc);
    if m.im > l.im || (m.im == l.im && m.re > l.re) {
        std::mem::swap(&mut l, &mut m);
    }
    let hyperbolic = if l.norm() == 0.0 || m.norm() == 0.0 {
        false
    } else {
        // Im(λ μ̄) / (|λ||μ|) is the sine of the angle between λ and μ.
        (l * m.conj()).im.abs() > COLINEAR_TOL * l.norm() * m.norm()
    };
    let ey = [rho * l, rho * m];
    LinearAnalysis {
        eigenvalues_x: [l, m],
        eigenvalues_y: ey,
        is_hyperbolic: hyperbolic,
        is_source_for_w: ey[0].re > 0.0 && ey[1].re > 0.0,
    }
}

/// Anything that yields a value and Jacobian at a point of C³.
trait Evaluator {
    fn eval_jac(&self, p: &Complex3) -> (Complex3, Mat3);
}

impl Evaluator for HomogeneousField {
    fn eval_jac(&self, p: &Complex3) -> (Complex3, Mat3) {
        self.eval_with_jacobian(p)
    }
}

/// `(1 − s)·γ·A + s·B`, the straight-line homotopy with a generic complex `γ`.
struct Blend<'a> {
    start: &'a HomogeneousField,
    target: &'a HomogeneousField,
    gamma: C64,
    s: f64,
}

impl Evaluator for Blend<'_> {
    fn eval_jac(&self, p: &Complex3) -> (Complex3, Mat3) {
        let (va, ja) = self.start.eval_with_jacobian(p);
        let (vb, jb) = self.target.eval_with_jacobian(p);
        let wa = self.gamma * (1.0 - self.s);
        let wb = C64::new(self.s, 0.0);
        let mut jac = [[C64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                jac[i][j] = wa * ja[i][j] + wb * jb[i][j];
            }
        }
        (va.scale(wa) + vb.scale(wb), jac)
    }
}

/// Chart field `X = (V_i − u V_c, V_j − v V_c)` and its Jacobian in `(u, v)`.
fn chart_system<E: Evaluator + ?Sized>(e: &E, chart: Chart, u: C64, v: C64) -> ([C64; 2], Mat2) {
    let p = chart.lift(u, v);
    let (val, jac) = e.eval_jac(&p);
    let c = chart.index();
    let (i, j) = chart.coords();
    let x = [val[i] - u * val[c], val[j] - v * val[c]];
    let m = [
        [jac[i][i] - val[c] - u * jac[c][i], jac[i][j] - u * jac[c][j]],
        [jac[j][i] - v * jac[c][i], jac[j][j] - val[c] - v * jac[c][j]],
    ];
    (x, m)
}

fn solve2(m: &Mat2, r: [C64; 2]) -> Option<[C64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.norm() < 1e-300 || !det.is_finite() {
        return None;
    }
    Some([
        (m[1][1] * r[0] - m[0][1] * r[1]) / det,
        (m[0][0] * r[1] - m[1][0] * r[0]) / det,
    ])
}

/// Normalised colinearity defect `‖V(p̂) ∧ p̂‖ / ‖V(p̂)‖` at the unit representative.
pub fn singular_residual(field: &HomogeneousField, p: &ProjPoint) -> f64 {
    let v = field.eval(p.rep());
    let n = v.norm();
    if n == 0.0 {
        return 0.0;
    }
    v.orthogonal_residual(p.rep()) / n
}

/// Newton on `X = 0` in the best chart for `p`. Returns the refined point and
/// its chart residual, or `None` without convergence.
fn newton_chart<E: Evaluator + ?Sized>(
    e: &E,
    p: &Complex3,
    max_iter: usize,
    tol: f64,
) -> Option<(Complex3, f64)> {
    let chart = Chart::best_for(p);
    let (mut u, mut v) = chart.project(p)?;
    for _ in 0..max_iter {
        let (x, m) = chart_system(e, chart, u, v);
        let res = (x[0].norm_sqr() + x[1].norm_sqr()).sqrt();
        if res < tol {
            return Some((chart.lift(u, v), res));
        }
        let step = solve2(&m, x)?;
        u -= step[0];
        v -= step[1];
        if !(u.is_finite() && v.is_finite()) {
            return None;
        }
    }
    None
}

/// The `d² + d + 1` singular points `[1 : ω : ω^{−d}]` of `J_d`, `ω^{d²+d+1} = 1`.
pub fn jouanolou_singular_seeds(d: u32) -> Vec<ProjPoint> {
    let n = (d * d + d + 1) as i64;
    (0..n)
        .map(|k| {
            let w = |e: i64| C64::from_polar(1.0, std::f64::consts::TAU * (e.rem_euclid(n)) as f64 / n as f64);
            ProjPoint::new(Complex3::new(C64::new(1.0, 0.0), w(k), w(-(d as i64) * k))).unwrap()
        })
        .collect()
}

const POLISH_TOL: f64 = 1e-12;
const ACCEPT_RESIDUAL: f64 = 1e-9;

/// All singular points of the foliation of `field`, each with its linear data.
///
/// For `J_d` the points are known in closed form and only polished. Any other
/// field is reached by continuation from `J_d` along a `γ`-homotopy.
pub fn find_singularities(field: &HomogeneousField) -> Result<Vec<SingularityRecord>, FlowError> {
    let d = field.degree();
    let seeds = jouanolou_singular_seeds(d);
    let start = jouanolou_field(d).map_err(|e| FlowError::SingularitySearch {
        reason: e.to_string(),
        residuals: vec![],
    })?;
    let points = if *field == start {
        seeds
    } else {
        continuation(&start, field, &seeds)?
    };
    let mut polished = Vec::with_capacity(points.len());
    let mut residuals = Vec::with_capacity(points.len());
    for p in &points {
        let q = match newton_chart(field, p.rep(), 30, POLISH_TOL) {
            Some((q, _)) => ProjPoint::new(q)?,
            None => *p,
        };
        residuals.push(singular_residual(field, &q));
        polished.push(q);
    }
    if residuals.iter().any(|r| !(*r < ACCEPT_RESIDUAL)) {
        return Err(FlowError::SingularitySearch {
            reason: "polishing did not converge".into(),
            residuals,
        });
    }
    for a in 0..polished.len() {
        for b in a + 1..polished.len() {
            if polished[a].distance(&polished[b]) < 1e-6 {
                return Err(FlowError::SingularitySearch {
                    reason: format!("paths {a} and {b} converged to the same point"),
                    residuals,
                });
            }
        }
    }
    polished.iter().map(|p| linearize_at_singularity(field, p)).collect()
}

fn continuation(
    start: &HomogeneousField,
    target: &HomogeneousField,
    seeds: &[ProjPoint],
) -> Result<Vec<ProjPoint>, FlowError> {
    // A fixed generic γ keeps the paths apart for all s in [0, 1).
    let gamma = C64::from_polar(1.0, 2.137);
    let mut out = Vec::with_capacity(seeds.len());
    let mut failures = Vec::new();
    for seed in seeds {
        let mut p = *seed.rep();
        let mut s = 0.0f64;
        let mut ds = 0.02f64;
        let mut ok = true;
        while s < 1.0 {
            let s_next = (s + ds).min(1.0);
            let h = Blend { start, target, gamma, s: s_next };
            match newton_chart(&h, &p, 8, 1e-11) {
                Some((q, _))
                    if ProjPoint::new(q)?.distance(&ProjPoint::new(p)?) < 0.05 =>
                {
                    p = ProjPoint::new(q)?.rep;
                    s = s_next;
                    ds = (ds * 1.5).min(0.1);
                }
                _ => {
                    ds *= 0.5;
                    if ds < 1e-9 {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok {
            out.push(ProjPoint::new(p)?);
        } else {
            failures.push(singular_residual(target, &ProjPoint::new(p)?));
        }
    }
    if !failures.is_empty() {
        return Err(FlowError::SingularitySearch {
            reason: format!("{} continuation paths failed", failures.len()),
            residuals: failures,
        });
    }
    Ok(out)
}

/// Linear data of `X` and `Y = ρX` at the singular point `s`.
pub fn linearize_at_singularity(
    field: &HomogeneousField,
    s: &ProjPoint,
) -> Result<SingularityRecord, FlowError> {
    let residual = singular_residual(field, s);
    if !(residual < ACCEPT_RESIDUAL) {
        return Err(FlowError::NotSingular { residual });
    }
    let chart = Chart::best_for(s.rep());
    let (u, v) = chart.project(s.rep()).ok_or(FlowError::ZeroPoint)?;
    let (_, jac) = chart_system(field, chart, u, v);
    let r = rho(field, &chart.lift(u, v))?;
    let a = analyze_linearization(jac, r);
    Ok(SingularityRecord {
        point: *s,
        chart,
        eigenvalues_x: a.eigenvalues_x,
        rho_at_s: r,
        eigenvalues_y: a.eigenvalues_y,
        is_hyperbolic: a.is_hyperbolic,
        is_source_for_w: a.is_source_for_w,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsReport {
    pub holds: bool,
    pub singularities: Vec<SingularityRecord>,
}

/// Whether every singular point is hyperbolic and a source of `W`.
pub fn check_ps(field: &HomogeneousField) -> Result<PsReport, FlowError> {
    let singularities = find_singularities(field)?;
    let holds = singularities
        .iter()
        .all(|s| s.is_hyperbolic && s.is_source_for_w);
    Ok(PsReport { holds, singularities })
}
