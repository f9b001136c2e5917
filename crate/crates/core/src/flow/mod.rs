//! The real field `W` on the projective plane.
//!
//! `W` is the leafwise gradient of `f = −log‖·‖²` for the scale-invariant leaf
//! metric. On C³ it lifts to `W̃ = Re(ρ̃ V)` with
//! `ρ̃(p) = −2 (p·V(p)) / ‖p‖^{2d}`, and in an affine chart it is exactly
//! `W = Re(ρ X)` where `X` is the chart expression of the foliation. It vanishes
//! on the mixed curve `B = {p·V(p) = 0}` and at the singular points.

mod integrate;
mod singular;

pub use integrate::{
    integrate_in_chart, integrate_w, Classification, FlowControls, RealFlow, TrajectoryResult,
    TrajectorySample,
};
pub use singular::{
    analyze_linearization, check_ps, find_singularities, jouanolou_singular_seeds,
    linearize_at_singularity, singular_residual, LinearAnalysis, PsReport, SingularityRecord,
};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex3::{hermitian_dot, Complex3, C64};
use crate::field::HomogeneousField;

/// Default threshold on the normalised residual `|p·V(p)| / ‖p‖^{d+1}` for membership in `B`.
pub const DEFAULT_EPS_B: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("the zero vector does not define a projective point")]
    ZeroPoint,
    #[error("non-finite coordinates")]
    NonFinite,
    #[error("point is not on B: normalised residual {residual:e} exceeds {threshold:e}")]
    NotOnB { residual: f64, threshold: f64 },
    #[error("projection onto B did not converge after {iterations} iterations (residual {residual:e})")]
    ProjectionFailed { iterations: usize, residual: f64 },
    #[error("point is not a singularity (residual {residual:e})")]
    NotSingular { residual: f64 },
    #[error("singularity search failed: {reason}; residuals {residuals:?}")]
    SingularitySearch { reason: String, residuals: Vec<f64> },
    #[error("step size underflow at t = {t} near {point:?}")]
    StepUnderflow { t: f64, point: Complex3 },
    #[error("invalid flow controls: {0}")]
    BadControls(String),
}

/// A point of P²(C), stored as a unit-norm representative in C³.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjPoint {
    rep: Complex3,
}

impl ProjPoint {
    pub fn new(p: Complex3) -> Result<Self, FlowError> {
        if !p.is_finite() {
            return Err(FlowError::NonFinite);
        }
        let rep = p.normalized().ok_or(FlowError::ZeroPoint)?;
        Ok(ProjPoint { rep })
    }

    pub fn from_real(x: f64, y: f64, z: f64) -> Result<Self, FlowError> {
        Self::new(Complex3::real(x, y, z))
    }

    pub fn rep(&self) -> &Complex3 {
        &self.rep
    }

    /// Sine of the Fubini–Study angle between the two points.
    pub fn distance(&self, other: &ProjPoint) -> f64 {
        let c = hermitian_dot(&self.rep, &other.rep).norm();
        (1.0 - (c * c).min(1.0)).max(0.0).sqrt()
    }

    /// Projective equality: the representatives differ by a unit scalar.
    pub fn same_as(&self, other: &ProjPoint, tol: f64) -> bool {
        (1.0 - hermitian_dot(&self.rep, &other.rep).norm()).abs() <= tol
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = self.rep.max_modulus_index();
        let r = self.rep.scale(self.rep[k].inv());
        write!(f, "[")?;
        for i in 0..3 {
            if i > 0 {
                write!(f, " : ")?;
            }
            write!(f, "{:.6}{:+.6}i", r[i].re, r[i].im)?;
        }
        write!(f, "]")
    }
}

/// An affine chart `{p_k = 1}` of P²(C).
///
/// The chart coordinates are the two remaining coordinates in cyclic order,
/// e.g. `(u, v) = (x/z, y/z)` on `{z = 1}` and `(y/x, z/x)` on `{x = 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    X,
    Y,
    Z,
}

impl Chart {
    pub const ALL: [Chart; 3] = [Chart::X, Chart::Y, Chart::Z];

    pub fn index(self) -> usize {
        match self {
            Chart::X => 0,
            Chart::Y => 1,
            Chart::Z => 2,
        }
    }

    pub fn from_index(k: usize) -> Chart {
        Chart::ALL[k % 3]
    }

    /// Indices in C³ of the two chart coordinates.
    pub fn coords(self) -> (usize, usize) {
        let c = self.index();
        ((c + 1) % 3, (c + 2) % 3)
    }

    /// The chart whose coordinate has the largest modulus at `p`.
    pub fn best_for(p: &Complex3) -> Chart {
        Chart::from_index(p.max_modulus_index())
    }

    /// The representative with a 1 in this chart's slot.
    pub fn lift(self, u: C64, v: C64) -> Complex3 {
        let (i, j) = self.coords();
        let mut p = Complex3::ZERO;
        p[self.index()] = C64::new(1.0, 0.0);
        p[i] = u;
        p[j] = v;
        p
    }

    /// Chart coordinates of `p`, or `None` if `p` is off the chart.
    pub fn project(self, p: &Complex3) -> Option<(C64, C64)> {
        let w = p[self.index()];
        if w.norm_sqr() == 0.0 {
            return None;
        }
        let (i, j) = self.coords();
        Some((p[i] / w, p[j] / w))
    }

    /// Differential of the chart map at `p`, applied to the C³ vector `xi`.
    pub fn push_forward(self, p: &Complex3, xi: &Complex3) -> Option<(C64, C64)> {
        let c = self.index();
        let w = p[c];
        if w.norm_sqr() == 0.0 {
            return None;
        }
        let (i, j) = self.coords();
        let w2 = w * w;
        Some(((xi[i] * w - p[i] * xi[c]) / w2, (xi[j] * w - p[j] * xi[c]) / w2))
    }

    pub fn name(self) -> &'static str {
        match self {
            Chart::X => "x",
            Chart::Y => "y",
            Chart::Z => "z",
        }
    }
}

/// `ρ̃(p) = −2 (p·V(p)) / ‖p‖^{2d}`.
pub fn rho(field: &HomogeneousField, p: &Complex3) -> Result<C64, FlowError> {
    let n2 = p.norm_sqr();
    if n2 == 0.0 {
        return Err(FlowError::ZeroPoint);
    }
    let v = field.eval(p);
    Ok(rho_with(field.degree(), p, &v))
}

fn rho_with(degree: u32, p: &Complex3, v: &Complex3) -> C64 {
    -2.0 * hermitian_dot(p, v) / p.norm_sqr().powi(degree as i32)
}

/// `p · V(p)`; its zero set is the cone over the mixed curve `B`.
pub fn b_residual(field: &HomogeneousField, p: &Complex3) -> C64 {
    hermitian_dot(p, &field.eval(p))
}

/// `|p·V(p)| / ‖p‖^{d+1}`, the scale-invariant distance-to-`B` indicator.
pub fn sigma_b(field: &HomogeneousField, p: &Complex3) -> f64 {
    b_residual(field, p).norm() / p.norm().powi(field.degree() as i32 + 1)
}

/// The chart expression `(ρX_u, ρX_v)` of `W` as two complex numbers.
pub fn chart_velocity(field: &HomogeneousField, chart: Chart, u: C64, v: C64) -> (C64, C64) {
    let p = chart.lift(u, v);
    let val = field.eval(&p);
    let r = rho_with(field.degree(), &p, &val);
    let (i, j) = chart.coords();
    let c = chart.index();
    (r * (val[i] - u * val[c]), r * (val[j] - v * val[c]))
}

/// `W` in chart coordinates as a real 4-vector `(Re Ẇu, Im Ẇu, Re Ẇv, Im Ẇv)`.
pub fn w_chart(field: &HomogeneousField, chart: Chart, u: C64, v: C64) -> [f64; 4] {
    let (a, b) = chart_velocity(field, chart, u, v);
    [a.re, a.im, b.re, b.im]
}

/// Type of a zero of `W` along its leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BPointKind {
    Sink,
    Saddle,
    Degenerate,
}

/// Quantities `‖V‖²` and `|DV(V)·R|` whose comparison decides the type of a point of `B`.
pub fn sink_margin_terms(field: &HomogeneousField, p: &Complex3) -> (f64, f64) {
    let v = field.eval(p);
    let dvv = field.jacobian_apply(p);
    (v.norm_sqr(), hermitian_dot(&dvv, p).norm())
}

/// Classifies a point of `B` as a sink, saddle or degenerate zero of `W` along
/// its leaf, by comparing `‖V‖²` with `|DV(V)·R|` with a band of half-width
/// `tol·‖p‖^{2d}`.
pub fn classify_b_point(
    field: &HomogeneousField,
    p: &Complex3,
    tol: f64,
) -> Result<BPointKind, FlowError> {
    if p.norm_sqr() == 0.0 {
        return Err(FlowError::ZeroPoint);
    }
    let s = sigma_b(field, p);
    if !(s < DEFAULT_EPS_B) {
        return Err(FlowError::NotOnB {
            residual: s,
            threshold: DEFAULT_EPS_B,
        });
    }
    let (vv, dvr) = sink_margin_terms(field, p);
    let band = tol * p.norm_sqr().powi(field.degree() as i32);
    Ok(if vv - dvr > band {
        BPointKind::Sink
    } else if dvr - vv > band {
        BPointKind::Saddle
    } else {
        BPointKind::Degenerate
    })
}

/// Moves `p` by complex time `t` along its leaf (`ṗ = V(p)`), with `steps` RK4 steps.
pub fn leaf_exp(field: &HomogeneousField, p: &Complex3, t: C64, steps: usize) -> Complex3 {
    let h = t / steps as f64;
    let f = |q: &Complex3| field.eval(q).scale(h);
    let mut q = *p;
    for _ in 0..steps {
        let k1 = f(&q);
        let k2 = f(&(q + k1.scale_real(0.5)));
        let k3 = f(&(q + k2.scale_real(0.5)));
        let k4 = f(&(q + k3));
        q = q + (k1 + k2.scale_real(2.0) + k3.scale_real(2.0) + k4).scale_real(1.0 / 6.0);
    }
    q
}

/// Maximum Newton iterations of [`project_to_b`].
pub const PROJECTION_MAX_ITER: usize = 50;
/// Convergence threshold of [`project_to_b`] on the normalised residual.
pub const PROJECTION_TOL: f64 = 1e-12;

/// Projects `q0` onto `B` by Newton's method on `p·V(p) = 0`, moving only
/// along the leaf through `q0`.
///
/// Along the leaf, `φ = ‖p‖²` has `φ_t = conj(p·V)`, `φ_tt = Σ p̄_k DV(V)_k`
/// and `φ_tt̄ = ‖V‖²`; the Newton step `δ` solves `φ_t + φ_tt δ + φ_tt̄ δ̄ = 0`.
pub fn project_to_b(field: &HomogeneousField, q0: &Complex3) -> Result<ProjPoint, FlowError> {
    let d = field.degree() as i32;
    let mut q = ProjPoint::new(*q0)?.rep;
    let mut residual = f64::INFINITY;
    for _ in 0..=PROJECTION_MAX_ITER {
        let (v, m) = field.eval_with_jacobian(&q);
        let r = hermitian_dot(&v, &q);
        residual = r.norm() / q.norm().powi(d + 1);
        if residual < PROJECTION_TOL {
            return ProjPoint::new(q);
        }
        let dvv = crate::complex3::mat_vec(&m, &v);
        let a = hermitian_dot(&dvv, &q);
        let c = v.norm_sqr();
        let det = c * c - a.norm_sqr();
        if det.abs() < 1e-300 {
            break;
        }
        let mut delta = ((a * r.conj() - r * c) / det).conj();
        // Keep each step inside the region where the linearisation is useful.
        let len = delta.norm() * v.norm();
        if len > 0.25 {
            delta *= 0.25 / len;
        }
        q = q + v.scale(delta) + dvv.scale(delta * delta * 0.5);
        q = q.normalized().ok_or(FlowError::ZeroPoint)?;
    }
    Err(FlowError::ProjectionFailed {
        iterations: PROJECTION_MAX_ITER,
        residual,
    })
}
