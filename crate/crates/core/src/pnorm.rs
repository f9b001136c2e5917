//! The transversality ratio for ℓᵖ norms.
//!
//! Along a leaf `q̇ = V(q)` in complex time `t`, let `φ(t) = Σ_k |q_k(t)|^p`.
//! The critical surface `B_p` is `{φ_t = 0}` and the ratio
//! `R_p = |φ_tt| / φ_tt̄` is below 1 exactly where the critical point of
//! `φ` along the leaf is a nondegenerate minimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex3::{hermitian_dot, Complex3, C64};
use crate::field::HomogeneousField;
use crate::par;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PnormError {
    #[error("exponent p = {0} is below 2")]
    BadExponent(f64),
    #[error("the zero vector does not define a point")]
    ZeroPoint,
    #[error("point is not on B_p (normalised residual {0:e})")]
    NotOnBp(f64),
    #[error("degenerate second derivative φ_tt̄ = 0")]
    Degenerate,
    #[error("invalid sweep parameters: {0}")]
    BadSweep(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiDerivatives {
    pub phi_t: C64,
    pub phi_tt: C64,
    pub phi_ttbar: f64,
}

/// Leafwise derivatives of `φ = Σ|q_k|^p` at `q`.
pub fn phi_derivatives(
    field: &HomogeneousField,
    p: f64,
    q: &Complex3,
) -> Result<PhiDerivatives, PnormError> {
    if !(p >= 2.0) {
        return Err(PnormError::BadExponent(p));
    }
    if q.norm_sqr() == 0.0 {
        return Err(PnormError::ZeroPoint);
    }
    let v = field.eval(q);
    let dvv = field.jacobian_apply(q);
    let mut phi_t = C64::new(0.0, 0.0);
    let mut phi_tt = C64::new(0.0, 0.0);
    let mut phi_ttbar = 0.0;
    for k in 0..3 {
        let m2 = q[k].norm_sqr();
        if m2 == 0.0 && p > 2.0 {
            continue;
        }
        // |q_k|^{p−2}; equal to 1 when p = 2, including at q_k = 0.
        let w = if p == 2.0 { 1.0 } else { m2.powf(0.5 * p - 1.0) };
        let qv = q[k].conj() * v[k];
        phi_t += qv * w;
        phi_tt += q[k].conj() * dvv[k] * w;
        if p > 2.0 {
            phi_tt += qv * qv * (0.5 * (p - 2.0) * w / m2);
        }
        phi_ttbar += w * v[k].norm_sqr();
    }
    Ok(PhiDerivatives {
        phi_t: phi_t * (0.5 * p),
        phi_tt: phi_tt * (0.5 * p),
        phi_ttbar: phi_ttbar * 0.25 * p * p,
    })
}

/// `|φ_t| / ‖q‖^{p+d−1}`, invariant under `q ↦ λq`.
pub fn bp_residual(field: &HomogeneousField, p: f64, q: &Complex3) -> Result<f64, PnormError> {
    let d = phi_derivatives(field, p, q)?;
    Ok(d.phi_t.norm() / q.norm().powf(p + field.degree() as f64 - 1.0))
}

pub const PROJECT_MAX_ITER: usize = 50;
pub const PROJECT_TOL: f64 = 1e-10;
/// Residual accepted by [`ratio_rp`] as "on `B_p`".
pub const RATIO_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpProjection {
    /// Unit ℓ² representative.
    pub q: Complex3,
    pub iterations: usize,
    /// Normalised residual before each iteration and at the end.
    pub residuals: Vec<f64>,
}

/// Newton iteration on `φ_t = 0` along the leaf through `q0`.
///
/// Each step solves `φ_t + φ_tt δ + φ_tt̄ δ̄ = 0` and moves by
/// `δV + δ²/2·DV(V)`, then renormalises. Returns `None` without convergence.
pub fn project_to_bp(
    field: &HomogeneousField,
    p: f64,
    q0: &Complex3,
) -> Result<Option<BpProjection>, PnormError> {
    if !(p >= 2.0) {
        return Err(PnormError::BadExponent(p));
    }
    let mut q = q0.normalized().ok_or(PnormError::ZeroPoint)?;
    let mut residuals = Vec::new();
    for it in 0..=PROJECT_MAX_ITER {
        let d = phi_derivatives(field, p, &q)?;
        let res = d.phi_t.norm();
        residuals.push(res);
        if res < PROJECT_TOL {
            return Ok(Some(BpProjection {
                q,
                iterations: it,
                residuals,
            }));
        }
        if it == PROJECT_MAX_ITER {
            break;
        }
        let (r, a, c) = (d.phi_t, d.phi_tt, d.phi_ttbar);
        let det = c * c - a.norm_sqr();
        if det.abs() < 1e-300 || !det.is_finite() {
            return Ok(None);
        }
        let mut delta = ((a * r.conj() - r * c) / det).conj();
        let v = field.eval(&q);
        let len = delta.norm() * v.norm();
        if len > 0.25 {
            delta *= 0.25 / len;
        }
        let dvv = field.jacobian_apply(&q);
        let next = q + v.scale(delta) + dvv.scale(delta * delta * 0.5);
        q = match next.normalized() {
            Some(n) if n.is_finite() => n,
            _ => return Ok(None),
        };
    }
    Ok(None)
}

/// `R_p = |φ_tt| / φ_tt̄` at a point of `B_p`.
pub fn ratio_rp(field: &HomogeneousField, p: f64, q: &Complex3) -> Result<f64, PnormError> {
    let d = phi_derivatives(field, p, q)?;
    let res = d.phi_t.norm() / q.norm().powf(p + field.degree() as f64 - 1.0);
    if !(res < RATIO_RESIDUAL_TOL) {
        return Err(PnormError::NotOnBp(res));
    }
    if d.phi_ttbar <= 0.0 {
        return Err(PnormError::Degenerate);
    }
    Ok(d.phi_tt.norm() / d.phi_ttbar)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: u32,
    pub p_exponent: f64,
    /// Largest sampled ratio: a lower bound for the supremum over `B_p`.
    pub max_ratio: f64,
    pub argmax: Complex3,
    pub samples_used: usize,
    pub converged_fraction: f64,
    /// Fewer than half of the projections converged.
    pub unreliable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub p_min: f64,
    pub p_max: f64,
    pub p_steps: usize,
    pub samples: usize,
    /// Maximum number of hill-climbing starts per exponent.
    pub seeds: usize,
    pub rng_seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            p_min: 2.0,
            p_max: 6.0,
            p_steps: 9,
            samples: 10_000,
            seeds: 32,
            rng_seed: 0,
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// The `i`-th point of a Halton sequence mapped to the unit sphere of C³,
/// with the overall phase fixed (it does not affect the ratio).
pub fn halton_sphere_point(i: u64) -> Complex3 {
    let h = [2, 3, 5, 7].map(|b| radical_inverse(i + 1, b));
    // (|q_0|², |q_1|², |q_2|²) uniform on the simplex.
    let r = h[0].sqrt();
    let w = [1.0 - r, r * (1.0 - h[1]), r * h[1]];
    let tau = std::f64::consts::TAU;
    Complex3::new(
        C64::new(w[0].sqrt(), 0.0),
        C64::from_polar(w[1].sqrt(), tau * h[2]),
        C64::from_polar(w[2].sqrt(), tau * h[3]),
    )
}

/// Rotates coordinates cyclically so the largest modulus comes first.
fn fold_cyclic(q: &Complex3) -> Complex3 {
    let k = (0..3)
        .max_by(|&a, &b| q[a].norm_sqr().total_cmp(&q[b].norm_sqr()).then(b.cmp(&a)))
        .unwrap_or(0);
    Complex3::new(q[k], q[(k + 1) % 3], q[(k + 2) % 3])
}

/// Whether `V(y, z, x)` is `V` with its components rotated the same way.
pub fn is_cyclic(field: &HomogeneousField) -> bool {
    let comps = field.components();
    (0..3).all(|k| {
        let a = &comps[k];
        let b = &comps[(k + 1) % 3];
        a.terms().len() == b.terms().len()
            && a.terms().iter().all(|t| {
                let e = t.exp;
                // x^i y^j z^k in V_k corresponds to z^i x^j y^k in V_{k+1}.
                b.coefficient([e[2], e[0], e[1]]) == t.coef
            })
    })
}

struct Sample {
    q: Complex3,
    ratio: f64,
}

fn evaluate(field: &HomogeneousField, p: f64, q0: &Complex3) -> Option<Sample> {
    let proj = project_to_bp(field, p, q0).ok()??;
    let ratio = ratio_rp(field, p, &proj.q).ok()?;
    Some(Sample { q: proj.q, ratio })
}

/// Random perturbations transverse to the leaf, each re-projected onto `B_p`;
/// improvements are kept. Step lengths are drawn log-uniformly so the climb
/// can jump across thin regions where the projection fails.
fn hill_climb(field: &HomogeneousField, p: f64, start: &Sample, rng: &mut ChaCha8Rng) -> Sample {
    let mut best = Sample {
        q: start.q,
        ratio: start.ratio,
    };
    for _ in 0..CLIMB_STEPS {
        let sigma = 10f64.powf(rng.gen_range(-5.0..-0.7));
        let v = field.eval(&best.q);
        let mut w = Complex3([0; 3].map(|_: i32| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))));
        for e in [best.q, v] {
            if let Some(e) = e.normalized() {
                w = w - e.scale(hermitian_dot(&w, &e));
            }
        }
        let Some(w) = w.normalized() else { continue };
        if let Some(s) = evaluate(field, p, &(best.q + w.scale_real(sigma))) {
            if s.ratio > best.ratio {
                best = s;
            }
        }
    }
    best
}

const CLIMB_STEPS: usize = 200;

/// The exponent grid `p_min, …, p_max` with `p_steps` points.
pub fn p_grid(cfg: &SweepConfig) -> Vec<f64> {
    if cfg.p_steps <= 1 {
        return vec![cfg.p_min];
    }
    (0..cfg.p_steps)
        .map(|i| cfg.p_min + (cfg.p_max - cfg.p_min) * i as f64 / (cfg.p_steps - 1) as f64)
        .collect()
}

/// Sampled maximum of `R_p` over `B_p` at a single exponent.
///
/// Projects the first `samples` Halton points onto `B_p`, then hill-climbs
/// from each sample that raises the running maximum (at most `seeds` of
/// them). The sample sequence is a prefix of any longer run, so the result
/// never decreases as `samples` grows.
pub fn sweep_one(field: &HomogeneousField, p: f64, cfg: &SweepConfig) -> Result<SweepRow, PnormError> {
    if !(p >= 2.0) {
        return Err(PnormError::BadExponent(p));
    }
    if cfg.samples == 0 {
        return Err(PnormError::BadSweep("samples must be at least 1".into()));
    }
    let fold = is_cyclic(field);
    let idx: Vec<u64> = (0..cfg.samples as u64).collect();
    let results = par::map(&idx, |&i| {
        let mut q = halton_sphere_point(i);
        if fold {
            q = fold_cyclic(&q);
        }
        evaluate(field, p, &q)
    });
    let converged = results.iter().filter(|r| r.is_some()).count();
    let mut records: Vec<(u64, &Sample)> = Vec::new();
    let mut running = f64::NEG_INFINITY;
    for (i, r) in results.iter().enumerate() {
        if let Some(s) = r {
            if s.ratio > running {
                running = s.ratio;
                if records.len() < cfg.seeds {
                    records.push((i as u64, s));
                }
            }
        }
    }
    let mut best: Option<Sample> = results
        .iter()
        .flatten()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .map(|s| Sample { q: s.q, ratio: s.ratio });
    let climbs = par::map(&records, |(i, s)| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed ^ i.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        hill_climb(field, p, s, &mut rng)
    });
    for c in climbs {
        if best.as_ref().map_or(true, |b| c.ratio > b.ratio) {
            best = Some(c);
        }
    }
    let converged_fraction = converged as f64 / cfg.samples as f64;
    let (max_ratio, argmax) = best.map_or((0.0, Complex3::ZERO), |b| (b.ratio, b.q));
    Ok(SweepRow {
        d: field.degree(),
        p_exponent: p,
        max_ratio,
        argmax,
        samples_used: cfg.samples,
        converged_fraction,
        unreliable: converged_fraction < 0.5,
    })
}

/// [`sweep_one`] over the exponent grid.
pub fn sweep(field: &HomogeneousField, cfg: &SweepConfig) -> Result<Vec<SweepRow>, PnormError> {
    if !(cfg.p_min >= 2.0 && cfg.p_max >= cfg.p_min && cfg.p_max.is_finite()) {
        return Err(PnormError::BadSweep(format!(
            "need 2 <= p_min <= p_max, got {} and {}",
            cfg.p_min, cfg.p_max
        )));
    }
    p_grid(cfg).into_iter().map(|p| sweep_one(field, p, cfg)).collect()
}
