//! Trajectories of `W` with Fatou / Julia classification.

use serde::{Deserialize, Serialize};

use super::singular::find_singularities;
use super::{
    b_residual, chart_velocity, classify_b_point, project_to_b, BPointKind, Chart, FlowError,
    ProjPoint, DEFAULT_EPS_B,
};
use crate::complex3::{Complex3, C64};
use crate::field::HomogeneousField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowControls {
    pub dt0: f64,
    pub t_max: f64,
    pub eps_b: f64,
    pub eps_s: f64,
    pub max_steps: usize,
    pub rtol: f64,
    pub atol: f64,
    /// Half-width of the degenerate band in the sink test, relative to `‖p‖^{2d}`.
    pub sink_tol: f64,
}

impl Default for FlowControls {
    fn default() -> Self {
        FlowControls {
            dt0: 1e-3,
            t_max: 200.0,
            eps_b: DEFAULT_EPS_B,
            eps_s: 1e-6,
            max_steps: 1_000_000,
            rtol: 1e-8,
            atol: 1e-10,
            sink_tol: 1e-9,
        }
    }
}

impl FlowControls {
    pub fn validate(&self) -> Result<(), FlowError> {
        let positive = [
            ("dt0", self.dt0),
            ("t_max", self.t_max),
            ("eps_b", self.eps_b),
            ("eps_s", self.eps_s),
            ("rtol", self.rtol),
            ("atol", self.atol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FlowError::BadControls(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_steps == 0 {
            return Err(FlowError::BadControls("max_steps must be positive".into()));
        }
        if !(self.sink_tol >= 0.0) {
            return Err(FlowError::BadControls("sink_tol must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Fatou,
    Julia,
    Singular,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Fatou => "FATOU",
            Classification::Julia => "JULIA",
            Classification::Singular => "SINGULAR",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryResult {
    pub classification: Classification,
    /// Time at which `σ_B` crossed `ε_B`, interpolated within the last step.
    pub transit_time: Option<f64>,
    pub limit_b_point: Option<ProjPoint>,
    /// Increase of `f = −log‖·‖²` along the lifted trajectory.
    pub f_gain: f64,
    pub steps: usize,
    pub final_time: f64,
    pub final_point: ProjPoint,
}

/// One accepted step of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub step: usize,
    pub t: f64,
    pub chart: Chart,
    pub u: C64,
    pub v: C64,
    pub sigma_b: f64,
    pub f_gain: f64,
}

impl TrajectorySample {
    pub const CSV_HEADER: &'static str = "step,t,chart,u_re,u_im,v_re,v_im,sigma_B,f_gain";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{:e},{},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.step,
            self.t,
            self.chart.name(),
            self.u.re,
            self.u.im,
            self.v.re,
            self.v.im,
            self.sigma_b,
            self.f_gain
        )
    }
}

type State = [f64; 4];

fn to_state(u: C64, v: C64) -> State {
    [u.re, u.im, v.re, v.im]
}

fn from_state(y: &State) -> (C64, C64) {
    (C64::new(y[0], y[1]), C64::new(y[2], y[3]))
}

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..4 {
            out[i] += h * c * k[i];
        }
    }
    out
}

// Dormand–Prince 5(4) tableau.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// One Dormand–Prince step from `y` with derivative `k1`. Returns the new
/// state, its derivative and the scaled error norm.
fn dopri_step(
    f: &impl Fn(&State) -> State,
    y: &State,
    k1: &State,
    h: f64,
    rtol: f64,
    atol: f64,
) -> (State, State, f64) {
    let k2 = f(&axpy(y, h, &[(A21, k1)]));
    let k3 = f(&axpy(y, h, &[(A31, k1), (A32, &k2)]));
    let k4 = f(&axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
    let k5 = f(&axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
    let k6 = f(&axpy(
        y,
        h,
        &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
    ));
    let y_new = axpy(y, h, &[(B1, k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
    let k7 = f(&y_new);
    let mut err = 0.0f64;
    for i in 0..4 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
        err = err.max((e / sc).abs());
    }
    (y_new, k7, err)
}

fn next_step(h: f64, err: f64) -> f64 {
    let fac = if err == 0.0 {
        5.0
    } else {
        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
    };
    h * fac
}

/// Coordinate modulus beyond which the integrator changes chart.
const CHART_SWITCH: f64 = 1.1;

/// Integrates `W` in a fixed chart up to time `t_end`, without classification.
pub fn integrate_in_chart(
    field: &HomogeneousField,
    chart: Chart,
    u: C64,
    v: C64,
    t_end: f64,
    rtol: f64,
) -> Result<(C64, C64), FlowError> {
    let f = |y: &State| {
        let (u, v) = from_state(y);
        let (a, b) = chart_velocity(field, chart, u, v);
        [a.re, a.im, b.re, b.im]
    };
    let atol = rtol * 1e-2;
    let mut y = to_state(u, v);
    let mut k1 = f(&y);
    let mut t = 0.0;
    let mut h = 1e-3f64.min(t_end);
    while t < t_end {
        h = h.min(t_end - t);
        let (y_new, k_new, err) = dopri_step(&f, &y, &k1, h, rtol, atol);
        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k_new;
        }
        h = next_step(h, err);
        let p = chart.lift(from_state(&y).0, from_state(&y).1);
        if h < 1e-14 * t.max(1.0) || !p.is_finite() {
            return Err(FlowError::StepUnderflow { t, point: p });
        }
    }
    Ok(from_state(&y))
}

/// `W` on the projective plane for a fixed field, with its singular points cached.
#[derive(Clone, Debug)]
pub struct RealFlow {
    field: HomogeneousField,
    singularities: Vec<ProjPoint>,
}

impl RealFlow {
    pub fn new(field: HomogeneousField) -> Result<Self, FlowError> {
        let singularities = find_singularities(&field)?
            .into_iter()
            .map(|s| s.point)
            .collect();
        Ok(RealFlow { field, singularities })
    }

    pub fn with_singularities(field: HomogeneousField, singularities: Vec<ProjPoint>) -> Self {
        RealFlow { field, singularities }
    }

    pub fn field(&self) -> &HomogeneousField {
        &self.field
    }

    pub fn singularities(&self) -> &[ProjPoint] {
        &self.singularities
    }

    fn velocity(&self, chart: Chart, y: &State) -> State {
        let (u, v) = from_state(y);
        let (a, b) = chart_velocity(&self.field, chart, u, v);
        [a.re, a.im, b.re, b.im]
    }

    /// `σ_B` and `df/dt = 4|p·V|² / ‖p‖^{2d+2}` at a chart point.
    fn b_terms(&self, chart: Chart, y: &State) -> (f64, f64) {
        let (u, v) = from_state(y);
        let p = chart.lift(u, v);
        let r = b_residual(&self.field, &p);
        let n2 = p.norm_sqr();
        let d = self.field.degree() as i32;
        let rate = 4.0 * r.norm_sqr() / n2.powi(d + 1);
        (rate.sqrt() / 2.0, rate)
    }

    fn near_singularity(&self, p: &ProjPoint, eps: f64) -> bool {
        self.singularities.iter().any(|s| s.distance(p) < eps)
    }

    /// Sink confirmation at the leafwise projection of `p` onto `B`.
    fn confirm_sink(&self, p: &Complex3, tol: f64) -> Option<ProjPoint> {
        let q = project_to_b(&self.field, p).ok()?;
        match classify_b_point(&self.field, q.rep(), tol) {
            Ok(BPointKind::Sink) => Some(q),
            _ => None,
        }
    }

    pub fn integrate(
        &self,
        p0: &ProjPoint,
        controls: &FlowControls,
    ) -> Result<TrajectoryResult, FlowError> {
        self.integrate_observed(p0, controls, &mut |_| {})
    }

    /// Integrates `W` forward from `p0`, reporting every accepted step to `observer`.
    pub fn integrate_observed(
        &self,
        p0: &ProjPoint,
        controls: &FlowControls,
        observer: &mut dyn FnMut(&TrajectorySample),
    ) -> Result<TrajectoryResult, FlowError> {
        controls.validate()?;
        let mut chart = Chart::best_for(p0.rep());
        let (u0, v0) = chart.project(p0.rep()).ok_or(FlowError::ZeroPoint)?;
        let mut y = to_state(u0, v0);
        let mut t = 0.0f64;
        let mut f_gain = 0.0f64;
        let mut steps = 0usize;
        let mut h = controls.dt0.min(controls.t_max);
        let (mut sigma, mut rate) = self.b_terms(chart, &y);
        let mut k1 = self.velocity(chart, &y);
        // Interpolated time at which σ_B last dropped below ε_B.
        let mut crossing: Option<f64> = None;

        let finish = |class, transit: Option<f64>, limit, f_gain, steps, t, chart: Chart, y: &State| {
            let (u, v) = from_state(y);
            Ok(TrajectoryResult {
                classification: class,
                transit_time: transit,
                limit_b_point: limit,
                f_gain,
                steps,
                final_time: t,
                final_point: ProjPoint::new(chart.lift(u, v))?,
            })
        };

        loop {
            let (u, v) = from_state(&y);
            observer(&TrajectorySample {
                step: steps,
                t,
                chart,
                u,
                v,
                sigma_b: sigma,
                f_gain,
            });
            let here = ProjPoint::new(chart.lift(u, v))?;
            if self.near_singularity(&here, controls.eps_s) {
                return finish(Classification::Singular, None, None, f_gain, steps, t, chart, &y);
            }
            if sigma < controls.eps_b {
                if let Some(q) = self.confirm_sink(here.rep(), controls.sink_tol) {
                    let transit = crossing.unwrap_or(t);
                    return finish(Classification::Fatou, Some(transit), Some(q), f_gain, steps, t, chart, &y);
                }
            }
            if t >= controls.t_max || steps >= controls.max_steps {
                return finish(Classification::Julia, None, None, f_gain, steps, t, chart, &y);
            }

            // Attempt steps until one is accepted.
            loop {
                let h_try = h.min(controls.t_max - t);
                let f = |s: &State| self.velocity(chart, s);
                let (y_new, k_new, err) =
                    dopri_step(&f, &y, &k1, h_try, controls.rtol, controls.atol);
                let accepted = err <= 1.0;
                h = next_step(h_try, err);
                if accepted {
                    let (s_new, rate_new) = self.b_terms(chart, &y_new);
                    // Simpson's rule on the Hermite midpoint. All weights are
                    // positive and the integrand is nonnegative.
                    let mut mid = [0.0; 4];
                    for i in 0..4 {
                        mid[i] = 0.5 * (y[i] + y_new[i]) + h_try * (k1[i] - k_new[i]) / 8.0;
                    }
                    let (_, rate_mid) = self.b_terms(chart, &mid);
                    f_gain += h_try / 6.0 * (rate + 4.0 * rate_mid + rate_new);
                    if s_new < controls.eps_b && sigma >= controls.eps_b {
                        // σ_B decays exponentially near a sink: interpolate log-linearly.
                        let (a, b) = (sigma.ln(), s_new.max(f64::MIN_POSITIVE).ln());
                        crossing = Some(t + h_try * ((a - controls.eps_b.ln()) / (a - b)).clamp(0.0, 1.0));
                    }
                    t += h_try;
                    y = y_new;
                    k1 = k_new;
                    sigma = s_new;
                    rate = rate_new;
                    steps += 1;
                    break;
                }
                if h < 1e-14 * t.max(1.0) {
                    let (u, v) = from_state(&y);
                    return Err(FlowError::StepUnderflow {
                        t,
                        point: chart.lift(u, v),
                    });
                }
            }

            let (u, v) = from_state(&y);
            if u.norm().max(v.norm()) > CHART_SWITCH {
                let p = chart.lift(u, v);
                chart = Chart::best_for(&p);
                let (u2, v2) = chart.project(&p).ok_or(FlowError::ZeroPoint)?;
                y = to_state(u2, v2);
                k1 = self.velocity(chart, &y);
            }
        }
    }
}

/// Integrates `W` from `p0`; computes the singular points of `field` first.
pub fn integrate_w(
    field: &HomogeneousField,
    p0: &ProjPoint,
    controls: &FlowControls,
) -> Result<TrajectoryResult, FlowError> {
    RealFlow::new(field.clone())?.integrate(p0, controls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::jouanolou_field;
    use crate::flow::sigma_b;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn j2_flow() -> RealFlow {
        RealFlow::new(jouanolou_field(2).unwrap()).unwrap()
    }

    fn random_proj(rng: &mut ChaCha8Rng) -> ProjPoint {
        ProjPoint::new(Complex3([0; 3].map(|_: i32| {
            c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })))
        .unwrap()
    }

    #[test]
    fn seed_at_singularity_is_singular() {
        let r = j2_flow()
            .integrate(&ProjPoint::from_real(1.0, 1.0, 1.0).unwrap(), &FlowControls::default())
            .unwrap();
        assert_eq!(r.classification, Classification::Singular);
        assert_eq!(r.steps, 0);
    }

    /// Near `[1:0:0]` the chart `x = 1` gives `v̇ = −2v + O(2)`, so `σ_B` decays
    /// like `e^{−2t}` and the halt time is `ln(σ₀/ε_B)/2` to first order.
    #[test]
    fn seed_near_b_point_is_fatou_with_predicted_transit() {
        let flow = j2_flow();
        let ctl = FlowControls::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let p = ProjPoint::new(Chart::X.lift(c(0.0, 0.0), C64::from_polar(1e-3, th))).unwrap();
            assert!(p.distance(&ProjPoint::from_real(1.0, 0.0, 0.0).unwrap()) <= 1e-3);
            let s0 = sigma_b(flow.field(), p.rep());
            let r = flow.integrate(&p, &ctl).unwrap();
            assert_eq!(r.classification, Classification::Fatou);
            let predicted = (s0 / ctl.eps_b).ln() / 2.0;
            let t = r.transit_time.unwrap();
            assert!((t - predicted).abs() < 0.05, "{t} vs {predicted}");
            let lim = r.limit_b_point.unwrap();
            assert!(sigma_b(flow.field(), lim.rep()) < ctl.eps_b);
            assert!(lim.distance(&ProjPoint::from_real(1.0, 0.0, 0.0).unwrap()) < 2e-3);
        }
        // Seeds whose leaf coordinate is already tiny halt immediately.
        let p = ProjPoint::new(Chart::X.lift(c(1e-4, 0.0), c(0.0, 0.0))).unwrap();
        let r = flow.integrate(&p, &ctl).unwrap();
        assert_eq!(r.classification, Classification::Fatou);
        assert!(r.transit_time.unwrap() < 1.0);
    }

    #[test]
    fn f_gain_is_nonnegative_and_monotone() {
        let flow = j2_flow();
        let ctl = FlowControls {
            t_max: 30.0,
            rtol: 1e-6,
            atol: 1e-8,
            ..FlowControls::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let p = random_proj(&mut rng);
            let mut last = 0.0;
            let mut monotone = true;
            let r = flow
                .integrate_observed(&p, &ctl, &mut |s| {
                    monotone &= s.f_gain >= last;
                    last = s.f_gain;
                })
                .unwrap();
            assert!(monotone);
            assert!(r.f_gain >= 0.0);
            if r.classification == Classification::Fatou {
                assert!(r.limit_b_point.is_some());
            }
        }
    }

    /// The f-gain equals `f(end) − f(start)` along the C³ lift of `W̃`.
    #[test]
    fn f_gain_matches_lifted_flow() {
        let field = jouanolou_field(2).unwrap();
        let flow = RealFlow::new(field.clone()).unwrap();
        let p0 = ProjPoint::new(Complex3::new(c(0.3, 0.1), c(-0.7, 0.2), c(0.5, -0.4))).unwrap();
        let ctl = FlowControls {
            t_max: 0.7,
            eps_b: 1e-300,
            ..FlowControls::default()
        };
        let r = flow.integrate(&p0, &ctl).unwrap();
        // Independent lift: RK4 on p' = ρ̃(p)V(p) in C³.
        let g = |p: &Complex3| field.eval(p).scale(crate::flow::rho(&field, p).unwrap());
        let mut p = *p0.rep();
        let n = 20000;
        let h = 0.7 / n as f64;
        for _ in 0..n {
            let k1 = g(&p);
            let k2 = g(&(p + k1.scale_real(h / 2.0)));
            let k3 = g(&(p + k2.scale_real(h / 2.0)));
            let k4 = g(&(p + k3.scale_real(h)));
            p = p + (k1 + k2.scale_real(2.0) + k3.scale_real(2.0) + k4).scale_real(h / 6.0);
        }
        let gain = -(p.norm_sqr().ln()) + p0.rep().norm_sqr().ln();
        assert!((gain - r.f_gain).abs() < 1e-6 * (1.0 + gain), "{gain} vs {}", r.f_gain);
        assert!(ProjPoint::new(p).unwrap().distance(&r.final_point) < 1e-6);
    }

    #[test]
    fn chart_consistency_over_unit_time() {
        let field = jouanolou_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut tested = 0;
        while tested < 20 {
            let p = random_proj(&mut rng);
            let ends: Vec<ProjPoint> = Chart::ALL
                .iter()
                .filter_map(|&ch| {
                    let (u, v) = ch.project(p.rep())?;
                    let (u1, v1) = integrate_in_chart(&field, ch, u, v, 1.0, 1e-11).ok()?;
                    ProjPoint::new(ch.lift(u1, v1)).ok()
                })
                .collect();
            if ends.len() < 2 {
                continue;
            }
            tested += 1;
            for e in &ends[1..] {
                assert!(e.distance(&ends[0]) < 1e-6);
            }
        }
    }

    #[test]
    fn w_vanishing_pattern() {
        let field = jouanolou_field(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut on_b = 0;
        for _ in 0..10_000 {
            let p = random_proj(&mut rng);
            let ch = Chart::best_for(p.rep());
            let (u, v) = ch.project(p.rep()).unwrap();
            let w = crate::flow::w_chart(&field, ch, u, v);
            assert!(w.iter().map(|x| x * x).sum::<f64>().sqrt() > 1e-10);
            if on_b < 200 {
                if let Ok(q) = project_to_b(&field, p.rep()) {
                    on_b += 1;
                    let ch = Chart::best_for(q.rep());
                    let (u, v) = ch.project(q.rep()).unwrap();
                    let w = crate::flow::w_chart(&field, ch, u, v);
                    assert!(w.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
                }
            }
        }
        for s in find_singularities(&field).unwrap() {
            let ch = Chart::best_for(s.point.rep());
            let (u, v) = ch.project(s.point.rep()).unwrap();
            let w = crate::flow::w_chart(&field, ch, u, v);
            assert!(w.iter().map(|x| x * x).sum::<f64>().sqrt() < 1e-10);
        }
    }

    #[test]
    fn controls_are_validated() {
        let flow = j2_flow();
        let bad = FlowControls {
            dt0: 0.0,
            ..FlowControls::default()
        };
        let p = ProjPoint::from_real(1.0, 2.0, 3.0).unwrap();
        assert!(matches!(flow.integrate(&p, &bad), Err(FlowError::BadControls(_))));
    }

    #[test]
    fn csv_row_shape() {
        let s = TrajectorySample {
            step: 3,
            t: 0.5,
            chart: Chart::Y,
            u: c(1.0, 2.0),
            v: c(3.0, 4.0),
            sigma_b: 0.1,
            f_gain: 0.2,
        };
        assert_eq!(s.csv_row().split(',').count(), TrajectorySample::CSV_HEADER.split(',').count());
        assert!(s.csv_row().starts_with("3,5e-1,y,"));
    }
}
