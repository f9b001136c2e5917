//! Escape-time pictures of the Julia set on a small sphere around a singularity.
//!
//! Points are placed in the orthogonal affine chart at the singular point
//! `ŝ`: `q = ŝ + a·e₁ + b·e₂` with `(e₁, e₂)` an orthonormal basis of `ŝ^⊥`.
//! The sphere is `|a|² + |b|² = r²`. When `ŝ` is fixed by the cyclic
//! permutation of coordinates, `e₁, e₂` are its eigenvectors, so the
//! permutation acts on `(a, b)` by a diagonal rotation.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex3::{hermitian_dot, Complex3, C64};
use crate::flow::{Classification, FlowControls, FlowError, ProjPoint, RealFlow};
use crate::par;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("resolution {0}x{1} is below the 16x16 minimum")]
    Resolution(usize, usize),
    #[error("singularity index {index} out of range ({count} singular points)")]
    BadIndex { index: usize, count: usize },
    #[error("radius {radius} must be positive and below the chart distance {nearest} to the nearest other singular point")]
    RadiusTooLarge { radius: f64, nearest: f64 },
    #[error("torus angle eta = {0} must lie in (0, π/2)")]
    BadEta(f64),
    #[error("bad slice description {0:?}")]
    BadSlice(String),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SliceMode {
    /// `b = t·e^{i·phase}·(a/|a|)^twist` with `|a|² + t² = r²`, `t` real.
    /// `twist = 0` is a round meridian 2-sphere.
    MeridianSphere { phase: f64, twist: i32 },
    /// `|a| = r cos η`, `|b| = r sin η`.
    HopfTorus { eta: f64 },
}

impl Default for SliceMode {
    fn default() -> Self {
        SliceMode::MeridianSphere { phase: 0.0, twist: 0 }
    }
}

impl fmt::Display for SliceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SliceMode::MeridianSphere { phase, twist } => write!(f, "meridian:phase={phase},twist={twist}"),
            SliceMode::HopfTorus { eta } => write!(f, "torus:eta={eta}"),
        }
    }
}

/// Parses `meridian`, `meridian:phase=0.5,twist=2` or `torus:eta=0.7`.
impl FromStr for SliceMode {
    type Err = RenderError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RenderError::BadSlice(s.to_string());
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = Vec::new();
        for kv in rest.split(',').filter(|x| !x.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(bad)?;
            params.push((k.trim(), v.trim()));
        }
        let get = |name: &str| params.iter().find(|(k, _)| *k == name).map(|(_, v)| *v);
        if params.iter().any(|(k, _)| !matches!(*k, "phase" | "twist" | "eta")) {
            return Err(bad());
        }
        match kind.trim() {
            "meridian" => Ok(SliceMode::MeridianSphere {
                phase: get("phase").map_or(Ok(0.0), str::parse).map_err(|_| bad())?,
                twist: get("twist").map_or(Ok(0), str::parse).map_err(|_| bad())?,
            }),
            "torus" => {
                let eta: f64 = get("eta").map_or(Ok(std::f64::consts::FRAC_PI_4), str::parse).map_err(|_| bad())?;
                Ok(SliceMode::HopfTorus { eta })
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceSpec {
    pub mode: SliceMode,
    pub width: usize,
    pub height: usize,
}

impl SliceSpec {
    pub fn new(mode: SliceMode, width: usize, height: usize) -> Result<Self, RenderError> {
        if width < 16 || height < 16 {
            return Err(RenderError::Resolution(width, height));
        }
        if let SliceMode::HopfTorus { eta } = mode {
            if !(eta > 0.0 && eta < std::f64::consts::FRAC_PI_2) {
                return Err(RenderError::BadEta(eta));
            }
        }
        Ok(SliceSpec { mode, width, height })
    }
}

/// Orthogonal affine chart centred at a point of P².
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub center: Complex3,
    pub e1: Complex3,
    pub e2: Complex3,
}

fn cyclic_eigenbasis() -> [Complex3; 3] {
    let w = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
    let one = C64::new(1.0, 0.0);
    let k = 1.0 / 3f64.sqrt();
    [
        Complex3::new(one, one, one).scale_real(k),
        Complex3::new(one, w, w * w).scale_real(k),
        Complex3::new(one, w * w, w).scale_real(k),
    ]
}

impl Frame {
    pub fn at(p: &ProjPoint) -> Frame {
        let c = *p.rep();
        let eig = cyclic_eigenbasis();
        for j in 0..3 {
            if (1.0 - hermitian_dot(&c, &eig[j]).norm()).abs() < 1e-12 {
                // Align the phase of the centre with the eigenvector.
                return Frame {
                    center: eig[j],
                    e1: eig[(j + 1) % 3],
                    e2: eig[(j + 2) % 3],
                };
            }
        }
        let mut basis = Vec::with_capacity(2);
        for k in 0..3 {
            let mut v = Complex3::ZERO;
            v[k] = C64::new(1.0, 0.0);
            for e in std::iter::once(&c).chain(basis.iter()) {
                v = v - e.scale(hermitian_dot(&v, e));
            }
            if v.norm() > 0.5 {
                basis.push(v.normalized().unwrap());
            }
            if basis.len() == 2 {
                break;
            }
        }
        Frame {
            center: c,
            e1: basis[0],
            e2: basis[1],
        }
    }

    pub fn point(&self, a: C64, b: C64) -> Complex3 {
        self.center + self.e1.scale(a) + self.e2.scale(b)
    }

    /// Chart coordinates of `q`, or `None` on the hyperplane at infinity.
    pub fn coords(&self, q: &Complex3) -> Option<(C64, C64)> {
        let w = hermitian_dot(q, &self.center);
        if w.norm() < 1e-300 {
            return None;
        }
        Some((hermitian_dot(q, &self.e1) / w, hermitian_dot(q, &self.e2) / w))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    pub frame: Frame,
    /// Row-major chart coordinates `(a, b)`.
    pub coords: Vec<(C64, C64)>,
    pub points: Vec<ProjPoint>,
}

/// Chart distance `√(|a|² + |b|²)` from `centre` to the nearest of `others`.
pub fn nearest_other(frame: &Frame, others: &[ProjPoint]) -> f64 {
    others
        .iter()
        .filter(|o| (1.0 - hermitian_dot(o.rep(), &frame.center).norm()).abs() > 1e-9)
        .map(|o| match frame.coords(o.rep()) {
            Some((a, b)) => (a.norm_sqr() + b.norm_sqr()).sqrt(),
            None => f64::INFINITY,
        })
        .fold(f64::INFINITY, f64::min)
}

/// Pixel centres of the slice, with the sphere of radius `radius` around
/// `center` in its orthogonal chart.
///
/// Meridian images use an azimuthal equidistant map: the polar angle on the
/// 2-sphere is proportional to the distance from the image centre, reaching
/// the antipode at the image corners, so every pixel is a valid point.
pub fn sphere_grid(
    center: &ProjPoint,
    singular_points: &[ProjPoint],
    radius: f64,
    slice: &SliceSpec,
) -> Result<SphereGrid, RenderError> {
    let frame = Frame::at(center);
    let nearest = nearest_other(&frame, singular_points);
    if !(radius > 0.0 && radius < nearest) {
        return Err(RenderError::RadiusTooLarge { radius, nearest });
    }
    let (w, h) = (slice.width, slice.height);
    let mut coords = Vec::with_capacity(w * h);
    let tau = std::f64::consts::TAU;
    let half_diag = 0.5 * ((w * w + h * h) as f64).sqrt();
    for y in 0..h {
        for x in 0..w {
            let (a, b) = match slice.mode {
                SliceMode::MeridianSphere { phase, twist } => {
                    let px = x as f64 + 0.5 - 0.5 * w as f64;
                    let py = y as f64 + 0.5 - 0.5 * h as f64;
                    let theta = std::f64::consts::PI * (px * px + py * py).sqrt() / half_diag;
                    let dir = if px == 0.0 && py == 0.0 {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::new(px, py).unscale((px * px + py * py).sqrt())
                    };
                    let a = dir * (radius * theta.sin());
                    let t = radius * theta.cos();
                    let b = C64::from_polar(t, phase) * dir.powi(twist);
                    (a, b)
                }
                SliceMode::HopfTorus { eta } => {
                    let alpha = tau * (x as f64 + 0.5) / w as f64;
                    let beta = tau * (y as f64 + 0.5) / h as f64;
                    (
                        C64::from_polar(radius * eta.cos(), alpha),
                        C64::from_polar(radius * eta.sin(), beta),
                    )
                }
            };
            coords.push((a, b));
        }
    }
    let points = coords
        .iter()
        .map(|&(a, b)| ProjPoint::new(frame.point(a, b)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SphereGrid { frame, coords, points })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Pixel {
    Julia,
    Fatou { transit_time: f64 },
    /// The integrator reported a numeric failure.
    Failed,
}

impl Pixel {
    pub fn is_fatou(&self) -> bool {
        matches!(self, Pixel::Fatou { .. })
    }

    pub fn is_julia(&self) -> bool {
        matches!(self, Pixel::Julia)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PixelCounts {
    pub fatou: usize,
    pub julia: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderMetadata {
    pub degree: u32,
    pub singularity_index: usize,
    pub singularity: ProjPoint,
    pub radius: f64,
    pub budget: f64,
    pub slice: SliceSpec,
    pub rtol: f64,
    pub atol: f64,
    pub counts: PixelCounts,
    pub julia_fraction: f64,
    pub elapsed_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JuliaImage {
    pub width: usize,
    pub height: usize,
    /// Row-major.
    pub pixels: Vec<Pixel>,
    pub metadata: RenderMetadata,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenderOptions {
    pub radius: f64,
    pub budget: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            radius: 0.3,
            budget: 200.0,
            rtol: 1e-7,
            atol: 1e-9,
        }
    }
}

impl RenderOptions {
    pub fn controls(&self) -> FlowControls {
        FlowControls {
            t_max: self.budget,
            rtol: self.rtol,
            atol: self.atol,
            ..FlowControls::default()
        }
    }
}

/// Classifies one point for the renderer.
pub fn classify_point(flow: &RealFlow, p: &ProjPoint, controls: &FlowControls) -> Pixel {
    match flow.integrate(p, controls) {
        Ok(r) => match r.classification {
            Classification::Fatou => Pixel::Fatou {
                transit_time: r.transit_time.unwrap_or(r.final_time),
            },
            // The singular points belong to the Julia set.
            Classification::Julia | Classification::Singular => Pixel::Julia,
        },
        Err(_) => Pixel::Failed,
    }
}

/// Renders the slice `slice` of the sphere of radius `opts.radius` around the
/// singular point with index `singularity_index`.
pub fn render(
    flow: &RealFlow,
    singularity_index: usize,
    slice: &SliceSpec,
    opts: &RenderOptions,
) -> Result<JuliaImage, RenderError> {
    let start = crate::clock::Stopwatch::start();
    let sings = flow.singularities();
    let center = sings.get(singularity_index).ok_or(RenderError::BadIndex {
        index: singularity_index,
        count: sings.len(),
    })?;
    let grid = sphere_grid(center, sings, opts.radius, slice)?;
    let controls = opts.controls();
    controls.validate()?;
    let pixels = par::map(&grid.points, |p| classify_point(flow, p, &controls));
    let counts = count(&pixels);
    Ok(JuliaImage {
        width: slice.width,
        height: slice.height,
        metadata: RenderMetadata {
            degree: flow.field().degree(),
            singularity_index,
            singularity: *center,
            radius: opts.radius,
            budget: opts.budget,
            slice: *slice,
            rtol: opts.rtol,
            atol: opts.atol,
            counts,
            julia_fraction: counts.julia as f64 / pixels.len() as f64,
            elapsed_seconds: start.seconds(),
        },
        pixels,
    })
}

pub fn count(pixels: &[Pixel]) -> PixelCounts {
    let mut c = PixelCounts::default();
    for p in pixels {
        match p {
            Pixel::Julia => c.julia += 1,
            Pixel::Fatou { .. } => c.fatou += 1,
            Pixel::Failed => c.failed += 1,
        }
    }
    c
}

pub const JULIA_COLOR: [u8; 3] = [0, 0, 0];
pub const FAILED_COLOR: [u8; 3] = [255, 0, 255];

/// Colour of a pixel: Julia black, failures magenta, Fatou shaded by
/// `log(1 + transit) / log(1 + budget)` from pale yellow to deep blue.
pub fn pixel_color(p: &Pixel, budget: f64) -> [u8; 3] {
    match p {
        Pixel::Julia => JULIA_COLOR,
        Pixel::Failed => FAILED_COLOR,
        Pixel::Fatou { transit_time } => {
            let s = ((1.0 + transit_time.max(0.0)).ln() / (1.0 + budget).ln()).clamp(0.0, 1.0);
            let lerp = |a: f64, b: f64| (a + (b - a) * s).round() as u8;
            [lerp(255.0, 20.0), lerp(244.0, 40.0), lerp(200.0, 140.0)]
        }
    }
}

impl JuliaImage {
    pub fn rgb(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() * 3);
        for p in &self.pixels {
            out.extend_from_slice(&pixel_color(p, self.metadata.budget));
        }
        out
    }

    /// Binary PPM (P6).
    pub fn write_ppm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "P6\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.rgb())?;
        w.flush()
    }

    pub fn pixel(&self, x: usize, y: usize) -> &Pixel {
        &self.pixels[y * self.width + x]
    }
}

/// Pixels that are Fatou in `a` but not in `b`.
pub fn fatou_lost(a: &JuliaImage, b: &JuliaImage) -> usize {
    a.pixels
        .iter()
        .zip(&b.pixels)
        .filter(|(p, q)| p.is_fatou() && !q.is_fatou())
        .count()
}

/// Pixels whose Fatou/non-Fatou class differs between `a` and `b`.
pub fn class_flips(a: &JuliaImage, b: &JuliaImage) -> usize {
    a.pixels
        .iter()
        .zip(&b.pixels)
        .filter(|(p, q)| p.is_fatou() != q.is_fatou())
        .count()
}

/// Fraction of pixels whose class is matched, within one pixel, by the image
/// rotated by `angle` about its centre. Pixels rotating off the image are skipped.
pub fn rotational_agreement(img: &JuliaImage, angle: f64) -> f64 {
    let (w, h) = (img.width as f64, img.height as f64);
    let (sn, cs) = angle.sin_cos();
    let (mut total, mut good) = (0usize, 0usize);
    for y in 0..img.height {
        for x in 0..img.width {
            let px = x as f64 + 0.5 - 0.5 * w;
            let py = y as f64 + 0.5 - 0.5 * h;
            let rx = cs * px - sn * py + 0.5 * w - 0.5;
            let ry = sn * px + cs * py + 0.5 * h - 0.5;
            let (cx, cy) = (rx.round() as i64, ry.round() as i64);
            if cx < 0 || cy < 0 || cx >= img.width as i64 || cy >= img.height as i64 {
                continue;
            }
            total += 1;
            let class = img.pixel(x, y).is_fatou();
            let hit = (-1..=1).any(|dy| {
                (-1..=1).any(|dx| {
                    let (nx, ny) = (cx + dx, cy + dy);
                    nx >= 0
                        && ny >= 0
                        && nx < img.width as i64
                        && ny < img.height as i64
                        && img.pixel(nx as usize, ny as usize).is_fatou() == class
                })
            });
            if hit {
                good += 1;
            }
        }
    }
    if total == 0 {
        1.0
    } else {
        good as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::jouanolou_field;
    use crate::symmetry::generator_s;

    fn j2_flow() -> RealFlow {
        RealFlow::new(jouanolou_field(2).unwrap()).unwrap()
    }

    fn ones() -> ProjPoint {
        ProjPoint::from_real(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn slice_parsing() {
        assert_eq!("meridian".parse::<SliceMode>().unwrap(), SliceMode::default());
        assert_eq!(
            "meridian:phase=0.5,twist=2".parse::<SliceMode>().unwrap(),
            SliceMode::MeridianSphere { phase: 0.5, twist: 2 }
        );
        assert_eq!("torus:eta=0.3".parse::<SliceMode>().unwrap(), SliceMode::HopfTorus { eta: 0.3 });
        assert!("sphere".parse::<SliceMode>().is_err());
        assert!("meridian:foo=1".parse::<SliceMode>().is_err());
        let m = SliceMode::MeridianSphere { phase: 1.25, twist: -1 };
        assert_eq!(m.to_string().parse::<SliceMode>().unwrap(), m);
    }

    #[test]
    fn slice_validation() {
        assert!(SliceSpec::new(SliceMode::default(), 15, 64).is_err());
        assert!(SliceSpec::new(SliceMode::HopfTorus { eta: 2.0 }, 64, 64).is_err());
        assert!(SliceSpec::new(SliceMode::default(), 16, 16).is_ok());
    }

    #[test]
    fn grid_points_lie_on_the_sphere() {
        let flow = j2_flow();
        for mode in [
            SliceMode::default(),
            SliceMode::MeridianSphere { phase: 0.7, twist: 2 },
            SliceMode::HopfTorus { eta: 0.6 },
        ] {
            let slice = SliceSpec::new(mode, 64, 64).unwrap();
            let g = sphere_grid(&ones(), flow.singularities(), 0.3, &slice).unwrap();
            assert_eq!(g.points.len(), 4096);
            for ((a, b), p) in g.coords.iter().zip(&g.points) {
                assert!(((a.norm_sqr() + b.norm_sqr()).sqrt() - 0.3).abs() < 1e-12);
                let (a2, b2) = g.frame.coords(p.rep()).unwrap();
                assert!((a2 - a).norm() + (b2 - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn radius_too_large_is_rejected() {
        let flow = j2_flow();
        let slice = SliceSpec::new(SliceMode::default(), 16, 16).unwrap();
        let frame = Frame::at(&ones());
        let nearest = nearest_other(&frame, flow.singularities());
        assert!(nearest > 0.3);
        match sphere_grid(&ones(), flow.singularities(), nearest * 1.01, &slice) {
            Err(RenderError::RadiusTooLarge { nearest: n, .. }) => assert!((n - nearest).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(sphere_grid(&ones(), flow.singularities(), -1.0, &slice).is_err());
    }

    #[test]
    fn cyclic_permutation_rotates_the_frame() {
        let frame = Frame::at(&ones());
        let s = generator_s();
        let w = C64::from_polar(1.0, std::f64::consts::TAU / 3.0);
        let (a, b) = (C64::new(0.1, 0.2), C64::new(-0.05, 0.12));
        let img = s.apply(&frame.point(a, b));
        let (a2, b2) = frame.coords(&img).unwrap();
        assert!((a2 - w * a).norm() < 1e-14);
        assert!((b2 - w * w * b).norm() < 1e-14);
    }

    #[test]
    fn classification_independent_of_resolution() {
        let flow = j2_flow();
        let opts = RenderOptions {
            budget: 40.0,
            ..RenderOptions::default()
        };
        let mode = SliceMode::HopfTorus { eta: 0.8 };
        let lo = SliceSpec::new(mode, 16, 16).unwrap();
        let hi = SliceSpec::new(mode, 48, 48).unwrap();
        let a = render(&flow, 0, &lo, &opts).unwrap();
        let b = render(&flow, 0, &hi, &opts).unwrap();
        // Torus pixel (x, y) at 16 samples is pixel (3x + 1, 3y + 1) at 48.
        for y in 0..16 {
            for x in 0..16 {
                // Same point up to rounding of the pixel angle.
                match (a.pixel(x, y), b.pixel(3 * x + 1, 3 * y + 1)) {
                    (Pixel::Fatou { transit_time: s }, Pixel::Fatou { transit_time: t }) => {
                        assert!((s - t).abs() < 1e-6)
                    }
                    (p, q) => assert_eq!(p, q),
                }
            }
        }
    }

    #[test]
    fn small_render_properties() {
        let flow = j2_flow();
        let slice = SliceSpec::new(SliceMode::MeridianSphere { phase: 0.0, twist: 2 }, 48, 48).unwrap();
        let opts = RenderOptions {
            budget: 50.0,
            ..RenderOptions::default()
        };
        let img = render(&flow, 0, &slice, &opts).unwrap();
        let c = img.metadata.counts;
        assert_eq!(c.fatou + c.julia + c.failed, 48 * 48);
        assert!(c.fatou > 0);
        for p in &img.pixels {
            if let Pixel::Fatou { transit_time } = p {
                assert!(transit_time.is_finite() && *transit_time <= opts.budget);
            }
        }
        let doubled = render(
            &flow,
            0,
            &slice,
            &RenderOptions {
                budget: 100.0,
                ..opts
            },
        )
        .unwrap();
        assert_eq!(fatou_lost(&img, &doubled), 0);
        assert!(rotational_agreement(&img, std::f64::consts::TAU / 3.0) > 0.95);
    }

    #[test]
    fn tighter_tolerance_rarely_flips() {
        let flow = j2_flow();
        let slice = SliceSpec::new(SliceMode::MeridianSphere { phase: 0.3, twist: 0 }, 40, 40).unwrap();
        let opts = RenderOptions::default();
        let a = render(&flow, 0, &slice, &opts).unwrap();
        let b = render(
            &flow,
            0,
            &slice,
            &RenderOptions {
                rtol: opts.rtol / 10.0,
                atol: opts.atol / 10.0,
                ..opts
            },
        )
        .unwrap();
        assert!(class_flips(&a, &b) * 100 < a.pixels.len());
    }

    #[test]
    fn ppm_layout() {
        let flow = j2_flow();
        let slice = SliceSpec::new(SliceMode::default(), 16, 16).unwrap();
        let img = render(
            &flow,
            0,
            &slice,
            &RenderOptions {
                budget: 5.0,
                ..RenderOptions::default()
            },
        )
        .unwrap();
        let mut buf = Vec::new();
        img.write_ppm(&mut buf).unwrap();
        assert!(buf.starts_with(b"P6\n16 16\n255\n"));
        assert_eq!(buf.len(), b"P6\n16 16\n255\n".len() + 16 * 16 * 3);
        let json = serde_json::to_string(&img.metadata).unwrap();
        assert!(json.contains("\"MERIDIAN_SPHERE\""));
    }

    #[test]
    fn colors() {
        assert_eq!(pixel_color(&Pixel::Julia, 200.0), JULIA_COLOR);
        assert_eq!(pixel_color(&Pixel::Failed, 200.0), FAILED_COLOR);
        let fast = pixel_color(&Pixel::Fatou { transit_time: 0.0 }, 200.0);
        let slow = pixel_color(&Pixel::Fatou { transit_time: 200.0 }, 200.0);
        assert_eq!(fast, [255, 244, 200]);
        assert_eq!(slow, [20, 40, 140]);
    }
}
