//! Browser bindings: a Julia-slice renderer, one point of the ℓᵖ sweep and a
//! small exact `C_N` check.

use jouanolou::exact;
use jouanolou::flow::RealFlow;
use jouanolou::pnorm::{self, SweepConfig};
use jouanolou::render::{self, RenderOptions, SliceMode, SliceSpec};
use jouanolou::jouanolou_field;
use wasm_bindgen::prelude::*;

/// Largest image side accepted from the page.
pub const MAX_SIDE: usize = 512;
/// Largest `N` for the in-browser exact check.
pub const MAX_N: u32 = 100;

/// RGBA pixels of a meridian slice around singular point `singularity` of `J_degree`.
pub fn render_rgba(
    degree: u32,
    singularity: usize,
    radius: f64,
    budget: f64,
    side: usize,
    twist: i32,
    phase: f64,
) -> Result<Vec<u8>, String> {
    if !(16..=MAX_SIDE).contains(&side) {
        return Err(format!("image side must lie in 16..={MAX_SIDE}"));
    }
    let field = jouanolou_field(degree).map_err(|e| e.to_string())?;
    let flow = RealFlow::new(field).map_err(|e| e.to_string())?;
    let slice = SliceSpec::new(SliceMode::MeridianSphere { phase, twist }, side, side).map_err(|e| e.to_string())?;
    let opts = RenderOptions {
        radius,
        budget,
        ..RenderOptions::default()
    };
    let img = render::render(&flow, singularity, &slice, &opts).map_err(|e| e.to_string())?;
    let rgb = img.rgb();
    let mut out = Vec::with_capacity(side * side * 4);
    for px in rgb.chunks_exact(3) {
        out.extend_from_slice(px);
        out.push(255);
    }
    Ok(out)
}

/// One row of the sweep as JSON.
pub fn sweep_json(degree: u32, p: f64, samples: usize, seeds: usize, seed: u64) -> Result<String, String> {
    let field = jouanolou_field(degree).map_err(|e| e.to_string())?;
    let cfg = SweepConfig {
        p_min: p,
        p_max: p,
        p_steps: 1,
        samples,
        seeds,
        rng_seed: seed,
    };
    let row = pnorm::sweep_one(&field, p, &cfg).map_err(|e| e.to_string())?;
    serde_json::to_string(&row).map_err(|e| e.to_string())
}

/// The `C_N` report as JSON.
pub fn verify_json(n: u32) -> Result<String, String> {
    if n > MAX_N {
        return Err(format!("N above {MAX_N} is too slow for the browser; use the command-line tool"));
    }
    let r = exact::verify_cn(n, 1).map_err(|e| e.to_string())?;
    serde_json::to_string(&r).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = renderSlice)]
pub fn render_slice(
    degree: u32,
    singularity: usize,
    radius: f64,
    budget: f64,
    side: usize,
    twist: i32,
    phase: f64,
) -> Result<Vec<u8>, JsValue> {
    render_rgba(degree, singularity, radius, budget, side, twist, phase).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = sweepPoint)]
pub fn sweep_point(degree: u32, p: f64, samples: usize, seeds: usize, seed: u32) -> Result<String, JsValue> {
    sweep_json(degree, p, samples, seeds, u64::from(seed)).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = verifyLattice)]
pub fn verify_lattice(n: u32) -> Result<String, JsValue> {
    verify_json(n).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rgba_has_opaque_pixels() {
        let px = render_rgba(2, 0, 0.3, 40.0, 16, 2, 0.0).unwrap();
        assert_eq!(px.len(), 16 * 16 * 4);
        assert!(px.chunks_exact(4).all(|p| p[3] == 255));
        assert!(render_rgba(2, 0, 0.3, 40.0, 8, 0, 0.0).is_err());
        assert!(render_rgba(2, 9, 0.3, 40.0, 16, 0, 0.0).is_err());
    }

    #[test]
    fn sweep_and_verify_json() {
        let v: serde_json::Value = serde_json::from_str(&sweep_json(2, 2.0, 200, 4, 0).unwrap()).unwrap();
        assert!(v["max_ratio"].as_f64().unwrap() < 1.0);
        let r: serde_json::Value = serde_json::from_str(&verify_json(70).unwrap()).unwrap();
        assert_eq!(r["holds"], true);
        assert!(verify_json(MAX_N + 1).is_err());
    }
}
