use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use jouanolou::exact::{self, ChunkSpec, ExactError, VerificationReport};
use jouanolou::field::{section_invariants, FieldJson};
use jouanolou::flow::{self, FlowControls, FlowError, RealFlow, TrajectorySample};
use jouanolou::pnorm::{self, PnormError, SweepConfig, SweepRow};
use jouanolou::render::{self, RenderError, RenderOptions, SliceMode, SliceSpec};
use jouanolou::symmetry;
use jouanolou::{jouanolou_field, HomogeneousField, ProjPoint};
use serde::Serialize;

use crate::output::{emit_json, read_to_string, write_atomic, write_json};
use crate::parse::parse_point;
use crate::{
    CliError, Command, FieldArgs, MergeArgs, RenderArgs, ReportArgs, Status, SweepArgs, SymmetryArgs,
    TraceArgs, VerifyPbArgs, VerifyPsArgs,
};

pub fn dispatch(command: Command, threads: usize) -> Result<Status, CliError> {
    match command {
        Command::VerifyPb(a) => verify_pb(a, threads),
        Command::MergeReports(a) => merge(a),
        Command::VerifyPs(a) => verify_ps(a),
        Command::SweepRp(a) => sweep_rp(a),
        Command::RenderJulia(a) => render_julia(a),
        Command::SymmetryCheck(a) => symmetry_check(a),
        Command::TraceW(a) => trace_w(a),
        Command::Report(a) => report(a),
    }
}

fn exact_error(e: ExactError) -> CliError {
    match e {
        ExactError::BadN | ExactError::BadChunk { .. } => CliError::usage(e.to_string()),
        ExactError::Overflow { .. } | ExactError::Merge(_) => CliError::failure(e.to_string()),
    }
}

fn flow_error(e: FlowError) -> CliError {
    match e {
        FlowError::BadControls(_) | FlowError::ZeroPoint => CliError::usage(e.to_string()),
        _ => CliError::failure(e.to_string()),
    }
}

fn pnorm_error(e: PnormError) -> CliError {
    match e {
        PnormError::BadExponent(_) | PnormError::BadSweep(_) => CliError::usage(e.to_string()),
        _ => CliError::failure(e.to_string()),
    }
}

fn render_error(e: RenderError) -> CliError {
    match e {
        RenderError::Flow(f) => flow_error(f),
        _ => CliError::usage(e.to_string()),
    }
}

fn load_field(args: &FieldArgs) -> Result<HomogeneousField, CliError> {
    match &args.field {
        Some(path) => {
            let text = read_to_string(path)?;
            let json: FieldJson = serde_json::from_str(&text)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            HomogeneousField::from_json(&json).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
        }
        None => jouanolou_field(args.degree).map_err(|e| CliError::usage(e.to_string())),
    }
}

fn pb_summary(r: &VerificationReport) -> String {
    let mut s = String::new();
    let scope = match r.chunk {
        Some(c) => format!(" (chunk {}/{})", c.index, c.count),
        None => String::new(),
    };
    let _ = writeln!(s, "C_{}{scope}: {}", r.n, if r.holds { "holds" } else { "FAILS" });
    let _ = writeln!(s, "  members       {}", r.member_count);
    let _ = writeln!(s, "  max iota      {}", r.max_iota);
    let _ = writeln!(s, "  max kappa     {}", r.max_kappa);
    let _ = writeln!(s, "  min gap       {}", r.min_gap);
    let _ = writeln!(s, "  max ratio     {:.15} at {}", r.max_ratio, r.argmax);
    if r.counterexample_count > 0 {
        let _ = writeln!(s, "  counterexamples {}", r.counterexample_count);
    }
    if r.chunk.is_none() {
        let cert = if r.certifying {
            "certifying".to_string()
        } else {
            format!("non-certifying (N below {})", exact::min_valid_n())
        };
        let _ = writeln!(s, "  {cert}");
    }
    let _ = write!(s, "  {:.2}s on {} worker(s)", r.elapsed_seconds, r.worker_count);
    s
}

fn pb_status(r: &VerificationReport) -> Status {
    if r.holds {
        Status::Ok
    } else {
        Status::Violation
    }
}

fn verify_pb(a: VerifyPbArgs, threads: usize) -> Result<Status, CliError> {
    let chunk = a.chunk.map(|c| ChunkSpec {
        index: c.index,
        count: c.count,
    });
    let r = exact::verify_cn_chunk(a.n, threads, chunk).map_err(exact_error)?;
    finish_pb(&r, a.json.as_deref())
}

fn finish_pb(r: &VerificationReport, json: Option<&Path>) -> Result<Status, CliError> {
    match json {
        Some(path) => {
            write_json(path, r)?;
            println!("{}", pb_summary(r));
        }
        None => emit_json(None, r)?,
    }
    Ok(pb_status(r))
}

fn merge(a: MergeArgs) -> Result<Status, CliError> {
    let mut parts = Vec::with_capacity(a.reports.len());
    for path in &a.reports {
        let text = read_to_string(path)?;
        let r: VerificationReport = serde_json::from_str(&text)
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        parts.push(r);
    }
    let merged = exact::merge_reports(&parts).map_err(exact_error)?;
    finish_pb(&merged, a.json.as_deref())
}

fn verify_ps(a: VerifyPsArgs) -> Result<Status, CliError> {
    let field = load_field(&a.field)?;
    let r = flow::check_ps(&field).map_err(flow_error)?;
    match &a.json {
        Some(path) => {
            write_json(path, &r)?;
            println!(
                "degree {}: {} singular points, {}",
                field.degree(),
                r.singularities.len(),
                if r.holds { "all hyperbolic sources of W" } else { "NOT all hyperbolic sources of W" }
            );
            for s in &r.singularities {
                println!(
                    "  {}  eigenvalues {:.6} {:.6}  hyperbolic {}  source {}",
                    s.point, s.eigenvalues_x[0], s.eigenvalues_x[1], s.is_hyperbolic, s.is_source_for_w
                );
            }
        }
        None => emit_json(None, &r)?,
    }
    Ok(if r.holds { Status::Ok } else { Status::Violation })
}

pub const SWEEP_CSV_HEADER: &str = "d,p,max_ratio_lower_bound,argmax_x_re,argmax_x_im,argmax_y_re,argmax_y_im,argmax_z_re,argmax_z_im,samples,converged_fraction,unreliable";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from(SWEEP_CSV_HEADER);
    s.push('\n');
    for r in rows {
        let a = r.argmax;
        let _ = writeln!(
            s,
            "{},{},{:.15e},{:e},{:e},{:e},{:e},{:e},{:e},{},{},{}",
            r.d,
            r.p_exponent,
            r.max_ratio,
            a.x().re,
            a.x().im,
            a.y().re,
            a.y().im,
            a.z().re,
            a.z().im,
            r.samples_used,
            r.converged_fraction,
            r.unreliable
        );
    }
    s
}

fn sweep_rp(a: SweepArgs) -> Result<Status, CliError> {
    let field = jouanolou_field(a.degree).map_err(|e| CliError::usage(e.to_string()))?;
    let cfg = SweepConfig {
        p_min: a.p_min,
        p_max: a.p_max,
        p_steps: a.steps,
        samples: a.samples,
        seeds: a.seeds,
        rng_seed: a.seed,
    };
    let rows = pnorm::sweep(&field, &cfg).map_err(pnorm_error)?;
    if let Some(path) = &a.csv {
        write_atomic(path, sweep_csv(&rows).as_bytes())?;
    }
    if let Some(path) = &a.json {
        write_json(path, &rows)?;
    }
    println!("d = {}: sampled lower bounds for sup R_p over B_p", a.degree);
    for r in &rows {
        println!(
            "  p = {:<8} max ratio >= {:.6}  ({} samples, {:.1}% converged{})",
            r.p_exponent,
            r.max_ratio,
            r.samples_used,
            100.0 * r.converged_fraction,
            if r.unreliable { ", UNRELIABLE" } else { "" }
        );
    }
    Ok(Status::Ok)
}

fn render_julia(a: RenderArgs) -> Result<Status, CliError> {
    let field = load_field(&a.field)?;
    let mode: SliceMode = a.slice.parse().map_err(render_error)?;
    let slice = SliceSpec::new(mode, a.resolution.width, a.resolution.height).map_err(render_error)?;
    let opts = RenderOptions {
        radius: a.radius,
        budget: a.budget,
        rtol: a.rtol,
        ..RenderOptions::default()
    };
    let flow = RealFlow::new(field).map_err(flow_error)?;
    let img = render::render(&flow, a.singularity, &slice, &opts).map_err(render_error)?;
    let mut ppm = Vec::with_capacity(img.width * img.height * 3 + 32);
    img.write_ppm(&mut ppm)
        .map_err(|e| CliError::failure(e.to_string()))?;
    write_atomic(&a.out, &ppm)?;
    let meta = a.meta.clone().unwrap_or_else(|| sidecar_path(&a.out));
    write_json(&meta, &img.metadata)?;
    let c = img.metadata.counts;
    println!(
        "{}x{}: {} fatou, {} julia, {} failed (julia fraction {:.4}) in {:.1}s",
        img.width,
        img.height,
        c.fatou,
        c.julia,
        c.failed,
        img.metadata.julia_fraction,
        img.metadata.elapsed_seconds
    );
    Ok(Status::Ok)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

fn symmetry_check(a: SymmetryArgs) -> Result<Status, CliError> {
    let field = jouanolou_field(2).map_err(|e| CliError::failure(e.to_string()))?;
    let r = symmetry::symmetry_suite(&field, a.samples, a.seed).map_err(|e| CliError::failure(e.to_string()))?;
    match &a.json {
        Some(path) => {
            write_json(path, &r)?;
            println!(
                "t weights {:?}; group order {} ({}); s t s^-1 = t^2: {}",
                r.t_weights,
                r.group_order,
                if r.closed { "closed" } else { "NOT closed" },
                r.conjugation_relation
            );
            println!("invariant quartic monomials for {:?}: {:?}", r.quartic_weights, r.quartic_monomials);
            for g in &r.generators {
                println!(
                    "  {}: |b| error {:.2e}, W error {:.2e} -> {}",
                    g.label,
                    g.b_max_error,
                    g.w_max_error,
                    if g.passed() { "ok" } else { "FAIL" }
                );
            }
        }
        None => emit_json(None, &r)?,
    }
    Ok(if r.passed { Status::Ok } else { Status::Violation })
}

fn trace_w(a: TraceArgs) -> Result<Status, CliError> {
    let field = load_field(&a.field)?;
    let p = parse_point(&a.point).map_err(CliError::usage)?;
    let p0 = ProjPoint::new(p).map_err(flow_error)?;
    let controls = FlowControls {
        dt0: a.dt0,
        t_max: a.t_max,
        eps_b: a.eps_b,
        eps_s: a.eps_s,
        max_steps: a.max_steps,
        rtol: a.rtol,
        ..FlowControls::default()
    };
    controls.validate().map_err(flow_error)?;
    let flow = RealFlow::new(field).map_err(flow_error)?;
    let mut csv = a.csv.as_ref().map(|_| {
        let mut s = String::from(TrajectorySample::CSV_HEADER);
        s.push('\n');
        s
    });
    let result = flow
        .integrate_observed(&p0, &controls, &mut |sample| {
            if let Some(buf) = csv.as_mut() {
                buf.push_str(&sample.csv_row());
                buf.push('\n');
            }
        })
        .map_err(flow_error)?;
    if let (Some(path), Some(buf)) = (&a.csv, &csv) {
        write_atomic(path, buf.as_bytes())?;
    }
    emit_json(None, &result)?;
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct Summary {
    min_valid_n: u32,
    threshold_fails_below: bool,
    section_genus_d2: u64,
    ps_holds: bool,
    singular_points: usize,
    symmetry_passed: bool,
    t_weights: [u32; 3],
    pb: Option<VerificationReport>,
}

fn report(a: ReportArgs) -> Result<Status, CliError> {
    let field = jouanolou_field(2).map_err(|e| CliError::failure(e.to_string()))?;
    let n0 = exact::min_valid_n();
    let ps = flow::check_ps(&field).map_err(flow_error)?;
    let sym = symmetry::symmetry_suite(&field, a.samples, 0).map_err(|e| CliError::failure(e.to_string()))?;
    let pb = match &a.pb {
        Some(path) => {
            let text = read_to_string(path)?;
            Some(
                serde_json::from_str::<VerificationReport>(&text)
                    .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?,
            )
        }
        None => None,
    };
    let summary = Summary {
        min_valid_n: n0,
        threshold_fails_below: !exact::threshold_holds(n0 - 1),
        section_genus_d2: section_invariants(2).genus,
        ps_holds: ps.holds,
        singular_points: ps.singularities.len(),
        symmetry_passed: sym.passed,
        t_weights: sym.t_weights,
        pb,
    };
    if let Some(path) = &a.json {
        write_json(path, &summary)?;
    }
    println!("threshold            N >= {n0}");
    println!(
        "singular points      {} ({})",
        summary.singular_points,
        if summary.ps_holds { "all hyperbolic W-sources" } else { "check FAILED" }
    );
    println!(
        "symmetry group       {} ({})",
        sym.group_order,
        if sym.passed { "ok" } else { "FAILED" }
    );
    let mut ok = summary.ps_holds && summary.symmetry_passed;
    if let Some(r) = &summary.pb {
        println!("{}", pb_summary(r));
        ok &= r.holds;
    }
    Ok(if ok { Status::Ok } else { Status::Violation })
}
