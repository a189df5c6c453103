//! The four subcommands. Each returns `true` when its pass/certification
//! gate holds; `main` maps that onto the exit-code contract
//! (0 pass, 2 criterion fail, 1 usage or input error).

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Serialize;

use schlicht_core::beltrami::{self, CertificationReport};
use schlicht_core::criteria::{
    make_criterion, sup_ratio, CriterionKind, CriterionParams, CriterionReport,
};
use schlicht_core::extensions::{
    boundary_trace, build_extension, BuildOptions, ExtensionTag, PlaneExtension,
};
use schlicht_core::maps::{AnnulusGrid, DiskGrid, HarmonicMap, MapForm, Subject};
use schlicht_core::Complex64;

use crate::output::{write_json, Csv, CsvField};
use crate::spec::{self, pair, MapSpec, RunConfig, WeightSpec};

pub struct CheckInvocation {
    pub map_path: PathBuf,
    pub weight: Option<String>,
    pub criterion: String,
    pub k: f64,
    pub lambda: Option<Complex64>,
    pub alpha: Option<Complex64>,
    pub c: Option<Complex64>,
    pub grid: Option<String>,
    pub out: PathBuf,
}

pub struct BuildInvocation {
    pub map_path: PathBuf,
    pub weight: Option<String>,
    pub tag: String,
    pub k: f64,
    pub lambda: Option<Complex64>,
    pub alpha: Option<Complex64>,
    pub grid: Option<String>,
    pub out: PathBuf,
    /// extend: optional boundary-trace CSV path
    pub trace_out: Option<PathBuf>,
    /// beltrami: certification JSON path (defaults beside `out`)
    pub cert_out: Option<PathBuf>,
    /// render: circle count
    pub circles: usize,
    /// render/extend: samples per curve
    pub samples: usize,
}

fn parse_grid(flag: &Option<String>, default: (usize, usize)) -> Result<(usize, usize)> {
    match flag {
        Some(text) => spec::parse_grid_flag(text),
        None => Ok(default),
    }
}

fn disk_grid(shape: (usize, usize)) -> Result<DiskGrid> {
    DiskGrid::try_polar(shape.0, shape.1, DiskGrid::DEFAULT_EXCLUSION)
        .map_err(|e| anyhow::anyhow!("invalid grid: {e}"))
}

/// Subject selection shared by analytic criteria and analytic extensions.
fn analytic_subject(map: &HarmonicMap, what: &str) -> Result<Subject> {
    if !map.is_analytic_map() {
        bail!("{what} applies to analytic maps; the map has a nonzero co-analytic part");
    }
    Ok(Subject::Analytic(map.h().clone()))
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckParamsOut {
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<[f64; 2]>,
    lambda: [f64; 2],
    target_k: f64,
}

#[derive(Serialize)]
struct GridOut {
    radii: usize,
    angles: usize,
}

#[derive(Serialize)]
struct CheckOutput {
    config: RunConfig,
    criterion: &'static str,
    params: CheckParamsOut,
    k_hat: f64,
    witness: [f64; 2],
    grid: GridOut,
    refinement: Vec<(usize, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_sup: Option<f64>,
    excluded_points: usize,
    pass: bool,
}

pub fn cmd_check(inv: &CheckInvocation) -> Result<bool> {
    let map_spec = spec::load_map_spec(&inv.map_path)?;
    let map = spec::build_map(&map_spec, inv.lambda, inv.alpha)?;
    let kind = CriterionKind::from_name(&inv.criterion)
        .with_context(|| format!("unknown criterion `{}`", inv.criterion))?;
    let subject = if kind.is_harmonic() {
        Subject::Harmonic(map.clone())
    } else {
        analytic_subject(&map, kind.name())?
    };
    let weight_spec = inv.weight.as_deref().map(spec::load_weight_spec).transpose()?;
    let weight = match &weight_spec {
        Some(ws) => Some(spec::build_weight(ws, &subject)?),
        None => None,
    };
    let shape = parse_grid(&inv.grid, (128, 512))?;
    let grid = disk_grid(shape)?;
    let criterion = make_criterion(
        kind,
        &subject,
        weight.as_ref(),
        CriterionParams { c: inv.c },
    )
    .map_err(|e| anyhow::anyhow!("cannot build criterion: {e}"))?;
    let report = sup_ratio(&criterion, &grid, inv.k)
        .map_err(|e| anyhow::anyhow!("criterion sweep failed: {e}"))?;

    let config = RunConfig {
        command: "check".into(),
        map: map_spec,
        weight: weight_spec,
        criterion: Some(inv.criterion.clone()),
        k: Some(inv.k),
        lambda: Some(pair(map.lambda())),
        alpha: inv.alpha.map(pair),
        c: inv.c.map(pair),
        grid: inv.grid.clone(),
        circles: None,
        samples: None,
        out: inv.out.display().to_string(),
    };
    write_json(&inv.out, &check_output(config, &report, map.lambda(), inv.k))?;
    Ok(report.pass)
}

fn check_output(
    config: RunConfig,
    report: &CriterionReport,
    lambda: Complex64,
    target_k: f64,
) -> CheckOutput {
    CheckOutput {
        config,
        criterion: report.criterion.name(),
        params: CheckParamsOut { c: report.c.map(pair), lambda: pair(lambda), target_k },
        k_hat: report.k_hat,
        witness: pair(report.witness),
        grid: GridOut { radii: report.grid_radii, angles: report.grid_angles },
        refinement: report.refinement.clone(),
        omega_sup: report.omega_sup,
        excluded_points: report.excluded_points,
        pass: report.pass,
    }
}

// ---------------------------------------------------------------------------
// shared extension construction
// ---------------------------------------------------------------------------

struct BuiltExtension {
    ext: PlaneExtension,
    map_spec: MapSpec,
    weight_spec: Option<WeightSpec>,
    lambda: Complex64,
}

fn build_from_invocation(inv: &BuildInvocation) -> Result<BuiltExtension> {
    let map_spec = spec::load_map_spec(&inv.map_path)?;
    let map = spec::build_map(&map_spec, inv.lambda, inv.alpha)?;
    let tag = ExtensionTag::from_name(&inv.tag)
        .with_context(|| format!("unknown extension tag `{}`", inv.tag))?;
    let subject = match tag {
        ExtensionTag::Ahlfors | ExtensionTag::AhlforsWeill => {
            analytic_subject(&map, tag.name())?
        }
        ExtensionTag::Teichmuller => {
            if !matches!(map.form(), MapForm::Teichmuller { .. }) {
                bail!("teichmuller extension needs a map in teichmuller form");
            }
            Subject::Harmonic(map.clone())
        }
        ExtensionTag::HarmonicLambda => Subject::Harmonic(map.clone()),
    };
    let weight_spec = inv.weight.as_deref().map(spec::load_weight_spec).transpose()?;
    let weight = match &weight_spec {
        Some(ws) => Some(spec::build_weight(ws, &subject)?),
        None => None,
    };
    let options = BuildOptions { target_k: inv.k, ..BuildOptions::default() };
    let ext = build_extension(tag, &subject, weight.as_ref(), None, &options)
        .map_err(|e| anyhow::anyhow!("cannot build extension: {e}"))?;
    if !ext.is_certified() {
        eprintln!(
            "warning: criterion `{}` fails (k_hat = {:.6}); output stamped non-certified",
            ext.certificate().criterion.name(),
            ext.certificate().report.k_hat
        );
    }
    Ok(BuiltExtension { ext, map_spec, weight_spec, lambda: map.lambda() })
}

fn run_config(inv: &BuildInvocation, command: &str, built: &BuiltExtension) -> RunConfig {
    RunConfig {
        command: command.into(),
        map: built.map_spec.clone(),
        weight: built.weight_spec.clone(),
        criterion: Some(inv.tag.clone()),
        k: Some(inv.k),
        lambda: Some(pair(built.lambda)),
        alpha: inv.alpha.map(pair),
        c: None,
        grid: inv.grid.clone(),
        circles: if command == "render" { Some(inv.circles) } else { None },
        samples: if command == "render" { Some(inv.samples) } else { None },
        out: inv.out.display().to_string(),
    }
}

// ---------------------------------------------------------------------------
// extend
// ---------------------------------------------------------------------------

pub fn cmd_extend(inv: &BuildInvocation) -> Result<bool> {
    let built = build_from_invocation(inv)?;
    let shape = parse_grid(&inv.grid, (64, 64))?;
    let interior = disk_grid(shape)?;
    let exterior = AnnulusGrid::geometric(shape.0, shape.1, 1.001, 4.0)
        .map_err(|e| anyhow::anyhow!("invalid grid: {e}"))?;

    let config = run_config(inv, "extend", &built);
    let certified = built.ext.is_certified();
    let mut csv = Csv::new(&config, Some(certified), "re_z,im_z,re_F,im_F,region")?;
    for z in interior.points() {
        let v = built.ext.interior().eval(z).map_err(|e| anyhow::anyhow!("interior: {e}"))?;
        csv.row(&[
            CsvField::Num(z.re),
            CsvField::Num(z.im),
            CsvField::Num(v.re),
            CsvField::Num(v.im),
            CsvField::Text("interior"),
        ]);
    }
    for z in exterior.points() {
        let v = built.ext.exterior().eval(z).map_err(|e| anyhow::anyhow!("exterior: {e}"))?;
        csv.row(&[
            CsvField::Num(z.re),
            CsvField::Num(z.im),
            CsvField::Num(v.re),
            CsvField::Num(v.im),
            CsvField::Text("exterior"),
        ]);
    }
    csv.write(&inv.out)?;

    if let Some(trace_path) = &inv.trace_out {
        write_trace(&built.ext, &config, certified, trace_path, inv.samples)?;
    }
    Ok(certified)
}

fn write_trace(
    ext: &PlaneExtension,
    config: &RunConfig,
    certified: bool,
    path: &Path,
    samples: usize,
) -> Result<()> {
    let trace = boundary_trace(ext, samples.max(16), 5e-3)
        .map_err(|e| anyhow::anyhow!("boundary trace: {e}"))?;
    let mut csv = Csv::new(config, Some(certified), "theta,re_in,im_in,re_out,im_out,gap")?;
    let n = trace.inner.len();
    for k in 0..n {
        let theta = std::f64::consts::TAU * k as f64 / n as f64;
        let (vi, vo) = (trace.inner[k], trace.outer[k]);
        csv.row(&[
            CsvField::Num(theta),
            CsvField::Num(vi.re),
            CsvField::Num(vi.im),
            CsvField::Num(vo.re),
            CsvField::Num(vo.im),
            CsvField::Num((vo - vi).norm()),
        ]);
    }
    csv.write(path)
}

// ---------------------------------------------------------------------------
// beltrami
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CertOutput {
    config: RunConfig,
    criterion_k_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega_sup: Option<f64>,
    sup_mu_interior: f64,
    sup_mu_exterior: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<f64>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    k_big: Option<f64>,
    certified: bool,
    quasiconformal: bool,
    witnesses: [[f64; 2]; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    non_qc_witness: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin_rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin_display: Option<f64>,
}

pub fn cmd_beltrami(inv: &BuildInvocation) -> Result<bool> {
    let built = build_from_invocation(inv)?;
    let shape = parse_grid(&inv.grid, (64, 64))?;
    let interior = disk_grid(shape)?;
    let exterior = AnnulusGrid::geometric(shape.0, shape.1, 1.001, 8.0)
        .map_err(|e| anyhow::anyhow!("invalid grid: {e}"))?;

    let inner = beltrami::measure_interior(&built.ext, &interior)
        .map_err(|e| anyhow::anyhow!("interior mu sweep: {e}"))?;
    let outer = beltrami::measure_exterior_fd(&built.ext, &exterior)
        .map_err(|e| anyhow::anyhow!("exterior mu sweep: {e}"))?;
    let report = beltrami::max_dilatation(&built.ext, &interior, &exterior)
        .map_err(|e| anyhow::anyhow!("certification: {e}"))?;

    let config = run_config(inv, "beltrami", &built);
    let mut csv = Csv::new(
        &config,
        Some(report.certified),
        "re_z,im_z,re_mu,im_mu,abs_mu,region",
    )?;
    for (grid, region) in [(&inner, "interior"), (&outer, "exterior")] {
        for (z, mu) in &grid.samples {
            csv.row(&[
                CsvField::Num(z.re),
                CsvField::Num(z.im),
                CsvField::Num(mu.re),
                CsvField::Num(mu.im),
                CsvField::Num(mu.norm()),
                CsvField::Text(region),
            ]);
        }
    }
    csv.write(&inv.out)?;

    let cert_path = match &inv.cert_out {
        Some(p) => p.clone(),
        None => inv.out.with_extension("cert.json"),
    };
    write_json(&cert_path, &cert_output(config, &built.ext, &report))?;
    Ok(report.certified)
}

fn cert_output(
    config: RunConfig,
    ext: &PlaneExtension,
    report: &CertificationReport,
) -> CertOutput {
    CertOutput {
        config,
        criterion_k_hat: ext.certificate().report.k_hat,
        omega_sup: ext.certificate().report.omega_sup,
        sup_mu_interior: report.sup_mu_interior,
        sup_mu_exterior: report.sup_mu_exterior,
        bound: report.bound,
        k_big: report.k_big,
        certified: report.certified,
        quasiconformal: report.quasiconformal,
        witnesses: [pair(report.witness_interior), pair(report.witness_exterior)],
        non_qc_witness: report.non_qc_witness.map(pair),
        margin_rho: report.margin_rho,
        margin_display: report.margin_display,
    }
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

pub fn cmd_render(inv: &BuildInvocation) -> Result<bool> {
    let built = build_from_invocation(inv)?;
    let config = run_config(inv, "render", &built);
    let svg = crate::svg::render(&built.ext, &config, inv.circles, inv.samples)?;
    std::fs::write(&inv.out, svg)
        .with_context(|| format!("cannot write {}", inv.out.display()))?;
    Ok(built.ext.is_certified())
}
