//! JSON input formats and the run configuration embedded in every output.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use schlicht_core::cxexpr::ComplexExpr;
use schlicht_core::maps::{DiskGrid, HarmonicMap, Subject};
use schlicht_core::weights::SigmaWeight;
use schlicht_core::Complex64;

/// A harmonic map as given on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapSpec {
    /// Analytic part, expression in `z`.
    pub h: String,
    /// Co-analytic part (hg form only), defaults to `0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    /// Family parameter `[re, im]`, defaults to `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    /// `"hg"` (default) or `"teichmuller"`.
    #[serde(default = "default_form")]
    pub form: String,
    /// Teichmüller parameter `[re, im]` (teichmuller form only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<[f64; 2]>,
}

fn default_form() -> String {
    "hg".into()
}

/// Weight selection, matching the JSON wire format.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Becker,
    AhlforsC { c: [f64; 2] },
    AhlforsWeill,
    SchwarzianV { v: String },
    SchwarzianC { c: [f64; 2] },
    Custom {
        sigma: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_z: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sigma_zbar: Option<String>,
    },
}

pub fn cx(pair: [f64; 2]) -> Complex64 {
    Complex64::new(pair[0], pair[1])
}

pub fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Parses `re,im` (or a bare real) from a flag value.
pub fn parse_complex_flag(text: &str) -> Result<Complex64> {
    let mut parts = text.split(',');
    let re: f64 = parts
        .next()
        .unwrap_or_default()
        .trim()
        .parse()
        .with_context(|| format!("invalid complex flag `{text}`"))?;
    let im: f64 = match parts.next() {
        Some(s) => s.trim().parse().with_context(|| format!("invalid complex flag `{text}`"))?,
        None => 0.0,
    };
    if parts.next().is_some() {
        bail!("invalid complex flag `{text}`: expected `re,im`");
    }
    Ok(Complex64::new(re, im))
}

/// Parses `RxA` into (radial, angular).
pub fn parse_grid_flag(text: &str) -> Result<(usize, usize)> {
    let (r, a) = text
        .split_once(['x', 'X'])
        .with_context(|| format!("invalid grid `{text}`: expected `RxA`"))?;
    let radial: usize = r.trim().parse().with_context(|| format!("invalid grid `{text}`"))?;
    let angular: usize = a.trim().parse().with_context(|| format!("invalid grid `{text}`"))?;
    Ok((radial, angular))
}

/// Reads a map spec from disk.
pub fn load_map_spec(path: &std::path::Path) -> Result<MapSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read map file {}", path.display()))?;
    let spec: MapSpec =
        serde_json::from_str(&text).with_context(|| format!("invalid map JSON in {}", path.display()))?;
    Ok(spec)
}

/// Reads a weight spec from a path or inline JSON.
pub fn load_weight_spec(arg: &str) -> Result<WeightSpec> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).with_context(|| format!("cannot read weight file {arg}"))?
    };
    let spec: WeightSpec = serde_json::from_str(&text).context("invalid weight JSON")?;
    Ok(spec)
}

/// Builds the harmonic map from its spec, applying flag overrides, and runs
/// the sense-preservation check on the default grid.
pub fn build_map(
    spec: &MapSpec,
    lambda_override: Option<Complex64>,
    alpha_override: Option<Complex64>,
) -> Result<HarmonicMap> {
    let h = ComplexExpr::parse(&spec.h)
        .map_err(|e| anyhow::anyhow!("map field h: {e}"))?;
    let map = match spec.form.as_str() {
        "hg" => {
            let g_text = spec.g.clone().unwrap_or_else(|| "0".into());
            let g = ComplexExpr::parse(&g_text)
                .map_err(|e| anyhow::anyhow!("map field g: {e}"))?;
            let lambda = lambda_override
                .or_else(|| spec.lambda.map(cx))
                .unwrap_or(Complex64::new(1.0, 0.0));
            HarmonicMap::new(h, g, lambda).map_err(|e| anyhow::anyhow!("invalid map: {e}"))?
        }
        "teichmuller" => {
            let alpha = alpha_override
                .or_else(|| spec.alpha.map(cx))
                .context("teichmuller form needs alpha")?;
            HarmonicMap::teichmuller(h, alpha)
                .map_err(|e| anyhow::anyhow!("invalid map: {e}"))?
        }
        other => bail!("unknown map form `{other}` (expected `hg` or `teichmuller`)"),
    };
    if !map.is_analytic_map() {
        map.check_sense_preserving(&DiskGrid::polar(128, 512))
            .map_err(|e| anyhow::anyhow!("map is not sense-preserving: {e}"))?;
    }
    Ok(map)
}

/// Builds the weight named by a spec against the subject it will weight.
pub fn build_weight(spec: &WeightSpec, subject: &Subject) -> Result<SigmaWeight> {
    let weight = match spec {
        WeightSpec::Becker => SigmaWeight::becker(),
        WeightSpec::AhlforsC { c } => SigmaWeight::ahlfors_c(cx(*c)),
        WeightSpec::AhlforsWeill => SigmaWeight::ahlfors_weill(subject)
            .map_err(|e| anyhow::anyhow!("ahlfors_weill weight: {e}"))?,
        WeightSpec::SchwarzianV { v } => {
            let v = ComplexExpr::parse(v).map_err(|e| anyhow::anyhow!("weight field v: {e}"))?;
            SigmaWeight::schwarzian_v(v, subject)
                .map_err(|e| anyhow::anyhow!("schwarzian_v weight: {e}"))?
        }
        WeightSpec::SchwarzianC { c } => SigmaWeight::schwarzian_c(cx(*c), subject)
            .map_err(|e| anyhow::anyhow!("schwarzian_c weight: {e}"))?,
        WeightSpec::Custom { sigma, sigma_z, sigma_zbar } => {
            let parse = |name: &str, text: &str| {
                ComplexExpr::parse(text).map_err(|e| anyhow::anyhow!("weight field {name}: {e}"))
            };
            let sigma = parse("sigma", sigma)?;
            let sigma_z = sigma_z.as_deref().map(|t| parse("sigma_z", t)).transpose()?;
            let sigma_zbar = sigma_zbar.as_deref().map(|t| parse("sigma_zbar", t)).transpose()?;
            SigmaWeight::custom(sigma, sigma_z, sigma_zbar)
                .map_err(|e| anyhow::anyhow!("custom weight rejected: {e}"))?
        }
    };
    Ok(weight)
}

/// Everything needed to reproduce a run; embedded in every output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub map: MapSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circles: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    pub out: String,
}
