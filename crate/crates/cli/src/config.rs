//! Ensemble, query and simulation settings from a TOML document with
//! `[ensemble]`, `[query]` and `[simulation]` sections, overridable by flags.

use std::str::FromStr;

use rmt_gaps::{EnsembleSpec, Family, JacobiRoute, SamplingMethod};
use serde::Deserialize;

use crate::error::{CliError, Result};

/// Parses a real number written as a decimal, an exact rational `p/q`, or
/// `inf` / `-inf`. Rationals are divided once at the end, so "1/3" is the
/// correctly rounded double nearest to one third.
pub fn parse_real(text: &str) -> Result<f64> {
    let t = text.trim();
    let bad = || CliError::validation(format!("cannot parse '{text}' as a number"));
    match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => return Ok(f64::INFINITY),
        "-inf" | "-infinity" => return Ok(f64::NEG_INFINITY),
        _ => {}
    }
    if let Some((p, q)) = t.split_once('/') {
        let (p, q) = (p.trim(), q.trim());
        let num = p.parse::<i64>().map(|v| v as f64).or_else(|_| p.parse::<f64>()).map_err(|_| bad())?;
        let den = q.parse::<i64>().map(|v| v as f64).or_else(|_| q.parse::<f64>()).map_err(|_| bad())?;
        if den == 0.0 || !num.is_finite() || !den.is_finite() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    t.parse::<f64>().map_err(|_| bad())
}

/// Comma-separated list of reals.
pub fn parse_real_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').filter(|p| !p.trim().is_empty()).map(parse_real).collect()
}

/// A TOML scalar that may be written as a number or as a string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Real {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Real {
    pub fn value(&self) -> Result<f64> {
        match self {
            Real::Int(i) => Ok(*i as f64),
            Real::Float(f) => Ok(*f),
            Real::Text(s) => parse_real(s),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RealList {
    Text(String),
    Items(Vec<Real>),
}

impl RealList {
    pub fn values(&self) -> Result<Vec<f64>> {
        match self {
            RealList::Text(s) => parse_real_list(s),
            RealList::Items(v) => v.iter().map(Real::value).collect(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    pub family: Option<String>,
    pub correlated: Option<bool>,
    pub n: Option<usize>,
    pub sigma: Option<RealList>,
    pub alpha: Option<Real>,
    pub beta: Option<Real>,
    pub kappa: Option<Real>,
    pub jacobi_route: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySection {
    pub r: Option<Real>,
    pub s: Option<Real>,
    pub x: Option<RealList>,
    pub from: Option<Real>,
    pub to: Option<Real>,
    pub points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSection {
    pub realizations: Option<usize>,
    pub seed: Option<u64>,
    pub method: Option<String>,
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub query: QuerySection,
    #[serde(default)]
    pub simulation: SimulationSection,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::validation(format!("invalid config: {e}")))
    }
}

/// Ensemble parameters given as flags; `None` means "not given".
#[derive(Debug, Clone, Default)]
pub struct EnsembleOverrides {
    pub family: Option<String>,
    pub correlated: Option<bool>,
    pub n: Option<usize>,
    pub sigma: Option<String>,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub kappa: Option<String>,
    pub jacobi_route: Option<String>,
}

fn opt_real(flag: &Option<String>, file: &Option<Real>) -> Result<Option<f64>> {
    match (flag, file) {
        (Some(t), _) => parse_real(t).map(Some),
        (None, Some(r)) => r.value().map(Some),
        (None, None) => Ok(None),
    }
}

pub fn parse_method(text: &str) -> Result<SamplingMethod> {
    match text.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "auto" => Ok(SamplingMethod::Auto),
        "direct" => Ok(SamplingMethod::Direct),
        "log-gas" | "loggas" => Ok(SamplingMethod::LogGas),
        other => Err(CliError::validation(format!("unknown sampling method '{other}' (auto, direct, log-gas)"))),
    }
}

fn parse_route(text: &str) -> Result<JacobiRoute> {
    match text.trim().to_ascii_lowercase().replace('_', "-").as_str() {
        "auto" => Ok(JacobiRoute::Auto),
        "appell" => Ok(JacobiRoute::Appell),
        "cauchy-map" => Ok(JacobiRoute::CauchyMap),
        other => Err(CliError::validation(format!("unknown Jacobi route '{other}' (auto, appell, cauchy-map)"))),
    }
}

/// Builds a validated spec from the `[ensemble]` section with flag
/// overrides applied on top.
pub fn parse_spec(file: &EnsembleSection, flags: &EnsembleOverrides) -> Result<EnsembleSpec> {
    let family_text = flags
        .family
        .clone()
        .or_else(|| file.family.clone())
        .ok_or_else(|| CliError::validation("missing required parameter: family"))?;
    let family = Family::from_str(&family_text)?;
    let sigma = match (&flags.sigma, &file.sigma) {
        (Some(t), _) => Some(parse_real_list(t)?),
        (None, Some(l)) => Some(l.values()?),
        (None, None) => None,
    };
    let correlated = flags.correlated.or(file.correlated).unwrap_or(sigma.is_some());
    let n = flags.n.or(file.n);
    let n = match (n, &sigma) {
        (Some(n), _) => n,
        (None, Some(s)) if correlated => s.len(),
        _ => return Err(CliError::validation("missing required parameter: n")),
    };
    let sigma = match (correlated, sigma) {
        (true, None) => return Err(CliError::validation("missing required parameter: sigma (correlated ensemble)")),
        (_, s) => s.unwrap_or_default(),
    };
    let alpha = opt_real(&flags.alpha, &file.alpha)?;
    let beta = opt_real(&flags.beta, &file.beta)?;
    let kappa = opt_real(&flags.kappa, &file.kappa)?;
    let needs_kappa = matches!(family, Family::CauchyLorentzI | Family::CauchyLorentzII)
        || (family == Family::JacobiManova && correlated);
    if needs_kappa && kappa.is_none() {
        return Err(CliError::validation(format!("missing required parameter: kappa ({family})")));
    }
    let route = match flags.jacobi_route.as_ref().or(file.jacobi_route.as_ref()) {
        Some(t) => parse_route(t)?,
        None => JacobiRoute::Auto,
    };
    let spec = EnsembleSpec {
        family,
        correlated,
        n,
        sigma,
        alpha: alpha.unwrap_or(0.0),
        beta: beta.unwrap_or(0.0),
        kappa: kappa.unwrap_or(0.0),
        jacobi_route: route,
    };
    spec.validated()?;
    Ok(spec)
}

/// Renders a spec as an `[ensemble]` section that [`parse_spec`] reads back
/// to the identical spec (floats use the shortest round-trip form).
pub fn spec_to_toml(spec: &EnsembleSpec) -> String {
    let mut out = String::from("[ensemble]\n");
    out += &format!("family = \"{}\"\n", spec.family);
    out += &format!("correlated = {}\n", spec.correlated);
    out += &format!("n = {}\n", spec.n);
    if spec.correlated {
        let items: Vec<String> = spec.sigma.iter().map(|v| format!("\"{v:?}\"")).collect();
        out += &format!("sigma = [{}]\n", items.join(", "));
    }
    for (name, v) in [("alpha", spec.alpha), ("beta", spec.beta), ("kappa", spec.kappa)] {
        if v != 0.0 {
            out += &format!("{name} = \"{v:?}\"\n");
        }
    }
    match spec.jacobi_route {
        JacobiRoute::Auto => {}
        JacobiRoute::Appell => out += "jacobi_route = \"appell\"\n",
        JacobiRoute::CauchyMap => out += "jacobi_route = \"cauchy-map\"\n",
    }
    out
}
