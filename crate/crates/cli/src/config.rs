//! Flat `key = value` run configuration with flag overrides.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use coulomb2d::basis::Symmetry;
use coulomb2d::eigensolver::SolveRequest;
use coulomb2d::hamiltonian::{Mass, SystemParams};
use coulomb2d::Complex64;

use crate::CliError;

/// Every recognised key with its default. `None` means the key has no
/// default and is only meaningful when set.
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("system", Some("helium-infinite")),
    ("m1", None),
    ("m2", None),
    ("m3", None),
    ("q1", None),
    ("q2", None),
    ("q3", None),
    ("ml", Some("0")),
    ("symmetry", Some("singlet")),
    ("nbase", Some("40")),
    ("alpha", Some("0.4")),
    ("theta", Some("0")),
    ("theta2", None),
    ("epsilon", Some("1")),
    ("field", Some("0")),
    ("reflection", Some("1")),
    ("shift", Some("-12")),
    ("shift_im", Some("0")),
    ("k", Some("4")),
    ("tol", Some("1e-8")),
    ("seed", Some("1")),
    ("max_iter", Some("400")),
    ("optimize_alpha", Some("false")),
    ("alpha_lo", Some("0.2")),
    ("alpha_hi", Some("0.7")),
    ("eps_points", Some("-0.0001,0,0.0001")),
    ("match_tol", Some("1e-6")),
    ("count", Some("5")),
    ("format", Some("json")),
    ("output", None),
];

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_").to_ascii_lowercase()
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected key = value", no + 1)))?;
        let key = normalize(k);
        if !known(&key) {
            return Err(CliError::Validation(format!("config line {}: unknown key {key:?}", no + 1)));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Defaults, then the config file, then flags.
pub fn resolve(
    file: BTreeMap<String, String>,
    flags: impl IntoIterator<Item = (&'static str, Option<String>)>,
) -> BTreeMap<String, String> {
    let mut map: BTreeMap<String, String> = KEYS
        .iter()
        .filter_map(|(k, d)| d.map(|d| (k.to_string(), d.to_string())))
        .collect();
    map.extend(file);
    for (k, v) in flags {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    }
    map
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Validated run parameters.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: SystemParams,
    pub ml: i64,
    pub symmetry: Symmetry,
    pub n_base: u32,
    pub alpha: f64,
    pub theta: f64,
    pub theta2: Option<f64>,
    pub epsilon: f64,
    pub field: f64,
    pub reflection: i8,
    pub request: SolveRequest,
    pub optimize_alpha: bool,
    pub alpha_bracket: (f64, f64),
    pub eps_points: Vec<f64>,
    pub match_tol: f64,
    pub count: usize,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// The resolved key-value map, embedded in every artifact.
    pub resolved: BTreeMap<String, String>,
}

fn get<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<T, CliError>
where
    T::Err: Display,
{
    let raw = map.get(key).ok_or_else(|| CliError::Validation(format!("missing value for {key}")))?;
    raw.parse().map_err(|e| CliError::Validation(format!("{key} = {raw:?}: {e}")))
}

fn opt<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>, CliError>
where
    T::Err: Display,
{
    match map.get(key) {
        None => Ok(None),
        Some(_) => get(map, key).map(Some),
    }
}

fn finite(key: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Validation(format!("{key} must be finite")))
    }
}

fn system(map: &BTreeMap<String, String>) -> Result<SystemParams, CliError> {
    let name = map.get("system").map(String::as_str).unwrap_or("helium-infinite");
    let base = match name {
        "helium-infinite" => SystemParams::helium_infinite(),
        "hminus-infinite" => SystemParams::hminus_infinite(),
        "custom" => SystemParams { m1: 1.0, m2: 1.0, m3: Mass::Infinite, q1: -1.0, q2: -1.0, q3: 2.0 },
        other => {
            return Err(CliError::Validation(format!(
                "system {other:?}: expected helium-infinite, hminus-infinite or custom"
            )))
        }
    };
    let custom = ["m1", "m2", "m3", "q1", "q2", "q3"].iter().any(|k| map.contains_key(*k));
    if custom && name != "custom" {
        return Err(CliError::Validation("masses and charges require system = custom".into()));
    }
    let m3 = match map.get("m3").map(String::as_str) {
        None | Some("inf") | Some("infinite") => base.m3,
        Some(_) => Mass::Finite(get(map, "m3")?),
    };
    let p = SystemParams {
        m1: opt(map, "m1")?.unwrap_or(base.m1),
        m2: opt(map, "m2")?.unwrap_or(base.m2),
        m3,
        q1: opt(map, "q1")?.unwrap_or(base.q1),
        q2: opt(map, "q2")?.unwrap_or(base.q2),
        q3: opt(map, "q3")?.unwrap_or(base.q3),
    };
    p.validate()?;
    if !p.identical_pair() {
        return Err(CliError::Validation("particles 1 and 2 must share mass and charge".into()));
    }
    Ok(p)
}

fn float_list(key: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .map_err(|e| CliError::Validation(format!("{key}: {s:?}: {e}")))
                .and_then(|x| finite(key, x))
        })
        .collect()
}

impl RunConfig {
    pub fn from_map(resolved: BTreeMap<String, String>) -> Result<Self, CliError> {
        let map = &resolved;
        let params = system(map)?;
        let n_base: u32 = get(map, "nbase")?;
        if n_base == 0 {
            return Err(CliError::Validation("nbase must be at least 1".into()));
        }
        let alpha = finite("alpha", get(map, "alpha")?)?;
        if alpha <= 0.0 {
            return Err(CliError::Validation("alpha must be positive".into()));
        }
        let check_theta = |key: &str, t: f64| {
            if t.is_finite() && (0.0..std::f64::consts::FRAC_PI_2).contains(&t) {
                Ok(t)
            } else {
                Err(CliError::Validation(format!("{key} must lie in [0, pi/2)")))
            }
        };
        let theta = check_theta("theta", get(map, "theta")?)?;
        let theta2 = opt::<f64>(map, "theta2")?.map(|t| check_theta("theta2", t)).transpose()?;
        let reflection: i8 = get(map, "reflection")?;
        if reflection != 1 && reflection != -1 {
            return Err(CliError::Validation("reflection must be 1 or -1".into()));
        }
        let shift = Complex64::new(finite("shift", get(map, "shift")?)?, finite("shift_im", get(map, "shift_im")?)?);
        let request = SolveRequest {
            shift,
            k: get(map, "k")?,
            tol: get(map, "tol")?,
            max_iter: get(map, "max_iter")?,
            seed: get(map, "seed")?,
        };
        request.validate()?;
        if request.tol >= 1.0 {
            return Err(CliError::Validation("tol must be below 1".into()));
        }
        let alpha_bracket = (get::<f64>(map, "alpha_lo")?, get::<f64>(map, "alpha_hi")?);
        if !(alpha_bracket.0 > 0.0 && alpha_bracket.1 > alpha_bracket.0 && alpha_bracket.1.is_finite()) {
            return Err(CliError::Validation("alpha bracket must satisfy 0 < alpha_lo < alpha_hi".into()));
        }
        let eps_points = float_list("eps_points", &get::<String>(map, "eps_points")?)?;
        let match_tol = finite("match_tol", get(map, "match_tol")?)?;
        if match_tol <= 0.0 {
            return Err(CliError::Validation("match_tol must be positive".into()));
        }
        let format = match get::<String>(map, "format")?.as_str() {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => return Err(CliError::Validation(format!("format {other:?}: expected json or csv"))),
        };
        Ok(Self {
            params,
            ml: get(map, "ml")?,
            symmetry: get::<String>(map, "symmetry")?.parse()?,
            n_base,
            alpha,
            theta,
            theta2,
            epsilon: finite("epsilon", get(map, "epsilon")?)?,
            field: finite("field", get(map, "field")?)?,
            reflection,
            request,
            optimize_alpha: get(map, "optimize_alpha")?,
            alpha_bracket,
            eps_points,
            match_tol,
            count: get(map, "count")?,
            format,
            output: opt::<String>(map, "output")?.map(PathBuf::from),
            resolved,
        })
    }
}
