use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use sharpconc_core::bergman::MeasureVariant;
use sharpconc_core::concentration::{default_s_grid, geometric_grid};
use sharpconc_core::ExactScalar;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{key}: {detail}")]
    Invalid { key: String, detail: String },
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config file line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
}

fn invalid(key: &str, detail: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        detail: detail.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Keys accepted in config files and as flag overrides.
pub const KEYS: &[&str] = &[
    "alpha",
    "n",
    "l_max",
    "k_max",
    "c_k_max",
    "s_grid",
    "tol",
    "functions",
    "variants",
    "r_list",
    "format",
];

/// Raw `key = value` settings; later sources override earlier ones.
#[derive(Debug, Clone, Default)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.into()));
        }
        self.0.insert(key.into(), value.into());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Parses a file of `key = value` lines; `#` starts a comment.
    pub fn load(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.into(),
            source,
        })?;
        self.parse_text(&text)
    }

    pub fn parse_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim().replace('-', "_").as_str(), v.trim())?;
        }
        Ok(())
    }
}

/// A named input function.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(into = "String")]
pub enum FunctionSpec {
    One,
    Monomial(usize),
    Kernel { re: f64, im: f64 },
}

impl From<FunctionSpec> for String {
    fn from(f: FunctionSpec) -> String {
        f.to_string()
    }
}

impl std::fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionSpec::One => write!(f, "one"),
            FunctionSpec::Monomial(k) => write!(f, "monomial:{k}"),
            FunctionSpec::Kernel { re, im } => {
                if *im < 0.0 {
                    write!(f, "kernel:{re}-{}i", -im)
                } else {
                    write!(f, "kernel:{re}+{im}i")
                }
            }
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s == "one" {
            return Ok(FunctionSpec::One);
        }
        if let Some(k) = s.strip_prefix("monomial:") {
            return k
                .parse()
                .map(FunctionSpec::Monomial)
                .map_err(|_| format!("bad monomial degree in {s:?}"));
        }
        if let Some(w) = s.strip_prefix("kernel:") {
            let (re, im) = parse_complex(w).ok_or_else(|| format!("bad kernel point in {s:?}"))?;
            if re * re + im * im >= 1.0 {
                return Err(format!("kernel point {w} is outside the unit disc"));
            }
            return Ok(FunctionSpec::Kernel { re, im });
        }
        Err(format!(
            "unknown function {s:?} (expected one, monomial:k or kernel:w)"
        ))
    }
}

/// `a`, `a+bi`, `a-bi` or `bi`.
fn parse_complex(s: &str) -> Option<(f64, f64)> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().ok().map(|re| (re, 0.0));
    };
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with(['e', 'E']))
        .map(|(i, _)| i)
        .last();
    match split {
        Some(i) => {
            let im = &body[i..];
            let im = if im == "+" || im == "-" {
                format!("{im}1")
            } else {
                im.to_string()
            };
            Some((body[..i].parse().ok()?, im.parse().ok()?))
        }
        None => Some((0.0, body.parse().ok()?)),
    }
}

/// The fully resolved configuration, echoed in every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub alpha: Vec<ExactScalar>,
    pub n: Vec<u32>,
    pub l_max: u64,
    pub k_max: u64,
    pub c_k_max: u64,
    pub s_grid: Vec<f64>,
    pub tol: f64,
    pub functions: Vec<FunctionSpec>,
    pub variants: Vec<MeasureVariant>,
    pub r_list: Vec<f64>,
    #[serde(skip)]
    pub format: Format,
}

/// Command-specific defaults before any override.
fn defaults(command: &str) -> Settings {
    let mut s = Settings::default();
    let pairs: &[(&str, &str)] = match command {
        "verify-exact" => &[
            ("alpha", "2,5/2,3,7/2,10"),
            ("n", "1..3"),
            ("l_max", "500"),
            ("k_max", "60"),
        ],
        "profile" => &[("alpha", "2"), ("n", "0"), ("functions", "one")],
        "fock" => &[("n", "0..4"), ("k_max", "25")],
        "lemma22" => &[("alpha", "2,5/2,7/2"), ("n", "0..6")],
        _ => &[],
    };
    for (k, v) in pairs {
        s.0.insert((*k).into(), (*v).into());
    }
    s
}

fn parse_list<T>(
    key: &str,
    text: &str,
    item: impl Fn(&str) -> Result<T, String>,
) -> Result<Vec<T>, ConfigError> {
    let out: Vec<T> = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| item(p).map_err(|e| invalid(key, e)))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err(invalid(key, "empty list"));
    }
    Ok(out)
}

/// `a..b` (inclusive) or a comma-separated list.
fn parse_orders(text: &str) -> Result<Vec<u32>, ConfigError> {
    if let Some((a, b)) = text.split_once("..") {
        let a: u32 = a
            .trim()
            .parse()
            .map_err(|_| invalid("n", format!("bad range {text:?}")))?;
        let b: u32 = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| invalid("n", format!("bad range {text:?}")))?;
        if b < a {
            return Err(invalid("n", format!("empty range {text:?}")));
        }
        return Ok((a..=b).collect());
    }
    let mut v = parse_list("n", text, |p| {
        p.parse::<u32>().map_err(|_| format!("not an order: {p:?}"))
    })?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// `geom:lo:hi:count` or an increasing comma-separated list.
fn parse_s_grid(text: &str) -> Result<Vec<f64>, ConfigError> {
    if let Some(rest) = text.strip_prefix("geom:") {
        let parts: Vec<&str> = rest.split(':').collect();
        let bad = || invalid("s_grid", format!("expected geom:lo:hi:count, got {text:?}"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi > lo && count >= 1) {
            return Err(bad());
        }
        return Ok(geometric_grid(lo, hi, count));
    }
    let v = parse_list("s_grid", text, |p| {
        p.parse::<f64>().map_err(|_| format!("not a number: {p:?}"))
    })?;
    if v.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(
            "s_grid",
            "values must be finite, nonnegative and strictly increasing",
        ));
    }
    Ok(v)
}

fn parse_u64(key: &str, text: &str) -> Result<u64, ConfigError> {
    text.trim()
        .parse()
        .map_err(|_| invalid(key, format!("not a nonnegative integer: {text:?}")))
}

impl RunConfig {
    /// Resolves defaults for `command`, then the config file settings, then
    /// flag overrides.
    pub fn resolve(command: &str, overrides: &Settings) -> Result<Self, ConfigError> {
        let mut s = defaults(command);
        for (k, v) in &overrides.0 {
            s.0.insert(k.clone(), v.clone());
        }
        let get = |k: &str| s.get(k);
        let alpha = match get("alpha") {
            Some(t) => parse_list("alpha", t, |p| {
                let a = ExactScalar::from_str(p).map_err(|e| e.to_string())?;
                if a <= 1 {
                    return Err(format!("weight parameter must exceed 1, got {a}"));
                }
                Ok(a)
            })?,
            None => vec![ExactScalar::from_integer(2)],
        };
        let mut alpha = alpha;
        alpha.sort();
        alpha.dedup();
        let n = get("n")
            .map(parse_orders)
            .transpose()?
            .unwrap_or_else(|| vec![1]);
        let tol = match get("tol") {
            Some(t) => {
                let v: f64 = t
                    .trim()
                    .parse()
                    .map_err(|_| invalid("tol", format!("not a number: {t:?}")))?;
                if !(v > 0.0 && v < 1.0) {
                    return Err(invalid("tol", "must lie in (0, 1)"));
                }
                v
            }
            None => 1e-8,
        };
        let functions = parse_list(
            "functions",
            get("functions").unwrap_or("one"),
            FunctionSpec::from_str,
        )?;
        let mut functions = functions;
        functions.sort_by_key(FunctionSpec::to_string);
        functions.dedup();
        let variants = parse_list("variants", get("variants").unwrap_or("mu"), |p| {
            MeasureVariant::from_str(p).map_err(|e| e.to_string())
        })?;
        let mut variants = variants;
        variants.sort_by_key(|v| v.name());
        variants.dedup();
        let r_list = parse_list("r_list", get("r_list").unwrap_or("100,1000,10000"), |p| {
            p.parse::<f64>().map_err(|_| format!("not a number: {p:?}"))
        })?;
        if r_list.windows(2).any(|w| w[1] <= w[0]) || r_list.iter().any(|r| !(*r > 1.0)) {
            return Err(invalid("r_list", "weights must exceed 1 and increase"));
        }
        let format = match get("format").unwrap_or("json") {
            "json" => Format::Json,
            "csv" => Format::Csv,
            other => {
                return Err(invalid(
                    "format",
                    format!("expected json or csv, got {other:?}"),
                ))
            }
        };
        Ok(Self {
            command: command.into(),
            alpha,
            n,
            l_max: get("l_max")
                .map(|t| parse_u64("l_max", t))
                .transpose()?
                .unwrap_or(500),
            k_max: get("k_max")
                .map(|t| parse_u64("k_max", t))
                .transpose()?
                .unwrap_or(60),
            c_k_max: get("c_k_max")
                .map(|t| parse_u64("c_k_max", t))
                .transpose()?
                .unwrap_or(10_000),
            s_grid: get("s_grid")
                .map(parse_s_grid)
                .transpose()?
                .unwrap_or_else(default_s_grid),
            tol,
            functions,
            variants,
            r_list,
            format,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn function_names() {
        assert_eq!("one".parse::<FunctionSpec>().unwrap(), FunctionSpec::One);
        assert_eq!(
            "monomial:3".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Monomial(3)
        );
        assert_eq!(
            "kernel:0.3+0.0i".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Kernel { re: 0.3, im: 0.0 }
        );
        assert_eq!(
            "kernel:0.1-0.2i".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Kernel { re: 0.1, im: -0.2 }
        );
        assert_eq!(
            "kernel:0.5".parse::<FunctionSpec>().unwrap(),
            FunctionSpec::Kernel { re: 0.5, im: 0.0 }
        );
        assert!("kernel:1.2".parse::<FunctionSpec>().is_err());
        assert!("cosine".parse::<FunctionSpec>().is_err());
        let k = FunctionSpec::Kernel { re: 0.1, im: -0.2 };
        assert_eq!(k.to_string().parse::<FunctionSpec>().unwrap(), k);
    }

    #[test]
    fn ranges_and_grids() {
        assert_eq!(parse_orders("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_orders("3,1,1").unwrap(), vec![1, 3]);
        assert!(parse_orders("3..1").is_err());
        assert_eq!(parse_s_grid("geom:0.1:10:3").unwrap().len(), 3);
        assert!(parse_s_grid("1,0.5").is_err());
    }

    #[test]
    fn overrides_win_over_defaults() {
        let mut s = Settings::default();
        s.parse_text("# comment\nalpha = 5/2, 3\nl-max = 20\n")
            .unwrap();
        let c = RunConfig::resolve("verify-exact", &s).unwrap();
        assert_eq!(
            c.alpha,
            vec![ExactScalar::ratio(5, 2), ExactScalar::from_integer(3)]
        );
        assert_eq!(c.l_max, 20);
        assert_eq!(c.n, vec![1, 2, 3]);
    }

    #[test]
    fn lists_are_sorted_and_deduplicated() {
        let mut s = Settings::default();
        s.set("alpha", "3, 5/2, 3").unwrap();
        s.set("variants", "nu,mu").unwrap();
        s.set("functions", "monomial:2,one,monomial:2").unwrap();
        let c = RunConfig::resolve("profile", &s).unwrap();
        assert_eq!(
            c.alpha,
            vec![ExactScalar::ratio(5, 2), ExactScalar::from_integer(3)]
        );
        assert_eq!(c.variants, vec![MeasureVariant::Mu, MeasureVariant::Nu]);
        assert_eq!(
            c.functions,
            vec![FunctionSpec::Monomial(2), FunctionSpec::One]
        );
    }

    #[test]
    fn bad_values_are_rejected() {
        let mut s = Settings::default();
        s.set("alpha", "abc").unwrap();
        assert!(RunConfig::resolve("verify-exact", &s).is_err());
        let mut s = Settings::default();
        s.set("alpha", "1").unwrap();
        assert!(RunConfig::resolve("profile", &s).is_err());
        assert!(Settings::default().set("colour", "red").is_err());
        assert!(Settings::default().parse_text("just words").is_err());
    }
}
