//! Run configuration: line-based `key = value` files merged with flags.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use awlab_core::qcore::Precision;
use awlab_core::suite::SuiteConfig;

pub const PRECISION_ENV: &str = "AWLAB_PRECISION";

/// Keys accepted in a run configuration file.
pub const RUN_KEYS: [&str; 10] = ["q", "N", "N1", "N2", "alpha0", "alpha1", "alpha2", "tol", "precision", "out"];

/// One `key = value` line.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {} = {}", self.line, self.key, self.value)
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped;
/// keys outside `allowed` and repeated keys are errors.
pub fn parse_entries(text: &str, allowed: &[&str]) -> Result<Vec<Entry>> {
    let mut out: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| anyhow!("line {line}: expected `key = value`, got `{body}`"))?;
        let (key, value) = (key.trim(), value.trim());
        if !allowed.contains(&key) {
            bail!("line {line}: unknown key `{key}` (allowed: {})", allowed.join(", "));
        }
        if value.is_empty() {
            bail!("line {line}: key `{key}` has no value");
        }
        if let Some(prev) = out.iter().find(|e| e.key == key) {
            bail!("line {line}: key `{key}` already set on line {}", prev.line);
        }
        out.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(out)
}

pub fn parse_value<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<T> {
    e.value
        .parse()
        .map_err(|_| anyhow!("line {}: `{}` must be {what}, got `{}`", e.line, e.key, e.value))
}

/// Values given on the command line; `None` means not given.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub q: Option<f64>,
    pub n: Option<usize>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub alpha: [Option<f64>; 3],
    pub tol: Option<f64>,
    pub precision: Option<Precision>,
    pub out: Option<PathBuf>,
    pub corrupt: Option<f64>,
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub suite: SuiteConfig,
    pub precision: Precision,
    pub out: Option<PathBuf>,
}

fn file_overrides(path: &Path) -> Result<Overrides> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut o = Overrides::default();
    for e in parse_entries(&text, &RUN_KEYS).with_context(|| format!("in config {}", path.display()))? {
        match e.key.as_str() {
            "q" => o.q = Some(parse_value(&e, "a real number")?),
            "N" => o.n = Some(parse_value(&e, "a non-negative integer")?),
            "N1" => o.n1 = Some(parse_value(&e, "a non-negative integer")?),
            "N2" => o.n2 = Some(parse_value(&e, "a non-negative integer")?),
            "alpha0" => o.alpha[0] = Some(parse_value(&e, "a real number")?),
            "alpha1" => o.alpha[1] = Some(parse_value(&e, "a real number")?),
            "alpha2" => o.alpha[2] = Some(parse_value(&e, "a real number")?),
            "tol" => o.tol = Some(parse_value(&e, "a positive real number")?),
            "precision" => o.precision = Some(e.value.parse().map_err(|err| anyhow!("line {}: {err}", e.line))?),
            "out" => o.out = Some(PathBuf::from(&e.value)),
            _ => unreachable!("key list checked by parse_entries"),
        }
    }
    Ok(o)
}

/// Precision from the environment, which overrides flags and files.
pub fn env_precision() -> Result<Option<Precision>> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            Ok(Some(v.parse().map_err(|e| anyhow!("{PRECISION_ENV}: {e}"))?))
        }
        Ok(_) | Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(anyhow!("{PRECISION_ENV}: {e}")),
    }
}

/// Defaults, then the config file, then flags, then `AWLAB_PRECISION`.
pub fn resolve(config: Option<&Path>, flags: &Overrides) -> Result<RunConfig> {
    let file = match config {
        Some(p) => file_overrides(p)?,
        None => Overrides::default(),
    };
    let d = SuiteConfig::default();
    let pick = |a: [Option<f64>; 3], b: [Option<f64>; 3], i: usize| a[i].or(b[i]).unwrap_or(d.alpha[i]);
    let suite = SuiteConfig {
        q: flags.q.or(file.q).unwrap_or(d.q),
        n: flags.n.or(file.n).unwrap_or(d.n),
        n1: flags.n1.or(file.n1).unwrap_or(d.n1),
        n2: flags.n2.or(file.n2).unwrap_or(d.n2),
        alpha: [0, 1, 2].map(|i| pick(flags.alpha, file.alpha, i)),
        tol: flags.tol.or(file.tol),
        corrupt: flags.corrupt,
    };
    let precision = env_precision()?.or(flags.precision).or(file.precision).unwrap_or(Precision::Double);
    Ok(RunConfig { suite, precision, out: flags.out.clone().or(file.out) })
}
