//! Key = value configuration files.
//!
//! Grammar (see docs/config.md): one `key = value` per line, `#` starts a
//! comment, blank lines ignored. Keys are the long option names of the
//! invoked subcommand (or the globals), without the leading dashes. A key
//! with no `= value` enables a boolean flag. Values from the file
//! override values given on the command line.

use anyhow::{bail, Context, Result};
use std::path::Path;

/// Parse a config file into extra argv tokens appended after the original
/// command line; for single-value options the later occurrence wins, which
/// is what makes the file override the flags.
pub fn config_to_argv(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut argv = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                let key = key.trim();
                let value = value.trim();
                if key.is_empty() || value.is_empty() {
                    bail!("config line {}: expected `key = value`, got `{}`", lineno + 1, raw);
                }
                argv.push(format!("--{}", key));
                argv.push(value.to_string());
            }
            None => {
                // bare key: boolean flag
                if !line.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                    bail!("config line {}: bad key `{}`", lineno + 1, line);
                }
                argv.push(format!("--{}", line));
            }
        }
    }
    Ok(argv)
}

/// Parse "100000" or "1e5"-style counts.
pub fn parse_count(s: &str) -> Result<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = s.parse().with_context(|| format!("cannot parse `{}` as a count", s))?;
    if !f.is_finite() || f < 0.0 || f > 9e15 || f.fract() != 0.0 {
        bail!("`{}` is not a nonnegative integer count", s);
    }
    Ok(f as u64)
}

/// Comma-separated counts.
pub fn parse_count_list(s: &str) -> Result<Vec<u64>> {
    s.split(',').map(parse_count).collect()
}

/// Comma-separated f64 values (plain decimals allowed here; these are
/// measurement parameters, not boundary-exact exponents).
pub fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().with_context(|| format!("cannot parse `{}`", t)))
        .collect()
}

/// A rational exponent "a/b" (or integer) as f64, for phase parameters.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let r = pslab_core::exactmath::parse_rational(s)
        .map_err(|e| anyhow::anyhow!("bad exponent `{}`: {}", s, e))?;
    use num_traits::ToPrimitive;
    r.to_f64().context("exponent out of f64 range")
}
