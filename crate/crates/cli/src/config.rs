//! Flat `key = value` config files and the list syntaxes shared with flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
        let key = key.trim().replace('-', "_");
        if key.is_empty() {
            bail!("line {}: empty key", i + 1);
        }
        if out.insert(key.clone(), value.trim().to_owned()).is_some() {
            bail!("line {}: duplicate key `{key}`", i + 1);
        }
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

/// Comma-separated items, each either a single value or an inclusive
/// `start:stop:step` range.
pub fn parse_real_list(s: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_real(v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_real(a)?, parse_real(b)?, parse_real(step)?);
                if step <= 0.0 || b < a {
                    bail!("range `{item}` needs start <= stop and a positive step");
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|k| a + k as f64 * step));
            }
            _ => bail!("`{item}` is neither a number nor start:stop:step"),
        }
    }
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out)
}

pub fn parse_int_list(s: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [v] => out.push(parse_positive(v)?),
            [a, b, step] => {
                let (a, b, step) = (parse_positive(a)?, parse_positive(b)?, parse_positive(step)?);
                if b < a {
                    bail!("range `{item}` needs start <= stop");
                }
                out.extend((a..=b).step_by(step as usize));
            }
            _ => bail!("`{item}` is neither an integer nor start:stop:step"),
        }
    }
    if out.is_empty() {
        bail!("empty list");
    }
    Ok(out)
}

fn parse_real(s: &str) -> Result<f64> {
    let v: f64 = s.trim().parse().with_context(|| format!("`{s}` is not a number"))?;
    if !v.is_finite() {
        bail!("`{s}` is not finite");
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<u32> {
    let v: u32 = s
        .trim()
        .parse()
        .with_context(|| format!("`{s}` is not a positive integer"))?;
    if v == 0 {
        bail!("`{s}` is not a positive integer");
    }
    Ok(v)
}

/// `M=10,N=200,gamma=0.01,eta=0` (keys case-insensitive; noise defaults to 0).
pub fn parse_device(s: &str) -> Result<(u32, u32, f64, f64)> {
    let (mut m, mut n, mut gamma, mut eta) = (None, None, 0.0, 0.0);
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| anyhow!("device setting `{item}` is not key=value"))?;
        match k.trim().to_ascii_lowercase().as_str() {
            "m" => m = Some(parse_positive(v)?),
            "n" => n = Some(parse_positive(v)?),
            "gamma" => gamma = parse_real(v)?,
            "eta" => eta = parse_real(v)?,
            other => bail!("unknown device setting `{other}`"),
        }
    }
    match (m, n) {
        (Some(m), Some(n)) => Ok((m, n, gamma, eta)),
        _ => bail!("device needs both M and N"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let c = parse_config("# sweep\nm = 10, 20\n\nratios=5 # inline\ngamma-grid = 0:0.1:0.02\n").unwrap();
        assert_eq!(c["m"], "10, 20");
        assert_eq!(c["ratios"], "5");
        assert_eq!(c["gamma_grid"], "0:0.1:0.02");
        assert!(parse_config("m 10").is_err());
        assert!(parse_config("m=1\nm=2").is_err());
    }

    #[test]
    fn ranges_are_inclusive() {
        let g = parse_real_list("0:0.1:0.02").unwrap();
        assert_eq!(g.len(), 6);
        assert!((g[5] - 0.1).abs() < 1e-15);
        assert_eq!(parse_int_list("10:50:10, 7").unwrap(), vec![10, 20, 30, 40, 50, 7]);
        assert!(parse_int_list("0").is_err());
        assert!(parse_real_list("").is_err());
        assert!(parse_real_list("nan").is_err());
    }

    #[test]
    fn device_spec() {
        assert_eq!(parse_device("M=10,N=200,gamma=0.01").unwrap(), (10, 200, 0.01, 0.0));
        assert!(parse_device("M=10").is_err());
        assert!(parse_device("M=10,N=2,zeta=1").is_err());
    }
}
