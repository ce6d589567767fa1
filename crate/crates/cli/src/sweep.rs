use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use cfqc_core::gate_model::{finite_map, AtomPhotonInput, CfGateParams, NoiseParams};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::config::{parse_int_list, parse_real_list};

pub const CSV_HEADER: &str = "m,n,gamma,eta,efficiency,fidelity";

/// Inner cycle counts, either as multiples of M or given outright.
#[derive(Debug, Clone, PartialEq)]
pub enum InnerSpec {
    Ratios(Vec<f64>),
    Counts(Vec<u32>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub m_values: Vec<u32>,
    pub inner: InnerSpec,
    pub gamma_grid: Vec<f64>,
    pub eta_grid: Vec<f64>,
    pub atom_input: AtomPhotonInput,
    pub output_path: Option<PathBuf>,
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub m: u32,
    pub n: u32,
    pub gamma: f64,
    pub eta: f64,
    pub efficiency: f64,
    pub fidelity: f64,
}

impl SweepConfig {
    /// Builds a config from merged settings (flags already layered over the
    /// config file). Recognized keys: `m`, `ratios`, `n`, `gamma`, `eta`,
    /// `atom_g`, `atom_e`, `output`, `jobs`.
    pub fn from_settings(s: &BTreeMap<String, String>) -> Result<Self> {
        const KNOWN: [&str; 9] = ["m", "ratios", "n", "gamma", "eta", "atom_g", "atom_e", "output", "jobs"];
        if let Some(k) = s.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            bail!("unknown sweep setting `{k}`");
        }
        let get = |k: &str| s.get(k).map(String::as_str);
        let m_values = parse_int_list(get("m").ok_or_else(|| anyhow!("missing `m`"))?).context("m")?;
        let inner = match (get("ratios"), get("n")) {
            (Some(r), None) => InnerSpec::Ratios(parse_real_list(r).context("ratios")?),
            (None, Some(n)) => InnerSpec::Counts(parse_int_list(n).context("n")?),
            (None, None) => bail!("give either `ratios` or `n`"),
            (Some(_), Some(_)) => bail!("`ratios` and `n` are mutually exclusive"),
        };
        if let InnerSpec::Ratios(r) = &inner {
            if let Some(bad) = r.iter().find(|&&x| x <= 0.0) {
                bail!("ratio {bad} is not positive");
            }
        }
        let grid = |k: &str| -> Result<Vec<f64>> {
            let g = parse_real_list(get(k).unwrap_or("0")).context(k.to_owned())?;
            if let Some(bad) = g.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                bail!("{k} value {bad} is outside [0, 1]");
            }
            Ok(g)
        };
        let amp = |k: &str| -> Result<Complex64> {
            match get(k) {
                None => Ok(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)),
                Some(v) => Complex64::from_str(v).map_err(|_| anyhow!("{k}: `{v}` is not a complex number")),
            }
        };
        let atom_input = AtomPhotonInput::new(amp("atom_g")?, amp("atom_e")?)?;
        let jobs = match get("jobs") {
            None => None,
            Some(j) => match j.parse::<usize>() {
                Ok(j) if j > 0 => Some(j),
                _ => bail!("jobs: `{j}` is not a positive integer"),
            },
        };
        Ok(Self {
            m_values,
            inner,
            gamma_grid: grid("gamma")?,
            eta_grid: grid("eta")?,
            atom_input,
            output_path: get("output").map(PathBuf::from),
            jobs,
        })
    }

    /// Grid points `(m, n, gamma, eta)` in nested, as-given order.
    pub fn points(&self) -> Result<Vec<(u32, u32, f64, f64)>> {
        let mut out = Vec::new();
        for &m in &self.m_values {
            let ns: Vec<u32> = match &self.inner {
                InnerSpec::Counts(ns) => ns.clone(),
                InnerSpec::Ratios(rs) => rs
                    .iter()
                    .map(|r| {
                        let n = (r * f64::from(m)).round();
                        if n < 1.0 || n > f64::from(u32::MAX) {
                            bail!("ratio {r} at M={m} gives no valid N");
                        }
                        Ok(n as u32)
                    })
                    .collect::<Result<_>>()?,
            };
            for n in ns {
                for &g in &self.gamma_grid {
                    for &e in &self.eta_grid {
                        out.push((m, n, g, e));
                    }
                }
            }
        }
        Ok(out)
    }
}

pub fn evaluate(input: &AtomPhotonInput, m: u32, n: u32, gamma: f64, eta: f64) -> Result<SweepRow> {
    let o = finite_map(input, &CfGateParams::new(m, n)?, &NoiseParams::new(gamma, eta)?)?;
    Ok(SweepRow {
        m,
        n,
        gamma,
        eta,
        efficiency: o.efficiency,
        fidelity: o.fidelity,
    })
}

/// Evaluates the grid on up to `jobs` threads; rows keep grid order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let points = cfg.points()?;
    let work = || -> Result<Vec<SweepRow>> {
        points
            .par_iter()
            .map(|&(m, n, g, e)| evaluate(&cfg.atom_input, m, n, g, e))
            .collect()
    };
    match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new().num_threads(j).build()?.install(work),
        None => work(),
    }
}

pub fn to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.m, r.n, r.gamma, r.eta, r.efficiency, r.fidelity
        );
    }
    out
}
