use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi_trace::asymptotics::RegimeRule;
use jacobi_trace::Partition;
use serde::Deserialize;

#[derive(Parser, Debug)]
#[command(name = "jacobi-trace", version, about = "Trace moments of the Hermitian matrix Jacobi process")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact E tr((J_{t/d})^n) from the closed-form moment formula.
    Compute(Options),
    /// Monte Carlo estimate of E tr((J_{t/d})^n).
    Simulate(Options),
    /// Formula against Monte Carlo with matched parameters; reports the z-score.
    Compare(Options),
    /// Moments of the stationary (t → ∞) distribution.
    Stationary(Options),
    /// Semigroup density G_t(λ) at one point.
    Density(Options),
    /// Large-m diagnostics and free Jacobi reference moments.
    Asymptotics(Options),
}

impl Command {
    pub fn options(&self) -> &Options {
        match self {
            Command::Compute(o)
            | Command::Simulate(o)
            | Command::Compare(o)
            | Command::Stationary(o)
            | Command::Density(o)
            | Command::Asymptotics(o) => o,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Unitary Brownian motion corner (primary oracle).
    Matrix,
    /// Euler scheme on the eigenvalue SDE.
    Sde,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Report {
    /// K/d, b·s_μ(1^m) and U_τ(1^m) against their limits.
    Lemma,
    /// The s = 0 scaling equivalences for μ ⊆ τ ⊆ α.
    Scaling,
    /// Free Jacobi moments M_n(t, 1, 1/2).
    Reference,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    Rounded,
    FloorCeil,
    ZeroS,
}

impl From<Rule> for RegimeRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::Rounded => RegimeRule::Rounded,
            Rule::FloorCeil => RegimeRule::FloorCeil,
            Rule::ZeroS => RegimeRule::ZeroS,
        }
    }
}

/// Flags shared by every subcommand. A `--config` file (TOML or JSON, same
/// keys as the long flags) supplies defaults; flags on the command line win.
#[derive(Args, Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// Rank of the projection P (number of eigenvalues).
    #[arg(long)]
    pub m: Option<u32>,
    /// Rank of the projection Q.
    #[arg(long)]
    pub p: Option<u32>,
    /// Matrix size.
    #[arg(long)]
    pub d: Option<u32>,
    /// Jacobi parameter r = p − m.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Jacobi parameter s = d − p − m.
    #[arg(long, allow_negative_numbers = true)]
    pub s: Option<f64>,
    /// Moment order(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<u32>,
    /// Time (the process is evaluated at t/d).
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Time grid for sweeps, comma separated.
    #[arg(long = "t-values", value_delimiter = ',', allow_negative_numbers = true)]
    pub t_values: Vec<f64>,
    /// Monte Carlo paths.
    #[arg(long)]
    pub paths: Option<u64>,
    /// Monte Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Time steps per path.
    #[arg(long)]
    pub steps: Option<u32>,
    /// Simulation method.
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Density evaluation point, comma separated and strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<f64>,
    /// Relative truncation tolerance for the density series.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Asymptotic report kind.
    #[arg(long, value_enum)]
    pub report: Option<Report>,
    /// Limiting ratio p/d.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Limiting ratio m/p.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Integer rule for (p(m), d(m)).
    #[arg(long, value_enum)]
    pub rule: Option<Rule>,
    /// Partition τ, e.g. "2,1" ("" for ∅).
    #[arg(long)]
    pub tau: Option<String>,
    /// Partition μ ⊆ τ.
    #[arg(long)]
    pub mu: Option<String>,
    /// Partition α ⊇ τ.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Values of m for the diagnostics, comma separated.
    #[arg(long = "m-values", value_delimiter = ',')]
    pub m_values: Vec<usize>,
    /// Output format.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// TOML or JSON file with default values for the flags above.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($cli:ident, $file:ident; opt: $($o:ident),*; vec: $($v:ident),*) => {{
        $( if $cli.$o.is_none() { $cli.$o = $file.$o; } )*
        $( if $cli.$v.is_empty() { $cli.$v = $file.$v; } )*
    }};
}

impl Options {
    /// Fills unset flags from `--config`.
    pub fn resolved(&self) -> Result<Options> {
        let mut out = self.clone();
        let Some(path) = &self.config else {
            return Ok(out);
        };
        let file = load_config(path)?;
        merge_fields!(out, file;
            opt: m, p, d, r, s, t, paths, seed, steps, method, eps, report, theta, eta, rule, tau, mu, alpha, format, output;
            vec: n, t_values, lambda, m_values);
        Ok(out)
    }

    pub fn orders(&self) -> Result<&[u32]> {
        if self.n.is_empty() {
            bail!("missing --n (moment order)");
        }
        Ok(&self.n)
    }

    /// `--t` and `--t-values` combined, in the order given.
    pub fn times(&self) -> Result<Vec<f64>> {
        let mut ts: Vec<f64> = self.t.into_iter().collect();
        ts.extend(&self.t_values);
        if ts.is_empty() {
            bail!("missing --t or --t-values");
        }
        Ok(ts)
    }

    pub fn single_time(&self) -> Result<f64> {
        match self.times()?.as_slice() {
            [t] => Ok(*t),
            _ => bail!("exactly one time expected here (use --t)"),
        }
    }
}

fn load_config(path: &Path) -> Result<Options> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let parsed = if is_json {
        serde_json::from_str(&text).with_context(|| format!("parsing JSON config {}", path.display()))?
    } else {
        toml::from_str(&text).with_context(|| format!("parsing TOML config {}", path.display()))?
    };
    Ok(parsed)
}

/// Parses "2,1", "(2,1)" or "" into a partition.
pub fn parse_partition(text: &str) -> Result<Partition> {
    let inner = text.trim().trim_start_matches('(').trim_end_matches(')').trim();
    if inner.is_empty() || inner == "∅" {
        return Ok(Partition::empty());
    }
    let parts = inner
        .split(',')
        .map(|p| p.trim().parse::<u32>().with_context(|| format!("bad partition part {p:?} in {text:?}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Partition::new(parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_parse() {
        assert_eq!(parse_partition("2,1").unwrap(), Partition::new(vec![2, 1]).unwrap());
        assert_eq!(parse_partition("(3)").unwrap(), Partition::new(vec![3]).unwrap());
        assert!(parse_partition("").unwrap().is_empty());
        assert!(parse_partition("1,2").is_err());
        assert!(parse_partition("a").is_err());
    }
}
