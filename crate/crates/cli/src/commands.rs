use std::fmt;

use anyhow::{anyhow, bail, Result};
use jacobi_trace::asymptotics::{
    free_jacobi_moment_ref, lemma_diagnostics, scaling_equivalences_report, AsymptoticRegime, RegimeRule, ReportRow,
};
use jacobi_trace::moments::{density_eval, moment_expansion, stationary_moment, MomentExpansion, MomentResult};
use jacobi_trace::simulate::{eigen_sde_euler, trace_moments_mc, PathEstimate, SimConfig};
use jacobi_trace::{ExactParams, FloatParams, Rational, Scalar};
use serde::Serialize;

use crate::args::{parse_partition, Command, Format, Method, Options, Report, Rule};

const DEFAULT_PATHS: u64 = 10_000;
const DEFAULT_STEPS: u32 = 2000;
const DEFAULT_EPS: f64 = 1e-12;
const DEFAULT_M_VALUES: [usize; 4] = [50, 100, 200, 400];

/// Rendered output of one command.
pub struct Artifact {
    pub text: String,
}

enum Params {
    Exact(ExactParams),
    Float(FloatParams),
}

impl Params {
    fn to_f64(&self) -> FloatParams {
        match self {
            Params::Exact(e) => e.to_f64(),
            Params::Float(f) => f.clone(),
        }
    }
}

struct Resolved {
    params: Params,
    /// `(d, p, m)` when the parameters come from integer dimensions.
    dims: Option<(u32, u32, u32)>,
}

fn exact_from(x: f64) -> Rational {
    jacobi_trace::scalar::rational_from_f64(x).expect("finite parameter")
}

/// Parameters from `--m` with either `--p --d` or `--r --s`; both given must agree.
fn resolve_params(o: &Options) -> Result<Resolved> {
    let m = o.m.ok_or_else(|| anyhow!("missing --m"))?;
    match (o.p, o.d) {
        (Some(p), Some(d)) => {
            let params = ExactParams::from_dimensions(d, p, m)?;
            let (r, s) = (p as f64 - m as f64, d as f64 - p as f64 - m as f64);
            if let Some(given) = o.r.filter(|&v| v != r) {
                bail!("conflicting parameters: --r {given} but p − m = {r}");
            }
            if let Some(given) = o.s.filter(|&v| v != s) {
                bail!("conflicting parameters: --s {given} but d − p − m = {s}");
            }
            Ok(Resolved { params: Params::Exact(params), dims: Some((d, p, m)) })
        }
        (None, None) => {
            let (Some(r), Some(s)) = (o.r, o.s) else {
                bail!("missing parameters: give --p and --d, or --r and --s");
            };
            if !(r.is_finite() && s.is_finite()) {
                bail!("--r and --s must be finite");
            }
            let m_usize = m as usize;
            if r.fract() == 0.0 && s.fract() == 0.0 {
                let params = ExactParams::new(exact_from(r), exact_from(s), m_usize)?;
                let dims = (r >= 0.0 && s >= 0.0).then(|| {
                    let (r, s) = (r as u32, s as u32);
                    (r + s + 2 * m, r + m, m)
                });
                Ok(Resolved { params: Params::Exact(params), dims })
            } else {
                Ok(Resolved { params: Params::Float(FloatParams::new(r, s, m_usize)?), dims: None })
            }
        }
        _ => bail!("--p and --d must be given together"),
    }
}

fn dims_of(r: &Resolved) -> Result<(u32, u32, u32)> {
    r.dims
        .ok_or_else(|| anyhow!("simulation needs integer dimensions: give --d --p --m, or integer r, s ≥ 0"))
}

fn render<T: Serialize>(format: Format, json: &T, rows: &[impl Serialize]) -> Result<Artifact> {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(json)? + "\n",
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row)?;
            }
            String::from_utf8(w.into_inner().map_err(|e| anyhow!("csv: {e}"))?)?
        }
    };
    Ok(Artifact { text })
}

/// One object for a single result, an array otherwise.
#[derive(Serialize)]
#[serde(untagged)]
enum OneOrMany<'a, T> {
    One(&'a T),
    Many(&'a [T]),
}

fn one_or_many<T>(items: &[T]) -> OneOrMany<'_, T> {
    match items {
        [one] => OneOrMany::One(one),
        many => OneOrMany::Many(many),
    }
}

fn sweep_format(o: &Options, results: usize) -> Format {
    o.format.unwrap_or(if results > 1 && !o.t_values.is_empty() { Format::Csv } else { Format::Json })
}

pub fn run(command: &Command) -> Result<Artifact> {
    let o = command.options().resolved()?;
    match command {
        Command::Compute(_) => compute(&o),
        Command::Simulate(_) => simulate(&o),
        Command::Compare(_) => compare(&o),
        Command::Stationary(_) => stationary(&o),
        Command::Density(_) => density(&o),
        Command::Asymptotics(_) => asymptotics(&o),
    }
}

/// Expansion evaluated on the exact or float path.
enum Expansion {
    Exact(MomentExpansion<Rational>),
    Float(MomentExpansion<f64>),
}

impl Expansion {
    fn new(params: &Params, n: u32) -> Result<Self> {
        Ok(match params {
            Params::Exact(e) => Expansion::Exact(moment_expansion(e, n)?),
            Params::Float(f) => Expansion::Float(moment_expansion(f, n)?),
        })
    }

    fn evaluate(&self, t: f64) -> Result<MomentResult> {
        Ok(match self {
            Expansion::Exact(e) => e.evaluate(t)?,
            Expansion::Float(e) => e.evaluate(t)?,
        })
    }

    fn stationary(&self) -> f64 {
        match self {
            Expansion::Exact(e) => e.stationary_part().as_f64(),
            Expansion::Float(e) => e.stationary_part(),
        }
    }
}

#[derive(Serialize)]
struct SweepRow {
    t: f64,
    n: u32,
    value: f64,
    stationary_gap: f64,
}

fn compute(o: &Options) -> Result<Artifact> {
    let resolved = resolve_params(o)?;
    let times = o.times()?;
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for &n in o.orders()? {
        let expansion = Expansion::new(&resolved.params, n)?;
        let stationary = expansion.stationary();
        for &t in &times {
            let res = expansion.evaluate(t)?;
            rows.push(SweepRow { t, n, value: res.value, stationary_gap: res.value - stationary });
            results.push(res);
        }
    }
    render(sweep_format(o, results.len()), &one_or_many(&results), &rows)
}

#[derive(Serialize)]
struct SimulationRecord {
    d: u32,
    p: u32,
    m: u32,
    t: f64,
    n: u32,
    steps: u32,
    paths: u64,
    seed: u64,
    method: &'static str,
    mean: f64,
    stderr: f64,
}

fn sim_config(o: &Options, resolved: &Resolved, t: f64) -> Result<SimConfig> {
    let (d, p, m) = dims_of(resolved)?;
    let config = SimConfig {
        d,
        p,
        m,
        t,
        steps: o.steps.unwrap_or(DEFAULT_STEPS),
        paths: o.paths.unwrap_or(DEFAULT_PATHS),
        seed: o.seed.unwrap_or(0),
    };
    config.validate()?;
    Ok(config)
}

fn estimates(o: &Options, config: &SimConfig, ns: &[u32]) -> Result<(Vec<PathEstimate>, &'static str)> {
    match o.method.unwrap_or(Method::Matrix) {
        Method::Matrix => Ok((trace_moments_mc(config, ns)?, "matrix")),
        Method::Sde => Ok((ns.iter().map(|&n| eigen_sde_euler(config, n)).collect::<Result<_, _>>()?, "sde")),
    }
}

fn simulate(o: &Options) -> Result<Artifact> {
    let resolved = resolve_params(o)?;
    let ns = o.orders()?;
    let mut records = Vec::new();
    for t in o.times()? {
        let config = sim_config(o, &resolved, t)?;
        let (ests, method) = estimates(o, &config, ns)?;
        for (&n, est) in ns.iter().zip(ests) {
            records.push(SimulationRecord {
                d: config.d,
                p: config.p,
                m: config.m,
                t,
                n,
                steps: config.steps,
                paths: est.paths,
                seed: config.seed,
                method,
                mean: est.mean,
                stderr: est.stderr,
            });
        }
    }
    render(sweep_format(o, records.len()), &one_or_many(&records), &records)
}

#[derive(Serialize)]
struct Comparison {
    d: u32,
    p: u32,
    m: u32,
    t: f64,
    n: u32,
    steps: u32,
    paths: u64,
    seed: u64,
    method: &'static str,
    formula: f64,
    mc_mean: f64,
    mc_stderr: f64,
    z_score: f64,
}

fn compare(o: &Options) -> Result<Artifact> {
    let resolved = resolve_params(o)?;
    let ns = o.orders()?;
    let expansions = ns.iter().map(|&n| Expansion::new(&resolved.params, n)).collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    for t in o.times()? {
        let config = sim_config(o, &resolved, t)?;
        let (ests, method) = estimates(o, &config, ns)?;
        for ((&n, est), expansion) in ns.iter().zip(ests).zip(&expansions) {
            let formula = expansion.evaluate(t)?.value;
            records.push(Comparison {
                d: config.d,
                p: config.p,
                m: config.m,
                t,
                n,
                steps: config.steps,
                paths: est.paths,
                seed: config.seed,
                method,
                formula,
                mc_mean: est.mean,
                mc_stderr: est.stderr,
                z_score: (formula - est.mean).abs() / est.stderr,
            });
        }
    }
    render(sweep_format(o, records.len()), &one_or_many(&records), &records)
}

#[derive(Serialize)]
struct StationaryRecord {
    n: u32,
    value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<String>,
}

fn stationary(o: &Options) -> Result<Artifact> {
    let resolved = resolve_params(o)?;
    let mut records = Vec::new();
    for &n in o.orders()? {
        if n == 0 {
            bail!("moment order n must be at least 1");
        }
        records.push(match &resolved.params {
            Params::Exact(e) => {
                let v = stationary_moment(e, n)?;
                StationaryRecord { n, value: v.as_f64(), exact: Some(v.to_string()) }
            }
            Params::Float(f) => StationaryRecord { n, value: stationary_moment(f, n)?, exact: None },
        });
    }
    render(o.format.unwrap_or(Format::Json), &one_or_many(&records), &records)
}

#[derive(Serialize)]
struct DensityRow {
    lambda: String,
    t: f64,
    value: f64,
    truncation_weight: u32,
    tail_estimate: f64,
}

fn density(o: &Options) -> Result<Artifact> {
    let params = resolve_params(o)?.params.to_f64();
    if o.lambda.is_empty() {
        bail!("missing --lambda (point λ_1 > … > λ_m)");
    }
    let t = o.single_time()?;
    let eval = density_eval(&params, &o.lambda, t, o.eps.unwrap_or(DEFAULT_EPS))?;
    let lambda = eval.lambda.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
    let row = DensityRow {
        lambda,
        t: eval.t,
        value: eval.value,
        truncation_weight: eval.truncation_weight,
        tail_estimate: eval.tail_estimate,
    };
    render(o.format.unwrap_or(Format::Json), &eval, &[row])
}

fn regime(o: &Options) -> Result<AsymptoticRegime> {
    let theta = o.theta.ok_or_else(|| anyhow!("missing --theta"))?;
    let regime = match (o.eta, o.rule) {
        (None, Some(Rule::ZeroS)) => AsymptoticRegime::zero_s(theta)?,
        (Some(eta), rule) => AsymptoticRegime::with_rule(theta, eta, rule.map_or(RegimeRule::Rounded, Into::into))?,
        (None, _) => bail!("missing --eta (only the zero-s rule derives η = (1−θ)/θ)"),
    };
    Ok(regime)
}

#[derive(Serialize)]
struct ReferenceRow {
    n: u32,
    t: f64,
    value: f64,
}

fn partition_flag(value: &Option<String>, flag: &str) -> Result<jacobi_trace::Partition> {
    parse_partition(value.as_deref().ok_or_else(|| anyhow!("missing --{flag}"))?)
}

fn asymptotics(o: &Options) -> Result<Artifact> {
    let format = o.format.unwrap_or(Format::Csv);
    let m_values: Vec<usize> = if o.m_values.is_empty() { DEFAULT_M_VALUES.to_vec() } else { o.m_values.clone() };
    let report = match o.report.unwrap_or(Report::Lemma) {
        Report::Lemma => lemma_diagnostics::<Rational>(&regime(o)?, &partition_flag(&o.tau, "tau")?, &m_values)?,
        Report::Scaling => {
            let regime = match (o.eta, o.rule) {
                (None, None) => AsymptoticRegime::zero_s(o.theta.ok_or_else(|| anyhow!("missing --theta"))?)?,
                _ => regime(o)?,
            };
            let tau = partition_flag(&o.tau, "tau")?;
            let mu = partition_flag(&o.mu, "mu")?;
            let alpha = partition_flag(&o.alpha, "alpha")?;
            scaling_equivalences_report(&regime, &tau, &mu, &alpha, &m_values)?
        }
        Report::Reference => {
            let mut rows = Vec::new();
            for &n in o.orders()? {
                for t in o.times()? {
                    rows.push(ReferenceRow { n, t, value: free_jacobi_moment_ref(n, t)? });
                }
            }
            return render(format, &rows, &rows);
        }
    };
    let rows: &[ReportRow] = &report.rows;
    render(format, &report, rows)
}

/// Exit status class of an error.
pub enum Failure {
    /// Invalid parameters or a violated precondition.
    Usage,
    /// A numerical guard tripped or I/O failed.
    Runtime,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Failure::Usage => "usage error",
            Failure::Runtime => "error",
        })
    }
}

pub fn classify(err: &anyhow::Error) -> Failure {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<jacobi_trace::Error>() {
            return match e {
                jacobi_trace::Error::Numerical(_) => Failure::Runtime,
                _ => Failure::Usage,
            };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() || cause.downcast_ref::<csv::Error>().is_some() {
            return Failure::Runtime;
        }
    }
    Failure::Usage
}
