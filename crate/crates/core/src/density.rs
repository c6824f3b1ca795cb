//! Truncated semigroup density of the eigenvalue process started at `1^m`:
//! `G_t(λ) = Σ_τ e^{−K_τ t/d} P_τ(1^m) P_τ(λ) W(λ)`, summed over all
//! partitions by weight shell.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::moments::k_eigenvalue;
use crate::oracle::vandermonde;
use crate::partitions::Partition;
use crate::scalar::rational_from_f64;
use crate::symjacobi::{p_tau_at_ones, JacobiParams, MIN_GAP};

/// Hard cap on the partition weight explored by the adaptive series.
pub const MAX_WEIGHT: u32 = 256;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEvaluation {
    pub lambda: Vec<f64>,
    pub t: f64,
    pub value: f64,
    pub truncation_weight: u32,
    pub tail_estimate: f64,
}

/// `P_τ(1^m)`, exact up to the final square root when `r, s` are integers.
fn p_at_ones(params: &JacobiParams<f64>, tau: &Partition) -> Result<f64> {
    let (r, s) = (*params.r(), *params.s());
    if r.fract() == 0.0 && s.fract() == 0.0 {
        let exact = JacobiParams::new(
            rational_from_f64(r).expect("finite"),
            rational_from_f64(s).expect("finite"),
            params.m(),
        )?;
        p_tau_at_ones(&exact, tau)
    } else {
        p_tau_at_ones(params, tau)
    }
}

fn shell(params: &JacobiParams<f64>, t: f64, w: u32) -> Result<Vec<(Partition, f64)>> {
    let d = params.d();
    Partition::all_of_weight(w, params.m())
        .into_iter()
        .map(|tau| {
            let c = (-k_eigenvalue(params, &tau) * t / d).exp() * p_at_ones(params, &tau)?;
            Ok((tau, c))
        })
        .collect()
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("density needs finite t > 0, got {t}")));
    }
    Ok(())
}

/// A fixed truncation of the series with precomputed `e^{−K_τ t/d} P_τ(1^m)`.
#[derive(Clone, Debug)]
pub struct DensitySeries {
    params: JacobiParams<f64>,
    t: f64,
    max_weight: u32,
    terms: Vec<(Partition, f64)>,
    inv_norms: Vec<f64>,
}

impl DensitySeries {
    /// All partitions with `|τ| ≤ max_weight` and `l(τ) ≤ m`.
    pub fn new(params: &JacobiParams<f64>, t: f64, max_weight: u32) -> Result<Self> {
        check_time(t)?;
        let mut terms = Vec::new();
        for w in 0..=max_weight {
            terms.extend(shell(params, t, w)?);
        }
        Self::assemble(params, t, max_weight, terms)
    }

    /// Truncates once two consecutive shells have `L²(W)` mass below `eps`
    /// relative to the running total.
    pub fn adaptive(params: &JacobiParams<f64>, t: f64, eps: f64) -> Result<Self> {
        check_time(t)?;
        let mut terms = Vec::new();
        let mut total = 0.0;
        let mut quiet = 0;
        for w in 0..=MAX_WEIGHT {
            let sh = shell(params, t, w)?;
            let mass: f64 = sh.iter().map(|(_, c)| c * c).sum();
            total += mass;
            terms.extend(sh);
            quiet = if w > 0 && mass < eps * total { quiet + 1 } else { 0 };
            if quiet == 2 {
                return Self::assemble(params, t, w, terms);
            }
        }
        Err(Error::Numerical(format!("density series not converged by weight {MAX_WEIGHT}")))
    }

    fn assemble(params: &JacobiParams<f64>, t: f64, max_weight: u32, terms: Vec<(Partition, f64)>) -> Result<Self> {
        let j = params.jacobi1d();
        let top = max_weight + params.m() as u32;
        let inv_norms = (0..=top).map(|n| j.norm_sq(n).map(|v| 1.0 / v.sqrt())).collect::<Result<_>>()?;
        Ok(DensitySeries { params: params.clone(), t, max_weight, terms, inv_norms })
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn terms(&self) -> &[(Partition, f64)] {
        &self.terms
    }

    fn orthonormal_table(&self, lambda: &[f64]) -> Vec<Vec<f64>> {
        let j = self.params.jacobi1d();
        let top = self.inv_norms.len() as u32 - 1;
        lambda
            .iter()
            .map(|&x| {
                j.eval_all(top, x)
                    .into_iter()
                    .zip(&self.inv_norms)
                    .map(|(v, c)| v * c)
                    .collect()
            })
            .collect()
    }

    /// `Σ_τ c_τ det[P_{τ_i+m−i}(λ_j)]`, i.e. `G_t / (V · Π λ^r(1−λ)^s)`. Finite on the diagonal.
    pub fn alternant(&self, lambda: &[f64]) -> f64 {
        let m = self.params.m();
        let table = self.orthonormal_table(lambda);
        self.terms
            .iter()
            .map(|(tau, c)| {
                let degrees = self.params.degrees(tau);
                c * linalg::lu_determinant(m, linalg::square_from_fn(m, |i, col| table[col][degrees[i] as usize]))
            })
            .sum()
    }

    /// `G_t(λ)`.
    pub fn eval(&self, lambda: &[f64]) -> f64 {
        let v = vandermonde(lambda);
        self.alternant(lambda) * v * one_dim_weight(&self.params, lambda)
    }
}

fn one_dim_weight(params: &JacobiParams<f64>, lambda: &[f64]) -> f64 {
    lambda.iter().map(|&x| x.powf(*params.r()) * (1.0 - x).powf(*params.s())).product()
}

/// `G_t(λ)` at an ordered interior point, truncated adaptively by shell.
///
/// Stops when two consecutive weight shells each change the running sum by
/// less than `eps` relative.
pub fn density_eval(params: &JacobiParams<f64>, lambda: &[f64], t: f64, eps: f64) -> Result<DensityEvaluation> {
    check_time(t)?;
    let m = params.m();
    if lambda.len() != m {
        return Err(Error::domain(format!("point has {} coordinates, m = {m}", lambda.len())));
    }
    if lambda.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
        return Err(Error::domain("density needs 0 < λ_i < 1"));
    }
    if lambda.windows(2).any(|w| w[0] - w[1] <= MIN_GAP) {
        return Err(Error::domain("density needs strictly decreasing λ_1 > … > λ_m"));
    }
    let j = params.jacobi1d();
    let top = MAX_WEIGHT + m as u32;
    let inv_norms: Vec<f64> = (0..=top).map(|n| j.norm_sq(n).map(|v| 1.0 / v.sqrt())).collect::<Result<_>>()?;
    let table: Vec<Vec<f64>> = lambda
        .iter()
        .map(|&x| j.eval_all(top, x).into_iter().zip(&inv_norms).map(|(v, c)| v * c).collect())
        .collect();
    let scale = vandermonde(lambda) * one_dim_weight(params, lambda);
    let mut value = 0.0;
    let mut quiet = 0;
    for w in 0..=MAX_WEIGHT {
        let mut contribution = 0.0;
        for (tau, c) in shell(params, t, w)? {
            let degrees = params.degrees(&tau);
            let det = linalg::lu_determinant(m, linalg::square_from_fn(m, |i, col| table[col][degrees[i] as usize]));
            contribution += c * det;
        }
        contribution *= scale;
        value += contribution;
        quiet = if w > 0 && contribution.abs() < eps * value.abs() { quiet + 1 } else { 0 };
        if quiet == 2 {
            return Ok(DensityEvaluation {
                lambda: lambda.to_vec(),
                t,
                value,
                truncation_weight: w,
                tail_estimate: contribution.abs(),
            });
        }
    }
    Err(Error::Numerical(format!("density series not converged by weight {MAX_WEIGHT}")))
}
