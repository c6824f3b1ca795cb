//! Closed-form moments `E tr((J_{t/d})^n)` of the Hermitian matrix Jacobi
//! process started at `I_m`, the stationary (Jacobi unitary ensemble) moments,
//! and the truncated semigroup density of the eigenvalue process.
//!
//! The moment is a finite sum over `k < n`, hooks `τ ⊆ α(n,k)` and hooks
//! `μ ⊆ τ`. Every coefficient except `e^{−K_τ t/d}` is computed in the scalar
//! type of the parameters, so integer `(r, s)` on [`BigRational`](num_rational::BigRational)
//! gives an exact expansion and only the exponentials are floating.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::partitions::{hooks_alpha, schur_at_ones, subhooks, Partition};
use crate::scalar::{beta_fn, neg_one_pow, rising, Scalar};
use crate::symjacobi::{norm_sq_product, u_at_ones, u_tau_coefficients, v_tilde, JacobiParams};

/// One `(k, τ, μ)` summand of the moment formula at a given time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentTerm {
    pub k: u32,
    pub tau: Partition,
    pub mu: Partition,
    pub contribution: f64,
}

/// `E tr((J_{t/d})^n)` with its per-term ledger.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentResult {
    pub n: u32,
    pub t: f64,
    pub value: f64,
    pub terms: Vec<MomentTerm>,
}

/// Time-independent part of a `(k, τ, μ)` summand.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionTerm<T> {
    pub k: u32,
    pub tau: Partition,
    pub mu: Partition,
    pub coefficient: T,
    /// `K_τ / d`
    pub rate: T,
}

/// The moment as `Σ coefficient · e^{−rate·t}`, before choosing `t`.
#[derive(Clone, Debug)]
pub struct MomentExpansion<T> {
    pub n: u32,
    pub terms: Vec<ExpansionTerm<T>>,
}

impl<T: Scalar> MomentExpansion<T> {
    /// Coefficients summed per `τ` (first-appearance order), with their rates.
    pub fn grouped(&self) -> Vec<(Partition, T, T)> {
        let mut out: Vec<(Partition, T, T)> = Vec::new();
        for term in &self.terms {
            match out.iter_mut().find(|(tau, _, _)| *tau == term.tau) {
                Some(entry) => entry.2 = entry.2.clone() + term.coefficient.clone(),
                None => out.push((term.tau.clone(), term.rate.clone(), term.coefficient.clone())),
            }
        }
        out
    }

    /// Value at `t = 0`, in the scalar type.
    pub fn at_zero(&self) -> T {
        self.terms.iter().fold(T::zero(), |acc, term| acc + term.coefficient.clone())
    }

    /// Value of the `τ = ∅` group, i.e. the `t → ∞` limit.
    pub fn stationary_part(&self) -> T {
        self.terms
            .iter()
            .filter(|term| term.tau.is_empty())
            .fold(T::zero(), |acc, term| acc + term.coefficient.clone())
    }

    pub fn evaluate(&self, t: f64) -> Result<MomentResult> {
        check_time(t)?;
        let decay = |rate: &T| (-rate.as_f64() * t).exp();
        let value = self
            .grouped()
            .iter()
            .map(|(_, rate, coef)| coef.as_f64() * decay(rate))
            .sum();
        let terms = self
            .terms
            .iter()
            .map(|term| MomentTerm {
                k: term.k,
                tau: term.tau.clone(),
                mu: term.mu.clone(),
                contribution: term.coefficient.as_f64() * decay(&term.rate),
            })
            .collect();
        Ok(MomentResult { n: self.n, t, value, terms })
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be finite and ≥ 0, got {t}")));
    }
    Ok(())
}

fn check_order<T: Scalar>(params: &JacobiParams<T>, n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("moment order n must be at least 1"));
    }
    if params.m() < n as usize {
        return Err(Error::precondition(format!("m > n required (n = m is also accepted), got m={}, n={n}", params.m())));
    }
    Ok(())
}

/// `K_τ = Σ_i τ_i (τ_i + r + s + 1 + 2(m − i))`.
pub fn k_eigenvalue<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> T {
    let m = params.m();
    let rs1 = params.r().clone() + params.s().clone() + T::one();
    tau.parts().iter().take(m).enumerate().fold(T::zero(), |acc, (i, &t)| {
        let ti = T::from_int(t as i64);
        acc + ti.clone() * (ti + rs1.clone() + T::from_int(2 * (m - 1 - i) as i64))
    })
}

/// `a_τ = {V(τ̃) Π_{i<j} 1/((r+j−i)i) Π_i p_{N_i}(0)/‖p_{N_i}‖}²`, `N_i = τ_i + m − i`.
pub fn a_coeff<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> Result<T> {
    params.check_length(tau)?;
    let m = params.m();
    let mut root = v_tilde(params, tau);
    for i in 1..=m {
        for j in i + 1..=m {
            root = root / ((params.r().clone() + T::from_int((j - i) as i64)) * T::from_int(i as i64));
        }
    }
    let j1 = params.jacobi1d();
    for n in params.degrees(tau) {
        root = root * j1.at_zero(n);
    }
    Ok(root.clone() * root / norm_sq_product(params, tau)?)
}

/// `b_{μ,τ} = (−1)^{|μ|} binom(τ,μ) C_μ^τ(r+s+2m) / ((r+m)_μ s_μ(1^m))`; `b_{∅,τ} = 1`.
pub fn b_coeff<T: Scalar>(params: &JacobiParams<T>, mu: &Partition, tau: &Partition) -> Result<T> {
    if !mu.is_contained_in(tau) {
        return Err(Error::domain(format!("{mu} ⊄ {tau}")));
    }
    if mu.length() > params.m() {
        return Err(Error::domain(format!("l({mu}) > m = {}", params.m())));
    }
    let coef = u_tau_coefficients(params, tau)?
        .into_iter()
        .find(|(nu, _)| nu == mu)
        .map(|(_, c)| c)
        .ok_or_else(|| Error::domain(format!("{mu} is not a hook inside {tau}")))?;
    Ok(coef / schur_at_ones::<T>(mu, params.m()))
}

/// `det[β(α_i + μ_j + 2m − i − j + r + 1, s + 1)]`.
pub fn beta_determinant<T: Scalar>(params: &JacobiParams<T>, alpha: &Partition, mu: &Partition) -> Result<T> {
    params.check_length(alpha)?;
    params.check_length(mu)?;
    let m = params.m();
    let (a, u) = (alpha.padded(m), mu.padded(m));
    let s1 = params.s().clone() + T::one();
    let mut entries = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            let first = T::from_int(a[i] as i64 + u[j] as i64 + 2 * m as i64 - i as i64 - j as i64 - 1)
                + params.r().clone();
            entries.push(beta_fn(&first, &s1)?);
        }
    }
    Ok(linalg::det(m, entries))
}

/// Cauchy product form of [`beta_determinant`] for `s = 0`:
/// `Π_{i<j}(α_i−α_j+j−i)(μ_i−μ_j+j−i) / Π_{i,j}(α_i+μ_j+2m−i−j+r+1)`.
pub fn cauchy_determinant_path<T: Scalar>(params: &JacobiParams<T>, alpha: &Partition, mu: &Partition) -> Result<T> {
    if !params.s().is_zero() {
        return Err(Error::domain(format!("Cauchy path needs s = 0, got s={:?}", params.s())));
    }
    params.check_length(alpha)?;
    params.check_length(mu)?;
    let m = params.m();
    let (a, u) = (alpha.padded(m), mu.padded(m));
    let mut num = T::one();
    for i in 0..m {
        for j in i + 1..m {
            num = num
                * T::from_int(a[i] as i64 - a[j] as i64 + (j - i) as i64)
                * T::from_int(u[i] as i64 - u[j] as i64 + (j - i) as i64);
        }
    }
    let mut den = T::one();
    for i in 0..m {
        for j in 0..m {
            den = den
                * (T::from_int(a[i] as i64 + u[j] as i64 + 2 * m as i64 - i as i64 - j as i64 - 1)
                    + params.r().clone());
        }
    }
    Ok(num / den)
}

/// Time-independent expansion of the moment formula.
pub fn moment_expansion<T: Scalar>(params: &JacobiParams<T>, n: u32) -> Result<MomentExpansion<T>> {
    check_order(params, n)?;
    let d = params.d();
    let blocks: Vec<(u32, Partition, Partition)> = hooks_alpha(n)?
        .into_iter()
        .enumerate()
        .flat_map(|(k, alpha)| {
            subhooks(&alpha)
                .expect("α is a hook")
                .into_iter()
                .map(move |tau| (k as u32, alpha.clone(), tau))
        })
        .collect();
    let per_block: Vec<Vec<ExpansionTerm<T>>> = blocks
        .par_iter()
        .map(|(k, alpha, tau)| {
            let outer = neg_one_pow::<T>(*k) * a_coeff(params, tau)? * u_at_ones(params, tau)?;
            let rate = k_eigenvalue(params, tau) / d.clone();
            subhooks(tau)?
                .into_iter()
                .map(|mu| {
                    let inner = b_coeff(params, &mu, tau)? * beta_determinant(params, alpha, &mu)?;
                    Ok(ExpansionTerm {
                        k: *k,
                        tau: tau.clone(),
                        mu,
                        coefficient: outer.clone() * inner,
                        rate: rate.clone(),
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(MomentExpansion { n, terms: per_block.into_iter().flatten().collect() })
}

/// `E tr((J_{t/d})^n)` for `J_0 = I_m`.
pub fn expected_trace<T: Scalar>(params: &JacobiParams<T>, n: u32, t: f64) -> Result<MomentResult> {
    check_time(t)?;
    moment_expansion(params, n)?.evaluate(t)
}

/// Expansion on the `s = 0` slice through Weyl factors, squared Gamma ratios and
/// the Cauchy product, without Beta determinants or Jacobi norms.
pub fn moment_expansion_s0<T: Scalar>(params: &JacobiParams<T>, n: u32) -> Result<MomentExpansion<T>> {
    if !params.s().is_zero() {
        return Err(Error::domain(format!("s = 0 required, got s={:?}", params.s())));
    }
    check_order(params, n)?;
    let m = params.m();
    let r = params.r().clone();
    let d = params.d();
    let mut terms = Vec::new();
    for (k, alpha) in hooks_alpha(n)?.into_iter().enumerate() {
        let a = alpha.padded(m);
        let s_alpha = schur_at_ones::<T>(&alpha, m);
        for tau in subhooks(&alpha)? {
            let t = tau.padded(m);
            let mut outer = neg_one_pow::<T>(k as u32);
            for i in 0..m {
                let base = (m - 1 - i) as i64; // m − i, 1-based i
                let bracket = T::from_int(2 * (t[i] as i64 + base) + 1) + r.clone();
                // Γ(m−i+1)Γ(r+τ_i+m−i+1) / (Γ(τ_i+m−i+1)Γ(r+m−i+1))
                let ratio = rising(&(r.clone() + T::from_int(base + 1)), t[i]) / rising(&T::from_int(base + 1), t[i]);
                outer = outer * bracket * ratio.clone() * ratio;
            }
            let s_tau = schur_at_ones::<T>(&tau, m);
            outer = outer * s_tau.clone() * s_tau * u_at_ones(params, &tau)?;
            let mut pair = T::one();
            for i in 0..m {
                for j in i + 1..m {
                    let f = T::from_int(t[i] as i64 + t[j] as i64 + 2 * m as i64 - i as i64 - j as i64 - 1) + r.clone();
                    pair = pair * f.clone() * f;
                }
            }
            let rate = k_eigenvalue(params, &tau) / d.clone();
            for mu in subhooks(&tau)? {
                let u = mu.padded(m);
                let mut den = T::one();
                for i in 0..m {
                    for j in 0..m {
                        den = den
                            * (T::from_int(a[i] as i64 + u[j] as i64 + 2 * m as i64 - i as i64 - j as i64 - 1) + r.clone());
                    }
                }
                let inner = pair.clone() / den
                    * b_coeff(params, &mu, &tau)?
                    * schur_at_ones::<T>(&mu, m)
                    * s_alpha.clone();
                terms.push(ExpansionTerm {
                    k: k as u32,
                    tau: tau.clone(),
                    mu,
                    coefficient: outer.clone() * inner,
                    rate: rate.clone(),
                });
            }
        }
    }
    Ok(MomentExpansion { n, terms })
}

/// `E tr((J_{t/d})^n)` on `s = 0` by the product form.
pub fn expected_trace_s0<T: Scalar>(params: &JacobiParams<T>, n: u32, t: f64) -> Result<MomentResult> {
    check_time(t)?;
    moment_expansion_s0(params, n)?.evaluate(t)
}

/// `∫ s_κ W^{r,s,m} dλ = Π_{i<j}(κ_i−κ_j+j−i) Π_i Γ(κ_i+r+m−i+1)Γ(s+m−i+1)/Γ(κ_i+r+s+2m−i+1)`.
pub fn kadell_integral<T: Scalar>(params: &JacobiParams<T>, kappa: &Partition) -> Result<T> {
    params.check_length(kappa)?;
    let m = params.m();
    let c = kappa.padded(m);
    let mut acc = T::one();
    for i in 0..m {
        for j in i + 1..m {
            acc = acc * T::from_int(c[i] as i64 - c[j] as i64 + (j - i) as i64);
        }
    }
    for (i, &ci) in c.iter().enumerate() {
        let base = (m - 1 - i) as i64;
        let a = T::from_int(ci as i64 + base + 1) + params.r().clone();
        let b = T::from_int(base + 1) + params.s().clone();
        // Γ(a)Γ(b)/Γ(a+b+i−1) = β(a,b) / (a+b)_{i−1}
        acc = acc * beta_fn(&a, &b)? / rising(&(a + b), i as u32);
    }
    Ok(acc)
}

/// `E Σ λ_i^n` under the normalized weight `W^{r,s,m}`, through `p_n = Σ_k (−1)^k s_{α(n,k)}`.
pub fn stationary_moment<T: Scalar>(params: &JacobiParams<T>, n: u32) -> Result<T> {
    let total = kadell_integral(params, &Partition::empty())?;
    let mut acc = T::zero();
    for (k, alpha) in hooks_alpha(n)?.into_iter().enumerate() {
        if alpha.length() > params.m() {
            continue;
        }
        acc = acc + neg_one_pow::<T>(k as u32) * kadell_integral(params, &alpha)?;
    }
    Ok(acc / total)
}

pub use crate::density::{density_eval, DensityEvaluation, DensitySeries};
