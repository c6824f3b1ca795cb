//! Symmetric Jacobi polynomials indexed by partitions.
//!
//! Three normalizations coexist:
//! * `P_τ(x) = det[P_{τ_i+m−i}(x_j)] / V(x)` built from orthonormal 1-D polynomials
//!   (orthonormal against `W^{r,s,m}` on the ordered simplex);
//! * `U_τ`, normalized by `U_τ(0^m) = 1`, with an explicit Schur expansion for hooks;
//! * `Q_τ(φ) = det[q_{τ_i+m−i}(φ_j)] / V(φ)` on `[−1,1]^m`, `q_n(φ) = p_n((1−φ)/2)`.
//!
//! `U_τ` is the canonical path for the moment formula; `P_τ` exists to
//! cross-validate it and refuses near-coincident points.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::jacobi1d::Jacobi1d;
use crate::linalg;
use crate::oracle::vandermonde;
use crate::partitions::{
    contains, gen_binomial, gen_pochhammer, schur_at_ones, schur_eval, subhooks, Partition,
};
use crate::scalar::{factorial, neg_one_pow, pow_int, rising, Scalar};

/// Minimum coordinate gap accepted by the determinantal evaluators.
pub const MIN_GAP: f64 = 1e-8;

/// `(r, s, m)`: weight exponents and number of eigenvalues.
///
/// In process terms `r = p − m`, `s = q − m` with `q = d − p`, so `d = r + s + 2m`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiParams<T> {
    r: T,
    s: T,
    m: usize,
}

impl<T: Scalar> JacobiParams<T> {
    pub fn new(r: T, s: T, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("matrix size m must be at least 1"));
        }
        if r < T::zero() || s < T::zero() {
            return Err(Error::precondition(format!(
                "p ∧ q ≥ m required (r = p−m ≥ 0, s = q−m ≥ 0), got r={r:?}, s={s:?}"
            )));
        }
        Ok(JacobiParams { r, s, m })
    }

    /// Parameters of the corner process of a `d × d` unitary Brownian motion
    /// with an `m × p` upper-left block.
    pub fn from_dimensions(d: u32, p: u32, m: u32) -> Result<Self> {
        if p == 0 || m == 0 || p >= d || m >= d {
            return Err(Error::precondition(format!(
                "1 ≤ p, m < d required, got d={d}, p={p}, m={m}"
            )));
        }
        let q = d - p;
        if p < m || q < m {
            return Err(Error::precondition(format!(
                "p ∧ q ≥ m required, got p={p}, q={q}, m={m}"
            )));
        }
        Self::new(T::from_int((p - m) as i64), T::from_int((q - m) as i64), m as usize)
    }

    pub fn r(&self) -> &T {
        &self.r
    }

    pub fn s(&self) -> &T {
        &self.s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `p = r + m`
    pub fn p(&self) -> T {
        self.r.clone() + self.m_scalar()
    }

    /// `q = s + m`
    pub fn q(&self) -> T {
        self.s.clone() + self.m_scalar()
    }

    /// `d = p + q = r + s + 2m`
    pub fn d(&self) -> T {
        self.p() + self.q()
    }

    pub(crate) fn m_scalar(&self) -> T {
        T::from_int(self.m as i64)
    }

    pub fn jacobi1d(&self) -> Jacobi1d<T> {
        Jacobi1d::new(self.r.clone(), self.s.clone()).expect("validated at construction")
    }

    /// Same parameters in another scalar type (via f64 for floats, exactly from f64 for rationals).
    pub fn to_f64(&self) -> JacobiParams<f64> {
        JacobiParams { r: self.r.as_f64(), s: self.s.as_f64(), m: self.m }
    }

    pub(crate) fn check_length(&self, tau: &Partition) -> Result<()> {
        if tau.length() > self.m {
            return Err(Error::domain(format!("l({tau}) > m = {}", self.m)));
        }
        Ok(())
    }

    /// Row degrees `τ_i + m − i` of the determinantal form.
    pub(crate) fn degrees(&self, tau: &Partition) -> Vec<u32> {
        tau.padded(self.m)
            .iter()
            .enumerate()
            .map(|(i, &t)| t + (self.m - 1 - i) as u32)
            .collect()
    }
}

/// `C_μ^τ(X)` for hooks `μ ⊆ τ`; `C_∅^τ := 1`.
///
/// With `τ = (A, 1^L)` and `μ = (a, 1^ℓ)`:
/// `(X + [A(A−1) − L(L+1)]/(A+L)) · Π_{i=2}^{a}(X + A + i − 2) · Π_{i=1}^{ℓ}(X − L − i)`.
pub fn c_coeff<T: Scalar>(tau: &Partition, mu: &Partition, x: &T) -> Result<T> {
    if !tau.is_hook() || !mu.is_hook() {
        return Err(Error::Unsupported(format!("C coefficient defined for hooks, got ({tau}, {mu})")));
    }
    if !contains(mu, tau) {
        return Err(Error::domain(format!("{mu} ⊄ {tau}")));
    }
    let (Some((big_a, big_l)), Some((a, l))) = (tau.arm_leg(), mu.arm_leg()) else {
        return Ok(T::one());
    };
    let (big_a, big_l) = (big_a as i64, big_l as i64);
    let shift = T::from_ratio(big_a * (big_a - 1) - big_l * (big_l + 1), big_a + big_l);
    let mut acc = x.clone() + shift;
    for i in 2..=a as i64 {
        acc = acc * (x.clone() + T::from_int(big_a + i - 2));
    }
    for i in 1..=l as i64 {
        acc = acc * (x.clone() - T::from_int(big_l + i));
    }
    Ok(acc)
}

/// Coefficients `c_μ` of `U_τ = Σ_{μ⊆τ} c_μ s_μ / s_μ(1^m)` for a hook `τ`:
/// `c_μ = (−1)^{|μ|} binom(τ,μ) C_μ^τ(r+s+2m) / (r+m)_μ`.
pub fn u_tau_coefficients<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> Result<Vec<(Partition, T)>> {
    if !tau.is_hook() {
        return Err(Error::Unsupported(format!(
            "Schur expansion of U_τ is available for hooks only, got {tau}"
        )));
    }
    params.check_length(tau)?;
    let x = params.d();
    let z = params.p();
    subhooks(tau)?
        .into_iter()
        .map(|mu| {
            let coef = neg_one_pow::<T>(mu.weight()) * gen_binomial::<T>(tau, &mu)? * c_coeff(tau, &mu, &x)?
                / gen_pochhammer(&z, &mu);
            Ok((mu, coef))
        })
        .collect()
}

/// `U_τ(λ)` from its Schur expansion; coincidence-safe.
pub fn u_tau_schur<T: Scalar>(params: &JacobiParams<T>, tau: &Partition, lambda: &[T]) -> Result<T> {
    if lambda.len() != params.m {
        return Err(Error::domain(format!("point has {} coordinates, m = {}", lambda.len(), params.m)));
    }
    let m = params.m;
    Ok(u_tau_coefficients(params, tau)?
        .into_iter()
        .fold(T::zero(), |acc, (mu, c)| acc + c * schur_eval(&mu, lambda) / schur_at_ones::<T>(&mu, m)))
}

/// `U_τ(1^m) = Σ_μ c_μ`.
pub fn u_at_ones<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> Result<T> {
    Ok(u_tau_coefficients(params, tau)?.into_iter().fold(T::zero(), |acc, (_, c)| acc + c))
}

/// `V(τ̃) = Π_{i<j} (τ_i − τ_j + j − i)(τ_i + τ_j + 2m − i − j + r + s + 1)`.
pub fn v_tilde<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> T {
    let m = params.m;
    let t = tau.padded(m);
    let rs1 = params.r.clone() + params.s.clone() + T::one();
    let mut acc = T::one();
    for i in 0..m {
        for j in i + 1..m {
            // 1-based: 2m − (i+1) − (j+1)
            let a = T::from_int(t[i] as i64 - t[j] as i64 + (j - i) as i64);
            let b = T::from_int(t[i] as i64 + t[j] as i64 + 2 * m as i64 - i as i64 - j as i64 - 2) + rs1.clone();
            acc = acc * a * b;
        }
    }
    acc
}

/// `Q_τ(1^m) = V(τ̃) Π_i Γ(τ_i+m−i+r+1) 2^{−(m−i)} / (Γ(τ_i+m−i+1) Γ(m−i+r+1) Γ(m−i+1))`.
pub fn q_at_ones<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> Result<T> {
    params.check_length(tau)?;
    let m = params.m;
    let mut acc = v_tilde(params, tau);
    for (i, &t) in tau.padded(m).iter().enumerate() {
        let base = (m - 1 - i) as u32; // m − i with 1-based i
        let num = rising(&(params.r.clone() + T::from_int(base as i64 + 1)), t);
        let den = factorial::<T>(t + base) * factorial::<T>(base) * pow_int(&T::from_int(2), base);
        acc = acc * num / den;
    }
    Ok(acc)
}

/// `Π_i ‖p_{τ_i+m−i}‖²`.
pub fn norm_sq_product<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> Result<T> {
    let j = params.jacobi1d();
    params.degrees(tau).into_iter().try_fold(T::one(), |acc, n| Ok(acc * j.norm_sq(n)?))
}

/// `det[p_{τ_i+m−i}(x_j)] / V(x)` in the limit `x → 1^m` (unnormalized rows).
///
/// Uses `lim det[f_i(x_j)]/V(x) = det[f_i^{(m−j)}(1)/(m−j)!]`, valid for any
/// partition, not only hooks.
pub fn confluent_at_ones<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> Result<T> {
    params.check_length(tau)?;
    let m = params.m;
    let j = params.jacobi1d();
    let rows: Vec<Vec<T>> = params.degrees(tau).into_iter().map(|n| j.taylor_at_one(n)).collect();
    let entries = linalg::square_from_fn(m, |i, col| {
        let k = m - 1 - col;
        rows[i].get(k).cloned().unwrap_or_else(T::zero)
    });
    Ok(linalg::det(m, entries))
}

/// `P_τ(1^m)` by the confluent determinant.
pub fn p_tau_at_ones<T: Scalar>(params: &JacobiParams<T>, tau: &Partition) -> Result<f64> {
    let alt = confluent_at_ones(params, tau)?.as_f64();
    let norms = norm_sq_product(params, tau)?.as_f64();
    Ok(alt / norms.sqrt())
}

/// `det[P_{τ_i+m−i}(λ_j)]` with orthonormal rows; no division by `V`.
pub fn p_tau_alternant<F: Scalar + Float>(params: &JacobiParams<F>, tau: &Partition, lambda: &[F]) -> Result<F> {
    params.check_length(tau)?;
    if lambda.len() != params.m {
        return Err(Error::domain(format!("point has {} coordinates, m = {}", lambda.len(), params.m)));
    }
    let m = params.m;
    let j = params.jacobi1d();
    let degrees = params.degrees(tau);
    let norms: Vec<F> = degrees.iter().map(|&n| j.norm_sq(n).map(Float::sqrt)).collect::<Result<_>>()?;
    let entries = linalg::square_from_fn(m, |i, col| j.eval_recurrence(degrees[i], lambda[col]) / norms[i]);
    Ok(linalg::det(m, entries))
}

/// `P_τ(λ) = det[P_{τ_i+m−i}(λ_j)] / V(λ)` at a point with distinct coordinates.
pub fn p_tau_det<F: Scalar + Float>(params: &JacobiParams<F>, tau: &Partition, lambda: &[F]) -> Result<F> {
    check_distinct(lambda)?;
    let alt = p_tau_alternant(params, tau, lambda)?;
    let lam: Vec<f64> = lambda.iter().map(Scalar::as_f64).collect();
    Ok(alt / F::from_f64(vandermonde(&lam)).expect("finite"))
}

/// `Q_τ(φ)` on `[−1, 1]^m` with distinct coordinates.
pub fn q_tau<F: Scalar + Float>(params: &JacobiParams<F>, tau: &Partition, phi: &[F]) -> Result<F> {
    check_distinct(phi)?;
    params.check_length(tau)?;
    let m = params.m;
    let j = params.jacobi1d();
    let two = F::from_int(2);
    let degrees = params.degrees(tau);
    let entries = linalg::square_from_fn(m, |i, col| j.eval_recurrence(degrees[i], (F::one() - phi[col]) / two));
    let ph: Vec<f64> = phi.iter().map(Scalar::as_f64).collect();
    Ok(linalg::det(m, entries) / F::from_f64(vandermonde(&ph)).expect("finite"))
}

fn check_distinct<F: Scalar + Float>(x: &[F]) -> Result<()> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            if (x[i] - x[j]).abs().as_f64() <= MIN_GAP {
                return Err(Error::domain(format!(
                    "coordinates {i} and {j} are closer than {MIN_GAP}; use the Schur-expansion path"
                )));
            }
        }
    }
    Ok(())
}
