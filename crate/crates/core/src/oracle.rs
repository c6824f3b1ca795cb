//! Independent verification engines.
//!
//! Gauss–Jacobi product quadrature for symmetric integrals against
//! `W^{r,s,m}(λ) = Π λ_i^r (1−λ_i)^s V(λ)²` on the ordered simplex, a direct
//! check of the integral Cauchy–Binet identity, and brute-force symmetric
//! function evaluation. Nothing here calls into the closed-form moment code.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jacobi1d::Jacobi1d;
use crate::linalg;
use crate::partitions::Partition;
use crate::scalar::beta_fn;

/// Default number of nodes per axis (exact to degree 47).
pub const DEFAULT_NODES: usize = 24;

/// N-point Gauss rule for `∫₀¹ f(x) x^r (1−x)^s dx`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub r: f64,
    pub s: f64,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Builds the rule from the Jacobi matrix (Golub–Welsch), then polishes each
/// node by Newton's method on `p_N` and recomputes weights in closed form.
pub fn gauss_jacobi_rule(r: f64, s: f64, n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::domain("quadrature needs at least one node"));
    }
    if r < 0.0 || s < 0.0 {
        return Err(Error::domain(format!("weight exponents must be ≥ 0, got r={r}, s={s}")));
    }
    // Classical Jacobi (a, b) = (r, s) on [−1, 1]; x = (1 − y)/2.
    let (a, b) = (r, s);
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        let c = 2.0 * kf + a + b;
        jm[(k, k)] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (c * (c + 2.0))
        };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let c1 = 2.0 * k1 + a + b;
            let off = (4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b)
                / (c1 * c1 * (c1 + 1.0) * (c1 - 1.0)))
                .sqrt();
            jm[(k, k + 1)] = off;
            jm[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jm);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().map(|y| (1.0 - y) / 2.0).collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));

    let poly = Jacobi1d::new(r, s)?;
    let deriv = Jacobi1d::new(r + 1.0, s + 1.0)?;
    let nn = n as u32;
    let dscale = -(n as f64 + r + s + 1.0);
    for x in nodes.iter_mut() {
        for _ in 0..8 {
            let p = poly.eval_recurrence(nn, *x);
            let dp = dscale * deriv.eval_recurrence(nn - 1, *x);
            let step = p / dp;
            *x -= step;
            if step.abs() < 1e-17 {
                break;
            }
        }
    }
    // Unnormalized Christoffel weights, rescaled to the exact zeroth moment.
    let raw: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let dp = dscale * deriv.eval_recurrence(nn - 1, x);
            1.0 / (x * (1.0 - x) * dp * dp)
        })
        .collect();
    let mass = beta_fn(&(r + 1.0), &(s + 1.0))?;
    let total: f64 = raw.iter().sum();
    let weights = raw.into_iter().map(|w| w * mass / total).collect();
    Ok(QuadratureRule { nodes, weights, r, s })
}

/// Vandermonde product `V(λ) = Π_{i<j} (λ_i − λ_j)`.
pub fn vandermonde(lambda: &[f64]) -> f64 {
    let mut v = 1.0;
    for i in 0..lambda.len() {
        for j in i + 1..lambda.len() {
            v *= lambda[i] - lambda[j];
        }
    }
    v
}

/// `Σ_{x ∈ grid} g(x) Π w(x_i)` over the `m`-fold tensor grid.
pub fn integrate_cube<G>(g: G, m: usize, rule: &QuadratureRule) -> f64
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let n = rule.len();
    if m == 0 {
        return g(&[]);
    }
    let partials: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut idx = vec![0usize; m];
            idx[0] = first;
            let mut x = vec![0.0; m];
            let mut acc = 0.0;
            loop {
                let mut w = 1.0;
                for (k, &i) in idx.iter().enumerate() {
                    x[k] = rule.nodes[i];
                    w *= rule.weights[i];
                }
                acc += w * g(&x);
                // odometer over axes 1..m
                let mut k = m - 1;
                loop {
                    if k == 0 {
                        return acc;
                    }
                    idx[k] += 1;
                    if idx[k] < n {
                        break;
                    }
                    idx[k] = 0;
                    k -= 1;
                }
            }
        })
        .collect();
    partials.iter().sum()
}

fn factorial_f64(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

/// `∫_{0<λ_m<…<λ_1<1} f(λ) W^{r,s,m}(λ) dλ` for symmetric `f`.
///
/// Evaluated as `(1/m!) ∫_{[0,1]^m} f · V² · Π λ_i^r(1−λ_i)^s`, with the rule's
/// weight carrying the one-dimensional factors.
pub fn symmetric_integral<F>(f: F, m: usize, rule: &QuadratureRule) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_cube(|x| {
        let v = vandermonde(x);
        if v == 0.0 {
            0.0
        } else {
            f(x) * v * v
        }
    }, m, rule)
        / factorial_f64(m)
}

/// Integral of an antisymmetric "alternant" `a(λ)` against `V(λ) Π w` over the
/// ordered simplex. Used for integrands of the form `det[…]/V · W` that must be
/// evaluated on the diagonal of the grid.
pub fn alternant_integral<F>(alt: F, m: usize, rule: &QuadratureRule) -> f64
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_cube(|x| alt(x) * vandermonde(x), m, rule) / factorial_f64(m)
}

/// `|∫ det(ψ_i(x_j)) det(φ_i(x_j)) Π κ(dx_i) − m! det(∫ ψ_i φ_j dκ)|`
/// with `κ(dx) = x^r (1−x)^s dx` discretized by `rule`.
pub fn cauchy_binet_check(
    psi: &[&(dyn Fn(f64) -> f64 + Sync)],
    phi: &[&(dyn Fn(f64) -> f64 + Sync)],
    rule: &QuadratureRule,
) -> Result<f64> {
    let m = psi.len();
    if phi.len() != m {
        return Err(Error::domain("function families must have equal size"));
    }
    let lhs = integrate_cube(
        |x| {
            let a = linalg::lu_determinant(m, linalg::square_from_fn(m, |i, j| psi[i](x[j])));
            let b = linalg::lu_determinant(m, linalg::square_from_fn(m, |i, j| phi[i](x[j])));
            a * b
        },
        m,
        rule,
    );
    let gram = linalg::square_from_fn(m, |i, j| rule.integrate(|x| psi[i](x) * phi[j](x)));
    let rhs = factorial_f64(m) * linalg::lu_determinant(m, gram);
    Ok((lhs - rhs).abs())
}

/// Schur polynomial from the raw bialternant `det(λ_j^{μ_i+m−i}) / det(λ_j^{m−i})`.
///
/// Independent of the Jacobi–Trudi path; undefined at coincident coordinates.
pub fn schur_bialternant(mu: &Partition, lambda: &[f64]) -> f64 {
    let m = lambda.len();
    if mu.length() > m {
        return 0.0;
    }
    let parts = mu.padded(m);
    let num = linalg::lu_determinant(
        m,
        linalg::square_from_fn(m, |i, j| lambda[j].powi((parts[i] as usize + m - i - 1) as i32)),
    );
    num / vandermonde(lambda)
}
