//! One-dimensional Jacobi polynomials on `[0, 1]` for the weight `x^r (1−x)^s`.
//!
//! `p_n^{r,s}(x) = (r+1)_n / n! · ₂F₁(−n, n+r+s+1; r+1; x)`, normalized so that
//! `p_n(0) = (r+1)_n / n!`. In the classical `[−1, 1]` convention this is
//! `P_n^{(r,s)}(1 − 2x)`.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{beta_fn, factorial, neg_one_pow, rising, Scalar};

pub use crate::scalar::beta_fn as beta;

/// Parameters `(r, s)` of the weight `x^r (1−x)^s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jacobi1d<T> {
    r: T,
    s: T,
}

impl<T: Scalar> Jacobi1d<T> {
    pub fn new(r: T, s: T) -> Result<Self> {
        if r < T::zero() || s < T::zero() {
            return Err(Error::domain(format!("Jacobi parameters must be ≥ 0, got r={r:?}, s={s:?}")));
        }
        Ok(Jacobi1d { r, s })
    }

    pub fn r(&self) -> &T {
        &self.r
    }

    pub fn s(&self) -> &T {
        &self.s
    }

    /// The mirrored family `(s, r)`.
    pub fn mirrored(&self) -> Self {
        Jacobi1d { r: self.s.clone(), s: self.r.clone() }
    }

    /// Monomial coefficients `c_0, …, c_n` of `p_n`.
    pub fn coefficients(&self, n: u32) -> Vec<T> {
        let mut out = Vec::with_capacity(n as usize + 1);
        let mut term = self.at_zero(n);
        let a = T::from_int(-(n as i64));
        let b = T::from_int(n as i64) + self.r.clone() + self.s.clone() + T::one();
        let c = self.r.clone() + T::one();
        for k in 0..=n {
            out.push(term.clone());
            let kk = T::from_int(k as i64);
            term = term * (a.clone() + kk.clone()) * (b.clone() + kk.clone())
                / ((c.clone() + kk.clone()) * (kk + T::one()));
        }
        out
    }

    /// `p_n(x)` by the terminating hypergeometric sum, with compensated summation.
    pub fn eval(&self, n: u32, x: &T) -> T {
        let mut sum = T::zero();
        let mut comp = T::zero();
        let mut xk = T::one();
        for c in self.coefficients(n) {
            let term = c * xk.clone();
            let t = sum.clone() + term.clone();
            comp = if sum.abs() >= term.abs() {
                comp + ((sum.clone() - t.clone()) + term)
            } else {
                comp + ((term - t.clone()) + sum.clone())
            };
            sum = t;
            xk = xk * x.clone();
        }
        sum + comp
    }

    /// Taylor coefficients of `p_n` around `x = 1`, i.e. `p_n^{(k)}(1) / k!`.
    ///
    /// From `p_n^{r,s}(x) = (−1)^n p_n^{s,r}(1−x)`, these are signed monomial
    /// coefficients of the mirrored family: single products, no cancellation.
    pub fn taylor_at_one(&self, n: u32) -> Vec<T> {
        self.mirrored()
            .coefficients(n)
            .into_iter()
            .enumerate()
            .map(|(k, c)| neg_one_pow::<T>(n + k as u32) * c)
            .collect()
    }

    /// `‖p_n‖² = ∫₀¹ p_n(x)² x^r (1−x)^s dx`.
    pub fn norm_sq(&self, n: u32) -> Result<T> {
        let one = T::one();
        let rs1 = self.r.clone() + self.s.clone() + one.clone();
        // Γ(r+1)Γ(s+1)/Γ(r+s+1) = β(r+1, s+1)·(r+s+1)
        let base = beta_fn(&(self.r.clone() + one.clone()), &(self.s.clone() + one.clone()))? * rs1.clone();
        let num = rising(&(self.r.clone() + one.clone()), n) * rising(&(self.s.clone() + one), n);
        let den = factorial::<T>(n) * rising(&rs1, n) * (T::from_int(2 * n as i64) + rs1);
        Ok(base * num / den)
    }

    /// `p_n(0) = (r+1)_n / n!`.
    pub fn at_zero(&self, n: u32) -> T {
        rising(&(self.r.clone() + T::one()), n) / factorial::<T>(n)
    }
}

impl<F: Scalar + Float> Jacobi1d<F> {
    /// `p_n(x)` from the three-term recurrence of `P_n^{(r,s)}(1−2x)`.
    ///
    /// Stable at degrees where the alternating hypergeometric sum cancels badly.
    pub fn eval_recurrence(&self, n: u32, x: F) -> F {
        let (a, b) = (self.r, self.s);
        let y = F::one() - (x + x);
        let two = F::from_int(2);
        let mut prev = F::one();
        if n == 0 {
            return prev;
        }
        let mut cur = (a + F::one()) - (a + b + two) * x;
        for k in 2..=n {
            let k = F::from_int(k as i64);
            let c = two * k + a + b;
            let lhs = two * k * (k + a + b) * (c - two);
            let t1 = (c - F::one()) * (c * (c - two) * y + a * a - b * b);
            let t2 = two * (k + a - F::one()) * (k + b - F::one()) * c;
            let next = (t1 * cur - t2 * prev) / lhs;
            prev = cur;
            cur = next;
        }
        cur
    }

    /// `[p_0(x), …, p_n(x)]` from a single pass of the recurrence.
    pub fn eval_all(&self, n: u32, x: F) -> Vec<F> {
        let (a, b) = (self.r, self.s);
        let y = F::one() - (x + x);
        let two = F::from_int(2);
        let mut out = Vec::with_capacity(n as usize + 1);
        out.push(F::one());
        if n == 0 {
            return out;
        }
        out.push((a + F::one()) - (a + b + two) * x);
        for k in 2..=n {
            let kf = F::from_int(k as i64);
            let c = two * kf + a + b;
            let lhs = two * kf * (kf + a + b) * (c - two);
            let t1 = (c - F::one()) * (c * (c - two) * y + a * a - b * b);
            let t2 = two * (kf + a - F::one()) * (kf + b - F::one()) * c;
            let k = k as usize;
            let next = (t1 * out[k - 1] - t2 * out[k - 2]) / lhs;
            out.push(next);
        }
        out
    }

    /// Orthonormal `P_n = p_n / ‖p_n‖`.
    pub fn orthonormal(&self, n: u32, x: F) -> Result<F> {
        Ok(self.eval_recurrence(n, x) / self.norm_sq(n)?.sqrt())
    }
}

/// `p_n^{r,s}(x)` by the hypergeometric sum.
pub fn jacobi_eval<T: Scalar>(params: &Jacobi1d<T>, n: u32, x: &T) -> T {
    params.eval(n, x)
}

/// `‖p_n^{r,s}‖²`.
pub fn jacobi_norm_sq<T: Scalar>(params: &Jacobi1d<T>, n: u32) -> Result<T> {
    params.norm_sq(n)
}

/// `p_n^{r,s}(0)`.
pub fn jacobi_at_zero<T: Scalar>(params: &Jacobi1d<T>, n: u32) -> T {
    params.at_zero(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn exact(r: i64, s: i64) -> Jacobi1d<BigRational> {
        Jacobi1d::new(rational(r), rational(s)).unwrap()
    }

    #[test]
    fn rejects_negative_parameters() {
        assert!(Jacobi1d::new(-1.0f64, 0.0).is_err());
    }

    #[test]
    fn eval_examples() {
        let j = exact(2, 3);
        assert_eq!(j.eval(0, &q(3, 7)), rational(1));
        // (r+1) − (r+s+2)x
        let x = q(3, 7);
        assert_eq!(j.eval(1, &x), rational(3) - rational(7) * x.clone());
        assert_eq!(exact(0, 0).eval(1, &q(1, 2)), rational(0));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(exact(0, 0).norm_sq(0).unwrap(), rational(1));
        assert_eq!(exact(0, 0).norm_sq(1).unwrap(), q(1, 3));
        for (r, s) in [(0, 0), (1, 2), (3, 1)] {
            let b = beta_fn(&rational(r + 1), &rational(s + 1)).unwrap();
            assert_eq!(exact(r, s).norm_sq(0).unwrap(), b);
        }
        let f = Jacobi1d::new(0.5f64, 1.5).unwrap();
        let b = beta_fn(&1.5f64, &2.5).unwrap();
        assert!((f.norm_sq(0).unwrap() - b).abs() < 1e-14);
    }

    #[test]
    fn at_zero_examples() {
        assert_eq!(exact(4, 1).at_zero(0), rational(1));
        assert_eq!(exact(0, 1).at_zero(3), rational(1));
        assert_eq!(exact(2, 0).at_zero(2), rational(6));
        for n in 0..8 {
            let j = exact(2, 1);
            assert_eq!(j.eval(n, &rational(0)), j.at_zero(n));
        }
    }

    #[test]
    fn mirror_symmetry() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let j = Jacobi1d::new(1.5f64, 3.0).unwrap();
        for _ in 0..50 {
            let x: f64 = rng.gen();
            let n = rng.gen_range(0..9u32);
            let lhs = j.eval(n, &(1.0 - x));
            let rhs = if n % 2 == 0 { 1.0 } else { -1.0 } * j.mirrored().eval(n, &x);
            assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn taylor_at_one_reproduces_polynomial() {
        let j = exact(1, 2);
        let x = q(2, 5);
        for n in 0..7 {
            let h = x.clone() - rational(1);
            let mut acc = rational(0);
            let mut hk = rational(1);
            for c in j.taylor_at_one(n) {
                acc += c * hk.clone();
                hk *= h.clone();
            }
            assert_eq!(acc, j.eval(n, &x));
        }
    }

    #[test]
    fn recurrence_matches_hypergeometric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (r, s) in [(0.0, 0.0), (1.0, 0.0), (0.0, 2.0), (2.5, 1.5)] {
            let j = Jacobi1d::new(r, s).unwrap();
            let je = Jacobi1d::new(
                crate::scalar::rational_from_f64(r).unwrap(),
                crate::scalar::rational_from_f64(s).unwrap(),
            )
            .unwrap();
            for n in 0..30 {
                let x: f64 = rng.gen();
                let exact = je.eval(n, &crate::scalar::rational_from_f64(x).unwrap()).as_f64();
                let rec = j.eval_recurrence(n, x);
                assert!((exact - rec).abs() <= 1e-11 * (1.0 + exact.abs()), "n={n} r={r} s={s}");
            }
        }
    }

    #[test]
    fn eval_all_matches_single_degree() {
        let j = Jacobi1d::new(1.5f64, 0.5).unwrap();
        let all = j.eval_all(12, 0.37);
        for (n, v) in all.iter().enumerate() {
            assert_eq!(*v, j.eval_recurrence(n as u32, 0.37));
        }
    }

    /// Orthogonality against a Gauss–Jacobi rule from the oracle module.
    #[test]
    fn orthogonality_by_quadrature() {
        for r in 0..=4 {
            for s in 0..=4 {
                let rule = crate::oracle::gauss_jacobi_rule(r as f64, s as f64, 12).unwrap();
                let j = Jacobi1d::new(r as f64, s as f64).unwrap();
                for a in 0..=8u32 {
                    for b in a..=8u32 {
                        let v = rule.integrate(|x| j.eval_recurrence(a, x) * j.eval_recurrence(b, x));
                        if a == b {
                            let n2 = j.norm_sq(a).unwrap();
                            assert!((v - n2).abs() <= 1e-12 * n2, "r={r} s={s} n={a}");
                        } else {
                            let scale = (j.norm_sq(a).unwrap() * j.norm_sq(b).unwrap()).sqrt();
                            assert!(v.abs() < 1e-12 * scale.max(1.0), "r={r} s={s} ({a},{b}) {v}");
                        }
                    }
                }
            }
        }
    }
}
