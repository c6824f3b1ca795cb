//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All closed-form quantities (Pochhammer symbols, Beta values, Weyl
//! dimensions, Beta determinants, moment coefficients) are written once
//! against [`Scalar`] and instantiated either with floats or with exact
//! [`BigRational`]s. The rational instance refuses Gamma ratios it cannot
//! represent instead of silently rounding.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::linalg;

/// A field of numbers the formulas can be evaluated in.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + Send + Sync + 'static
{
    /// Lossy conversion used for reporting and for the `exp(-K t / d)` factors.
    fn as_f64(&self) -> f64;

    /// True when the value is an integer (exactly, for rationals).
    fn is_integral(&self) -> bool;

    /// `Γ(x) / Γ(y)` when `x − y` is not an integer.
    ///
    /// Floats go through log-gamma; the exact instance has no representation
    /// for these and reports [`Error::NotRepresentable`].
    fn gamma_ratio_transcendental(x: &Self, y: &Self) -> Result<Self>;

    /// Determinant of a square matrix stored row-major.
    fn determinant(n: usize, data: Vec<Self>) -> Self {
        linalg::lu_determinant(n, data)
    }

    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer fits every scalar type")
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }
}

macro_rules! impl_float_scalar {
    ($f:ty) => {
        impl Scalar for $f {
            fn as_f64(&self) -> f64 {
                *self as f64
            }

            fn is_integral(&self) -> bool {
                self.fract() == 0.0
            }

            fn gamma_ratio_transcendental(x: &Self, y: &Self) -> Result<Self> {
                let (x, y) = (*x as f64, *y as f64);
                if x <= 0.0 || y <= 0.0 {
                    return Err(Error::domain(format!(
                        "log-gamma ratio needs positive arguments, got Γ({x})/Γ({y})"
                    )));
                }
                let v = (statrs::function::gamma::ln_gamma(x)
                    - statrs::function::gamma::ln_gamma(y))
                .exp();
                Ok(v as $f)
            }
        }
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn as_f64(&self) -> f64 {
        // `Ratio::to_f64` rounds correctly even when numerator and denominator
        // overflow f64 individually.
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }

    fn gamma_ratio_transcendental(x: &Self, y: &Self) -> Result<Self> {
        Err(Error::NotRepresentable(format!(
            "Γ({x})/Γ({y}) is not rational; use a float scalar for non-integer parameter gaps"
        )))
    }

    fn determinant(n: usize, data: Vec<Self>) -> Self {
        linalg::rational_determinant(n, data)
    }
}

/// Rising factorial `(x)_n = x (x+1) ⋯ (x+n−1)`.
pub fn rising<T: Scalar>(x: &T, n: u32) -> T {
    let mut acc = T::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc = acc * term.clone();
        term = term + T::one();
    }
    acc
}

/// `n!` as a scalar.
pub fn factorial<T: Scalar>(n: u32) -> T {
    rising(&T::one(), n)
}

/// `Γ(x) / Γ(y)`, exact whenever `x − y` is an integer.
pub fn gamma_ratio<T: Scalar>(x: &T, y: &T) -> Result<T> {
    let diff = x.clone() - y.clone();
    if diff.is_integral() {
        let k = diff.as_f64();
        if k.abs() <= 4096.0 {
            let k = k as i64;
            return if k >= 0 {
                Ok(rising(y, k as u32))
            } else {
                let den = rising(x, (-k) as u32);
                if den.is_zero() {
                    Err(Error::domain(format!("Γ({x:?})/Γ({y:?}) hits a pole")))
                } else {
                    Ok(T::one() / den)
                }
            };
        }
    }
    T::gamma_ratio_transcendental(x, y)
}

/// The Beta function `β(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
///
/// Exact on the rational path when either argument is a positive integer.
pub fn beta_fn<T: Scalar>(a: &T, b: &T) -> Result<T> {
    if *a <= T::zero() || *b <= T::zero() {
        return Err(Error::domain(format!(
            "Beta function needs positive arguments, got β({a:?}, {b:?})"
        )));
    }
    let (a, b) = if b.is_integral() {
        (a, b)
    } else if a.is_integral() {
        (b, a)
    } else {
        // Γ(a)Γ(b)/Γ(a+b) = [Γ(a)/Γ(a+b)] · Γ(b).
        let g_b = T::gamma_ratio_transcendental(b, &T::one())?;
        return Ok(gamma_ratio(a, &(a.clone() + b.clone()))? * g_b);
    };
    // (b−1)! / (a)_b
    let b_int = b.as_f64() as u32;
    Ok(factorial::<T>(b_int - 1) / rising(a, b_int))
}

/// Converts a float to the exact rational it denotes.
pub fn rational_from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

/// Integer as rational, convenience for tests and callers building exact parameters.
pub fn rational(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn pow_int<T: Scalar>(x: &T, e: u32) -> T {
    let mut acc = T::one();
    for _ in 0..e {
        acc = acc * x.clone();
    }
    acc
}

pub(crate) fn neg_one_pow<T: Scalar>(e: u32) -> T {
    if e.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn beta_small_integer_values() {
        assert_eq!(beta_fn(&rational(1), &rational(1)).unwrap(), rational(1));
        assert_eq!(beta_fn(&rational(2), &rational(1)).unwrap(), q(1, 2));
        assert_eq!(beta_fn(&rational(3), &rational(2)).unwrap(), q(1, 12));
    }

    #[test]
    fn beta_rejects_nonpositive() {
        assert!(beta_fn(&0.0f64, &1.0).is_err());
        assert!(beta_fn(&rational(1), &rational(-2)).is_err());
    }

    #[test]
    fn beta_half_integer_float_matches_pi() {
        // β(1/2, 1/2) = π
        let v = beta_fn(&0.5f64, &0.5).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn beta_exact_with_one_integer_argument() {
        // β(1/2, 2) = 1 / ((1/2)(3/2)) = 4/3
        assert_eq!(beta_fn(&q(1, 2), &rational(2)).unwrap(), q(4, 3));
        assert!(beta_fn(&q(1, 2), &q(1, 3)).is_err());
    }

    #[test]
    fn gamma_ratio_integer_shift() {
        assert_eq!(gamma_ratio(&rational(6), &rational(3)).unwrap(), rational(60));
        assert_eq!(gamma_ratio(&rational(3), &rational(6)).unwrap(), q(1, 60));
        let f = gamma_ratio(&7.5f64, &2.5).unwrap();
        assert!((f - 2.5 * 3.5 * 4.5 * 5.5 * 6.5).abs() < 1e-9);
    }

    #[test]
    fn float_and_rational_agree_on_rising() {
        let exact = rising(&q(7, 3), 5).as_f64();
        let float = rising(&(7.0f64 / 3.0), 5);
        assert!((exact - float).abs() / exact < 1e-14);
    }
}
