//! Determinants: partially pivoted LU for floats, fraction-free Bareiss for
//! exact rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Determinant by Gaussian elimination with partial pivoting. `data` is row-major `n × n`.
pub fn lu_determinant<T: Scalar>(n: usize, mut data: Vec<T>) -> T {
    assert_eq!(data.len(), n * n, "matrix is not {n}×{n}");
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| {
                data[a * n + col]
                    .abs()
                    .partial_cmp(&data[b * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if data[pivot * n + col].is_zero() {
            return T::zero();
        }
        if pivot != col {
            for j in 0..n {
                data.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let p = data[col * n + col].clone();
        for row in col + 1..n {
            let factor = data[row * n + col].clone() / p.clone();
            if factor.is_zero() {
                continue;
            }
            for j in col + 1..n {
                let v = data[col * n + j].clone() * factor.clone();
                data[row * n + j] = data[row * n + j].clone() - v;
            }
        }
        det = det * p;
    }
    det
}

/// Fraction-free Bareiss elimination on an integer matrix.
pub fn bareiss_determinant(n: usize, mut a: Vec<BigInt>) -> BigInt {
    assert_eq!(a.len(), n * n, "matrix is not {n}×{n}");
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&i| !a[i * n + k].is_zero()) {
                Some(i) => {
                    for j in 0..n {
                        a.swap(i * n + j, k * n + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                // Exact by Sylvester's identity.
                a[i * n + j] = v / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    let d = a[n * n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Exact rational determinant: clear each row's denominators, run Bareiss, rescale.
pub fn rational_determinant(n: usize, data: Vec<BigRational>) -> BigRational {
    assert_eq!(data.len(), n * n, "matrix is not {n}×{n}");
    let mut scale = BigInt::one();
    let mut ints = Vec::with_capacity(n * n);
    for row in data.chunks(n.max(1)) {
        let lcm = row
            .iter()
            .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        for x in row {
            ints.push(x.numer() * (&lcm / x.denom()));
        }
        scale *= lcm;
    }
    BigRational::new(bareiss_determinant(n, ints), scale)
}

/// Row-major square matrix built from an index function.
pub fn square_from_fn<T, F: FnMut(usize, usize) -> T>(n: usize, mut f: F) -> Vec<T> {
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(f(i, j));
        }
    }
    out
}

/// Determinant through the scalar's preferred algorithm.
pub fn det<T: Scalar>(n: usize, data: Vec<T>) -> T {
    T::determinant(n, data)
}
