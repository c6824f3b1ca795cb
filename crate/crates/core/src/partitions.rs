//! Integer partitions, hooks, and the symmetric-function machinery built on them.
//!
//! Partitions are stored without trailing zeros. Anything that depends on the
//! ambient number of variables takes `m` explicitly.

use std::cmp::Reverse;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{pow_int, rising, Scalar};

/// A weakly decreasing sequence of positive integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds a partition, dropping trailing zeros.
    pub fn new(parts: impl Into<Vec<u32>>) -> Result<Self> {
        let mut parts = parts.into();
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::domain(format!("{parts:?} is not weakly decreasing")));
        }
        while parts.last() == Some(&0) {
            parts.pop();
        }
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The hook `(arm, 1^leg)`; `arm` must be positive.
    pub fn hook(arm: u32, leg: u32) -> Self {
        assert!(arm > 0, "a hook has a nonempty first row");
        let mut parts = vec![arm];
        parts.extend(std::iter::repeat_n(1, leg as usize));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// `|λ|`
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `l(λ)`, the number of nonzero parts.
    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `λ_i` with 0-based index; zero beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Parts padded with zeros to length `m`.
    pub fn padded(&self, m: usize) -> Vec<u32> {
        let mut v = self.0.clone();
        v.resize(m.max(v.len()), 0);
        v
    }

    /// Hooks are `(a, 1^b)`; the empty partition counts as a (degenerate) hook.
    pub fn is_hook(&self) -> bool {
        self.0.iter().skip(1).all(|&p| p == 1)
    }

    /// `(arm, leg)` of a nonempty hook.
    pub fn arm_leg(&self) -> Option<(u32, u32)> {
        if self.is_empty() || !self.is_hook() {
            return None;
        }
        Some((self.0[0], (self.0.len() - 1) as u32))
    }

    /// Young-diagram containment `self ⊆ other`.
    pub fn is_contained_in(&self, other: &Partition) -> bool {
        contains(self, other)
    }

    /// All partitions of `weight` with at most `max_len` parts, in reverse lexicographic order.
    pub fn all_of_weight(weight: u32, max_len: usize) -> Vec<Partition> {
        fn rec(rem: u32, max_part: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            if slots == 0 {
                return;
            }
            for p in (1..=max_part.min(rem)).rev() {
                cur.push(p);
                rec(rem - p, p, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(weight, weight, max_len, &mut Vec::new(), &mut out);
        out
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "∅");
        }
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// Coordinates of a hook inside the power-sum frame: `τ = (n−k−δ, 1^{k−g})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HookFrame {
    pub n: u32,
    pub k: u32,
    pub delta: u32,
    pub g: u32,
}

impl HookFrame {
    pub fn new(n: u32, k: u32, delta: u32, g: u32) -> Result<Self> {
        if n == 0 || k >= n || delta > n - k - 1 || g > k {
            return Err(Error::domain(format!(
                "invalid hook frame (n={n}, k={k}, δ={delta}, g={g})"
            )));
        }
        Ok(HookFrame { n, k, delta, g })
    }

    /// The frame of `α(n, k) = (n−k, 1^k)`.
    pub fn alpha(n: u32, k: u32) -> Result<Self> {
        Self::new(n, k, 0, 0)
    }

    /// Locates a nonempty hook `τ ⊆ α(n, k)` in the frame.
    pub fn locate(tau: &Partition, n: u32, k: u32) -> Option<Self> {
        let (arm, leg) = tau.arm_leg()?;
        if k >= n || arm > n - k || leg > k {
            return None;
        }
        Some(HookFrame { n, k, delta: n - k - arm, g: k - leg })
    }

    pub fn partition(&self) -> Partition {
        Partition::hook(self.n - self.k - self.delta, self.k - self.g)
    }

    pub fn weight(&self) -> u32 {
        self.n - self.delta - self.g
    }
}

/// `α(n, k)` for `k = 0, …, n−1`: the hooks in the Schur expansion of the power sum `p_n`.
pub fn hooks_alpha(n: u32) -> Result<Vec<Partition>> {
    if n == 0 {
        return Err(Error::domain("power-sum degree n must be at least 1"));
    }
    Ok((0..n).map(|k| Partition::hook(n - k, k)).collect())
}

/// Every `μ ⊆ τ` that is a hook, together with `∅`, ordered by weight.
pub fn subhooks(tau: &Partition) -> Result<Vec<Partition>> {
    if !tau.is_hook() {
        return Err(Error::domain(format!("{tau} is not a hook")));
    }
    let mut out = vec![Partition::empty()];
    if let Some((arm, leg)) = tau.arm_leg() {
        for a in 1..=arm {
            for l in 0..=leg {
                out.push(Partition::hook(a, l));
            }
        }
    }
    out.sort_by_key(|p| (p.weight(), Reverse(p.clone())));
    Ok(out)
}

/// `μ ⊆ τ` in the Young-diagram order.
pub fn contains(mu: &Partition, tau: &Partition) -> bool {
    mu.length() <= tau.length() && mu.parts().iter().zip(tau.parts()).all(|(a, b)| a <= b)
}

/// Generalized Pochhammer symbol `(z)_μ = Π_i (z − i + 1)_{μ_i}`.
pub fn gen_pochhammer<T: Scalar>(z: &T, mu: &Partition) -> T {
    mu.parts()
        .iter()
        .enumerate()
        .fold(T::one(), |acc, (i, &p)| acc * rising(&(z.clone() - T::from_int(i as i64)), p))
}

/// Generalized binomial coefficient `binom(τ, μ)` for hooks `μ ⊆ τ`.
///
/// The hook formula only depends on arms and legs, so it is independent of
/// the `(n, k)` frame the hooks are written in. `binom(τ, ∅) = 1`.
pub fn gen_binomial<T: Scalar>(tau: &Partition, mu: &Partition) -> Result<T> {
    if !tau.is_hook() || !mu.is_hook() {
        return Err(Error::Unsupported(format!(
            "generalized binomial implemented for hooks only, got ({tau}, {mu})"
        )));
    }
    if !contains(mu, tau) {
        return Err(Error::domain(format!("{mu} ⊄ {tau}")));
    }
    let (Some((big_a, big_l)), Some((a, l))) = (tau.arm_leg(), mu.arm_leg()) else {
        return Ok(T::one());
    };
    let (big_a, big_l, a, l) = (big_a as i64, big_l as i64, a as i64, l as i64);
    // In frame coordinates: γ−δ = A−a, l−g = L−ℓ, n−δ−l = A+ℓ, n−g−γ = a+L, n−γ−l = a+ℓ.
    let c1 = binomial(big_a - 1, big_a - a);
    let c2 = binomial(big_l, big_l - l);
    let bracket = (big_a + l) * (a + big_l) - (big_a - a) * (big_l - l);
    let denom = (a + l) * (a + l);
    Ok(T::from_int(c1) * T::from_int(c2) * T::from_int(bracket) / T::from_int(denom))
}

fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1i64, |acc, i| acc * (n - i) / (i + 1))
}

/// `s_μ(1^m) = Π_{□∈μ} (m + c(□))/h(□)` (hook-content formula); zero when `l(μ) > m`.
pub fn schur_at_ones<T: Scalar>(mu: &Partition, m: usize) -> T {
    if mu.length() > m {
        return T::zero();
    }
    let conj = conjugate(mu);
    let mut num = T::one();
    let mut den = T::one();
    for (i, &row) in mu.parts().iter().enumerate() {
        for j in 0..row as usize {
            num = num * T::from_int(m as i64 + j as i64 - i as i64);
            let hook = (row as usize - j) + (conj.part(j) as usize - i) - 1;
            den = den * T::from_int(hook as i64);
        }
    }
    num / den
}

/// Power sum `p_k(λ) = Σ λ_i^k`.
pub fn power_sum<T: Scalar>(lambda: &[T], k: u32) -> T {
    lambda.iter().fold(T::zero(), |acc, x| acc + pow_int(x, k))
}

/// Complete homogeneous symmetric polynomials `h_0, …, h_max` via Newton's identities
/// `k h_k = Σ_{i=1}^k p_i h_{k−i}`.
pub fn complete_homogeneous<T: Scalar>(lambda: &[T], max: u32) -> Vec<T> {
    let p: Vec<T> = (0..=max).map(|k| power_sum(lambda, k)).collect();
    let mut h = vec![T::one()];
    for k in 1..=max as usize {
        let mut acc = T::zero();
        for i in 1..=k {
            acc = acc + p[i].clone() * h[k - i].clone();
        }
        h.push(acc / T::from_int(k as i64));
    }
    h
}

/// Schur polynomial `s_μ(λ)` by the Jacobi–Trudi determinant `det[h_{μ_i − i + j}]`.
///
/// Well defined at coincident coordinates, unlike the bialternant quotient.
pub fn schur_eval<T: Scalar>(mu: &Partition, lambda: &[T]) -> T {
    if mu.length() > lambda.len() {
        return T::zero();
    }
    let l = mu.length();
    if l == 0 {
        return T::one();
    }
    let max = mu.part(0) as usize + l;
    let h = complete_homogeneous(lambda, max as u32);
    let entries = linalg::square_from_fn(l, |i, j| {
        let idx = mu.part(i) as i64 - i as i64 + j as i64;
        if idx < 0 {
            T::zero()
        } else {
            h[idx as usize].clone()
        }
    });
    linalg::det(l, entries)
}

/// Product of hook lengths of the Young diagram of `μ`.
pub fn hook_length_product(mu: &Partition) -> u64 {
    let conj = conjugate(mu);
    let mut prod = 1u64;
    for (i, &row) in mu.parts().iter().enumerate() {
        for j in 0..row as usize {
            let arm = row as usize - j - 1;
            let leg = conj.part(j) as usize - i - 1;
            prod *= (arm + leg + 1) as u64;
        }
    }
    prod
}

/// Conjugate (transposed) partition.
pub fn conjugate(mu: &Partition) -> Partition {
    let first = mu.part(0);
    Partition((1..=first).map(|c| mu.parts().iter().filter(|&&p| p >= c).count() as u32).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use num_rational::BigRational;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Number of semistandard tableaux of shape `mu` with entries in 1..=m, by brute force.
    fn count_ssyt(mu: &Partition, m: u32) -> u64 {
        let cells: Vec<(usize, usize)> = mu
            .parts()
            .iter()
            .enumerate()
            .flat_map(|(i, &r)| (0..r as usize).map(move |j| (i, j)))
            .collect();
        fn rec(idx: usize, cells: &[(usize, usize)], fill: &mut Vec<Vec<u32>>, m: u32) -> u64 {
            if idx == cells.len() {
                return 1;
            }
            let (i, j) = cells[idx];
            let mut total = 0;
            for v in 1..=m {
                if j > 0 && fill[i][j - 1] > v {
                    continue;
                }
                if i > 0 && fill[i - 1][j] >= v {
                    continue;
                }
                fill[i][j] = v;
                total += rec(idx + 1, cells, fill, m);
            }
            total
        }
        let mut fill: Vec<Vec<u32>> = mu.parts().iter().map(|&r| vec![0; r as usize]).collect();
        rec(0, &cells, &mut fill, m)
    }

    #[test]
    fn partition_invariants() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(p(&[2, 1, 0, 0]), p(&[2, 1]));
        assert_eq!(p(&[3, 1, 1]).weight(), 5);
        assert_eq!(p(&[3, 1, 1]).length(), 3);
        assert!(p(&[3, 1, 1]).is_hook());
        assert!(!p(&[2, 2]).is_hook());
        assert_eq!(p(&[3, 1]).padded(4), vec![3, 1, 0, 0]);
    }

    #[test]
    fn json_is_plain_array() {
        let s = serde_json::to_string(&p(&[2, 1])).unwrap();
        assert_eq!(s, "[2,1]");
        let back: Partition = serde_json::from_str("[2,1,0]").unwrap();
        assert_eq!(back, p(&[2, 1]));
        assert!(serde_json::from_str::<Partition>("[1,2]").is_err());
        let frame = serde_json::to_value(HookFrame::alpha(3, 1).unwrap()).unwrap();
        assert_eq!(frame["delta"], 0);
    }

    #[test]
    fn hooks_alpha_examples() {
        assert_eq!(hooks_alpha(1).unwrap(), vec![p(&[1])]);
        assert_eq!(hooks_alpha(3).unwrap(), vec![p(&[3]), p(&[2, 1]), p(&[1, 1, 1])]);
        assert!(hooks_alpha(0).is_err());
    }

    #[test]
    fn power_sum_two_is_signed_hook_sum() {
        // p_2 = s_(2) − s_(1,1), checked at exact rational points in 3 variables.
        let lam = vec![q(1, 3), q(2, 7), q(5, 2)];
        let lhs = power_sum(&lam, 2);
        let rhs = schur_eval(&p(&[2]), &lam) - schur_eval(&p(&[1, 1]), &lam);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn subhooks_examples() {
        assert_eq!(subhooks(&p(&[1])).unwrap(), vec![Partition::empty(), p(&[1])]);
        assert_eq!(
            subhooks(&p(&[2, 1])).unwrap(),
            vec![Partition::empty(), p(&[1]), p(&[2]), p(&[1, 1]), p(&[2, 1])]
        );
        assert_eq!(
            subhooks(&p(&[1, 1])).unwrap(),
            vec![Partition::empty(), p(&[1]), p(&[1, 1])]
        );
        assert!(subhooks(&p(&[2, 2])).is_err());
    }

    #[test]
    fn subhooks_match_containment_filter() {
        for w in 0..=8 {
            for tau in Partition::all_of_weight(w, 9).into_iter().filter(Partition::is_hook) {
                let mut expected: Vec<Partition> = (0..=w)
                    .flat_map(|v| Partition::all_of_weight(v, 9))
                    .filter(|mu| mu.is_hook() && contains(mu, &tau))
                    .collect();
                let mut got = subhooks(&tau).unwrap();
                expected.sort();
                got.sort();
                assert_eq!(got, expected, "τ = {tau}");
            }
        }
    }

    #[test]
    fn containment_examples() {
        assert!(contains(&p(&[1]), &p(&[2, 1])));
        assert!(!contains(&p(&[2, 2]), &p(&[3, 1])));
        assert!(contains(&Partition::empty(), &p(&[4, 2])));
        assert!(!contains(&p(&[1, 1, 1]), &p(&[3])));
    }

    #[test]
    fn pochhammer_examples() {
        let z = q(7, 2);
        assert_eq!(gen_pochhammer(&z, &p(&[1])), z);
        assert_eq!(gen_pochhammer(&z, &p(&[1, 1])), z.clone() * (z.clone() - rational(1)));
        assert_eq!(gen_pochhammer(&rational(5), &p(&[2, 1])), rational(120));
        assert_eq!(gen_pochhammer(&rational(5), &Partition::empty()), rational(1));
    }

    #[test]
    fn binomial_examples() {
        let tau = p(&[2, 1]);
        assert_eq!(gen_binomial::<BigRational>(&tau, &tau).unwrap(), rational(1));
        assert_eq!(gen_binomial::<BigRational>(&tau, &p(&[1])).unwrap(), rational(3));
        assert_eq!(gen_binomial::<BigRational>(&tau, &p(&[2])).unwrap(), q(3, 2));
        assert_eq!(gen_binomial::<BigRational>(&tau, &Partition::empty()).unwrap(), rational(1));
        assert!(gen_binomial::<BigRational>(&p(&[1]), &p(&[2])).is_err());
        assert!(gen_binomial::<BigRational>(&p(&[2, 2]), &p(&[1])).is_err());
    }

    #[test]
    fn binomial_of_single_box_is_weight() {
        for w in 1..=8 {
            for tau in Partition::all_of_weight(w, 9).into_iter().filter(Partition::is_hook) {
                let b: BigRational = gen_binomial(&tau, &p(&[1])).unwrap();
                assert_eq!(b, rational(w as i64), "τ = {tau}");
            }
        }
    }

    /// Generalized binomial theorem: s_τ(1+x)/s_τ(1^m) = Σ_μ binom(τ,μ) s_μ(x)/s_μ(1^m).
    #[test]
    fn generalized_binomial_theorem_on_hooks() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for m in 1..=5usize {
            for w in 1..=4 {
                for tau in Partition::all_of_weight(w, m).into_iter().filter(Partition::is_hook) {
                    for _ in 0..20 {
                        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.9..0.9)).collect();
                        let shifted: Vec<f64> = x.iter().map(|v| 1.0 + v).collect();
                        let lhs = schur_eval(&tau, &shifted) / schur_at_ones::<f64>(&tau, m);
                        let rhs: f64 = subhooks(&tau)
                            .unwrap()
                            .iter()
                            .filter(|mu| mu.length() <= m)
                            .map(|mu| {
                                gen_binomial::<f64>(&tau, mu).unwrap() * schur_eval(mu, &x)
                                    / schur_at_ones::<f64>(mu, m)
                            })
                            .sum();
                        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "τ={tau} m={m}");
                    }
                }
            }
        }
    }

    #[test]
    fn weyl_dimension_examples() {
        assert_eq!(schur_at_ones::<BigRational>(&p(&[1]), 7), rational(7));
        assert_eq!(schur_at_ones::<BigRational>(&p(&[2, 1]), 3), rational(8));
        assert_eq!(schur_at_ones::<BigRational>(&Partition::empty(), 4), rational(1));
        assert_eq!(schur_at_ones::<BigRational>(&p(&[1, 1, 1]), 2), rational(0));
    }

    #[test]
    fn weyl_matches_tableaux_count_and_eval() {
        for m in 1..=6usize {
            for w in 0..=6 {
                for mu in Partition::all_of_weight(w, m) {
                    let weyl: BigRational = schur_at_ones(&mu, m);
                    let ones = vec![rational(1); m];
                    assert_eq!(schur_eval(&mu, &ones), weyl, "μ={mu} m={m}");
                    if w <= 5 && m <= 4 {
                        assert_eq!(weyl, rational(count_ssyt(&mu, m as u32) as i64));
                    }
                }
            }
        }
    }

    #[test]
    fn schur_eval_examples() {
        assert_eq!(schur_eval(&p(&[1]), &[2.5, 4.0]), 6.5);
        assert_eq!(schur_eval(&p(&[2]), &[q(3, 2), rational(0)]), q(9, 4));
        assert_eq!(schur_eval(&p(&[2, 1]), &vec![rational(1); 3]), rational(8));
    }

    #[test]
    fn hook_lengths() {
        assert_eq!(hook_length_product(&p(&[2])), 2);
        assert_eq!(hook_length_product(&p(&[2, 1])), 3);
        assert_eq!(hook_length_product(&p(&[3, 2])), 24);
        assert_eq!(conjugate(&p(&[3, 1])), p(&[2, 1, 1]));
    }

    proptest! {
        #[test]
        fn power_sum_in_hooks(m in 1usize..=6, n in 1u32..=6, seed in any::<u64>()) {
            prop_assume!(n as usize <= m);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let lam: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
            let lhs = power_sum(&lam, n);
            let rhs: f64 = hooks_alpha(n).unwrap().iter().enumerate()
                .map(|(k, a)| if k % 2 == 0 { schur_eval(a, &lam) } else { -schur_eval(a, &lam) })
                .sum();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1e-300) + 1e-15);
        }

        #[test]
        fn partition_json_round_trip(parts in proptest::collection::vec(0u32..6, 0..6)) {
            let mut parts = parts;
            parts.sort_unstable_by(|a, b| b.cmp(a));
            let tau = Partition::new(parts).unwrap();
            let s = serde_json::to_string(&tau).unwrap();
            prop_assert_eq!(serde_json::from_str::<Partition>(&s).unwrap(), tau);
        }
    }
}
