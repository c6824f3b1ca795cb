//! Large-`m` limits of the ingredients of the moment formula, with finite-`m`
//! diagnostics along a regime `p(m)/d(m) → θ`, `m/p(m) → η`, and the free
//! Jacobi reference moments at `η = 1, θ = 1/2`.
//!
//! Nothing here attempts the limit of `(1/m) E tr J^n` itself; the
//! [`scaling_equivalences_report`] only tabulates why the term-by-term limit
//! is indeterminate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{b_coeff, k_eigenvalue};
use crate::partitions::{gen_binomial, hook_length_product, schur_at_ones, subhooks, Partition};
use crate::scalar::Scalar;
use crate::simulate::laguerre1;
use crate::symjacobi::{u_at_ones, JacobiParams};

/// How integer dimensions are chosen along a regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegimeRule {
    /// `p = round(m/η)`, `d = round(p/θ)`.
    Rounded,
    /// `p = ⌊m/η⌋`, `d = ⌈p/θ⌉`.
    FloorCeil,
    /// `p = round(m/η)`, `d = p + m`, so that `q = m` and `s = 0`.
    ZeroS,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRegime {
    theta: f64,
    eta: f64,
    rule: RegimeRule,
}

impl AsymptoticRegime {
    /// Regime with the rounded rule.
    pub fn new(theta: f64, eta: f64) -> Result<Self> {
        Self::with_rule(theta, eta, RegimeRule::Rounded)
    }

    pub fn with_rule(theta: f64, eta: f64, rule: RegimeRule) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::domain(format!("θ ∈ (0,1) required, got {theta}")));
        }
        if !(eta > 0.0 && eta * theta > 0.0 && eta * theta < 1.0) {
            return Err(Error::domain(format!("η > 0 with ηθ ∈ (0,1) required, got η = {eta}")));
        }
        if rule == RegimeRule::ZeroS && ((1.0 - theta) / theta - eta).abs() > 1e-12 * eta {
            return Err(Error::domain(format!(
                "the s = 0 rule needs θ(1+η) = 1, got θ = {theta}, η = {eta}"
            )));
        }
        Ok(AsymptoticRegime { theta, eta, rule })
    }

    /// The `s(m) = 0` regime: `η = (1−θ)/θ`, `d = p + m`.
    pub fn zero_s(theta: f64) -> Result<Self> {
        Self::with_rule(theta, (1.0 - theta) / theta, RegimeRule::ZeroS)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn rule(&self) -> RegimeRule {
        self.rule
    }

    /// `(p(m), d(m))` before any validity filter.
    pub fn dimensions(&self, m: usize) -> (u32, u32) {
        let x = m as f64 / self.eta;
        let p = match self.rule {
            RegimeRule::FloorCeil => x.floor(),
            _ => x.round(),
        }
        .max(1.0);
        let d = match self.rule {
            RegimeRule::Rounded => (p / self.theta).round(),
            RegimeRule::FloorCeil => (p / self.theta).ceil(),
            RegimeRule::ZeroS => p + m as f64,
        }
        .max(p + 1.0);
        (p as u32, d as u32)
    }

    /// Jacobi parameters at `m`, or an error when `p ∧ q ≥ m` fails.
    pub fn params<T: Scalar>(&self, m: usize) -> Result<JacobiParams<T>> {
        let (p, d) = self.dimensions(m);
        let params = JacobiParams::<T>::from_dimensions(d, p, m as u32)?;
        Ok(params)
    }

    /// Whether the rule gives `s(m) = 0` at this `m`.
    pub fn has_zero_s(&self, m: usize) -> bool {
        let (p, d) = self.dimensions(m);
        (d - p) as usize == m
    }
}

/// `lim K_τ/d = |τ|`.
pub fn k_over_d_limit(tau: &Partition) -> f64 {
    tau.weight() as f64
}

/// `lim b_{μτ} s_μ(1^m) = (−1)^{|μ|} θ^{−|μ|} binom(τ, μ)`.
pub fn b_smu_limit(mu: &Partition, tau: &Partition, theta: f64) -> Result<f64> {
    if !mu.is_contained_in(tau) {
        return Err(Error::domain(format!("μ ⊆ τ required, got μ = {mu}, τ = {tau}")));
    }
    let w = mu.weight() as i32;
    let binom: f64 = gen_binomial(tau, mu)?;
    Ok((-1.0f64).powi(w) * theta.powi(-w) * binom)
}

/// `lim U_τ(1^m) = (1 − 1/θ)^{|τ|}`.
pub fn u_ones_limit(tau: &Partition, theta: f64) -> f64 {
    (1.0 - 1.0 / theta).powi(tau.weight() as i32)
}

/// The same limit summed term by term: `Σ_{μ⊆τ} (−1)^{|μ|} binom(τ, μ) θ^{−|μ|}`.
pub fn u_ones_limit_by_expansion(tau: &Partition, theta: f64) -> Result<f64> {
    let mut acc = 0.0;
    for mu in subhooks(tau)? {
        acc += b_smu_limit(&mu, tau, theta)?;
    }
    Ok(acc)
}

/// Free Jacobi moment `M_n(t, 1, 1/2)`:
/// `4^{−n} C(2n,n) + 2^{1−2n} Σ_{k=1}^n C(2n, n−k) (1/k) L¹_{k−1}(2kt) e^{−kt}`.
pub fn free_jacobi_moment_ref(n: u32, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("free_jacobi_moment_ref needs n ≥ 1"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("free_jacobi_moment_ref needs finite t ≥ 0, got {t}")));
    }
    let binom = |a: u32, b: u32| -> f64 { (0..b).fold(1.0, |acc, i| acc * (a - i) as f64 / (i + 1) as f64) };
    let scale = 0.5f64.powi(2 * n as i32);
    let mut sum = 0.0;
    for k in 1..=n {
        let kf = k as f64;
        sum += binom(2 * n, n - k) / kf * laguerre1(k - 1, 2.0 * kf * t) * (-kf * t).exp();
    }
    Ok(scale * binom(2 * n, n) + 2.0 * scale * sum)
}

/// One line of a diagnostic table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub m: usize,
    pub quantity: String,
    pub finite_value: f64,
    pub limit_value: f64,
    pub gap: f64,
}

impl ReportRow {
    fn new(m: usize, quantity: impl Into<String>, finite_value: f64, limit_value: f64) -> Self {
        let diff = (finite_value - limit_value).abs();
        let gap = if limit_value == 0.0 { diff } else { diff / limit_value.abs() };
        ReportRow { m, quantity: quantity.into(), finite_value, limit_value, gap }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// Distinct quantity names in first-appearance order.
    pub fn quantities(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for row in &self.rows {
            if !names.contains(&row.quantity) {
                names.push(row.quantity.clone());
            }
        }
        names
    }

    /// Rows of one quantity, in `m` order.
    pub fn series(&self, quantity: &str) -> Vec<&ReportRow> {
        let mut rows: Vec<&ReportRow> = self.rows.iter().filter(|r| r.quantity == quantity).collect();
        rows.sort_by_key(|r| r.m);
        rows
    }

    /// True when every quantity's gap never grows as `m` increases.
    pub fn gaps_non_increasing(&self) -> bool {
        self.quantities().iter().all(|q| self.series(q).windows(2).all(|w| w[1].gap <= w[0].gap))
    }

    pub fn max_gap_at(&self, m: usize) -> f64 {
        self.rows.iter().filter(|r| r.m == m).map(|r| r.gap).fold(0.0, f64::max)
    }

    /// CSV with columns `m, quantity, finite_value, limit_value, gap`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(row).map_err(|e| Error::Numerical(format!("csv: {e}")))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn scalar_from_f64<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite parameter")
}

/// Finite-`m` values of `K_τ/d`, `b_{μτ} s_μ(1^m)` for every hook `μ ⊆ τ`, and
/// `U_τ(1^m)` against their limits. Gaps are relative; computed in `T`, so
/// an exact scalar gives exact zeros where the finite value already equals the limit.
pub fn lemma_diagnostics<T: Scalar>(regime: &AsymptoticRegime, tau: &Partition, m_list: &[usize]) -> Result<Report> {
    let theta: T = scalar_from_f64(regime.theta());
    let mut rows = Vec::new();
    let mus = subhooks(tau)?;
    for &m in m_list {
        let params: JacobiParams<T> = regime.params(m)?;
        let gap = |finite: &T, limit: &T| -> f64 {
            let diff = (finite.clone() - limit.clone()).abs();
            if limit.is_zero() { diff.as_f64() } else { (diff / limit.abs()).as_f64() }
        };
        let mut push = |quantity: String, finite: T, limit: T| {
            rows.push(ReportRow { m, quantity, finite_value: finite.as_f64(), limit_value: limit.as_f64(), gap: gap(&finite, &limit) });
        };

        let kd = k_eigenvalue(&params, tau) / params.d();
        push("k_over_d".into(), kd, T::from_int(tau.weight() as i64));

        for mu in &mus {
            let finite = b_coeff(&params, mu, tau)? * schur_at_ones::<T>(mu, m);
            let w = mu.weight();
            let mut limit: T = gen_binomial(tau, mu)?;
            for _ in 0..w {
                limit = -limit / theta.clone();
            }
            push(format!("b_smu[{mu}]"), finite, limit);
        }

        let mut limit = T::one();
        for _ in 0..tau.weight() {
            limit = limit * (T::one() - T::one() / theta.clone());
        }
        push("u_ones".into(), u_at_ones(&params, tau)?, limit);
    }
    Ok(Report { rows })
}

/// `Σ ln x` over factors that must all be positive.
fn ln_product(factors: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut acc = 0.0;
    for x in factors {
        if x <= 0.0 {
            return Err(Error::domain(format!("non-positive factor {x} in a scaling product")));
        }
        acc += x.ln();
    }
    Ok(acc)
}

/// Tabulates the `s = 0` scaling claims for the chain `μ ⊆ τ ⊆ α`:
///
/// * `gamma_ratio`: `Π_{i≤l(τ)} (r+m−i+1)_{τ_i}/(m−i+1)_{τ_i} → (θ/(1−θ))^{|τ|}`
/// * `bracket_ratio`: `Π_{i≤l(α)} [2(τ_i+m−i)+r+1]/(α_i+μ_i+2m−2i+r+1) → 1`
/// * `pair_ratio`: `Π_{i≠j≤l(α)} (τ_i+τ_j+2m−i−j+r+1)/(α_i+μ_j+2m−i−j+r+1) → 1`
/// * `cross_product_claimed`: the cross product over `i ≤ l(α) < j ≤ m` divided
///   by `d^{2|τ|−|α|−|μ|}`, against the claimed limit 1
/// * `cross_product`: the same product against `θ^{−(2|τ|−|α|−|μ|)}`, which is
///   where it actually converges
/// * `s_alpha_growth`: `s_α(1^m)/d^{|α|} → (1−θ)^{|α|}/H_α`, the divergence
///   that leaves the term-by-term limit indeterminate
///
/// Products are accumulated in log space.
pub fn scaling_equivalences_report(
    regime: &AsymptoticRegime,
    tau: &Partition,
    mu: &Partition,
    alpha: &Partition,
    m_list: &[usize],
) -> Result<Report> {
    if !mu.is_contained_in(tau) || !tau.is_contained_in(alpha) {
        return Err(Error::domain(format!("μ ⊆ τ ⊆ α required, got {mu}, {tau}, {alpha}")));
    }
    let theta = regime.theta();
    let la = alpha.length();
    let e = 2 * tau.weight() as i32 - alpha.weight() as i32 - mu.weight() as i32;
    let mut rows = Vec::new();
    for &m in m_list {
        if !regime.has_zero_s(m) {
            return Err(Error::domain(format!("s(m) = 0 required, the regime gives q ≠ m at m = {m}")));
        }
        if la >= m {
            return Err(Error::domain(format!("l(α) < m required, got l(α) = {la}, m = {m}")));
        }
        let (p, d) = regime.dimensions(m);
        let (mf, r, df) = (m as f64, p as f64 - m as f64, d as f64);
        let tp = |i: usize| tau.part(i) as f64;
        let ap = |i: usize| alpha.part(i) as f64;
        let mp = |i: usize| mu.part(i) as f64;

        // 1-based i, j below.
        let mut ln_gamma = 0.0;
        for i in 1..=tau.length() {
            let k = tau.part(i - 1);
            ln_gamma += ln_product((0..k).map(|j| r + mf - i as f64 + 1.0 + j as f64))?;
            ln_gamma -= ln_product((0..k).map(|j| mf - i as f64 + 1.0 + j as f64))?;
        }
        rows.push(ReportRow::new(m, "gamma_ratio", ln_gamma.exp(), (theta / (1.0 - theta)).powi(tau.weight() as i32)));

        let num = ln_product((1..=la).map(|i| 2.0 * (tp(i - 1) + mf - i as f64) + r + 1.0))?;
        let den = ln_product((1..=la).map(|i| ap(i - 1) + mp(i - 1) + 2.0 * mf - 2.0 * i as f64 + r + 1.0))?;
        rows.push(ReportRow::new(m, "bracket_ratio", (num - den).exp(), 1.0));

        let pairs: Vec<(usize, usize)> = (1..=la).flat_map(|i| (1..=la).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let c = |i: usize, j: usize| 2.0 * mf - (i + j) as f64 + r + 1.0;
        let num = ln_product(pairs.iter().map(|&(i, j)| tp(i - 1) + tp(j - 1) + c(i, j)))?;
        let den = ln_product(pairs.iter().map(|&(i, j)| ap(i - 1) + mp(j - 1) + c(i, j)))?;
        rows.push(ReportRow::new(m, "pair_ratio", (num - den).exp(), 1.0));

        let cross = (1..=la).flat_map(|i| ((la + 1)..=m).map(move |j| (i, j)));
        let mut ln_cross = 0.0;
        for (i, j) in cross {
            let cc = c(i, j);
            ln_cross += 2.0 * (tp(i - 1) + cc).ln() - (ap(i - 1) + cc).ln() - (mp(i - 1) + cc).ln();
            if mp(i - 1) + cc <= 0.0 {
                return Err(Error::domain("non-positive factor in the cross product"));
            }
        }
        rows.push(ReportRow::new(m, "cross_product_claimed", (ln_cross - e as f64 * df.ln()).exp(), 1.0));
        rows.push(ReportRow::new(m, "cross_product", ln_cross.exp(), theta.powi(-e)));

        let growth = schur_at_ones::<f64>(alpha, m) / df.powi(alpha.weight() as i32);
        let limit = (1.0 - theta).powi(alpha.weight() as i32) / hook_length_product(alpha) as f64;
        rows.push(ReportRow::new(m, "s_alpha_growth", growth, limit));
    }
    Ok(Report { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn hook(a: u32, l: u32) -> Partition {
        Partition::hook(a, l)
    }

    #[test]
    fn limits_examples() {
        assert_eq!(k_over_d_limit(&hook(1, 0)), 1.0);
        assert_eq!(k_over_d_limit(&Partition::empty()), 0.0);
        let t1 = hook(1, 0);
        assert!((b_smu_limit(&t1, &t1, 0.3).unwrap() + 1.0 / 0.3).abs() < 1e-14);
        assert_eq!(b_smu_limit(&Partition::empty(), &hook(2, 1), 0.3).unwrap(), 1.0);
        assert!(b_smu_limit(&hook(2, 0), &hook(1, 1), 0.3).is_err());
        assert_eq!(u_ones_limit(&hook(2, 0), 0.5), 1.0);
        assert_eq!(u_ones_limit(&Partition::empty(), 0.5), 1.0);
    }

    #[test]
    fn u_limit_two_closed_forms() {
        for theta in [0.2, 0.5, 0.77] {
            for w in 1..=4 {
                for tau in Partition::all_of_weight(w, 4).into_iter().filter(|t| t.is_hook()) {
                    let a = u_ones_limit(&tau, theta);
                    let b = u_ones_limit_by_expansion(&tau, theta).unwrap();
                    assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "{tau} {theta}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn free_moments() {
        for n in 1..=10 {
            assert!((free_jacobi_moment_ref(n, 0.0).unwrap() - 1.0).abs() < 1e-12);
        }
        for t in [0.0, 0.3, 1.0, 2.5] {
            let v = free_jacobi_moment_ref(1, t).unwrap();
            assert!((v - 0.5 - 0.5 * (-t).exp()).abs() < 1e-12);
        }
        assert!((free_jacobi_moment_ref(1, 60.0).unwrap() - 0.5).abs() < 1e-12);
        assert!(free_jacobi_moment_ref(0, 1.0).is_err());
    }

    #[test]
    fn regime_rules() {
        let r = AsymptoticRegime::new(0.5, 1.0).unwrap();
        assert_eq!(r.dimensions(50), (50, 100));
        assert!(r.has_zero_s(50));
        let z = AsymptoticRegime::zero_s(0.4).unwrap();
        assert_eq!(z.dimensions(300), (200, 500));
        assert!(z.params::<f64>(300).is_err());
        assert!(AsymptoticRegime::new(0.5, 2.0).is_err());
        assert!(AsymptoticRegime::with_rule(0.5, 0.5, RegimeRule::ZeroS).is_err());
        let f = AsymptoticRegime::with_rule(0.3, 1.2, RegimeRule::FloorCeil).unwrap();
        let (p, d) = f.dimensions(100);
        assert!((p as f64 / d as f64 - 0.3).abs() < 0.01);
    }

    #[test]
    fn diagnostic_examples() {
        let regime = AsymptoticRegime::new(0.5, 1.0).unwrap();
        let rep = lemma_diagnostics::<Rational>(&regime, &hook(2, 1), &[500]).unwrap();
        let kd = &rep.series("k_over_d")[0];
        assert!((kd.finite_value - 3.0).abs() < 0.01);
        let rep = lemma_diagnostics::<Rational>(&regime, &hook(2, 1), &[200]).unwrap();
        assert!(rep.series("b_smu[(1)]")[0].gap < 0.01);
        let rep = lemma_diagnostics::<Rational>(&regime, &hook(2, 0), &[200]).unwrap();
        assert!(rep.series("u_ones")[0].gap < 0.01);
    }

    #[test]
    fn scaling_report_examples() {
        let z = AsymptoticRegime::zero_s(0.4).unwrap();
        let one = hook(1, 0);
        let rep = scaling_equivalences_report(&z, &one, &Partition::empty(), &hook(2, 0), &[300]).unwrap();
        assert!(rep.series("gamma_ratio")[0].gap < 0.02);
        assert!(rep.series("bracket_ratio")[0].gap < 0.01);
        let rep = scaling_equivalences_report(&z, &one, &one, &hook(2, 0), &[100, 400, 1600]).unwrap();
        let growth = rep.series("s_alpha_growth");
        assert!(growth[2].gap < growth[1].gap && growth[1].gap < growth[0].gap);
        assert!(growth[2].finite_value > 0.1);
        let cross = rep.series("cross_product");
        assert!(cross[2].gap < cross[1].gap && cross[2].gap < 0.01);
        assert!(scaling_equivalences_report(&AsymptoticRegime::new(0.3, 1.5).unwrap(), &one, &one, &one, &[100]).is_err());
    }

    #[test]
    fn csv_columns() {
        let z = AsymptoticRegime::zero_s(0.5).unwrap();
        let one = hook(1, 0);
        let csv = scaling_equivalences_report(&z, &one, &one, &one, &[10]).unwrap().to_csv().unwrap();
        assert!(csv.starts_with("m,quantity,finite_value,limit_value,gap\n"));
    }
}
