//! Monte Carlo estimates of `E tr((J_{t/d})^n)`.
//!
//! The primary simulator multiplies exact unitary increments `exp(iΔH)`,
//! `ΔH` Hermitian with entries of variance `Δt/d`, and reads off the upper-left
//! `m × p` corner. Only the first `m` rows of `Y` are ever needed, so the state
//! is an `m × d` block and each step costs `O(m d²)`.
//!
//! A second, cruder estimator integrates the eigenvalue SDE by Euler–Maruyama.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Taylor terms below this size (rows have unit norm) are dropped.
const TAYLOR_TOL: f64 = 1e-18;
const TAYLOR_MAX_TERMS: usize = 60;

/// Start offset of the eigenvalue SDE: `λ_i(0) = 1 − i·ε`.
pub const SDE_START_EPS: f64 = 1e-4;
/// Minimum eigenvalue gap enforced by the Euler scheme.
pub const SDE_MIN_GAP: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub d: u32,
    pub p: u32,
    pub m: u32,
    pub t: f64,
    pub steps: u32,
    pub paths: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.m == 0 || self.p >= self.d || self.m >= self.d {
            return Err(Error::precondition(format!(
                "1 ≤ p, m < d required, got d={}, p={}, m={}",
                self.d, self.p, self.m
            )));
        }
        if self.steps == 0 {
            return Err(Error::domain("steps must be at least 1"));
        }
        if self.paths == 0 {
            return Err(Error::domain("paths must be at least 1"));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return Err(Error::domain(format!("time must be finite and ≥ 0, got {}", self.t)));
        }
        Ok(())
    }

    /// `q = d − p`
    pub fn q(&self) -> u32 {
        self.d - self.p
    }

    fn rng(&self, path: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(path);
        rng
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub paths: u64,
}

impl PathEstimate {
    /// Mean and standard error of per-path samples.
    ///
    /// Samples are sorted and summed pairwise, so the result does not depend on
    /// the order in which paths were produced.
    pub fn from_samples(mut samples: Vec<f64>) -> Self {
        let n = samples.len();
        if n == 0 {
            return PathEstimate { mean: f64::NAN, stderr: f64::NAN, paths: 0 };
        }
        samples.sort_by(f64::total_cmp);
        let mean = pairwise_sum(&samples) / n as f64;
        let dev: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
        let var = if n > 1 { pairwise_sum(&dev) / (n - 1) as f64 } else { 0.0 };
        PathEstimate { mean, stderr: (var / n as f64).sqrt(), paths: n as u64 }
    }
}

fn pairwise_sum(x: &[f64]) -> f64 {
    if x.len() <= 16 {
        return x.iter().sum();
    }
    let (a, b) = x.split_at(x.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Hermitian increment `ΔH = A + iB` stored as symmetric `A` and antisymmetric `B`.
struct Increment {
    d: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Increment {
    fn new(d: usize) -> Self {
        Increment { d, a: vec![0.0; d * d], b: vec![0.0; d * d] }
    }

    /// Diagonal `N(0, var)`, off-diagonal complex with `E|h|² = var`.
    fn sample<R: Rng>(&mut self, var: f64, rng: &mut R) {
        let d = self.d;
        let sd = var.sqrt();
        let sd_half = (var / 2.0).sqrt();
        for i in 0..d {
            let g: f64 = rng.sample(StandardNormal);
            self.a[i * d + i] = sd * g;
            self.b[i * d + i] = 0.0;
            for j in i + 1..d {
                let x: f64 = rng.sample(StandardNormal);
                let y: f64 = rng.sample(StandardNormal);
                let (x, y) = (sd_half * x, sd_half * y);
                self.a[i * d + j] = x;
                self.a[j * d + i] = x;
                self.b[i * d + j] = y;
                self.b[j * d + i] = -y;
            }
        }
    }
}

/// First `rows` rows of a unitary matrix, real and imaginary parts row-major.
struct Rows {
    rows: usize,
    d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    // scratch
    t_re: Vec<f64>,
    t_im: Vec<f64>,
    n_re: Vec<f64>,
    n_im: Vec<f64>,
}

impl Rows {
    fn identity(rows: usize, d: usize) -> Self {
        let mut re = vec![0.0; rows * d];
        for i in 0..rows {
            re[i * d + i] = 1.0;
        }
        let z = vec![0.0; rows * d];
        Rows { rows, d, re, im: z.clone(), t_re: z.clone(), t_im: z.clone(), n_re: z.clone(), n_im: z }
    }

    /// `R ← R · exp(iΔH)` by a Taylor series run to machine precision.
    fn right_multiply_exp(&mut self, h: &Increment) {
        let d = self.d;
        self.t_re.copy_from_slice(&self.re);
        self.t_im.copy_from_slice(&self.im);
        for k in 1..=TAYLOR_MAX_TERMS {
            // (X + iY)(−B + iA) = −(XB + YA) + i(XA − YB)
            self.n_re.iter_mut().for_each(|v| *v = 0.0);
            self.n_im.iter_mut().for_each(|v| *v = 0.0);
            let inv_k = 1.0 / k as f64;
            for i in 0..self.rows {
                let x = &self.t_re[i * d..(i + 1) * d];
                let y = &self.t_im[i * d..(i + 1) * d];
                let out_re = &mut self.n_re[i * d..(i + 1) * d];
                let out_im = &mut self.n_im[i * d..(i + 1) * d];
                for l in 0..d {
                    let (xl, yl) = (x[l] * inv_k, y[l] * inv_k);
                    let a_row = &h.a[l * d..(l + 1) * d];
                    let b_row = &h.b[l * d..(l + 1) * d];
                    for c in 0..d {
                        out_re[c] -= xl * b_row[c] + yl * a_row[c];
                        out_im[c] += xl * a_row[c] - yl * b_row[c];
                    }
                }
            }
            std::mem::swap(&mut self.t_re, &mut self.n_re);
            std::mem::swap(&mut self.t_im, &mut self.n_im);
            let mut size = 0.0f64;
            for (acc, v) in self.re.iter_mut().zip(&self.t_re) {
                *acc += v;
                size = size.max(v.abs());
            }
            for (acc, v) in self.im.iter_mut().zip(&self.t_im) {
                *acc += v;
                size = size.max(v.abs());
            }
            if size < TAYLOR_TOL {
                break;
            }
        }
    }

    fn entry(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.re[i * self.d + j], self.im[i * self.d + j])
    }

    /// `max |R R* − I|`
    fn unitarity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.rows {
                let mut s = Complex64::new(0.0, 0.0);
                for c in 0..self.d {
                    s += self.entry(i, c) * self.entry(j, c).conj();
                }
                if i == j {
                    s -= 1.0;
                }
                worst = worst.max(s.norm());
            }
        }
        worst
    }

    /// `J = X X*` with `X` the first `m` rows, first `p` columns.
    fn corner(&self, m: usize, p: usize) -> Vec<Complex64> {
        let mut j = vec![Complex64::new(0.0, 0.0); m * m];
        for a in 0..m {
            for b in a..m {
                let mut s = Complex64::new(0.0, 0.0);
                for c in 0..p {
                    s += self.entry(a, c) * self.entry(b, c).conj();
                }
                j[a * m + b] = s;
                j[b * m + a] = s.conj();
            }
        }
        j
    }
}

/// Paths advanced together; the innermost loops run across lanes.
const LANES: usize = 8;

type Lane = [f64; LANES];

const ZERO_LANE: Lane = [0.0; LANES];

/// `LANES` independent copies of [`Rows`], one per path.
struct Batch {
    rows: usize,
    d: usize,
    re: Vec<Lane>,
    im: Vec<Lane>,
    t_re: Vec<Lane>,
    t_im: Vec<Lane>,
    n_re: Vec<Lane>,
    n_im: Vec<Lane>,
    a: Vec<Lane>,
    b: Vec<Lane>,
}

impl Batch {
    fn identity(rows: usize, d: usize) -> Self {
        let mut re = vec![ZERO_LANE; rows * d];
        for i in 0..rows {
            re[i * d + i] = [1.0; LANES];
        }
        let z = vec![ZERO_LANE; rows * d];
        Batch {
            rows,
            d,
            re,
            im: z.clone(),
            t_re: z.clone(),
            t_im: z.clone(),
            n_re: z.clone(),
            n_im: z,
            a: vec![ZERO_LANE; d * d],
            b: vec![ZERO_LANE; d * d],
        }
    }

    /// Same draw order per lane as [`Increment::sample`].
    fn sample(&mut self, var: f64, rngs: &mut [ChaCha8Rng]) {
        let d = self.d;
        let sd = var.sqrt();
        let sd_half = (var / 2.0).sqrt();
        for (k, rng) in rngs.iter_mut().enumerate() {
            for i in 0..d {
                let g: f64 = rng.sample(StandardNormal);
                self.a[i * d + i][k] = sd * g;
                self.b[i * d + i][k] = 0.0;
                for j in i + 1..d {
                    let x: f64 = rng.sample(StandardNormal);
                    let y: f64 = rng.sample(StandardNormal);
                    let (x, y) = (sd_half * x, sd_half * y);
                    self.a[i * d + j][k] = x;
                    self.a[j * d + i][k] = x;
                    self.b[i * d + j][k] = y;
                    self.b[j * d + i][k] = -y;
                }
            }
        }
    }

    fn right_multiply_exp(&mut self) {
        let kernel = Kernel::detect();
        let (d, rows) = (self.d, self.rows);
        self.t_re.copy_from_slice(&self.re);
        self.t_im.copy_from_slice(&self.im);
        for k in 1..=TAYLOR_MAX_TERMS {
            kernel.product(rows, d, &self.t_re, &self.t_im, &self.a, &self.b, &mut self.n_re, &mut self.n_im);
            let size = kernel.accumulate(1.0 / k as f64, &self.n_re, &self.n_im, &mut self.t_re, &mut self.t_im, &mut self.re, &mut self.im);
            if size < TAYLOR_TOL {
                break;
            }
        }
    }

    fn lane(&self, q: usize) -> Rows {
        let mut out = Rows::identity(self.rows, self.d);
        for idx in 0..self.rows * self.d {
            out.re[idx] = self.re[idx][q];
            out.im[idx] = self.im[idx][q];
        }
        out
    }
}

/// Instruction set used by the batched Taylor kernel, chosen at runtime.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Kernel {
    Portable,
    #[cfg(target_arch = "x86_64")]
    Avx2,
    #[cfg(target_arch = "x86_64")]
    Avx512,
}

impl Kernel {
    fn detect() -> Self {
        #[cfg(target_arch = "x86_64")]
        {
            if std::is_x86_feature_detected!("avx512f") {
                return Kernel::Avx512;
            }
            if std::is_x86_feature_detected!("avx2") && std::is_x86_feature_detected!("fma") {
                return Kernel::Avx2;
            }
        }
        Kernel::Portable
    }

    /// `N = (X + iY)(iA − B)`. With `A` symmetric and `B` antisymmetric, entry
    /// `(i, c)` is a dot product of row `i` of `X, Y` with row `c` of `A, B`.
    #[allow(clippy::too_many_arguments)]
    fn product(self, rows: usize, d: usize, x: &[Lane], y: &[Lane], a: &[Lane], b: &[Lane], n_re: &mut [Lane], n_im: &mut [Lane]) {
        assert!(x.len() >= rows * d && y.len() >= rows * d && n_re.len() >= rows * d && n_im.len() >= rows * d);
        assert!(a.len() >= d * d && b.len() >= d * d);
        match self {
            // SAFETY: lengths checked above; the feature was detected at runtime.
            #[cfg(target_arch = "x86_64")]
            Kernel::Avx512 => unsafe { x86::product_avx512(rows, d, x, y, a, b, n_re, n_im) },
            #[cfg(target_arch = "x86_64")]
            Kernel::Avx2 => unsafe { x86::product_avx2(rows, d, x, y, a, b, n_re, n_im) },
            Kernel::Portable => {
                for i in 0..rows {
                    for c in 0..d {
                        let mut sr = ZERO_LANE;
                        let mut si = ZERO_LANE;
                        for l in 0..d {
                            let (xl, yl, al, bl) = (&x[i * d + l], &y[i * d + l], &a[c * d + l], &b[c * d + l]);
                            for q in 0..LANES {
                                sr[q] += xl[q] * bl[q] - yl[q] * al[q];
                                si[q] += xl[q] * al[q] + yl[q] * bl[q];
                            }
                        }
                        n_re[i * d + c] = sr;
                        n_im[i * d + c] = si;
                    }
                }
            }
        }
    }

    /// `T ← N/k`, `R ← R + T`; returns `max |T|` over entries and lanes.
    #[allow(clippy::too_many_arguments)]
    fn accumulate(self, inv_k: f64, n_re: &[Lane], n_im: &[Lane], t_re: &mut [Lane], t_im: &mut [Lane], re: &mut [Lane], im: &mut [Lane]) -> f64 {
        let len = re.len();
        assert!(n_re.len() == len && n_im.len() == len && t_re.len() == len && t_im.len() == len && im.len() == len);
        match self {
            // SAFETY: lengths checked above; the feature was detected at runtime.
            #[cfg(target_arch = "x86_64")]
            Kernel::Avx512 => unsafe { x86::accumulate_avx512(inv_k, n_re, n_im, t_re, t_im, re, im) },
            #[cfg(target_arch = "x86_64")]
            Kernel::Avx2 => unsafe { x86::accumulate_avx2(inv_k, n_re, n_im, t_re, t_im, re, im) },
            Kernel::Portable => {
                let mut size = 0.0f64;
                for idx in 0..len {
                    for q in 0..LANES {
                        let vr = n_re[idx][q] * inv_k;
                        let vi = n_im[idx][q] * inv_k;
                        t_re[idx][q] = vr;
                        t_im[idx][q] = vi;
                        re[idx][q] += vr;
                        im[idx][q] += vi;
                        size = size.max(vr.abs()).max(vi.abs());
                    }
                }
                size
            }
        }
    }
}

#[cfg(target_arch = "x86_64")]
mod x86 {
    use super::Lane;
    use std::arch::x86_64::*;

    #[inline(always)]
    fn ptr(v: &[Lane], idx: usize) -> *const f64 {
        v[idx..].as_ptr() as *const f64
    }

    #[inline(always)]
    fn ptr_mut(v: &mut [Lane], idx: usize) -> *mut f64 {
        v[idx..].as_mut_ptr() as *mut f64
    }

    #[target_feature(enable = "avx512f")]
    #[allow(clippy::too_many_arguments)]
    pub(super) unsafe fn product_avx512(rows: usize, d: usize, x: &[Lane], y: &[Lane], a: &[Lane], b: &[Lane], n_re: &mut [Lane], n_im: &mut [Lane]) {
        for i in 0..rows {
            for c in 0..d {
                let mut sr = _mm512_setzero_pd();
                let mut si = _mm512_setzero_pd();
                for l in 0..d {
                    let xl = _mm512_loadu_pd(ptr(x, i * d + l));
                    let yl = _mm512_loadu_pd(ptr(y, i * d + l));
                    let al = _mm512_loadu_pd(ptr(a, c * d + l));
                    let bl = _mm512_loadu_pd(ptr(b, c * d + l));
                    sr = _mm512_fmadd_pd(xl, bl, sr);
                    sr = _mm512_fnmadd_pd(yl, al, sr);
                    si = _mm512_fmadd_pd(xl, al, si);
                    si = _mm512_fmadd_pd(yl, bl, si);
                }
                _mm512_storeu_pd(ptr_mut(n_re, i * d + c), sr);
                _mm512_storeu_pd(ptr_mut(n_im, i * d + c), si);
            }
        }
    }

    #[target_feature(enable = "avx512f")]
    pub(super) unsafe fn accumulate_avx512(inv_k: f64, n_re: &[Lane], n_im: &[Lane], t_re: &mut [Lane], t_im: &mut [Lane], re: &mut [Lane], im: &mut [Lane]) -> f64 {
        let scale = _mm512_set1_pd(inv_k);
        let mut size = _mm512_setzero_pd();
        for idx in 0..re.len() {
            let vr = _mm512_mul_pd(_mm512_loadu_pd(ptr(n_re, idx)), scale);
            let vi = _mm512_mul_pd(_mm512_loadu_pd(ptr(n_im, idx)), scale);
            _mm512_storeu_pd(ptr_mut(t_re, idx), vr);
            _mm512_storeu_pd(ptr_mut(t_im, idx), vi);
            _mm512_storeu_pd(ptr_mut(re, idx), _mm512_add_pd(_mm512_loadu_pd(ptr(re, idx)), vr));
            _mm512_storeu_pd(ptr_mut(im, idx), _mm512_add_pd(_mm512_loadu_pd(ptr(im, idx)), vi));
            size = _mm512_max_pd(size, _mm512_max_pd(_mm512_abs_pd(vr), _mm512_abs_pd(vi)));
        }
        _mm512_reduce_max_pd(size)
    }

    #[target_feature(enable = "avx2,fma")]
    #[allow(clippy::too_many_arguments)]
    pub(super) unsafe fn product_avx2(rows: usize, d: usize, x: &[Lane], y: &[Lane], a: &[Lane], b: &[Lane], n_re: &mut [Lane], n_im: &mut [Lane]) {
        for i in 0..rows {
            for c in 0..d {
                let mut sr = [_mm256_setzero_pd(); 2];
                let mut si = [_mm256_setzero_pd(); 2];
                for l in 0..d {
                    for h in 0..2 {
                        let off = 4 * h;
                        let xl = _mm256_loadu_pd(ptr(x, i * d + l).add(off));
                        let yl = _mm256_loadu_pd(ptr(y, i * d + l).add(off));
                        let al = _mm256_loadu_pd(ptr(a, c * d + l).add(off));
                        let bl = _mm256_loadu_pd(ptr(b, c * d + l).add(off));
                        sr[h] = _mm256_fmadd_pd(xl, bl, sr[h]);
                        sr[h] = _mm256_fnmadd_pd(yl, al, sr[h]);
                        si[h] = _mm256_fmadd_pd(xl, al, si[h]);
                        si[h] = _mm256_fmadd_pd(yl, bl, si[h]);
                    }
                }
                for h in 0..2 {
                    _mm256_storeu_pd(ptr_mut(n_re, i * d + c).add(4 * h), sr[h]);
                    _mm256_storeu_pd(ptr_mut(n_im, i * d + c).add(4 * h), si[h]);
                }
            }
        }
    }

    #[target_feature(enable = "avx2,fma")]
    pub(super) unsafe fn accumulate_avx2(inv_k: f64, n_re: &[Lane], n_im: &[Lane], t_re: &mut [Lane], t_im: &mut [Lane], re: &mut [Lane], im: &mut [Lane]) -> f64 {
        let scale = _mm256_set1_pd(inv_k);
        let sign = _mm256_set1_pd(-0.0);
        let mut size = _mm256_setzero_pd();
        for idx in 0..re.len() {
            for h in 0..2 {
                let off = 4 * h;
                let vr = _mm256_mul_pd(_mm256_loadu_pd(ptr(n_re, idx).add(off)), scale);
                let vi = _mm256_mul_pd(_mm256_loadu_pd(ptr(n_im, idx).add(off)), scale);
                _mm256_storeu_pd(ptr_mut(t_re, idx).add(off), vr);
                _mm256_storeu_pd(ptr_mut(t_im, idx).add(off), vi);
                _mm256_storeu_pd(ptr_mut(re, idx).add(off), _mm256_add_pd(_mm256_loadu_pd(ptr(re, idx).add(off)), vr));
                _mm256_storeu_pd(ptr_mut(im, idx).add(off), _mm256_add_pd(_mm256_loadu_pd(ptr(im, idx).add(off)), vi));
                size = _mm256_max_pd(size, _mm256_max_pd(_mm256_andnot_pd(sign, vr), _mm256_andnot_pd(sign, vi)));
            }
        }
        let mut lanes = [0.0f64; 4];
        _mm256_storeu_pd(lanes.as_mut_ptr(), size);
        lanes.into_iter().fold(0.0, f64::max)
    }
}

/// Evolves paths `first .. first + LANES` together.
fn evolve_batch(config: &SimConfig, rows: usize, first: u64) -> Vec<Rows> {
    let d = config.d as usize;
    let mut rngs: Vec<ChaCha8Rng> = (0..LANES as u64).map(|q| config.rng(first + q)).collect();
    let mut batch = Batch::identity(rows, d);
    let var = config.t / config.steps as f64 / d as f64;
    for _ in 0..config.steps {
        batch.sample(var, &mut rngs);
        batch.right_multiply_exp();
    }
    (0..LANES).map(|q| batch.lane(q)).collect()
}

/// Applies `f` to the final row block of every path, in path order.
fn map_paths<T: Send, F>(config: &SimConfig, rows: usize, f: F) -> Vec<T>
where
    F: Fn(&Rows) -> T + Sync,
{
    let batches = config.paths.div_ceil(LANES as u64);
    let nested: Vec<Vec<T>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let first = b * LANES as u64;
            let keep = (config.paths - first).min(LANES as u64) as usize;
            evolve_batch(config, rows, first).iter().take(keep).map(&f).collect()
        })
        .collect();
    nested.into_iter().flatten().collect()
}

fn evolve<R: Rng>(rows: usize, d: usize, t: f64, steps: u32, rng: &mut R) -> Rows {
    let mut state = Rows::identity(rows, d);
    let mut inc = Increment::new(d);
    let var = t / steps as f64 / d as f64;
    for _ in 0..steps {
        inc.sample(var, rng);
        state.right_multiply_exp(&inc);
    }
    state
}

/// `Y_{t/d}` sampled as an ordered product of `steps` exact unitary increments.
pub fn sample_unitary_bm<R: Rng>(d: usize, t: f64, steps: u32, rng: &mut R) -> Result<DMatrix<Complex64>> {
    if steps == 0 || d == 0 {
        return Err(Error::domain("sample_unitary_bm needs d ≥ 1 and steps ≥ 1"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be finite and ≥ 0, got {t}")));
    }
    let state = evolve(d, d, t, steps, rng);
    Ok(DMatrix::from_fn(d, d, |i, j| state.entry(i, j)))
}

/// `J = (P_m Y Q_p)(P_m Y Q_p)*`.
pub fn corner_process(y: &DMatrix<Complex64>, m: usize, p: usize) -> Result<DMatrix<Complex64>> {
    if m > y.nrows() || p > y.ncols() {
        return Err(Error::domain(format!("corner {m}×{p} does not fit in {}×{}", y.nrows(), y.ncols())));
    }
    let x = y.view((0, 0), (m, p));
    Ok(x * x.adjoint())
}

/// `max |Y*Y − I|`.
pub fn unitarity_defect(y: &DMatrix<Complex64>) -> f64 {
    let n = y.nrows();
    (y.adjoint() * y - DMatrix::<Complex64>::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `tr(J^n)` for `n = 1..=max_n`.
fn trace_powers(j: &[Complex64], m: usize, max_n: u32) -> Vec<f64> {
    let mut out = Vec::with_capacity(max_n as usize);
    let mut pow = j.to_vec();
    for n in 1..=max_n {
        out.push((0..m).map(|i| pow[i * m + i].re).sum());
        if n < max_n {
            let mut next = vec![Complex64::new(0.0, 0.0); m * m];
            for a in 0..m {
                for c in 0..m {
                    let l = pow[a * m + c];
                    for b in 0..m {
                        next[a * m + b] += l * j[c * m + b];
                    }
                }
            }
            pow = next;
        }
    }
    out
}

/// Per-path samples of `tr(J^n)` for each requested `n`, from shared paths.
fn trace_samples(config: &SimConfig, ns: &[u32]) -> Result<Vec<Vec<f64>>> {
    config.validate()?;
    let max_n = ns.iter().copied().max().unwrap_or(1).max(1);
    let (m, p) = (config.m as usize, config.p as usize);
    let per_path = map_paths(config, m, |state| trace_powers(&state.corner(m, p), m, max_n));
    Ok(ns
        .iter()
        .map(|&n| per_path.iter().map(|v| v[n as usize - 1]).collect())
        .collect())
}

/// Monte Carlo `E tr((J_{t/d})^n)` from the unitary Brownian motion.
pub fn trace_moment_mc(config: &SimConfig, n: u32) -> Result<PathEstimate> {
    Ok(trace_moments_mc(config, &[n])?.remove(0))
}

/// Several moments from the same set of paths.
pub fn trace_moments_mc(config: &SimConfig, ns: &[u32]) -> Result<Vec<PathEstimate>> {
    if ns.is_empty() || ns.contains(&0) {
        return Err(Error::domain("moment orders must be ≥ 1"));
    }
    Ok(trace_samples(config, ns)?.into_iter().map(PathEstimate::from_samples).collect())
}

/// Largest unitarity defect of the `m × d` row block over all steps of one path.
pub fn path_unitarity_defect(config: &SimConfig, path: u64) -> Result<f64> {
    config.validate()?;
    let d = config.d as usize;
    let mut rng = config.rng(path);
    let mut state = Rows::identity(config.m as usize, d);
    let mut inc = Increment::new(d);
    let var = config.t / config.steps as f64 / d as f64;
    let mut worst = 0.0f64;
    for _ in 0..config.steps {
        inc.sample(var, &mut rng);
        state.right_multiply_exp(&inc);
        worst = worst.max(state.unitarity_defect());
    }
    Ok(worst)
}

/// Exact mean `E (1/d) tr Y` of the discrete scheme after `steps` increments:
/// `c^steps` with `c = e^{−v/2} L¹_{d−1}(v) / d`, `v = t/(steps·d)` the entry variance.
pub fn scheme_trace_mean(d: u32, t: f64, steps: u32) -> f64 {
    let v = t / steps as f64 / d as f64;
    let c = (-v / 2.0).exp() * laguerre1(d - 1, v) / d as f64;
    c.powi(steps as i32)
}

/// `L^{(1)}_n(x) = Σ_k C(n+1, n−k) (−x)^k / k!`.
pub(crate) fn laguerre1(n: u32, x: f64) -> f64 {
    let mut term = (n + 1) as f64; // C(n+1, n)
    let mut acc = term;
    for k in 1..=n {
        // C(n+1, n−k) / C(n+1, n−k+1) = (n−k+1)/(k+1)
        term *= -x * (n - k + 1) as f64 / ((k + 1) as f64 * k as f64);
        acc += term;
    }
    acc
}

/// Monte Carlo `E (1/d) tr Y_{t/d}` (used to validate the one-step scheme mean).
pub fn normalized_trace_mc(d: u32, t: f64, steps: u32, paths: u64, seed: u64) -> Result<PathEstimate> {
    let cfg = SimConfig { d, p: 1, m: 1, t, steps, paths, seed };
    if d == 0 || steps == 0 || paths == 0 {
        return Err(Error::domain("normalized_trace_mc needs d, steps, paths ≥ 1"));
    }
    let dd = d as usize;
    let samples = map_paths(&cfg, dd, |state| (0..dd).map(|i| state.re[i * dd + i]).sum::<f64>() / d as f64);
    Ok(PathEstimate::from_samples(samples))
}

/// Drift of the eigenvalue SDE (API time).
fn sde_drift(lambda: &[f64], d: f64, p: f64, out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let li = lambda[i];
        let mut rep = 0.0;
        for (j, &lj) in lambda.iter().enumerate() {
            if j != i {
                rep += (li * (1.0 - lj) + lj * (1.0 - li)) / (li - lj);
            }
        }
        *o = ((p - d * li) + rep) / d;
    }
}

fn sde_project(lambda: &mut [f64]) {
    for x in lambda.iter_mut() {
        if *x > 1.0 {
            *x = 2.0 - *x;
        }
        if *x < 0.0 {
            *x = -*x;
        }
        *x = x.clamp(f64::EPSILON, 1.0 - f64::EPSILON);
    }
    lambda.sort_by(|a, b| b.total_cmp(a));
    for i in 1..lambda.len() {
        let gap = lambda[i - 1] - lambda[i];
        if gap < SDE_MIN_GAP {
            let push = (SDE_MIN_GAP - gap) / 2.0;
            lambda[i - 1] += push;
            lambda[i] -= push;
        }
    }
}

/// Monte Carlo `E Σ λ_i^n` from Euler–Maruyama on the eigenvalue SDE,
/// started at `λ_i(0) = 1 − i·ε`.
///
/// Each of the `steps` nominal steps is subdivided so that no substep is longer
/// than `0.01·d·g²`, `g` the smallest eigenvalue gap, which keeps the
/// repulsion term from overshooting right after the near-collision start.
pub fn eigen_sde_euler(config: &SimConfig, n: u32) -> Result<PathEstimate> {
    config.validate()?;
    let m = config.m as usize;
    if config.p.min(config.q()) < config.m {
        return Err(Error::precondition(format!(
            "p ∧ q > m − 1/2 required for the eigenvalue SDE, got p={}, q={}, m={m}",
            config.p,
            config.q()
        )));
    }
    if n == 0 {
        return Err(Error::domain("moment order n must be at least 1"));
    }
    let (d, p) = (config.d as f64, config.p as f64);
    let dt = config.t / config.steps as f64;
    let samples: Vec<f64> = (0..config.paths)
        .into_par_iter()
        .map(|path| {
            let mut rng = config.rng(path);
            let mut lambda: Vec<f64> = (1..=m).map(|i| 1.0 - i as f64 * SDE_START_EPS).collect();
            let mut drift = vec![0.0; m];
            for _ in 0..config.steps {
                let mut left = dt;
                while left > 0.0 {
                    let gap = lambda.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
                    let h = left.min(0.01 * d * gap * gap);
                    sde_drift(&lambda, d, p, &mut drift);
                    let sq = h.sqrt();
                    for (x, b) in lambda.iter_mut().zip(&drift) {
                        let g: f64 = rng.sample(StandardNormal);
                        let vol = (2.0 / d * *x * (1.0 - *x)).max(0.0).sqrt();
                        *x += b * h + vol * sq * g;
                    }
                    sde_project(&mut lambda);
                    left -= h;
                }
            }
            lambda.iter().map(|x| x.powi(n as i32)).sum()
        })
        .collect();
    Ok(PathEstimate::from_samples(samples))
}
