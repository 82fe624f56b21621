//! Trigonometric polynomials, coefficient-represented ultradistributions, and the norms
//! `‖·‖_{M_p,h}`, `‖·‖_{M_p,r_j}`, `σ_λ`, `σ'_λ`.
//!
//! Analysis is coefficient-first. Time-domain sampling is used only for sup norms (FFT on an
//! oversampled grid, then golden-section refinement) and for the sampled Fourier transform.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::verdict::{bounded_test, pattern1, reduce1, Class, GridUsed, GrowthVerdict, Method, Property, Quant, DEFAULT_TAU};
use crate::weights::{LogWeights, RSequence, WeightSequence};
use crate::{Error, Result, INV_TWO_PI};

/// Default coefficient range for sweeps over distribution oracles.
pub const DEFAULT_K_MAX: usize = 4096;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// `Σ_{|k| ≤ N} c_k e^{ikt}`.
#[derive(Clone, PartialEq)]
pub struct TrigPoly {
    /// `coef[k + N]`.
    coef: Vec<Complex64>,
}

impl fmt::Debug for TrigPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter().filter(|(_, c)| *c != ZERO)).finish()
    }
}

/// One entry of the coefficient-table file format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefEntry {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly { coef: vec![ZERO] }
    }

    pub fn constant(c: Complex64) -> Self {
        TrigPoly { coef: vec![c] }
    }

    /// `c·e^{ikt}`.
    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self::from_pairs([(k, c)])
    }

    /// Zero polynomial of the given degree, to be filled with [`set`](Self::set).
    pub fn with_degree(degree: usize) -> Self {
        TrigPoly { coef: vec![ZERO; 2 * degree + 1] }
    }

    /// Builds from `(k, c_k)` pairs; repeated indices are summed.
    pub fn from_pairs<I: IntoIterator<Item = (i64, Complex64)>>(pairs: I) -> Self {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let degree = pairs.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut p = Self::with_degree(degree);
        for (k, c) in pairs {
            let i = p.index(k);
            p.coef[i] += c;
        }
        p
    }

    pub fn sin() -> Self {
        Self::from_pairs([(1, Complex64::new(0.0, -0.5)), (-1, Complex64::new(0.0, 0.5))])
    }

    pub fn cos() -> Self {
        Self::from_pairs([(1, Complex64::new(0.5, 0.0)), (-1, Complex64::new(0.5, 0.0))])
    }

    /// Dirichlet kernel `D_n = (1/2π) Σ_{|k| ≤ n} e^{ikt}`.
    pub fn dirichlet(n: usize) -> Self {
        TrigPoly { coef: vec![Complex64::new(INV_TWO_PI, 0.0); 2 * n + 1] }
    }

    pub fn degree(&self) -> usize {
        (self.coef.len() - 1) / 2
    }

    fn index(&self, k: i64) -> usize {
        (k + self.degree() as i64) as usize
    }

    /// `c_k`, zero outside the support.
    pub fn coef(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree() {
            ZERO
        } else {
            self.coef[self.index(k)]
        }
    }

    /// Sets `c_k`, widening the degree when needed.
    pub fn set(&mut self, k: i64, c: Complex64) {
        let need = k.unsigned_abs() as usize;
        if need > self.degree() {
            *self = self.widened(need);
        }
        let i = self.index(k);
        self.coef[i] = c;
    }

    /// Coefficients `c_{−N}, …, c_N`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coef
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let n = self.degree() as i64;
        self.coef.iter().enumerate().map(move |(i, c)| (i as i64 - n, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coef.iter().all(|c| *c == ZERO)
    }

    fn widened(&self, degree: usize) -> Self {
        let mut out = Self::with_degree(degree.max(self.degree()));
        let shift = out.degree() - self.degree();
        out.coef[shift..shift + self.coef.len()].copy_from_slice(&self.coef);
        out
    }

    /// Same polynomial with the degree lowered to the largest `|k|` carrying a nonzero value.
    pub fn trimmed(&self) -> Self {
        let top = self.iter().filter(|(_, c)| *c != ZERO).map(|(k, _)| k.unsigned_abs() as usize).max();
        match top {
            None => Self::zero(),
            Some(d) if d == self.degree() => self.clone(),
            Some(d) => {
                let cut = self.degree() - d;
                TrigPoly { coef: self.coef[cut..self.coef.len() - cut].to_vec() }
            }
        }
    }

    /// `f(t)`, by Horner's rule in `z = e^{it}` on the reduced argument.
    pub fn eval(&self, t: f64) -> Complex64 {
        eval_slice(&self.coef, t)
    }

    /// `D^p f` with `D = −i d/dt`: `c_k ↦ k^p c_k`.
    pub fn derivative(&self, p: u32) -> Result<Self> {
        let coef: Vec<Complex64> = self.iter().map(|(k, c)| c * (k as f64).powi(p as i32)).collect();
        if coef.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Overflow(format!("|k|^p |c_k| exceeds f64 for p = {p}, degree {}", self.degree())));
        }
        Ok(TrigPoly { coef })
    }

    pub fn scale(&self, a: Complex64) -> Self {
        TrigPoly { coef: self.coef.iter().map(|c| c * a).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let mut out = self.widened(d);
        for (k, c) in other.iter() {
            let i = out.index(k);
            out.coef[i] += c;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Pointwise product (Cauchy product of the coefficient tables).
    pub fn multiply(&self, other: &Self) -> Self {
        let (n, m) = (self.degree(), other.degree());
        let mut out = Self::with_degree(n + m);
        for (i, a) in self.coef.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coef.iter().enumerate() {
                out.coef[i + j] += a * b;
            }
        }
        out
    }

    /// Convolution on the circle: `(f ∗ g)^(k) = 2π f̂(k) ĝ(k)`.
    pub fn convolve(&self, other: &Self) -> Self {
        let d = self.degree().min(other.degree());
        let mut out = Self::with_degree(d);
        for k in -(d as i64)..=d as i64 {
            out.set(k, 2.0 * PI * self.coef(k) * other.coef(k));
        }
        out
    }

    /// `e^{ikt}·f`.
    pub fn shift(&self, k: i64) -> Self {
        Self::from_pairs(self.iter().map(|(j, c)| (j + k, c)))
    }

    /// `max_t |f(t)|`.
    pub fn sup_norm(&self) -> f64 {
        sup_abs(&self.coef).0
    }

    /// `(max_t |f(t)|, argmax t ∈ [0, 2π))`.
    pub fn sup_norm_argmax(&self) -> (f64, f64) {
        sup_abs(&self.coef)
    }

    /// `‖f‖_{M_p,h} = sup_p h^p ‖D^p f‖_∞ / M_p`.
    pub fn ud_norm(&self, ws: &WeightSequence, h: f64) -> Result<f64> {
        self.log_ud_norm(ws, h).into_result().map(f64::exp)
    }

    /// Log-scale `‖f‖_{M_p,h}` with truncation diagnostics.
    pub fn log_ud_norm<W: LogWeights + ?Sized>(&self, w: &W, h: f64) -> NormEstimate {
        log_weighted_norm(self, w, h)
    }

    /// `‖f‖_{M_p,r_j} = sup_p ‖D^p f‖_∞ / (M_p Π_{j≤p} r_j)`.
    pub fn ud_norm_rj(&self, ws: &WeightSequence, rs: &RSequence) -> Result<f64> {
        self.log_ud_norm_rj(ws, rs).into_result().map(f64::exp)
    }

    pub fn log_ud_norm_rj(&self, ws: &WeightSequence, rs: &RSequence) -> NormEstimate {
        log_weighted_norm(self, &ws.modified(rs), 1.0)
    }

    pub fn to_entries(&self) -> Vec<CoefEntry> {
        self.iter().filter(|(_, c)| *c != ZERO).map(|(k, c)| CoefEntry { k, re: c.re, im: c.im }).collect()
    }

    pub fn from_entries(entries: &[CoefEntry]) -> Self {
        Self::from_pairs(entries.iter().map(|e| (e.k, Complex64::new(e.re, e.im))))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let entries: Vec<CoefEntry> = serde_json::from_str(text)?;
        Ok(Self::from_entries(&entries))
    }
}

fn eval_slice(coef: &[Complex64], t: f64) -> Complex64 {
    let n = (coef.len() - 1) / 2;
    let t = t.rem_euclid(2.0 * PI);
    let z = Complex64::cis(t);
    let mut acc = ZERO;
    for c in coef.iter().rev() {
        acc = acc * z + c;
    }
    acc * Complex64::cis(-(n as f64) * t)
}

/// Oversampled grid maximum of `|f|`, refined by golden-section search around the grid argmax.
fn sup_abs(coef: &[Complex64]) -> (f64, f64) {
    let n = (coef.len() - 1) / 2;
    if coef.iter().all(|c| *c == ZERO) {
        return (0.0, 0.0);
    }
    if n == 0 {
        return (coef[0].norm(), 0.0);
    }
    let m = (16 * n + 1).max(4096).next_power_of_two();
    let mut buf = vec![ZERO; m];
    for (i, c) in coef.iter().enumerate() {
        let k = i as i64 - n as i64;
        buf[k.rem_euclid(m as i64) as usize] = *c;
    }
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(m).process(&mut buf));
    let (j, grid_max) = buf
        .iter()
        .map(|v| v.norm())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let step = 2.0 * PI / m as f64;
    let t0 = j as f64 * step;
    let (t, v) = golden_max(|t| eval_slice(coef, t).norm(), t0 - step, t0 + step);
    let at_grid = eval_slice(coef, t0).norm().max(grid_max);
    if v > at_grid * (1.0 + 1e-14) {
        (v, t.rem_euclid(2.0 * PI))
    } else {
        (at_grid, t0)
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Log-scale weighted norm with its maximizing derivative order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub log_value: f64,
    pub argmax_p: usize,
    /// The termination bound was not reached within the weight range.
    pub truncated: bool,
    pub limit: usize,
}

impl NormEstimate {
    pub fn into_result(self) -> Result<f64> {
        if self.truncated {
            Err(Error::Truncation { value: self.log_value.exp(), limit: self.limit })
        } else {
            Ok(self.log_value)
        }
    }
}

fn log_sum_exp(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `sup_p h^p ‖D^p f‖_∞ / W_p` in log scale.
///
/// Each order is bracketed by `max_k |c_k||k|^p ≤ ‖D^p f‖_∞ ≤ Σ|c_k||k|^p`. Once `(hN)^p / W_p`
/// decreases the upper bound decreases too, so orders are collected until the upper bound falls
/// below the best lower bound; exact sup norms are then taken in decreasing order of the upper
/// bound until it no longer beats the running maximum.
fn log_weighted_norm<W: LogWeights + ?Sized>(f: &TrigPoly, w: &W, h: f64) -> NormEstimate {
    let f = f.trimmed();
    let limit = w.limit();
    let n = f.degree();
    if f.is_zero() {
        return NormEstimate { log_value: f64::NEG_INFINITY, argmax_p: 0, truncated: false, limit };
    }
    if n == 0 {
        return NormEstimate { log_value: f.coef[0].norm().ln(), argmax_p: 0, truncated: false, limit };
    }
    let nf = n as f64;
    let ln_hn = (h * nf).ln();
    let terms: Vec<(f64, f64)> = f
        .iter()
        .filter(|(_, c)| *c != ZERO)
        .map(|(k, c)| (c.norm().ln(), if k == 0 { f64::NEG_INFINITY } else { (k.unsigned_abs() as f64 / nf).ln() }))
        .collect();
    let term = |p: usize, lc: f64, lk: f64| if p == 0 { lc } else { lc + p as f64 * lk };
    // (p, base, upper, decreasing)
    let mut orders: Vec<(usize, f64, f64, bool)> = Vec::new();
    let mut lower = f64::NEG_INFINITY;
    let mut closed = false;
    for p in 0..=limit {
        let Some(lw) = w.log_weight(p) else { break };
        let base = p as f64 * ln_hn - lw;
        let upper = base + log_sum_exp(terms.iter().map(|&(lc, lk)| term(p, lc, lk)));
        lower = lower.max(base + terms.iter().map(|&(lc, lk)| term(p, lc, lk)).fold(f64::NEG_INFINITY, f64::max));
        let decreasing = w.log_ratio(p + 1).is_some_and(|r| ln_hn < r);
        orders.push((p, base, upper, decreasing));
        if decreasing && upper <= lower {
            closed = true;
            break;
        }
    }
    orders.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)));
    let mut best = f64::NEG_INFINITY;
    let mut argmax_p = 0;
    let mut scaled = vec![ZERO; f.coef.len()];
    let mut last_t = 0.0;
    for &(p, base, upper, _) in &orders {
        if upper <= best {
            break;
        }
        for (i, (k, c)) in f.iter().enumerate() {
            scaled[i] = if p == 0 { c } else { c * (k as f64 / nf).powi(p as i32) };
        }
        // the triangle bound is attained at the previous argmax more often than not
        let at_last = eval_slice(&scaled, last_t).norm().ln() + base;
        let exact = if at_last >= upper - 1e-13 * upper.abs().max(1.0) {
            at_last
        } else {
            let (v, t) = sup_abs(&scaled);
            last_t = t;
            base + v.ln()
        };
        if exact > best || (exact == best && p < argmax_p) {
            best = exact;
            argmax_p = p;
        }
    }
    let truncated = !closed && !orders.iter().any(|&(_, _, upper, decreasing)| decreasing && upper <= best);
    NormEstimate { log_value: best, argmax_p, truncated, limit }
}

/// Result of sampling a function and taking its discrete Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled {
    pub poly: TrigPoly,
    /// `|ĉ(±N)|` exceeds half the largest coefficient, which suggests undersampling.
    pub alias_suspected: bool,
}

/// `ĉ(k) = (1/2π)∫ f(t) e^{−ikt} dt`, `|k| ≤ n`, by the rectangle rule on `2n + 2` points.
///
/// Exact up to rounding when `f` is a trigonometric polynomial of degree at most `n`.
pub fn fourier_coefficients<F: Fn(f64) -> Complex64>(f: F, n: usize) -> Sampled {
    let m = 2 * n + 2;
    let samples: Vec<(f64, Complex64)> = (0..m)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / m as f64;
            (t, f(t))
        })
        .collect();
    let mut poly = TrigPoly::with_degree(n);
    for k in -(n as i64)..=n as i64 {
        let s: Complex64 = samples.iter().map(|(t, v)| v * Complex64::cis(-(k as f64) * t)).sum();
        poly.set(k, s / m as f64);
    }
    let max = poly.coef.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let edge = poly.coef(n as i64).norm().max(poly.coef(-(n as i64)).norm());
    Sampled { alias_suspected: n > 0 && edge > 0.5 * max, poly }
}

/// `σ_λ` (`Plus`) or `σ'_λ` (`Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    /// `sup_k |c_k| e^{M(λk)}`.
    Plus,
    /// `sup_k |c_k| e^{−M(λk)}`.
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `log(|c| e^{±M(λk)})`.
pub fn weighted_log(c: Complex64, k: i64, ws: &WeightSequence, lambda: f64, sign: Sign) -> f64 {
    let a = c.norm();
    if a == 0.0 {
        f64::NEG_INFINITY
    } else {
        a.ln() + sign.factor() * ws.assoc(lambda * k as f64)
    }
}

/// Log-scale `σ_λ` / `σ'_λ` of a finitely supported table.
pub fn log_coef_seminorm<I: IntoIterator<Item = (i64, Complex64)>>(coefs: I, ws: &WeightSequence, lambda: f64, sign: Sign) -> f64 {
    coefs.into_iter().map(|(k, c)| weighted_log(c, k, ws, lambda, sign)).fold(f64::NEG_INFINITY, f64::max)
}

/// `σ_λ` / `σ'_λ` of a finitely supported table.
pub fn coef_seminorm<I: IntoIterator<Item = (i64, Complex64)>>(coefs: I, ws: &WeightSequence, lambda: f64, sign: Sign) -> f64 {
    log_coef_seminorm(coefs, ws, lambda, sign).exp()
}

/// Seminorm of an oracle over `|k| ≤ K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub log_value: f64,
    pub argmax_k: i64,
    /// The running sup was still growing at the end of the range.
    pub truncated: bool,
    pub k_max: usize,
}

impl Sweep {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Per-`|k|` log profile `max(|c_k|, |c_{−k}|) e^{±M(λk)}`, `0 ≤ |k| ≤ K`.
pub fn seminorm_profile(dist: &CoefDistribution, ws: &WeightSequence, lambda: f64, sign: Sign, k_max: usize) -> Vec<f64> {
    (0..=k_max as i64)
        .map(|k| weighted_log(dist.coef(k), k, ws, lambda, sign).max(weighted_log(dist.coef(-k), -k, ws, lambda, sign)))
        .collect()
}

/// `σ_λ` / `σ'_λ` of a distribution over `|k| ≤ K`, flagging a sup still growing at `K`.
pub fn sweep_seminorm(dist: &CoefDistribution, ws: &WeightSequence, lambda: f64, sign: Sign, k_max: usize) -> Sweep {
    let profile = seminorm_profile(dist, ws, lambda, sign, k_max);
    let (mut best, mut arg) = (f64::NEG_INFINITY, 0i64);
    for k in -(k_max as i64)..=k_max as i64 {
        let v = weighted_log(dist.coef(k), k, ws, lambda, sign);
        if v > best {
            best = v;
            arg = k;
        }
    }
    Sweep { log_value: best, argmax_k: arg, truncated: !bounded_test(&profile, DEFAULT_TAU).bounded, k_max }
}

/// Membership of a coefficient oracle in a sequence space, decided over `|k| ≤ K`.
///
/// `Sign::Plus` tests `s^∗`: `σ_μ` finite for every `μ` (Beurling) or some `μ` (Roumieu).
/// `Sign::Minus` tests the dual `s'^∗`: `σ'_μ` finite for some `μ` (Beurling) or every `μ`
/// (Roumieu).
pub fn coefficient_membership(dist: &CoefDistribution, ws: &WeightSequence, class: Class, sign: Sign, mu_grid: &[f64], tau: f64, k_max: usize) -> GrowthVerdict {
    let q = match (sign, class) {
        (Sign::Plus, Class::Beurling) | (Sign::Minus, Class::Roumieu) => Quant::ForAll,
        _ => Quant::Exists,
    };
    let red = reduce1(q, mu_grid.len(), |i| bounded_test(&seminorm_profile(dist, ws, mu_grid[i], sign, k_max), tau));
    GrowthVerdict {
        bounded: red.margin <= tau,
        margin: red.margin,
        witness_n: red.witness,
        grid: GridUsed { lambda: Some(mu_grid.to_vec()), deciding: mu_grid.get(red.deciding.0).map(|m| vec![*m]), ..Default::default() },
        method: Method::Coefficient,
        property: Property::Member,
        class: Some(class),
        pattern: pattern1(q, "μ"),
        tau,
        n_max: k_max,
        truncated: false,
        desk_scale: true,
    }
}

/// Closed-form family of a distribution, kept for labels and truncation bounds.
#[derive(Debug, Clone, PartialEq)]
pub enum DistKind {
    /// `ĉ(k) = 1/(2π)`.
    Delta,
    /// Regularized cotangent: `ĉ(0) = i`, `ĉ(−2k) = 2i` for `k ≥ 1`.
    CotReg,
    /// `ĉ(k) = e^{−μ|k|}`.
    ExpDecay { mu: f64 },
    /// `ĉ(k) = e^{M(λk)}`.
    ExpGrowth { lambda: f64 },
    /// Finitely supported.
    Poly,
    /// Built from other distributions.
    Derived(String),
}

type Oracle = dyn Fn(i64) -> Complex64 + Send + Sync;

/// A periodic (ultra)distribution given by its Fourier coefficient oracle `k ↦ ĉ(k)`.
#[derive(Clone)]
pub struct CoefDistribution {
    kind: DistKind,
    oracle: Arc<Oracle>,
    band_limit: Option<usize>,
    /// Declared `λ` with `σ'_λ(ĉ) < ∞`.
    growth_lambda: f64,
}

impl fmt::Debug for CoefDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefDistribution")
            .field("kind", &self.kind)
            .field("band_limit", &self.band_limit)
            .field("growth_lambda", &self.growth_lambda)
            .finish()
    }
}

impl CoefDistribution {
    pub fn from_oracle<F>(label: impl Into<String>, band_limit: Option<usize>, growth_lambda: f64, oracle: F) -> Self
    where
        F: Fn(i64) -> Complex64 + Send + Sync + 'static,
    {
        CoefDistribution { kind: DistKind::Derived(label.into()), oracle: Arc::new(oracle), band_limit, growth_lambda }
    }

    pub fn delta() -> Self {
        CoefDistribution {
            kind: DistKind::Delta,
            oracle: Arc::new(|_| Complex64::new(INV_TWO_PI, 0.0)),
            band_limit: None,
            growth_lambda: 1.0,
        }
    }

    pub fn cot_reg() -> Self {
        CoefDistribution {
            kind: DistKind::CotReg,
            oracle: Arc::new(|k| match k {
                0 => Complex64::new(0.0, 1.0),
                k if k < 0 && k % 2 == 0 => Complex64::new(0.0, 2.0),
                _ => ZERO,
            }),
            band_limit: None,
            growth_lambda: 1.0,
        }
    }

    pub fn exp_decay(mu: f64) -> Self {
        CoefDistribution {
            kind: DistKind::ExpDecay { mu },
            oracle: Arc::new(move |k| Complex64::new((-mu * k.unsigned_abs() as f64).exp(), 0.0)),
            band_limit: None,
            growth_lambda: 1.0,
        }
    }

    pub fn exp_growth(lambda: f64, ws: &WeightSequence) -> Self {
        let ws = ws.clone();
        CoefDistribution {
            kind: DistKind::ExpGrowth { lambda },
            oracle: Arc::new(move |k| Complex64::new(ws.assoc(lambda * k as f64).exp(), 0.0)),
            band_limit: None,
            growth_lambda: lambda,
        }
    }

    pub fn from_poly(p: &TrigPoly) -> Self {
        let p = p.trimmed();
        let band = p.degree();
        CoefDistribution { kind: DistKind::Poly, oracle: Arc::new(move |k| p.coef(k)), band_limit: Some(band), growth_lambda: 1.0 }
    }

    pub fn zero() -> Self {
        Self::from_poly(&TrigPoly::zero())
    }

    /// Preset by name: `delta`, `cot_reg`, `sin`, `cos`, `zero`, `exp_decay:μ`, `exp_growth:λ`.
    pub fn preset(name: &str, ws: &WeightSequence) -> Result<Self> {
        let (head, arg) = match name.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (name, None),
        };
        let num = |a: Option<&str>| -> Result<f64> {
            a.ok_or_else(|| Error::Parse(format!("preset '{name}' needs a parameter")))?
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("preset '{name}': {e}")))
        };
        match head {
            "delta" => Ok(Self::delta()),
            "cot_reg" => Ok(Self::cot_reg()),
            "sin" => Ok(Self::from_poly(&TrigPoly::sin())),
            "cos" => Ok(Self::from_poly(&TrigPoly::cos())),
            "zero" => Ok(Self::zero()),
            "exp_decay" => Ok(Self::exp_decay(num(arg)?)),
            "exp_growth" => Ok(Self::exp_growth(num(arg)?, ws)),
            other => Err(Error::Parse(format!("unknown distribution preset '{other}'"))),
        }
    }

    pub fn coef(&self, k: i64) -> Complex64 {
        match self.band_limit {
            Some(b) if k.unsigned_abs() as usize > b => ZERO,
            _ => (self.oracle)(k),
        }
    }

    pub fn kind(&self) -> &DistKind {
        &self.kind
    }

    pub fn label(&self) -> String {
        match &self.kind {
            DistKind::Delta => "delta".into(),
            DistKind::CotReg => "cot_reg".into(),
            DistKind::ExpDecay { mu } => format!("exp_decay:{mu}"),
            DistKind::ExpGrowth { lambda } => format!("exp_growth:{lambda}"),
            DistKind::Poly => format!("poly[deg {}]", self.band_limit.unwrap_or(0)),
            DistKind::Derived(s) => s.clone(),
        }
    }

    pub fn band_limit(&self) -> Option<usize> {
        self.band_limit
    }

    pub fn growth_lambda(&self) -> f64 {
        self.growth_lambda
    }

    /// Coefficients on `|k| ≤ k_max` as a trigonometric polynomial.
    pub fn truncate(&self, k_max: usize) -> TrigPoly {
        let k_max = self.band_limit.map_or(k_max, |b| b.min(k_max));
        let mut p = TrigPoly::with_degree(k_max);
        for k in -(k_max as i64)..=k_max as i64 {
            p.set(k, self.coef(k));
        }
        p
    }

    /// Bound on `Σ_{|k| > K} |ĉ(k)|`: exact for band-limited and geometric families,
    /// otherwise the sum over `K < |k| ≤ 2K`.
    pub fn tail_bound(&self, k_max: usize) -> f64 {
        if let Some(b) = self.band_limit {
            if b <= k_max {
                return 0.0;
            }
        }
        match self.kind {
            DistKind::ExpDecay { mu } => 2.0 * (-mu * (k_max + 1) as f64).exp() / (1.0 - (-mu).exp()),
            _ => ((k_max + 1) as i64..=2 * k_max as i64).map(|k| self.coef(k).norm() + self.coef(-k).norm()).sum(),
        }
    }

    /// `f ∗ g`: `k ↦ 2π f̂(k) ĝ(k)`.
    pub fn convolve(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let band = match (self.band_limit, other.band_limit) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        CoefDistribution {
            kind: DistKind::Derived(format!("({})*({})", self.label(), other.label())),
            oracle: Arc::new(move |k| 2.0 * PI * a.coef(k) * b.coef(k)),
            band_limit: band,
            growth_lambda: self.growth_lambda.max(other.growth_lambda),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let a = self.clone();
        CoefDistribution {
            kind: DistKind::Derived(format!("{s}·{}", self.label())),
            oracle: Arc::new(move |k| s * a.coef(k)),
            band_limit: self.band_limit,
            growth_lambda: self.growth_lambda,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let band = match (self.band_limit, other.band_limit) {
            (Some(x), Some(y)) => Some(x.max(y)),
            _ => None,
        };
        CoefDistribution {
            kind: DistKind::Derived(format!("{}+{}", self.label(), other.label())),
            oracle: Arc::new(move |k| a.coef(k) + b.coef(k)),
            band_limit: band,
            growth_lambda: self.growth_lambda.max(other.growth_lambda),
        }
    }

    /// `e^{ikt}·f`: `m ↦ f̂(m − k)`.
    pub fn shift(&self, k: i64) -> Self {
        let a = self.clone();
        CoefDistribution {
            kind: DistKind::Derived(format!("e^(i{k}t)·{}", self.label())),
            oracle: Arc::new(move |m| a.coef(m - k)),
            band_limit: self.band_limit.map(|b| b + k.unsigned_abs() as usize),
            growth_lambda: self.growth_lambda,
        }
    }

    /// Product with a band-limited function: `m ↦ Σ_j ĝ(j) f̂(m − j)`.
    pub fn multiply_poly(&self, g: &TrigPoly) -> Self {
        let terms: Vec<(i64, Complex64)> = g.iter().filter(|(_, c)| *c != ZERO).collect();
        terms.iter().fold(Self::zero(), |acc, &(j, c)| acc.add(&self.shift(j).scale(c)))
    }

    /// Multiplier `k ↦ s(k)·f̂(k)`.
    pub fn multiplier<F>(&self, label: &str, symbol: F) -> Self
    where
        F: Fn(i64) -> Complex64 + Send + Sync + 'static,
    {
        let a = self.clone();
        CoefDistribution {
            kind: DistKind::Derived(format!("{label}({})", self.label())),
            oracle: Arc::new(move |k| {
                let c = a.coef(k);
                if c == ZERO {
                    ZERO
                } else {
                    symbol(k) * c
                }
            }),
            band_limit: self.band_limit,
            growth_lambda: self.growth_lambda,
        }
    }

    /// `σ'_{growth_lambda}` over `|k| ≤ K`; an error if the sweep is still growing at `K`.
    pub fn check_growth(&self, ws: &WeightSequence, k_max: usize) -> Result<f64> {
        let s = sweep_seminorm(self, ws, self.growth_lambda, Sign::Minus, k_max);
        if s.truncated {
            Err(Error::Truncation { value: s.value(), limit: k_max })
        } else {
            Ok(s.value())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn eval_examples() {
        assert!((TrigPoly::dirichlet(4).eval(0.0).re - 9.0 / (2.0 * PI)).abs() < 1e-14);
        assert!(close(TrigPoly::sin().eval(PI / 2.0), c(1.0, 0.0), 1e-15));
        assert_eq!(TrigPoly::zero().eval(1.234), ZERO);
        let p = TrigPoly::dirichlet(7).multiply(&TrigPoly::sin());
        for t in [0.3, 1.7, 5.9] {
            assert!(close(p.eval(t), p.eval(t + 2.0 * PI), 1e-12));
        }
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(TrigPoly::sin().derivative(2).unwrap(), TrigPoly::sin());
        let e = TrigPoly::monomial(3, c(1.0, 0.0));
        assert_eq!(e.derivative(1).unwrap(), TrigPoly::monomial(3, c(3.0, 0.0)));
        assert_eq!(TrigPoly::dirichlet(4).derivative(0).unwrap(), TrigPoly::dirichlet(4));
        let big = TrigPoly::monomial(500, c(1e300, 0.0));
        assert!(matches!(big.derivative(40), Err(Error::Overflow(_))));
    }

    #[test]
    fn sup_norm_examples() {
        assert!((TrigPoly::dirichlet(4).sup_norm() - 9.0 / (2.0 * PI)).abs() < 1e-12);
        assert!((TrigPoly::sin().sup_norm() - 1.0).abs() < 1e-12);
        assert_eq!(TrigPoly::zero().sup_norm(), 0.0);
        // sin·D_16 = cos(t/2) sin(16.5 t)/π; maximize the closed form on a fine grid
        let closed = |t: f64| ((t / 2.0).cos() * (16.5 * t).sin() / PI).abs();
        let oracle = (0..2_000_000).map(|i| closed(i as f64 * 2.0 * PI / 2_000_000.0)).fold(0.0, f64::max);
        let s = TrigPoly::sin().multiply(&TrigPoly::dirichlet(16)).sup_norm();
        assert!((s - oracle).abs() < 1e-6 * oracle);
        assert!((0.30..=0.32).contains(&s));
    }

    #[test]
    fn sup_norm_argmax_of_dirichlet_is_origin() {
        let (v, t) = TrigPoly::dirichlet(10).sup_norm_argmax();
        assert!((v - 21.0 / (2.0 * PI)).abs() < 1e-12);
        assert_eq!(t, 0.0);
    }

    #[test]
    fn ud_norm_examples() {
        let ws = WeightSequence::gevrey(1.0, 256).unwrap();
        let e1 = TrigPoly::monomial(1, c(1.0, 0.0));
        assert!((e1.ud_norm(&ws, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((e1.ud_norm(&ws, 2.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(TrigPoly::zero().ud_norm(&ws, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn ud_norm_matches_brute_force_scan() {
        // brute force: every p up to 200 with an exact sup norm of D^p f
        let ws = WeightSequence::gevrey(1.0, 400).unwrap();
        let f = TrigPoly::dirichlet(6).multiply(&TrigPoly::sin()).add(&TrigPoly::monomial(-3, c(0.2, 0.7)));
        for h in [0.25f64, 1.0, 4.0] {
            let mut best = f64::NEG_INFINITY;
            for p in 0..=200u32 {
                let d = f.derivative(p).unwrap();
                let v = p as f64 * h.ln() + d.sup_norm().ln() - ws.log_m(p as usize).unwrap();
                best = best.max(v);
            }
            let got = f.log_ud_norm(&ws, h);
            assert!(!got.truncated);
            assert!((got.log_value - best).abs() < 1e-9, "h={h}: {} vs {best}", got.log_value);
        }
    }

    #[test]
    fn ud_norm_truncation_is_reported() {
        let ws = WeightSequence::gevrey(1.0, 16).unwrap();
        let f = TrigPoly::dirichlet(30);
        assert!(matches!(f.ud_norm(&ws, 8.0), Err(Error::Truncation { .. })));
    }

    #[test]
    fn ud_norm_rj_examples() {
        let ws = WeightSequence::gevrey(1.0, 256).unwrap();
        let e1 = TrigPoly::monomial(1, c(1.0, 0.0));
        let lin = RSequence::linear(256).unwrap();
        assert!((e1.ud_norm_rj(&ws, &lin).unwrap() - 1.0).abs() < 1e-12);
        let mut r = vec![1.0; 40];
        r.extend((2..60).map(|j| j as f64));
        let prefix = RSequence::new(r).unwrap();
        assert!((e1.ud_norm_rj(&ws, &prefix).unwrap() - e1.ud_norm(&ws, 1.0).unwrap()).abs() < 1e-12);
        assert_eq!(TrigPoly::zero().ud_norm_rj(&ws, &lin).unwrap(), 0.0);
    }

    #[test]
    fn fourier_examples() {
        let s = fourier_coefficients(|t| c(t.sin(), 0.0), 1);
        assert!(close(s.poly.coef(1), c(0.0, -0.5), 1e-15));
        assert!(close(s.poly.coef(-1), c(0.0, 0.5), 1e-15));
        let d = TrigPoly::dirichlet(5);
        let sd = fourier_coefficients(|t| d.eval(t), 5);
        for k in -5..=5 {
            assert!(close(sd.poly.coef(k), c(INV_TWO_PI, 0.0), 1e-14));
        }
        assert!(sd.alias_suspected);
        let one = fourier_coefficients(|_| c(1.0, 0.0), 3);
        assert!(close(one.poly.coef(0), c(1.0, 0.0), 1e-15));
        assert!((1..=3).all(|k| one.poly.coef(k).norm() < 1e-15 && one.poly.coef(-k).norm() < 1e-15));
        assert!(!one.alias_suspected);
    }

    #[test]
    fn convolution_examples() {
        let d = CoefDistribution::delta();
        let dd = d.convolve(&d);
        for k in [-7, 0, 3, 100] {
            assert!(close(dd.coef(k), c(INV_TWO_PI, 0.0), 1e-16));
        }
        let dn = TrigPoly::dirichlet(6);
        let conv = d.truncate(6).convolve(&dn);
        assert!(conv.iter().all(|(k, v)| close(v, dn.coef(k), 1e-16)));
        assert!(dn.convolve(&TrigPoly::zero()).is_zero());
    }

    #[test]
    fn multiply_examples() {
        let p = TrigPoly::sin().multiply(&TrigPoly::cos());
        assert!(close(p.coef(2), c(0.0, -0.25), 1e-16));
        assert!(close(p.coef(-2), c(0.0, 0.25), 1e-16));
        assert_eq!(p.coef(0), ZERO);
        let f = TrigPoly::dirichlet(3);
        assert_eq!(f.multiply(&TrigPoly::constant(c(1.0, 0.0))), f);
        assert_eq!(TrigPoly::sin().multiply(&TrigPoly::dirichlet(16)).degree(), 17);
    }

    #[test]
    fn seminorm_examples() {
        let ws = WeightSequence::gevrey(1.0, 512).unwrap();
        let delta = CoefDistribution::delta().truncate(200);
        let v = coef_seminorm(delta.iter(), &ws, 1.0, Sign::Minus);
        assert!((v - INV_TWO_PI).abs() < 1e-15);
        let decay: Vec<(i64, Complex64)> = (-50..=50).map(|k| (k, c((-ws.assoc(k as f64)).exp(), 0.0))).collect();
        assert!((coef_seminorm(decay, &ws, 1.0, Sign::Plus) - 1.0).abs() < 1e-12);
        assert_eq!(coef_seminorm(TrigPoly::zero().iter(), &ws, 1.0, Sign::Plus), 0.0);
    }

    #[test]
    fn sweep_flags_growth() {
        let ws = WeightSequence::gevrey(1.0, 512).unwrap();
        let g = CoefDistribution::exp_growth(1.0, &ws);
        assert!((g.check_growth(&ws, 400).unwrap() - 1.0).abs() < 1e-12);
        let s = sweep_seminorm(&g, &ws, 0.5, Sign::Minus, 400);
        assert!(s.truncated);
        assert!(!sweep_seminorm(&CoefDistribution::delta(), &ws, 1.0, Sign::Minus, 400).truncated);
    }

    #[test]
    fn cot_reg_coefficients() {
        let ct = CoefDistribution::cot_reg();
        assert_eq!(ct.coef(0), c(0.0, 1.0));
        assert_eq!(ct.coef(-4), c(0.0, 2.0));
        assert_eq!(ct.coef(-3), ZERO);
        assert_eq!(ct.coef(2), ZERO);
    }

    #[test]
    fn presets_and_tables() {
        let ws = WeightSequence::gevrey(1.0, 64).unwrap();
        for name in ["delta", "cot_reg", "exp_decay:1", "exp_growth:0.5", "sin", "cos", "zero"] {
            assert!(CoefDistribution::preset(name, &ws).is_ok(), "{name}");
        }
        assert!(CoefDistribution::preset("exp_decay", &ws).is_err());
        assert!(CoefDistribution::preset("nope", &ws).is_err());
        let p = TrigPoly::from_json(r#"[{"k":-2,"re":0.0,"im":2.0},{"k":0,"re":0.0,"im":1.0}]"#).unwrap();
        assert_eq!(p.coef(-2), c(0.0, 2.0));
        assert_eq!(TrigPoly::from_entries(&p.to_entries()), p);
    }

    #[test]
    fn exp_decay_tail_bound() {
        let f = CoefDistribution::exp_decay(1.0);
        let exact: f64 = (11..2000).map(|k| 2.0 * (-(k as f64)).exp()).sum();
        assert!((f.tail_bound(10) - exact).abs() < 1e-15);
    }

    fn poly_strategy(max_deg: usize) -> impl Strategy<Value = TrigPoly> {
        (0..=max_deg).prop_flat_map(|d| {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2 * d + 1).prop_map(move |v| {
                let mut p = TrigPoly::with_degree(d);
                for (i, (re, im)) in v.into_iter().enumerate() {
                    p.set(i as i64 - d as i64, c(re, im));
                }
                p
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn fourier_round_trip(f in poly_strategy(64)) {
            let s = fourier_coefficients(|t| f.eval(t), 64);
            for k in -64..=64i64 {
                prop_assert!((s.poly.coef(k) - f.coef(k)).norm() < 1e-10);
            }
        }

        #[test]
        fn coefficients_decay_like_the_norm(f in poly_strategy(12), h in 0.25f64..4.0) {
            let ws = WeightSequence::gevrey(1.0, 512).unwrap();
            let log_norm = f.log_ud_norm(&ws, h).log_value;
            for (k, ck) in f.iter() {
                if ck.norm() > 0.0 {
                    prop_assert!(ck.norm().ln() <= log_norm - ws.assoc(h * k as f64) + 1e-9);
                }
            }
        }

        #[test]
        fn product_is_commutative_and_associative(f in poly_strategy(32), g in poly_strategy(32), h in poly_strategy(32)) {
            let fg = f.multiply(&g);
            let gf = g.multiply(&f);
            prop_assert!(fg.iter().all(|(k, v)| (v - gf.coef(k)).norm() < 1e-10));
            let l = f.multiply(&g).multiply(&h);
            let r = f.multiply(&g.multiply(&h));
            prop_assert!(l.iter().all(|(k, v)| (v - r.coef(k)).norm() < 1e-10));
            for t in [0.1, 2.5, 4.4] {
                prop_assert!((fg.eval(t) - f.eval(t) * g.eval(t)).norm() < 1e-10 * (1.0 + fg.eval(t).norm()));
            }
        }

        #[test]
        fn leibniz_on_representatives(f in poly_strategy(16), g in poly_strategy(16)) {
            let lhs = f.multiply(&g).derivative(1).unwrap();
            let rhs = f.derivative(1).unwrap().multiply(&g).add(&f.multiply(&g.derivative(1).unwrap()));
            prop_assert!(lhs.iter().all(|(k, v)| (v - rhs.coef(k)).norm() < 1e-10));
        }
    }
}
