//! Ultrapolynomials `P(z) = Σ a_n z^n`, the operators `P(D)` they define as Fourier multipliers
//! `ĉ(k) ↦ P(k)ĉ(k)`, and the factorization `f = P(D)g`.
//!
//! The two closed forms used by the factorization are entire series with positive coefficients
//! that grow like `e^{2M(λx)}`, far beyond `f64`. They are evaluated as `log P(x)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Net;
use crate::series::{coefficient_membership, sweep_seminorm, CoefDistribution, Sign, Sweep, TrigPoly};
use crate::verdict::{bounded_test, default_grid, Class, GrowthVerdict, DEFAULT_TAU};
use crate::weights::{relation, RSequence, RelationKind, WeightSequence};
use crate::{Error, Result};

/// Default `|k|` range of the factorization sweeps.
pub const FACTOR_K_MAX: usize = 200;

const REL_CUTOFF: f64 = -36.841_361_487_904_734; // ln 1e-16
const MAX_TERMS: usize = 1_000_000;

/// Coefficients of an ultrapolynomial.
#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// `a_0, …, a_N`.
    Table(Vec<Complex64>),
    /// `Σ_p (λH²z)^{2p} / M_{2p}`.
    StructureBeurling { lambda: f64 },
    /// `P₁P₂` with `P_i(z) = Σ_p (2Hz)^{2p} / (Π_{j≤2p} ρ_j · M_{2p})`, `ρ = r′` and `ρ = k′`.
    StructureRoumieu { r: RSequence, k: RSequence },
}

/// Certified coefficient bound `|a_n| ≤ C L^n / M_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum OpClass {
    Beurling {
        #[serde(rename = "L")]
        l: f64,
        #[serde(rename = "C")]
        c: f64,
    },
    /// `(L, C_L)` for each tabled `L`.
    Roumieu { table: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ultrapolynomial {
    form: Form,
    class: OpClass,
    ws: WeightSequence,
}

/// One coefficient of the JSON table format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub n: usize,
    pub re: f64,
    pub im: f64,
}

/// Ultrapolynomial file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum UltraSpec {
    Table {
        a: Vec<TermEntry>,
        #[serde(default)]
        class: Option<Class>,
        #[serde(rename = "L", default)]
        l: Option<f64>,
        #[serde(rename = "C", default)]
        c: Option<f64>,
    },
    Form {
        form: String,
        #[serde(default)]
        lambda: Option<f64>,
        #[serde(default)]
        r: Option<Vec<f64>>,
        #[serde(default)]
        k: Option<Vec<f64>>,
    },
}

impl UltraSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `log Σ_p e^{term(p)}` for a series whose terms eventually decrease.
fn log_series(x: f64, term: impl Fn(usize) -> Option<f64>) -> Result<f64> {
    let mut sum = f64::NEG_INFINITY;
    let mut prev = f64::NEG_INFINITY;
    for p in 0..MAX_TERMS {
        let Some(t) = term(p) else {
            return Err(Error::NoConverge { x, p_max: p.saturating_sub(1) });
        };
        sum = log_add(sum, t);
        if p > 0 && t < prev && t - sum < REL_CUTOFF {
            return Ok(sum);
        }
        prev = t;
    }
    Err(Error::NoConverge { x, p_max: MAX_TERMS })
}

/// Default `r′_j = k′_j = j + 1` on `0 ≤ j ≤ 4096`.
pub fn default_rj() -> RSequence {
    RSequence::linear(4096).expect("linear sequence is valid")
}

impl Ultrapolynomial {
    /// Finite table with a declared class; `(L, C)` is checked for Beurling, and `C_L` is
    /// tabulated over the default grid for Roumieu.
    pub fn table(a: Vec<Complex64>, ws: &WeightSequence, class: Class, bound: Option<(f64, f64)>) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::InvalidSpec("empty coefficient table".into()));
        }
        let logs: Vec<f64> = a.iter().map(|c| c.norm().ln()).collect();
        let log_m = |n: usize| ws.log_m(n).ok_or_else(|| Error::ClassFail(format!("log M_{n} beyond the weight range")));
        let c_for = |l: f64| -> Result<f64> {
            let mut worst = f64::NEG_INFINITY;
            for (n, la) in logs.iter().enumerate() {
                worst = worst.max(la + log_m(n)? - n as f64 * l.ln());
            }
            Ok(worst.exp())
        };
        let class = match class {
            Class::Beurling => {
                let (l, c) = match bound {
                    Some(b) => b,
                    None => (1.0, c_for(1.0)?.max(f64::MIN_POSITIVE)),
                };
                let need = c_for(l)?;
                if need > c * (1.0 + 1e-12) {
                    return Err(Error::ClassFail(format!("|a_n| M_n / L^n reaches {need:e} > C = {c:e} at L = {l}")));
                }
                OpClass::Beurling { l, c }
            }
            Class::Roumieu => OpClass::Roumieu { table: default_grid().into_iter().map(|l| Ok((l, c_for(l)?))).collect::<Result<_>>()? },
        };
        Ok(Ultrapolynomial { form: Form::Table(a), class, ws: ws.clone() })
    }

    /// `Σ_p (λH²z)^{2p} / M_{2p}`, of class `(M_p)` with `L = λH²`, `C = 1`.
    pub fn structure_beurling(lambda: f64, ws: &WeightSequence) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidSpec(format!("λ must be positive, got {lambda}")));
        }
        let l = lambda * ws.h() * ws.h();
        Ok(Ultrapolynomial { form: Form::StructureBeurling { lambda }, class: OpClass::Beurling { l, c: 1.0 }, ws: ws.clone() })
    }

    /// `P₁P₂` of class `{M_p}`; `C_L` is checked bounded on the stored coefficient range for
    /// every `L` of the default grid.
    pub fn structure_roumieu(r: RSequence, k: RSequence, ws: &WeightSequence) -> Result<Self> {
        let mut p = Ultrapolynomial { form: Form::StructureRoumieu { r, k }, class: OpClass::Roumieu { table: vec![] }, ws: ws.clone() };
        let n_cert = p.cert_range();
        let logs: Vec<f64> = (0..=n_cert).map(|n| p.log_coef(n).unwrap_or(f64::NAN)).collect();
        let mut table = vec![];
        for l in default_grid() {
            let e: Vec<f64> = logs.iter().enumerate().map(|(n, la)| la + ws.log_m(n).unwrap_or(f64::NAN) - n as f64 * l.ln()).collect();
            // the sup is attained when the maximum lies in the first half and the end has fallen below it
            let (argmax, max) = e.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, v)| if *v > a.1 { (i, *v) } else { a });
            let last = e[n_cert];
            if !(max.is_finite() && argmax <= n_cert / 2 && last < max - DEFAULT_TAU) {
                return Err(Error::ClassFail(format!("|a_n| M_n / L^n is not settled at L = {l} (max at n = {argmax} of {n_cert})")));
            }
            table.push((l, max.exp()));
        }
        p.class = OpClass::Roumieu { table };
        Ok(p)
    }

    /// Builds from the file format, with `r′ = k′ = j + 1` unless given.
    pub fn build(spec: &UltraSpec, ws: &WeightSequence, class: Class) -> Result<Self> {
        match spec {
            UltraSpec::Table { a, class: declared, l, c } => {
                let n = a.iter().map(|e| e.n).max().unwrap_or(0);
                let mut coef = vec![Complex64::new(0.0, 0.0); n + 1];
                for e in a {
                    coef[e.n] += Complex64::new(e.re, e.im);
                }
                let bound = match (l, c) {
                    (Some(l), Some(c)) => Some((*l, *c)),
                    _ => None,
                };
                Self::table(coef, ws, declared.unwrap_or(class), bound)
            }
            UltraSpec::Form { form, lambda, r, k } => match form.as_str() {
                "structure_beurling" => Self::structure_beurling(lambda.unwrap_or(1.0), ws),
                "structure_roumieu" => {
                    let seq = |v: &Option<Vec<f64>>| v.clone().map_or_else(|| Ok(default_rj()), RSequence::new);
                    Self::structure_roumieu(seq(r)?, seq(k)?, ws)
                }
                other => Err(Error::InvalidSpec(format!("unknown ultrapolynomial form '{other}'"))),
            },
        }
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn class(&self) -> &OpClass {
        &self.class
    }

    pub fn weights(&self) -> &WeightSequence {
        &self.ws
    }

    fn cert_range(&self) -> usize {
        match &self.form {
            Form::Table(a) => a.len() - 1,
            Form::StructureBeurling { .. } => self.ws.p_max().min(400),
            Form::StructureRoumieu { r, k } => self.ws.p_max().min(r.j_max()).min(k.j_max()).min(400),
        }
    }

    /// `log` of one factor's coefficient `(2H)^{2p} / (Π_{j≤2p} ρ_j M_{2p})`, by even index.
    fn log_factor_coef(&self, rho: &RSequence, n: usize) -> Option<f64> {
        if n % 2 == 1 {
            return Some(f64::NEG_INFINITY);
        }
        Some(n as f64 * (2.0 * self.ws.h()).ln() - rho.log_product(n)? - self.ws.log_m(n)?)
    }

    /// `log |a_n|`.
    pub fn log_coef(&self, n: usize) -> Option<f64> {
        match &self.form {
            Form::Table(a) => Some(a.get(n).map_or(f64::NEG_INFINITY, |c| c.norm().ln())),
            Form::StructureBeurling { lambda } => {
                if n % 2 == 1 {
                    Some(f64::NEG_INFINITY)
                } else {
                    Some(n as f64 * (lambda * self.ws.h() * self.ws.h()).ln() - self.ws.log_m(n)?)
                }
            }
            Form::StructureRoumieu { r, k } => {
                let mut acc = f64::NEG_INFINITY;
                for i in (0..=n).step_by(2) {
                    acc = log_add(acc, self.log_factor_coef(r, i)? + self.log_factor_coef(k, n - i)?);
                }
                Some(acc)
            }
        }
    }

    /// `a_n`.
    pub fn coef(&self, n: usize) -> Option<Complex64> {
        match &self.form {
            Form::Table(a) => Some(a.get(n).copied().unwrap_or_default()),
            _ => Some(Complex64::new(self.log_coef(n)?.exp(), 0.0)),
        }
    }

    /// `log P(x)` for the positive closed forms; `log |P(x)|` for tables.
    pub fn log_eval(&self, x: f64) -> Result<f64> {
        let ax = x.abs();
        match &self.form {
            Form::Table(_) => Ok(self.symbol(x)?.norm().ln()),
            Form::StructureBeurling { lambda } => {
                if ax == 0.0 {
                    return Ok(0.0);
                }
                let lz = (lambda * self.ws.h() * self.ws.h() * ax).ln();
                log_series(x, |p| Some(2.0 * p as f64 * lz - self.ws.log_m(2 * p)?))
            }
            Form::StructureRoumieu { r, k } => {
                if ax == 0.0 {
                    return Ok(0.0);
                }
                let lz = (2.0 * self.ws.h() * ax).ln();
                let factor = |rho: &RSequence| log_series(x, |p| Some(2.0 * p as f64 * lz - rho.log_product(2 * p)? - self.ws.log_m(2 * p)?));
                Ok(factor(r)? + factor(k)?)
            }
        }
    }

    /// `P(x)` for real `x`; `+∞` when it exceeds `f64`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        match &self.form {
            Form::Table(_) => Ok(self.symbol(x)?.re),
            _ => Ok(self.log_eval(x)?.exp()),
        }
    }

    /// `P(x)` as a complex number.
    pub fn symbol(&self, x: f64) -> Result<Complex64> {
        match &self.form {
            Form::Table(a) => Ok(a.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * x + c)),
            _ => Ok(Complex64::new(self.log_eval(x)?.exp(), 0.0)),
        }
    }

    /// `z ↦ P(z + k)` by binomial expansion (finite tables only).
    pub fn shifted(&self, k: i64) -> Result<Self> {
        let Form::Table(a) = &self.form else {
            return Err(Error::InvalidSpec("closed-form ultrapolynomials shift through their symbol, not their coefficients".into()));
        };
        let kf = k as f64;
        let n = a.len();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        for (i, ai) in a.iter().enumerate() {
            // (z + k)^i = Σ_m C(i, m) k^{i−m} z^m
            let mut binom = 1.0;
            for (m, bm) in b.iter_mut().enumerate().take(i + 1) {
                if m > 0 {
                    binom *= (i - m + 1) as f64 / m as f64;
                }
                *bm += ai * binom * kf.powi((i - m) as i32);
            }
        }
        if b.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Overflow(format!("shift by k = {k} of a degree {} table", n - 1)));
        }
        let class = match &self.class {
            OpClass::Beurling { .. } => Class::Beurling,
            OpClass::Roumieu { .. } => Class::Roumieu,
        };
        let mut out = Self::table(b, &self.ws, class, None)?;
        if let (OpClass::Beurling { l, .. }, Form::Table(bt)) = (&self.class, &out.form) {
            let c = bt
                .iter()
                .enumerate()
                .map(|(n, c)| c.norm().ln() + self.ws.log_m(n).unwrap_or(f64::INFINITY) - n as f64 * l.ln())
                .fold(f64::NEG_INFINITY, f64::max)
                .exp();
            out.class = OpClass::Beurling { l: *l, c };
        }
        Ok(out)
    }
}

/// `P(D)` on a coefficient oracle: `k ↦ P(k)ĉ(k)`. Symbol failures give `NaN` coefficients.
pub fn apply_operator(p: &Ultrapolynomial, f: &CoefDistribution) -> CoefDistribution {
    let p = p.clone();
    f.multiplier("P(D)", move |k| p.symbol(k as f64).unwrap_or(Complex64::new(f64::NAN, f64::NAN)))
}

/// `P(D)` on a trigonometric polynomial.
pub fn apply_operator_poly(p: &Ultrapolynomial, f: &TrigPoly) -> Result<TrigPoly> {
    let mut out = TrigPoly::with_degree(f.degree());
    for (k, c) in f.iter() {
        if c.norm() == 0.0 {
            continue;
        }
        let v = p.symbol(k as f64)? * c;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Overflow(format!("P({k})·ĉ({k}) exceeds f64")));
        }
        out.set(k, v);
    }
    Ok(out)
}

/// `P(D)` applied index-wise to a net.
pub fn apply_operator_net(p: &Ultrapolynomial, net: &Net) -> Net {
    let p = p.clone();
    net.map(format!("P(D)({})", net.label()), move |_, f| apply_operator_poly(&p, f).map_err(|e| e.to_string()))
}

/// Parameters of the factorization.
#[derive(Debug, Clone, PartialEq)]
pub enum FactorParams {
    Beurling { lambda: f64 },
    Roumieu { r: RSequence, k: RSequence },
}

/// `f = P(D)g` on `|k| ≤ K`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub p: Ultrapolynomial,
    /// `ĝ(k) = ĉ(k)/P(k)` on `|k| ≤ K`, band-limited.
    pub g: CoefDistribution,
    /// `max_k |P(k)ĝ(k) − ĉ(k)| / |ĉ(k)|`.
    pub reconstruction_residual: f64,
    /// Growth of `ĉ` against the factorization's hypothesis.
    pub growth: Sweep,
    /// `ĝ ∈ s^{(N_p)}`.
    pub in_target: GrowthVerdict,
    /// `ĝ ∈ s^{{M_p}}` (Beurling only).
    pub in_roumieu_m: Option<GrowthVerdict>,
    /// Margin of `sup_k |ĝ(k)| e^{M(λk)}` (Beurling only).
    pub decay_at_lambda: Option<f64>,
    pub k_max: usize,
}

/// Factorizes `ĉ(k) = P(k)ĝ(k)` with the closed-form ultrapolynomials and certifies `ĝ`.
pub fn structure_factorize(c: &CoefDistribution, ws: &WeightSequence, params: &FactorParams, target: &WeightSequence, k_max: usize) -> Result<Factorization> {
    let rel = relation(ws, target, RelationKind::Strict, 4096, &default_grid(), DEFAULT_TAU);
    if !rel.bounded {
        return Err(Error::RelationFail(format!("M_p ≺ N_p fails at the desk scale (margin {:.3})", rel.margin)));
    }
    let (p, growth) = match params {
        FactorParams::Beurling { lambda } => {
            let s = sweep_seminorm(c, ws, *lambda, Sign::Minus, k_max);
            (Ultrapolynomial::structure_beurling(*lambda, ws)?, s)
        }
        FactorParams::Roumieu { r, k } => {
            let modified = ws.modified(r);
            let profile: Vec<f64> = (0..=k_max as i64)
                .map(|j| c.coef(j).norm().max(c.coef(-j).norm()).ln() - modified.associated(j as f64).value)
                .collect();
            let t = bounded_test(&profile, DEFAULT_TAU);
            let (at, best) = profile.iter().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, v)| if *v > a.1 { (i, *v) } else { a });
            let s = Sweep { log_value: best, argmax_k: at as i64, truncated: !t.bounded, k_max };
            (Ultrapolynomial::structure_roumieu(r.clone(), k.clone(), ws)?, s)
        }
    };
    if growth.truncated {
        return Err(Error::GrowthFail(format!("coefficient growth sweep diverges (sup {:.3e} at k = {})", growth.value(), growth.argmax_k)));
    }
    let mut g = TrigPoly::with_degree(k_max);
    let mut residual: f64 = 0.0;
    for k in -(k_max as i64)..=k_max as i64 {
        let ck = c.coef(k);
        if ck.norm() == 0.0 {
            continue;
        }
        let log_p = p.log_eval(k as f64)?;
        let gk = ck * (-log_p).exp();
        g.set(k, gk);
        // P(k)ĝ(k)/ĉ(k) − 1 in log scale, since P(k) may exceed f64
        let ratio = Complex64::from_polar((gk.norm().ln() + log_p - ck.norm().ln()).exp(), gk.arg() - ck.arg());
        residual = residual.max((ratio - 1.0).norm());
    }
    let gd = CoefDistribution::from_poly(&g);
    let in_target = coefficient_membership(&gd, target, Class::Beurling, Sign::Plus, &default_grid(), DEFAULT_TAU, k_max);
    let (in_roumieu_m, decay_at_lambda) = match params {
        FactorParams::Beurling { lambda } => {
            let m = coefficient_membership(&gd, ws, Class::Roumieu, Sign::Plus, &default_grid(), DEFAULT_TAU, k_max);
            let at = coefficient_membership(&gd, ws, Class::Roumieu, Sign::Plus, &[*lambda], DEFAULT_TAU, k_max);
            (Some(m), Some(at.margin))
        }
        FactorParams::Roumieu { .. } => (None, None),
    };
    Ok(Factorization { p, g: gd, reconstruction_residual: residual, growth, in_target, in_roumieu_m, decay_at_lambda, k_max })
}

/// One grid point of [`lower_bound_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub x: f64,
    pub log_p: f64,
    pub log_target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    /// `min_x P(x) / target(x)` over the grid.
    pub c_prime: f64,
    /// Head-versus-tail margin of `log target(x) − log P(x)` along the grid.
    pub margin: f64,
    pub pass: bool,
    pub rows: Vec<LowerBoundRow>,
}

/// Fits `C′` in `P(x) ≥ C′ e^{2M(λx)}` (Beurling) or `C′ e^{M_{r′}(x) + M_{k′}(x)}` (Roumieu
/// forms) over a grid; passes when the deficit stays bounded along the grid.
pub fn lower_bound_check(p: &Ultrapolynomial, ws: &WeightSequence, lambda: f64, x_grid: &[f64]) -> Result<LowerBoundReport> {
    let mut rows = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let log_target = match p.form() {
            Form::StructureRoumieu { r, k } => ws.associated_rj(r, x).value + ws.associated_rj(k, x).value,
            _ => 2.0 * ws.assoc(lambda * x),
        };
        rows.push(LowerBoundRow { x, log_p: p.log_eval(x)?, log_target });
    }
    let deficit: Vec<f64> = rows.iter().map(|r| r.log_target - r.log_p).collect();
    let t = bounded_test(&deficit, DEFAULT_TAU);
    let worst = deficit.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(LowerBoundReport { c_prime: (-worst).exp(), margin: t.margin, pass: t.bounded && worst.is_finite(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::log_grid;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn z2(ws: &WeightSequence, class: Class) -> Ultrapolynomial {
        Ultrapolynomial::table(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)], ws, class, None).unwrap()
    }

    fn exp_series(ws: &WeightSequence, n: usize) -> Ultrapolynomial {
        let mut a = vec![c(1.0, 0.0)];
        for i in 1..=n {
            a.push(a[i - 1] / i as f64);
        }
        Ultrapolynomial::table(a, ws, Class::Beurling, Some((1.0, 1.0))).unwrap()
    }

    #[test]
    fn build_examples() {
        let p1 = WeightSequence::gevrey(1.0, 400).unwrap();
        let p2 = WeightSequence::gevrey(2.0, 400).unwrap();
        assert!(matches!(z2(&p1, Class::Beurling).class(), OpClass::Beurling { .. }));
        assert!(matches!(z2(&p1, Class::Roumieu).class(), OpClass::Roumieu { .. }));
        exp_series(&p1, 60);
        // 2^n/n! is not bounded by 1·1^n/n!
        let two: Vec<Complex64> = (0..20).map(|n| c(2f64.powi(n) / (1..=n).map(|i| i as f64).product::<f64>(), 0.0)).collect();
        assert!(matches!(Ultrapolynomial::table(two, &p1, Class::Beurling, Some((1.0, 1.0))), Err(Error::ClassFail(_))));
        let sb = Ultrapolynomial::structure_beurling(1.0, &p2).unwrap();
        assert_eq!(sb.class(), &OpClass::Beurling { l: 16.0, c: 1.0 });
        for p in 0..30usize {
            let expect = 2.0 * p as f64 * 16f64.ln() - p2.log_m(2 * p).unwrap();
            assert!((sb.log_coef(2 * p).unwrap() - expect).abs() < 1e-12);
            assert_eq!(sb.log_coef(2 * p + 1).unwrap(), f64::NEG_INFINITY);
            // certified bound |a_n| ≤ L^n / M_n
            assert!(sb.log_coef(2 * p).unwrap() <= 2.0 * p as f64 * 16f64.ln() - p2.log_m(2 * p).unwrap() + 1e-12);
        }
        let sr = Ultrapolynomial::structure_roumieu(default_rj(), default_rj(), &p1).unwrap();
        assert!(matches!(sr.class(), OpClass::Roumieu { table } if table.len() == 6));
    }

    #[test]
    fn file_formats() {
        let ws = WeightSequence::gevrey(1.0, 400).unwrap();
        let t = UltraSpec::from_json(r#"{"a":[{"n":2,"re":1,"im":0}],"class":"beurling","L":1,"C":2}"#).unwrap();
        let p = Ultrapolynomial::build(&t, &ws, Class::Roumieu).unwrap();
        assert_eq!(p.eval(3.0).unwrap(), 9.0);
        assert!(matches!(p.class(), OpClass::Beurling { .. }));
        let tight = UltraSpec::from_json(r#"{"a":[{"n":2,"re":1,"im":0}],"class":"beurling","L":1,"C":1}"#).unwrap();
        assert!(matches!(Ultrapolynomial::build(&tight, &ws, Class::Beurling), Err(Error::ClassFail(_))));
        let f = UltraSpec::from_json(r#"{"form":"structure_beurling","lambda":1}"#).unwrap();
        assert!(matches!(Ultrapolynomial::build(&f, &ws, Class::Beurling).unwrap().form(), Form::StructureBeurling { .. }));
        let r = UltraSpec::from_json(r#"{"form":"structure_roumieu"}"#).unwrap();
        assert!(Ultrapolynomial::build(&r, &ws, Class::Roumieu).is_ok());
        let bad = UltraSpec::from_json(r#"{"form":"nope"}"#).unwrap();
        assert!(Ultrapolynomial::build(&bad, &ws, Class::Roumieu).is_err());
    }

    #[test]
    fn eval_examples() {
        let p2 = WeightSequence::gevrey(2.0, 400).unwrap();
        let sb = Ultrapolynomial::structure_beurling(1.0, &p2).unwrap();
        assert_eq!(sb.eval(0.0).unwrap(), 1.0);
        // P(5) = Σ 80^{2p}/(2p)!², summed directly in f64
        let direct: f64 = (0..60).map(|p| {
            let lf: f64 = (1..=2 * p).map(|i| (i as f64).ln()).sum();
            (2.0 * p as f64 * 80f64.ln() - 2.0 * lf).exp()
        }).sum();
        assert!((sb.eval(5.0).unwrap() / direct - 1.0).abs() < 1e-12);
        assert!(sb.log_eval(5.0).unwrap() >= 2.0 * p2.assoc(5.0));
        assert_eq!(z2(&p2, Class::Beurling).eval(3.0).unwrap(), 9.0);
    }

    #[test]
    fn eval_past_table_range_fails() {
        let ws = WeightSequence::from_log_table((0..=40).map(|p| (1..=p).map(|i| (i as f64).ln()).sum::<f64>()).collect(), None).unwrap();
        let sb = Ultrapolynomial::structure_beurling(1.0, &ws).unwrap();
        assert!(sb.log_eval(0.5).is_ok());
        assert!(matches!(sb.log_eval(50.0), Err(Error::NoConverge { .. })));
    }

    #[test]
    fn apply_examples() {
        let ws = WeightSequence::gevrey(1.0, 400).unwrap();
        let sin = TrigPoly::sin();
        assert_eq!(apply_operator_poly(&z2(&ws, Class::Beurling), &sin).unwrap(), sin);
        let e = exp_series(&ws, 60);
        for k in [-2i64, 1, 3] {
            let out = apply_operator_poly(&e, &TrigPoly::monomial(k, c(1.0, 0.0))).unwrap();
            assert!((out.coef(k).re / (k as f64).exp() - 1.0).abs() < 1e-12);
        }
        assert!(apply_operator_poly(&e, &TrigPoly::zero()).unwrap().is_zero());
        let d = apply_operator(&z2(&ws, Class::Beurling), &CoefDistribution::delta());
        assert!((d.coef(7).re - 49.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-12);
    }

    #[test]
    fn apply_matches_derivative_sum() {
        // Σ a_n D^n f computed through derivative(); the multiplier must agree to 1e-12 relative
        let ws = WeightSequence::gevrey(1.0, 400).unwrap();
        let p = Ultrapolynomial::table(vec![c(0.5, 0.0), c(0.0, -1.0), c(0.25, 0.1), c(0.0, 0.0), c(0.01, 0.0)], &ws, Class::Roumieu, None).unwrap();
        let f = TrigPoly::dirichlet(9).add(&TrigPoly::monomial(-4, c(0.3, 0.2)));
        let Form::Table(a) = p.form() else { unreachable!() };
        let mut sum = TrigPoly::zero();
        for (n, an) in a.iter().enumerate() {
            sum = sum.add(&f.derivative(n as u32).unwrap().scale(*an));
        }
        let out = apply_operator_poly(&p, &f).unwrap();
        for (k, v) in out.iter() {
            assert!((v - sum.coef(k)).norm() <= 1e-12 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn shift_examples() {
        let ws = WeightSequence::gevrey(1.0, 400).unwrap();
        let s = z2(&ws, Class::Beurling).shifted(1).unwrap();
        let Form::Table(b) = s.form() else { unreachable!() };
        assert_eq!(b, &vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let s0 = z2(&ws, Class::Beurling).shifted(0).unwrap();
        assert_eq!(s0.form(), z2(&ws, Class::Beurling).form());
        // P(D)(e^{3it} f) = e^{3it} P(D+3) f on a truncated δ
        let p = z2(&ws, Class::Beurling);
        let f = CoefDistribution::delta().truncate(20);
        let lhs = apply_operator_poly(&p, &f.shift(3)).unwrap();
        let rhs = apply_operator_poly(&p.shifted(3).unwrap(), &f).unwrap().shift(3);
        assert!(lhs.iter().all(|(k, v)| (v - rhs.coef(k)).norm() < 1e-12));
        let sb = Ultrapolynomial::structure_beurling(1.0, &ws).unwrap();
        assert!(sb.shifted(1).is_err());
    }

    #[test]
    fn factorize_growth_example() {
        let ws = WeightSequence::gevrey(2.0, 1000).unwrap();
        let target = WeightSequence::gevrey(3.0, 1000).unwrap();
        let cdist = CoefDistribution::exp_growth(1.0, &ws);
        let f = structure_factorize(&cdist, &ws, &FactorParams::Beurling { lambda: 1.0 }, &target, FACTOR_K_MAX).unwrap();
        assert!(f.reconstruction_residual < 1e-12, "{}", f.reconstruction_residual);
        assert!(f.decay_at_lambda.unwrap() <= DEFAULT_TAU);
        assert!(f.in_target.bounded);
        assert!(f.in_roumieu_m.as_ref().unwrap().bounded);
    }

    #[test]
    fn factorize_delta_and_zero() {
        let ws = WeightSequence::gevrey(2.0, 1000).unwrap();
        let target = WeightSequence::gevrey(3.0, 1000).unwrap();
        let f = structure_factorize(&CoefDistribution::delta(), &ws, &FactorParams::Beurling { lambda: 1.0 }, &target, FACTOR_K_MAX).unwrap();
        let p = &f.p;
        for k in [0i64, 3, -17, 150] {
            let expect = (-p.log_eval(k as f64).unwrap()).exp() / (2.0 * std::f64::consts::PI);
            assert!((f.g.coef(k).re / expect - 1.0).abs() < 1e-12);
        }
        assert!(f.in_roumieu_m.unwrap().bounded);
        let z = structure_factorize(&CoefDistribution::zero(), &ws, &FactorParams::Beurling { lambda: 1.0 }, &target, FACTOR_K_MAX).unwrap();
        assert!(z.g.truncate(FACTOR_K_MAX).is_zero());
    }

    #[test]
    fn factorize_errors() {
        let ws = WeightSequence::gevrey(2.0, 1000).unwrap();
        let target = WeightSequence::gevrey(3.0, 1000).unwrap();
        let fast = CoefDistribution::exp_growth(4.0, &ws);
        assert!(matches!(
            structure_factorize(&fast, &ws, &FactorParams::Beurling { lambda: 1.0 }, &target, FACTOR_K_MAX),
            Err(Error::GrowthFail(_))
        ));
        assert!(matches!(
            structure_factorize(&CoefDistribution::delta(), &ws, &FactorParams::Beurling { lambda: 1.0 }, &ws, FACTOR_K_MAX),
            Err(Error::RelationFail(_))
        ));
    }

    #[test]
    fn factorize_roumieu() {
        let ws = WeightSequence::gevrey(1.0, 2000).unwrap();
        let target = WeightSequence::gevrey(2.0, 2000).unwrap();
        let params = FactorParams::Roumieu { r: default_rj(), k: default_rj() };
        let f = structure_factorize(&CoefDistribution::cot_reg(), &ws, &params, &target, FACTOR_K_MAX).unwrap();
        assert!(f.reconstruction_residual < 1e-12);
        assert!(f.in_target.bounded);
    }

    #[test]
    fn lower_bound_examples() {
        let ws = WeightSequence::gevrey(2.0, 1000).unwrap();
        let sb = Ultrapolynomial::structure_beurling(1.0, &ws).unwrap();
        let grid = log_grid(1.0, 100.0, 60);
        let r = lower_bound_check(&sb, &ws, 1.0, &grid).unwrap();
        assert!(r.pass && r.c_prime > 0.0, "{r:?}");
        // (M.2) gives C′ ≥ 1/A = 1
        assert!(r.c_prime >= 1.0 - 1e-12);
        let z = lower_bound_check(&z2(&ws, Class::Beurling), &ws, 1.0, &grid).unwrap();
        assert!(!z.pass);
        let at0 = lower_bound_check(&sb, &ws, 1.0, &[0.0]).unwrap();
        assert_eq!(at0.c_prime, 1.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn leibniz_shift(a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
                         f in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12),
                         k in -8i64..=8) {
            let ws = WeightSequence::gevrey(1.0, 400).unwrap();
            let p = Ultrapolynomial::table(a.iter().map(|&(r, i)| c(r, i)).collect(), &ws, Class::Roumieu, None).unwrap();
            let f = TrigPoly::from_pairs(f.iter().enumerate().map(|(j, &(r, i))| (j as i64 - 5, c(r, i))));
            let lhs = apply_operator_poly(&p, &f.shift(k)).unwrap();
            let rhs = apply_operator_poly(&p.shifted(k).unwrap(), &f).unwrap().shift(k);
            for (j, v) in lhs.iter() {
                prop_assert!((v - rhs.coef(j)).norm() <= 1e-9 * (1.0 + v.norm()));
            }
        }

        #[test]
        fn multiplier_identity(a in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..6),
                               f in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..12)) {
            let ws = WeightSequence::gevrey(1.0, 400).unwrap();
            let p = Ultrapolynomial::table(a.iter().map(|&(r, i)| c(r, i)).collect(), &ws, Class::Roumieu, None).unwrap();
            let f = TrigPoly::from_pairs(f.iter().enumerate().map(|(j, &(r, i))| (j as i64 - 5, c(r, i))));
            let out = apply_operator_poly(&p, &f).unwrap();
            for (k, v) in f.iter() {
                let expect = p.symbol(k as f64).unwrap() * v;
                prop_assert!((out.coef(k) - expect).norm() <= 1e-12 * (1.0 + expect.norm()));
            }
        }
    }
}
