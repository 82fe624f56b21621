//! Nets `n ↦ f_n` of trigonometric polynomials and the factor algebra of moderate modulo
//! negligible nets, generalized numbers, and point values.
//!
//! Membership tests follow the quantifier patterns of each class:
//!
//! | space | Beurling | Roumieu | tested quantity |
//! |---|---|---|---|
//! | moderate nets | `∀h ∃λ` | `∀λ ∃h` | `‖f_n‖_h e^{−M(λn)}` |
//! | negligible nets | `∀h ∀λ` | `∃λ ∃h` | `‖f_n‖_h e^{M(λn)}` |
//! | null (sup norm) | `∀λ` | `∃λ` | `‖f_n‖_∞ e^{M(λn)}` |
//! | moderate numbers | `∃λ` | `∀λ` | `|z_n| e^{−M(λn)}` |
//! | negligible numbers | `∀λ` | `∃λ` | `|z_n| e^{M(λn)}` |

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::series::{log_coef_seminorm, NormEstimate, TrigPoly};
use crate::verdict::{
    bounded_test, default_grid, pattern1, pattern2, reduce1, reduce2, BoundTest, Class, GridUsed, GrowthVerdict, Method, Property, Quant,
    DEFAULT_TAU,
};
use crate::weights::{RSequence, WeightSequence};
use crate::{Error, Result};

type Generator = dyn Fn(usize) -> std::result::Result<TrigPoly, String> + Send + Sync;

/// `n ↦ f_n`, `0 ≤ n ≤ n_max`, evaluated lazily and memoized.
#[derive(Clone)]
pub struct Net {
    gen: Arc<Generator>,
    n_max: usize,
    label: String,
    cache: Arc<Vec<OnceLock<TrigPoly>>>,
    norms: Arc<Mutex<HashMap<String, Arc<Vec<NormEstimate>>>>>,
}

impl fmt::Debug for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Net").field("label", &self.label).field("n_max", &self.n_max).finish()
    }
}

/// Grids and tolerance for the classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grids {
    pub h: Vec<f64>,
    pub lambda: Vec<f64>,
    pub tau: f64,
}

impl Default for Grids {
    fn default() -> Self {
        Grids { h: default_grid(), lambda: default_grid(), tau: DEFAULT_TAU }
    }
}

impl Grids {
    pub fn new(h: Vec<f64>, lambda: Vec<f64>) -> Self {
        Grids { h, lambda, tau: DEFAULT_TAU }
    }

    fn check(&self) -> Result<()> {
        let ok = |g: &[f64]| !g.is_empty() && g.iter().all(|v| *v > 0.0 && v.is_finite());
        if ok(&self.h) && ok(&self.lambda) && self.tau >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidSpec("grids must be nonempty with positive entries".into()))
        }
    }
}

impl Net {
    /// Lazy net; entries are produced on first access.
    pub fn new<F>(label: impl Into<String>, n_max: usize, gen: F) -> Result<Self>
    where
        F: Fn(usize) -> std::result::Result<TrigPoly, String> + Send + Sync + 'static,
    {
        if n_max < 8 {
            return Err(Error::InvalidSpec(format!("n_max must be at least 8, got {n_max}")));
        }
        Ok(Net {
            gen: Arc::new(gen),
            n_max,
            label: label.into(),
            cache: Arc::new((0..=n_max).map(|_| OnceLock::new()).collect()),
            norms: Arc::default(),
        })
    }

    /// Net from an infallible generator.
    pub fn from_fn<F>(label: impl Into<String>, n_max: usize, gen: F) -> Result<Self>
    where
        F: Fn(usize) -> TrigPoly + Send + Sync + 'static,
    {
        Self::new(label, n_max, move |n| Ok(gen(n)))
    }

    /// `n ↦ f`.
    pub fn constant(f: &TrigPoly, n_max: usize) -> Result<Self> {
        let f = f.clone();
        Self::from_fn("const", n_max, move |_| f.clone())
    }

    /// `n ↦ D_n`, the embedding of `δ` by the Dirichlet mollifier.
    pub fn dirichlet(n_max: usize) -> Result<Self> {
        Self::from_fn("dirichlet", n_max, TrigPoly::dirichlet)
    }

    /// `n ↦ e^{−rate·n} f`.
    pub fn scaled(f: &TrigPoly, rate: f64, n_max: usize) -> Result<Self> {
        let f = f.clone();
        Self::from_fn(format!("scaled:{rate}"), n_max, move |n| f.scale(Complex64::new((-rate * n as f64).exp(), 0.0)))
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `f_n`.
    pub fn get(&self, n: usize) -> Result<&TrigPoly> {
        let slot = self.cache.get(n).ok_or_else(|| Error::GeneratorFail { index: n, message: format!("index beyond n_max = {}", self.n_max) })?;
        if let Some(v) = slot.get() {
            return Ok(v);
        }
        let v = (self.gen)(n).map_err(|message| Error::GeneratorFail { index: n, message })?;
        Ok(slot.get_or_init(|| v))
    }

    /// Evaluates every index, in parallel.
    pub fn materialize(&self) -> Result<()> {
        (0..=self.n_max).into_par_iter().try_for_each(|n| self.get(n).map(|_| ()))
    }

    pub fn entries(&self) -> Result<Vec<&TrigPoly>> {
        self.materialize()?;
        (0..=self.n_max).map(|n| self.get(n)).collect()
    }

    /// Index-wise map.
    pub fn map<F>(&self, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize, &TrigPoly) -> std::result::Result<TrigPoly, String> + Send + Sync + 'static,
    {
        let a = self.clone();
        Self::new(label, self.n_max, move |n| {
            let x = a.get(n).map_err(|e| e.to_string())?;
            f(n, x)
        })
        .expect("n_max already validated")
    }

    fn zip<F>(&self, other: &Net, label: String, f: F) -> Net
    where
        F: Fn(&TrigPoly, &TrigPoly) -> TrigPoly + Send + Sync + 'static,
    {
        let (a, b) = (self.clone(), other.clone());
        Self::new(label, self.n_max.min(other.n_max), move |n| {
            let x = a.get(n).map_err(|e| e.to_string())?;
            let y = b.get(n).map_err(|e| e.to_string())?;
            Ok(f(x, y))
        })
        .expect("n_max already validated")
    }

    pub fn add(&self, other: &Net) -> Net {
        self.zip(other, format!("({})+({})", self.label, other.label), |x, y| x.add(y))
    }

    pub fn sub(&self, other: &Net) -> Net {
        self.zip(other, format!("({})-({})", self.label, other.label), |x, y| x.sub(y))
    }

    pub fn mul(&self, other: &Net) -> Net {
        self.zip(other, format!("({})·({})", self.label, other.label), |x, y| x.multiply(y))
    }

    pub fn scale(&self, s: Complex64) -> Net {
        self.map(format!("{s}·({})", self.label), move |_, x| Ok(x.scale(s)))
    }

    /// `n ↦ log ‖f_n‖_{M_p,h}`, memoized per weight sequence and `h`.
    pub fn log_ud_norms(&self, ws: &WeightSequence, h: f64) -> Result<Arc<Vec<NormEstimate>>> {
        let key = format!("{}|{h:e}", ws.fingerprint());
        if let Some(v) = self.norms.lock().expect("norm cache").get(&key) {
            return Ok(v.clone());
        }
        let entries = self.entries()?;
        let v: Arc<Vec<NormEstimate>> = Arc::new(entries.par_iter().map(|f| f.log_ud_norm(ws, h)).collect());
        self.norms.lock().expect("norm cache").insert(key, v.clone());
        Ok(v)
    }

    /// `n ↦ log ‖f_n‖_∞`.
    pub fn log_sup_norms(&self) -> Result<Vec<f64>> {
        Ok(self.entries()?.par_iter().map(|f| f.sup_norm().ln()).collect())
    }
}

/// `log e^{±M(λn)}` columns, shared by the classifiers.
fn assoc_column(ws: &WeightSequence, lambda: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|n| ws.assoc(lambda * n as f64)).collect()
}

fn shifted(base: &[f64], column: &[f64], sign: f64) -> Vec<f64> {
    base.iter().zip(column).map(|(b, m)| if *b == f64::NEG_INFINITY { *b } else { b + sign * m }).collect()
}

#[allow(clippy::too_many_arguments)]
fn verdict(
    margin: f64,
    witness: usize,
    tau: f64,
    grid: GridUsed,
    method: Method,
    property: Property,
    class: Option<Class>,
    pattern: String,
    n_max: usize,
    truncated: bool,
) -> GrowthVerdict {
    GrowthVerdict { bounded: margin <= tau, margin, witness_n: witness, grid, method, property, class, pattern, tau, n_max, truncated, desk_scale: true }
}

/// Shared two-parameter classification over a table of `log ‖f_n‖_h` rows.
fn classify_hl(
    rows: &[Vec<f64>],
    ws: &WeightSequence,
    class: Class,
    grids: &Grids,
    property: Property,
    method: Method,
    n_max: usize,
    truncated: bool,
) -> GrowthVerdict {
    let sign = if property == Property::Moderate { -1.0 } else { 1.0 };
    let cols: Vec<Vec<f64>> = grids.lambda.iter().map(|&l| assoc_column(ws, l, n_max)).collect();
    let test = |hi: usize, li: usize| bounded_test(&shifted(&rows[hi], &cols[li], sign), grids.tau);
    let (nh, nl) = (grids.h.len(), grids.lambda.len());
    // (outer quantifier, inner quantifier, outer is h)
    let (qo, qi, h_outer) = match (property, class) {
        (Property::Moderate, Class::Beurling) => (Quant::ForAll, Quant::Exists, true),
        (Property::Moderate, Class::Roumieu) => (Quant::ForAll, Quant::Exists, false),
        (_, Class::Beurling) => (Quant::ForAll, Quant::ForAll, true),
        (_, Class::Roumieu) => (Quant::Exists, Quant::Exists, false),
    };
    let (red, pattern, deciding) = if h_outer {
        let r = reduce2(qo, qi, nh, |_| nl, test);
        let d = vec![grids.h[r.deciding.0], grids.lambda[r.deciding.1]];
        (r, pattern2(qo, "h", qi, "λ"), d)
    } else {
        let r = reduce2(qo, qi, nl, |_| nh, |li, hi| test(hi, li));
        let d = vec![grids.lambda[r.deciding.0], grids.h[r.deciding.1]];
        (r, pattern2(qo, "λ", qi, "h"), d)
    };
    let grid = GridUsed { h: Some(grids.h.clone()), lambda: Some(grids.lambda.clone()), families: None, deciding: Some(deciding) };
    verdict(red.margin, red.witness, grids.tau, grid, method, property, Some(class), pattern, n_max, truncated)
}

fn norm_rows(net: &Net, ws: &WeightSequence, hs: &[f64]) -> Result<(Vec<Vec<f64>>, bool)> {
    let mut truncated = false;
    let mut rows = Vec::with_capacity(hs.len());
    for &h in hs {
        let est = net.log_ud_norms(ws, h)?;
        truncated |= est.iter().any(|e| e.truncated);
        rows.push(est.iter().map(|e| e.log_value).collect());
    }
    Ok((rows, truncated))
}

/// Moderateness of a net: `sup_n ‖f_n‖_h e^{−M(λn)} < ∞` under the class quantifiers.
pub fn classify_moderate(net: &Net, ws: &WeightSequence, class: Class, grids: &Grids) -> Result<GrowthVerdict> {
    grids.check()?;
    let (rows, truncated) = norm_rows(net, ws, &grids.h)?;
    Ok(classify_hl(&rows, ws, class, grids, Property::Moderate, Method::FullNorm, net.n_max, truncated))
}

/// Negligibility of a net: `sup_n ‖f_n‖_h e^{M(λn)} < ∞` under the class quantifiers.
pub fn classify_negligible(net: &Net, ws: &WeightSequence, class: Class, grids: &Grids) -> Result<GrowthVerdict> {
    grids.check()?;
    let (rows, truncated) = norm_rows(net, ws, &grids.h)?;
    Ok(classify_hl(&rows, ws, class, grids, Property::Negligible, Method::FullNorm, net.n_max, truncated))
}

/// Negligibility of a moderate net from sup norms alone.
///
/// `moderate` must be a bounded moderateness verdict for this net and class.
pub fn classify_negligible_supnorm(net: &Net, ws: &WeightSequence, class: Class, lambda_grid: &[f64], tau: f64, moderate: &GrowthVerdict) -> Result<GrowthVerdict> {
    if moderate.property != Property::Moderate || moderate.class != Some(class) || !moderate.bounded {
        return Err(Error::HypothesisFail(format!("net '{}' is not established as moderate in the {class:?} class", net.label)));
    }
    let base = net.log_sup_norms()?;
    Ok(sup_like(&base, ws, class, lambda_grid, tau, Method::SupNorm))
}

fn sup_like(base: &[f64], ws: &WeightSequence, class: Class, lambda_grid: &[f64], tau: f64, method: Method) -> GrowthVerdict {
    let n_max = base.len() - 1;
    let q = match class {
        Class::Beurling => Quant::ForAll,
        Class::Roumieu => Quant::Exists,
    };
    let red = reduce1(q, lambda_grid.len(), |i| bounded_test(&shifted(base, &assoc_column(ws, lambda_grid[i], n_max), 1.0), tau));
    let grid = GridUsed { lambda: Some(lambda_grid.to_vec()), deciding: Some(vec![lambda_grid[red.deciding.0]]), ..Default::default() };
    verdict(red.margin, red.witness, tau, grid, method, Property::Negligible, Some(class), pattern1(q, "λ"), n_max, false)
}

/// Moderate or negligible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Moderate,
    Negligible,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "moderate" => Ok(Mode::Moderate),
            "negligible" => Ok(Mode::Negligible),
            other => Err(Error::Parse(format!("unknown mode '{other}'"))),
        }
    }
}

impl Mode {
    fn property(self) -> Property {
        match self {
            Mode::Moderate => Property::Moderate,
            Mode::Negligible => Property::Negligible,
        }
    }
}

/// Classification of a coefficient net `(k, n) ↦ c_{k,n}` through `σ_h(c_{·,n})`.
///
/// Each entry of `coefs` is read as the coefficient table `k ↦ c_{k,n}`.
pub fn coef_classify(coefs: &Net, ws: &WeightSequence, class: Class, mode: Mode, grids: &Grids) -> Result<GrowthVerdict> {
    grids.check()?;
    let entries = coefs.entries()?;
    let rows: Vec<Vec<f64>> = grids
        .h
        .iter()
        .map(|&h| entries.par_iter().map(|c| log_coef_seminorm(c.iter(), ws, h, crate::series::Sign::Plus)).collect())
        .collect();
    Ok(classify_hl(&rows, ws, class, grids, mode.property(), Method::Coefficient, coefs.n_max, false))
}

/// Roumieu classification through the seminorms `‖·‖_{r_j}` and weights `e^{∓M_{s_j}(n)}`.
///
/// Moderate: every `r` among the pairs has some `s` among the pairs. Negligible: all
/// combinations. A finite proxy for the quantifiers over all of `𝓡`.
pub fn roumieu_rj_classify(net: &Net, ws: &WeightSequence, families: &[(RSequence, RSequence)], mode: Mode, tau: f64) -> Result<GrowthVerdict> {
    if families.is_empty() {
        return Err(Error::InvalidSpec("at least one (r_j, s_j) pair is required".into()));
    }
    let entries = net.entries()?;
    let mut truncated = false;
    let rows: Vec<Vec<f64>> = families
        .iter()
        .map(|(r, _)| {
            let est: Vec<NormEstimate> = entries.par_iter().map(|f| f.log_ud_norm_rj(ws, r)).collect();
            truncated |= est.iter().any(|e| e.truncated);
            est.iter().map(|e| e.log_value).collect()
        })
        .collect();
    let cols: Vec<Vec<f64>> = families
        .iter()
        .map(|(_, s)| (0..=net.n_max).map(|n| ws.associated_rj(s, n as f64).value).collect())
        .collect();
    let sign = if mode == Mode::Moderate { -1.0 } else { 1.0 };
    let inner = if mode == Mode::Moderate { Quant::Exists } else { Quant::ForAll };
    let nf = families.len();
    let red = reduce2(Quant::ForAll, inner, nf, |_| nf, |i, j| bounded_test(&shifted(&rows[i], &cols[j], sign), tau));
    let grid = GridUsed { families: Some(nf), deciding: Some(vec![red.deciding.0 as f64, red.deciding.1 as f64]), ..Default::default() };
    Ok(verdict(
        red.margin,
        red.witness,
        tau,
        grid,
        Method::RjFamily,
        mode.property(),
        Some(Class::Roumieu),
        pattern2(Quant::ForAll, "r", inner, "s"),
        net.n_max,
        truncated,
    ))
}

/// `n ↦ z_n`, a representative of a generalized number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedNumber {
    pub values: Vec<Complex64>,
}

impl GeneralizedNumber {
    pub fn new(values: Vec<Complex64>) -> Self {
        GeneralizedNumber { values }
    }

    /// `n ↦ z`, the constant embedding.
    pub fn constant(z: Complex64, n_max: usize) -> Self {
        GeneralizedNumber { values: vec![z; n_max + 1] }
    }

    pub fn real(values: impl IntoIterator<Item = f64>) -> Self {
        GeneralizedNumber { values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn n_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        GeneralizedNumber { values: self.values.iter().zip(&other.values).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a * b)
    }

    fn log_abs(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm().ln()).collect()
    }

    /// `sup_n |z_n| e^{−M(λn)} < ∞`: Beurling for some `λ`, Roumieu for every `λ`.
    pub fn classify_moderate(&self, ws: &WeightSequence, class: Class, lambda_grid: &[f64], tau: f64) -> GrowthVerdict {
        let q = match class {
            Class::Beurling => Quant::Exists,
            Class::Roumieu => Quant::ForAll,
        };
        let base = self.log_abs();
        let n_max = self.n_max();
        let red = reduce1(q, lambda_grid.len(), |i| bounded_test(&shifted(&base, &assoc_column(ws, lambda_grid[i], n_max), -1.0), tau));
        let grid = GridUsed { lambda: Some(lambda_grid.to_vec()), deciding: Some(vec![lambda_grid[red.deciding.0]]), ..Default::default() };
        verdict(red.margin, red.witness, tau, grid, Method::Sequence, Property::Moderate, Some(class), pattern1(q, "λ"), n_max, false)
    }

    /// `sup_n |z_n| e^{M(λn)} < ∞`: Beurling for every `λ`, Roumieu for some `λ`.
    pub fn classify_negligible(&self, ws: &WeightSequence, class: Class, lambda_grid: &[f64], tau: f64) -> GrowthVerdict {
        sup_like(&self.log_abs(), ws, class, lambda_grid, tau, Method::Sequence)
    }
}

/// `n ↦ f_n(t_n)`.
pub fn point_value(f: &Net, t: &GeneralizedNumber) -> Result<GeneralizedNumber> {
    if let Some(bad) = t.values.iter().find(|z| z.im != 0.0 || !(0.0..=2.0 * PI).contains(&z.re)) {
        return Err(Error::InvalidSpec(format!("point entries must be real in [0, 2π], got {bad}")));
    }
    let n = f.n_max.min(t.n_max());
    let entries = f.entries()?;
    Ok(GeneralizedNumber { values: (0..=n).map(|i| entries[i].eval(t.values[i].re)).collect() })
}

/// Indices and points where a net fails the sup-norm null condition at a given `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub lambda: f64,
    /// Tail indices `n > n₀` whose weighted sup norm exceeds the head baseline by more than `τ`.
    pub indices: Vec<usize>,
    /// Argmax of `|f_n|` for each returned index.
    pub points: Vec<f64>,
    /// Argmax of `|f_n|` for every `n`; the generalized point realizing the failure.
    pub point: Vec<f64>,
    pub margin: f64,
}

impl Witness {
    pub fn generalized_point(&self) -> GeneralizedNumber {
        GeneralizedNumber::real(self.point.iter().copied())
    }
}

/// Points `t_n` with `|f_n(t_n)| e^{M(λn)}` unbounded, or `NoWitness` when the net is
/// negligible at `λ`.
pub fn find_witness(net: &Net, ws: &WeightSequence, lambda: f64, tau: f64) -> Result<Witness> {
    let entries = net.entries()?;
    let sup: Vec<(f64, f64)> = entries.par_iter().map(|f| f.sup_norm_argmax()).collect();
    let e: Vec<f64> = sup.iter().enumerate().map(|(n, (v, _))| v.ln() + ws.assoc(lambda * n as f64)).collect();
    let t: BoundTest = bounded_test(&e, tau);
    if t.bounded {
        return Err(Error::NoWitness { lambda });
    }
    let baseline = e.iter().take(t.n0 + 1).copied().fold(f64::NEG_INFINITY, f64::max);
    let indices: Vec<usize> = (t.n0 + 1..e.len()).filter(|&n| !(e[n] <= baseline + tau)).collect();
    Ok(Witness {
        lambda,
        points: indices.iter().map(|&n| sup[n].1).collect(),
        point: sup.iter().map(|(_, t)| *t).collect(),
        indices,
        margin: t.margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::CoefDistribution;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ws() -> WeightSequence {
        WeightSequence::gevrey(1.0, 2000).unwrap()
    }

    fn grids() -> Grids {
        Grids::new(vec![0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0], default_grid())
    }

    #[test]
    fn make_net_examples() {
        let s = Net::constant(&TrigPoly::sin(), 16).unwrap();
        assert!(s.entries().unwrap().iter().all(|f| **f == TrigPoly::sin()));
        let d = Net::dirichlet(16).unwrap();
        assert_eq!(d.get(5).unwrap().coef(5), c(1.0 / (2.0 * PI), 0.0));
        assert_eq!(d.get(5).unwrap().degree(), 5);
        let e = Net::scaled(&TrigPoly::sin(), 1.0, 16).unwrap();
        assert!((e.get(3).unwrap().coef(1) - c(0.0, -0.5 * (-3.0f64).exp())).norm() < 1e-16);
        assert!(matches!(Net::dirichlet(4), Err(Error::InvalidSpec(_))));
        let bad = Net::new("bad", 16, |n| if n == 11 { Err("boom".into()) } else { Ok(TrigPoly::zero()) }).unwrap();
        assert!(matches!(bad.materialize(), Err(Error::GeneratorFail { index: 11, .. })));
    }

    #[test]
    fn moderate_examples() {
        let ws = ws();
        let g = grids();
        let d = Net::dirichlet(32).unwrap();
        assert!(classify_moderate(&d, &ws, Class::Roumieu, &g).unwrap().bounded);
        let s = Net::constant(&TrigPoly::sin(), 32).unwrap();
        assert!(classify_moderate(&s, &ws, Class::Roumieu, &g).unwrap().bounded);
        assert!(classify_moderate(&s, &ws, Class::Beurling, &g).unwrap().bounded);
        // e^{M(16n)}(2n+1) D_n outgrows e^{M(λn)} for every λ ≤ 8 in the grid
        let w = ws.clone();
        let big = Net::from_fn("big", 32, move |n| {
            TrigPoly::dirichlet(n).scale(c(w.assoc(16.0 * n as f64).exp() * (2 * n + 1) as f64, 0.0))
        })
        .unwrap();
        let v = classify_moderate(&big, &ws, Class::Beurling, &g).unwrap();
        assert!(!v.bounded, "{v:?}");
        assert_eq!(v.pattern, "∀h ∃λ");
    }

    #[test]
    fn negligible_examples() {
        let ws = ws();
        let g = grids();
        let e = Net::scaled(&TrigPoly::sin(), 1.0, 32).unwrap();
        let v = classify_negligible(&e, &ws, Class::Roumieu, &g).unwrap();
        assert!(v.bounded, "{v:?}");
        assert_eq!(v.pattern, "∃λ ∃h");
        assert!(!classify_negligible(&Net::dirichlet(32).unwrap(), &ws, Class::Roumieu, &g).unwrap().bounded);
        let z = Net::constant(&TrigPoly::zero(), 32).unwrap();
        assert!(classify_negligible(&z, &ws, Class::Roumieu, &g).unwrap().bounded);
        assert!(classify_negligible(&z, &ws, Class::Beurling, &g).unwrap().bounded);
    }

    #[test]
    fn supnorm_needs_moderate_hypothesis() {
        let ws = ws();
        let g = grids();
        let d = Net::dirichlet(32).unwrap();
        let neg = classify_negligible(&d, &ws, Class::Roumieu, &g).unwrap();
        assert!(matches!(classify_negligible_supnorm(&d, &ws, Class::Roumieu, &g.lambda, g.tau, &neg), Err(Error::HypothesisFail(_))));
        let m = classify_moderate(&d, &ws, Class::Roumieu, &g).unwrap();
        assert!(!classify_negligible_supnorm(&d, &ws, Class::Roumieu, &g.lambda, g.tau, &m).unwrap().bounded);
        let e = Net::scaled(&TrigPoly::sin(), 1.0, 32).unwrap();
        let me = classify_moderate(&e, &ws, Class::Roumieu, &g).unwrap();
        assert!(classify_negligible_supnorm(&e, &ws, Class::Roumieu, &g.lambda, g.tau, &me).unwrap().bounded);
        let z = Net::constant(&TrigPoly::zero(), 32).unwrap();
        let mz = classify_moderate(&z, &ws, Class::Roumieu, &g).unwrap();
        assert!(classify_negligible_supnorm(&z, &ws, Class::Roumieu, &g.lambda, g.tau, &mz).unwrap().bounded);
    }

    #[test]
    fn coefficient_side_examples() {
        let ws = ws();
        let g = grids();
        let d = &Net::dirichlet(32).unwrap();
        assert!(coef_classify(&d, &ws, Class::Roumieu, Mode::Moderate, &g).unwrap().bounded);
        let e = &Net::scaled(&TrigPoly::sin(), 1.0, 32).unwrap();
        assert!(coef_classify(&e, &ws, Class::Roumieu, Mode::Negligible, &g).unwrap().bounded);
        let z = &Net::constant(&TrigPoly::zero(), 32).unwrap();
        assert!(coef_classify(&z, &ws, Class::Roumieu, Mode::Negligible, &g).unwrap().bounded);
    }

    #[test]
    fn rj_family_examples() {
        let ws = ws();
        let lin = RSequence::linear(200).unwrap();
        let sqrt = RSequence::new((0..=200).map(|j| ((j + 1) as f64).sqrt()).collect()).unwrap();
        // with s = r alone a factor ~√n survives, so a slower s is supplied as well
        let fam = vec![(lin.clone(), lin.clone()), (lin.clone(), sqrt)];
        let d = Net::dirichlet(32).unwrap();
        assert!(roumieu_rj_classify(&d, &ws, &fam, Mode::Moderate, DEFAULT_TAU).unwrap().bounded);
        let z = Net::constant(&TrigPoly::zero(), 32).unwrap();
        assert!(roumieu_rj_classify(&z, &ws, &fam, Mode::Negligible, DEFAULT_TAU).unwrap().bounded);
        let e = Net::scaled(&TrigPoly::sin(), 1.0, 32).unwrap();
        assert!(roumieu_rj_classify(&e, &ws, &fam, Mode::Negligible, DEFAULT_TAU).unwrap().bounded);
        assert!(roumieu_rj_classify(&d, &ws, &[], Mode::Moderate, DEFAULT_TAU).is_err());
    }

    #[test]
    fn product_examples() {
        let ws = ws();
        let g = grids();
        let d = Net::dirichlet(32).unwrap();
        let d2 = d.mul(&d);
        for n in [0, 5, 20] {
            let expect = ((2 * n + 1) as f64 / (2.0 * PI)).powi(2);
            assert!((d2.get(n).unwrap().sup_norm() - expect).abs() < 1e-12 * expect);
        }
        assert!(classify_moderate(&d2, &ws, Class::Roumieu, &g).unwrap().bounded);
        assert!(!classify_negligible(&d2, &ws, Class::Roumieu, &g).unwrap().bounded);
        let z = Net::constant(&TrigPoly::zero(), 32).unwrap();
        assert!(d.mul(&z).entries().unwrap().iter().all(|f| f.is_zero()));
        let sc = Net::constant(&TrigPoly::sin(), 32).unwrap().mul(&Net::constant(&TrigPoly::cos(), 32).unwrap());
        let half_sin2 = TrigPoly::sin().multiply(&TrigPoly::cos());
        for t in [0.2, 1.3, 3.7] {
            assert!((half_sin2.eval(t).re - 0.5 * (2.0 * t).sin()).abs() < 1e-15);
            assert!((sc.get(7).unwrap().eval(t).re - 0.5 * (2.0 * t).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn point_value_examples() {
        let ws = ws();
        let d = Net::dirichlet(32).unwrap();
        let at0 = point_value(&d, &GeneralizedNumber::constant(c(0.0, 0.0), 32)).unwrap();
        for (n, v) in at0.values.iter().enumerate() {
            assert!((v.re - (2 * n + 1) as f64 / (2.0 * PI)).abs() < 1e-12);
        }
        assert!(at0.classify_moderate(&ws, Class::Roumieu, &default_grid(), DEFAULT_TAU).bounded);
        assert!(!at0.classify_negligible(&ws, Class::Roumieu, &default_grid(), DEFAULT_TAU).bounded);
        let s = Net::constant(&TrigPoly::sin(), 32).unwrap();
        let at_pi = point_value(&s, &GeneralizedNumber::constant(c(PI, 0.0), 32)).unwrap();
        assert!(at_pi.values.iter().all(|v| v.norm() < 1e-15));
        // D_n(π) = (−1)^n / 2π
        let dpi = point_value(&d, &GeneralizedNumber::constant(c(PI, 0.0), 32)).unwrap();
        for (n, v) in dpi.values.iter().enumerate() {
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 } / (2.0 * PI);
            assert!((v.re - expect).abs() < 1e-12);
            assert!(v.norm() <= 1.0 / (2.0 * PI) + 1e-12);
        }
        assert!(point_value(&d, &GeneralizedNumber::constant(c(7.0, 0.0), 32)).is_err());
    }

    #[test]
    fn witness_examples() {
        let ws = ws();
        let d = Net::dirichlet(32).unwrap();
        let w = find_witness(&d, &ws, 1.0, DEFAULT_TAU).unwrap();
        assert!(!w.indices.is_empty());
        assert!(w.points.iter().all(|t| *t == 0.0));
        let pv = point_value(&d, &w.generalized_point()).unwrap();
        assert!(!pv.classify_negligible(&ws, Class::Roumieu, &default_grid(), DEFAULT_TAU).bounded);

        let sd = Net::from_fn("sin·D_n", 32, |n| TrigPoly::sin().multiply(&TrigPoly::dirichlet(n))).unwrap();
        let w = find_witness(&sd, &ws, 1.0, DEFAULT_TAU).unwrap();
        for (&n, &t) in w.indices.iter().zip(&w.points) {
            // |cos(t/2) sin((n+½)t)| peaks at the first lobe, near π/(2n+1) or its mirror image
            let target = PI / (2 * n + 1) as f64;
            let dist = (t - target).abs().min((2.0 * PI - t - target).abs());
            assert!(dist < 0.5 * target, "n={n} t={t}");
        }
        let z = Net::constant(&TrigPoly::zero(), 32).unwrap();
        assert!(matches!(find_witness(&z, &ws, 1.0, DEFAULT_TAU), Err(Error::NoWitness { .. })));
    }

    #[test]
    fn number_quantifiers() {
        let ws = ws();
        // z_n = e^{M(n)}: moderate in Beurling (λ = 1 works), not Roumieu (λ = ¼ fails)
        let z = GeneralizedNumber::real((0..=32).map(|n| ws.assoc(n as f64).exp()));
        assert!(z.classify_moderate(&ws, Class::Beurling, &default_grid(), DEFAULT_TAU).bounded);
        assert!(!z.classify_moderate(&ws, Class::Roumieu, &default_grid(), DEFAULT_TAU).bounded);
        let w = GeneralizedNumber::real((0..=32).map(|n| (-ws.assoc(n as f64)).exp()));
        assert!(w.classify_negligible(&ws, Class::Roumieu, &default_grid(), DEFAULT_TAU).bounded);
        assert!(!w.classify_negligible(&ws, Class::Beurling, &default_grid(), DEFAULT_TAU).bounded);
    }

    #[test]
    fn coefficient_net_from_distribution() {
        let f = CoefDistribution::exp_decay(1.0);
        let net = Net::from_fn("trunc", 16, move |n| f.truncate(n)).unwrap();
        assert_eq!(net.get(3).unwrap().degree(), 3);
    }

    fn net_strategy() -> impl Strategy<Value = Vec<(i64, f64, f64)>> {
        prop::collection::vec((-4i64..=4, -1.0f64..1.0, -1.0f64..1.0), 1..6)
    }

    fn net_of(terms: Vec<(i64, f64, f64)>) -> Net {
        Net::from_fn("p", 8, move |n| {
            TrigPoly::from_pairs(terms.iter().map(|&(k, re, im)| (k + (n as i64 % 3), c(re, im) * (1.0 + n as f64).sqrt())))
        })
        .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ring_structure(a in net_strategy(), b in net_strategy(), d in net_strategy()) {
            let (x, y, z) = (net_of(a), net_of(b), net_of(d));
            let pairs = [
                (x.add(&y), y.add(&x)),
                (x.mul(&y), y.mul(&x)),
                (x.mul(&y).mul(&z), x.mul(&y.mul(&z))),
                (x.add(&y).add(&z), x.add(&y.add(&z))),
                (x.mul(&y.add(&z)), x.mul(&y).add(&x.mul(&z))),
            ];
            for (l, r) in pairs {
                for n in 0..=8 {
                    let (l, r) = (l.get(n).unwrap(), r.get(n).unwrap());
                    let d = l.sub(r);
                    prop_assert!(d.iter().all(|(_, v)| v.norm() < 1e-10));
                }
            }
        }
    }
}
