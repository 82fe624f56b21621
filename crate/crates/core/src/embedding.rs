//! Mollifier sequences `φ_n`, the embedding `ι(f) = [(f ∗ φ_n)_n]` and the constant embedding
//! `σ(f) = [(f)_n]`.
//!
//! A mollifier is given by its coefficients `c_{k,n} = φ̂_n(k)`, so `ι(f)_n` has coefficients
//! `2π f̂(k) c_{k,n}`. The three defining clauses (bounded by `C`, supported in `|k| < Rn`,
//! equal to `1/2π` on `|k| ≤ rn`) cannot all hold at `n = 0`; they are enforced for `n ≥ 1`
//! and `φ_0` is the constant `1/2π`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{classify_negligible, Grids, Net};
use crate::operators::Ultrapolynomial;
use crate::series::{coefficient_membership, seminorm_profile, CoefDistribution, CoefEntry, Sign, TrigPoly};
use crate::verdict::{bounded_test, Class, GrowthVerdict};
use crate::weights::WeightSequence;
use crate::{Error, Result, INV_TWO_PI};

/// Default number of indices probed by [`Mollifier`] constructors.
pub const N_PROBE: usize = 64;

const PLATEAU_TOL: f64 = 1e-15;

/// Cutoff profile `ψ` with `c_{k,n} = ψ(k/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cutoff {
    /// `1/2π` on `[−r, r]`, linear down to `0` at `±R`.
    Trapezoid { r: f64, big_r: f64 },
}

impl Cutoff {
    fn value(&self, k: i64, n: usize) -> f64 {
        match *self {
            Cutoff::Trapezoid { r, big_r } => {
                let (a, nf) = (k.unsigned_abs() as f64, n as f64);
                if a <= r * nf {
                    INV_TWO_PI
                } else if a >= big_r * nf {
                    0.0
                } else {
                    INV_TWO_PI * (big_r * nf - a) / ((big_r - r) * nf)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MollifierKind {
    Dirichlet,
    Cutoff(Cutoff),
    Table,
}

/// Mollifier file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierFile {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub r: f64,
    pub rows: Vec<MollifierRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MollifierRow {
    pub n: usize,
    pub coef: Vec<CoefEntry>,
}

type CoefFn = dyn Fn(i64, usize) -> Complex64 + Send + Sync;

/// `(k, n) ↦ c_{k,n}` with verified constants `(C, R, r)`.
#[derive(Clone)]
pub struct Mollifier {
    kind: MollifierKind,
    coef: Arc<CoefFn>,
    c_bound: f64,
    big_r: f64,
    r: f64,
    /// Largest `n` with defined coefficients, for tables.
    n_limit: Option<usize>,
}

impl fmt::Debug for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mollifier")
            .field("kind", &self.kind)
            .field("C", &self.c_bound)
            .field("R", &self.big_r)
            .field("r", &self.r)
            .finish()
    }
}

impl Mollifier {
    fn checked(self, n_probe: usize) -> Result<Self> {
        if !(self.c_bound > 0.0 && self.big_r > 0.0 && self.r > 0.0 && self.r < self.big_r) {
            return Err(Error::InvalidSpec(format!("need C > 0 and 0 < r < R, got C = {}, R = {}, r = {}", self.c_bound, self.big_r, self.r)));
        }
        let n_probe = self.n_limit.map_or(n_probe, |l| l.min(n_probe));
        for n in 1..=n_probe {
            let kk = (self.big_r * n as f64).ceil() as i64 + 1;
            for k in -kk..=kk {
                let c = self.c(k, n);
                let a = k.unsigned_abs() as f64;
                let fail = |clause: &str| Err(Error::MollifierFail { clause: clause.into(), k, n });
                if c.norm() > self.c_bound * (1.0 + 1e-12) {
                    return fail("bound");
                }
                if a >= self.big_r * n as f64 && c != Complex64::new(0.0, 0.0) {
                    return fail("support");
                }
                if a <= self.r * n as f64 && (c - INV_TWO_PI).norm() > PLATEAU_TOL {
                    return fail("plateau");
                }
            }
        }
        Ok(self)
    }

    /// `c_{k,n} = (1/2π)·[|k| ≤ n]`, constants `(1/2π, 2, 1)`.
    pub fn dirichlet() -> Result<Self> {
        Mollifier {
            kind: MollifierKind::Dirichlet,
            coef: Arc::new(|k, n| if k.unsigned_abs() as usize <= n { Complex64::new(INV_TWO_PI, 0.0) } else { Complex64::new(0.0, 0.0) }),
            c_bound: INV_TWO_PI,
            big_r: 2.0,
            r: 1.0,
            n_limit: None,
        }
        .checked(N_PROBE)
    }

    /// `c_{k,n} = ψ(k/n)`.
    pub fn cutoff(psi: Cutoff) -> Result<Self> {
        let Cutoff::Trapezoid { r, big_r } = psi;
        Mollifier {
            kind: MollifierKind::Cutoff(psi),
            coef: Arc::new(move |k, n| Complex64::new(psi.value(k, n), 0.0)),
            c_bound: INV_TWO_PI,
            big_r,
            r,
            n_limit: None,
        }
        .checked(N_PROBE)
    }

    /// Explicit rows `n ↦ (c_{k,n})_k`; indices beyond the last row are undefined.
    pub fn table(file: &MollifierFile) -> Result<Self> {
        let rows: BTreeMap<usize, TrigPoly> = file.rows.iter().map(|r| (r.n, TrigPoly::from_entries(&r.coef))).collect();
        let n_limit = rows.keys().next_back().copied().unwrap_or(0);
        if let Some(missing) = (1..=n_limit).find(|n| !rows.contains_key(n)) {
            return Err(Error::InvalidSpec(format!("mollifier table has no row for n = {missing}")));
        }
        let rows = Arc::new(rows);
        Mollifier {
            kind: MollifierKind::Table,
            coef: Arc::new(move |k, n| rows.get(&n).map_or(Complex64::new(0.0, 0.0), |p| p.coef(k))),
            c_bound: file.c,
            big_r: file.big_r,
            r: file.r,
            n_limit: Some(n_limit),
        }
        .checked(N_PROBE)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::table(&serde_json::from_str(text)?)
    }

    /// `dirichlet`, `cutoff:trapezoid:r=<r>:R=<R>`.
    pub fn parse(desc: &str) -> Result<Self> {
        if desc == "dirichlet" {
            return Self::dirichlet();
        }
        if let Some(rest) = desc.strip_prefix("cutoff:trapezoid") {
            let (mut r, mut big_r) = (1.0, 2.0);
            for part in rest.split(':').filter(|s| !s.is_empty()) {
                let (key, v) = part.split_once('=').ok_or_else(|| Error::Parse(format!("bad cutoff parameter '{part}'")))?;
                let v: f64 = v.parse().map_err(|e| Error::Parse(format!("cutoff parameter '{part}': {e}")))?;
                match key {
                    "r" => r = v,
                    "R" => big_r = v,
                    other => return Err(Error::Parse(format!("unknown cutoff parameter '{other}'"))),
                }
            }
            return Self::cutoff(Cutoff::Trapezoid { r, big_r });
        }
        Err(Error::Parse(format!("unknown mollifier '{desc}'")))
    }

    /// `c_{k,n}`; `φ_0 = 1/2π`.
    pub fn c(&self, k: i64, n: usize) -> Complex64 {
        if n == 0 {
            return if k == 0 { Complex64::new(INV_TWO_PI, 0.0) } else { Complex64::new(0.0, 0.0) };
        }
        (self.coef)(k, n)
    }

    pub fn kind(&self) -> &MollifierKind {
        &self.kind
    }

    pub fn c_bound(&self) -> f64 {
        self.c_bound
    }

    pub fn big_r(&self) -> f64 {
        self.big_r
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Largest `|k|` that can carry a nonzero `c_{k,n}`.
    pub fn support(&self, n: usize) -> usize {
        if n == 0 {
            0
        } else {
            ((self.big_r * n as f64).ceil() as usize).saturating_sub(1)
        }
    }

    /// `φ_n` as a trigonometric polynomial.
    pub fn kernel(&self, n: usize) -> TrigPoly {
        let d = self.support(n) as i64;
        TrigPoly::from_pairs((-d..=d).map(|k| (k, self.c(k, n)))).trimmed()
    }
}

/// `ι(f)`: `n ↦ f ∗ φ_n`, coefficients `2π f̂(k) c_{k,n}`.
pub fn embed(f: &CoefDistribution, m: &Mollifier, n_max: usize) -> Result<Net> {
    if let Some(l) = m.n_limit {
        if n_max > l {
            return Err(Error::InvalidSpec(format!("mollifier table defines n ≤ {l}, requested n_max = {n_max}")));
        }
    }
    let (f, m) = (f.clone(), m.clone());
    let label = format!("ι({})", f.label());
    Net::from_fn(label, n_max, move |n| {
        let d = m.support(n);
        let d = f.band_limit().map_or(d, |b| b.min(d)) as i64;
        TrigPoly::from_pairs((-d..=d).map(|k| (k, 2.0 * PI * f.coef(k) * m.c(k, n)))).trimmed()
    })
}

/// A constant net with the truncation it was built from.
#[derive(Debug, Clone)]
pub struct ConstEmbedding {
    pub net: Net,
    pub poly: TrigPoly,
    pub k_max: usize,
    /// Bound on `Σ_{|k|>K} |f̂(k)|`, zero when `f` is band-limited within `K`.
    pub tail_bound: f64,
    pub decay: GrowthVerdict,
}

/// `σ(f)`: the constant net of the degree-`K` truncation of `f`, after checking that `f̂`
/// decays like a function of the class.
pub fn const_embed(f: &CoefDistribution, ws: &WeightSequence, class: Class, grid: &[f64], tau: f64, k_max: usize, n_max: usize) -> Result<ConstEmbedding> {
    let decay = coefficient_membership(f, ws, class, Sign::Plus, grid, tau, k_max);
    if !decay.bounded {
        return Err(Error::DecayFail(format!("{}: coefficients do not decay as in the {class:?} class (margin {:.3})", f.label(), decay.margin)));
    }
    let poly = f.truncate(k_max).trimmed();
    let net = Net::constant(&poly, n_max)?.with_label(format!("σ({})", f.label()));
    Ok(ConstEmbedding { net, poly, k_max, tail_bound: f.tail_bound(k_max), decay })
}

/// Check of the explicit bound `|f̂(k)||1 − 2πc_{k,n}| ≤ (1+2πC)K e^{−M(λrn)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualBound {
    pub label: String,
    pub lambda: f64,
    /// `K = σ_λ(f̂)`.
    pub k_const: f64,
    /// `(1 + 2πC)K`.
    pub bound_const: f64,
    /// `max_{n,k} |f̂(k)||1 − 2πc_{k,n}| e^{M(λrn)}`.
    pub fitted: f64,
    pub pass: bool,
}

/// Outcome of the product-preservation check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProductReport {
    /// Negligibility of `σ(fg) − ι(f)ι(g)`.
    pub verdict: GrowthVerdict,
    /// Per input (`f`, `g`, `fg`), the best grid `λ`.
    pub residuals: Vec<ResidualBound>,
    /// First `n` from which every difference entry is exactly zero.
    pub exact_zero_from: Option<usize>,
    /// Factor on `(1+2πC)K` allowed for the fitted constant.
    pub slack: f64,
    pub k_max: usize,
}

impl ProductReport {
    pub fn pass(&self) -> bool {
        self.verdict.bounded && self.residuals.iter().all(|r| r.pass)
    }
}

/// Residual bound of one function at one `λ`.
fn residual_bound(f: &CoefDistribution, m: &Mollifier, ws: &WeightSequence, lambda: f64, k_max: usize, n_max: usize, slack: f64) -> Option<ResidualBound> {
    let profile = seminorm_profile(f, ws, lambda, Sign::Plus, k_max);
    if !bounded_test(&profile, crate::verdict::DEFAULT_TAU).bounded {
        return None;
    }
    let k_const = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
    let mut fitted = f64::NEG_INFINITY;
    for n in 1..=n_max {
        let w = ws.assoc(lambda * m.r * n as f64);
        for k in -(k_max as i64)..=k_max as i64 {
            let v = f.coef(k).norm() * (Complex64::new(1.0, 0.0) - 2.0 * PI * m.c(k, n)).norm();
            if v > 0.0 {
                fitted = fitted.max(v.ln() + w);
            }
        }
    }
    let fitted = fitted.exp();
    let bound_const = (1.0 + 2.0 * PI * m.c_bound) * k_const;
    Some(ResidualBound { label: f.label(), lambda, k_const, bound_const, fitted, pass: fitted <= slack * bound_const })
}

/// Checks `ι(fg) = ι(f)ι(g)` in the algebra for functions `f`, `g` of the class.
///
/// The difference net `σ(fg) − ι(f)ι(g)` is classified for negligibility, and the explicit
/// coefficient bound of the embedding is checked for `f`, `g` and `fg` with the fitted constant
/// allowed `slack` times `(1+2πC)K`. Roumieu needs the bound at some grid `λ`, Beurling at all.
#[allow(clippy::too_many_arguments)]
pub fn check_product_preservation(
    f: &CoefDistribution,
    g: &CoefDistribution,
    m: &Mollifier,
    ws: &WeightSequence,
    class: Class,
    grids: &Grids,
    n_max: usize,
    k_max: usize,
    slack: f64,
) -> Result<ProductReport> {
    let fe = const_embed(f, ws, class, &grids.lambda, grids.tau, k_max, n_max)?;
    let ge = const_embed(g, ws, class, &grids.lambda, grids.tau, k_max, n_max)?;
    let fg = fe.poly.multiply(&ge.poly);
    let sigma = Net::constant(&fg, n_max)?;
    let fd = CoefDistribution::from_poly(&fe.poly);
    let gd = CoefDistribution::from_poly(&ge.poly);
    let diff = sigma.sub(&embed(&fd, m, n_max)?.mul(&embed(&gd, m, n_max)?)).with_label(format!("σ({0}·{1}) − ι({0})ι({1})", f.label(), g.label()));
    let verdict = classify_negligible(&diff, ws, class, grids)?;
    let zero: Vec<bool> = diff.entries()?.iter().map(|p| p.is_zero()).collect();
    let exact_zero_from = (0..=n_max).find(|&n| zero[n..].iter().all(|z| *z));

    let fgd = CoefDistribution::from_poly(&fg);
    let mut residuals = Vec::new();
    for h in [&fd, &gd, &fgd] {
        let k = h.band_limit().unwrap_or(k_max);
        let candidates: Vec<Option<ResidualBound>> = grids.lambda.iter().map(|&l| residual_bound(h, m, ws, l, k, n_max, slack)).collect();
        let pick = match class {
            Class::Roumieu => candidates.into_iter().flatten().min_by(|a, b| (a.fitted / a.bound_const).total_cmp(&(b.fitted / b.bound_const))),
            Class::Beurling => {
                let all: Option<Vec<ResidualBound>> = candidates.into_iter().collect();
                all.and_then(|v| v.into_iter().max_by(|a, b| (a.fitted / a.bound_const).total_cmp(&(b.fitted / b.bound_const))))
            }
        };
        residuals.push(pick.unwrap_or(ResidualBound {
            label: h.label(),
            lambda: f64::NAN,
            k_const: f64::INFINITY,
            bound_const: f64::INFINITY,
            fitted: f64::INFINITY,
            pass: false,
        }));
    }
    Ok(ProductReport { verdict, residuals, exact_zero_from, slack, k_max })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommuteReport {
    /// `max |P(k)(2πf̂(k)c_{k,n}) − 2π(P(k)f̂(k))c_{k,n}| / (1 + |·|)`.
    pub max_residual: f64,
    pub pass: bool,
}

/// `P(D)ι(f) = ι(P(D)f)`, coefficient by coefficient for `1 ≤ n ≤ n_max`.
pub fn check_operator_commutes(p: &Ultrapolynomial, f: &CoefDistribution, m: &Mollifier, n_max: usize) -> Result<CommuteReport> {
    let mut worst: f64 = 0.0;
    for n in 0..=n_max {
        let d = m.support(n) as i64;
        for k in -d..=d {
            let (fk, cn) = (f.coef(k), m.c(k, n));
            if fk.norm() == 0.0 || cn.norm() == 0.0 {
                continue;
            }
            let pk = p.symbol(k as f64)?;
            let lhs = pk * (2.0 * PI * fk * cn);
            let rhs = 2.0 * PI * (pk * fk) * cn;
            worst = worst.max((lhs - rhs).norm() / (1.0 + lhs.norm()));
        }
    }
    Ok(CommuteReport { max_residual: worst, pass: worst <= 1e-12 })
}
