//! The regular subalgebra `𝒢^{∗,∞}` and the regularity theorem on embedded distributions.
//!
//! | class    | regular net                                  |
//! |----------|----------------------------------------------|
//! | Beurling | `∃λ ∀h  sup_n ‖f_n‖_h e^{−M(λn)} < ∞`        |
//! | Roumieu  | `∃h ∀λ  sup_n ‖f_n‖_h e^{−M(λn)} < ∞`        |
//!
//! A finite `∀` grid cannot see the failure of `∃λ ∀h` when every grid `h` is below the
//! candidate `λ`, so the inner grid is widened by one point past the outer parameter:
//! `h = λ·H⌈H²⌉` (Beurling) and `λ = h/(H⌈H²⌉)` (Roumieu).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{classify_moderate, Grids, Net};
use crate::embedding::{embed, Mollifier};
use crate::series::{coefficient_membership, sweep_seminorm, CoefDistribution, Sign, DEFAULT_K_MAX};
use crate::verdict::{bounded_test, BoundTest, Class, GrowthVerdict, DEFAULT_TAU};
use crate::weights::WeightSequence;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerMargin {
    pub param: f64,
    pub margin: f64,
    pub witness_n: usize,
}

/// Margins of the inner `∀` tests at one outer grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OuterMargins {
    pub param: f64,
    /// Worst inner margin.
    pub margin: f64,
    pub inner: Vec<InnerMargin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    pub label: String,
    pub class: Class,
    pub regular: bool,
    /// `∃λ ∀h` or `∃h ∀λ`.
    pub pattern: String,
    /// Smallest outer margin.
    pub margin: f64,
    /// Outer parameter of the deciding test, when regular.
    pub witness: Option<f64>,
    pub margins: Vec<OuterMargins>,
    pub tau: f64,
    pub n_max: usize,
    pub truncated: bool,
    pub moderate: GrowthVerdict,
    /// Membership of the underlying coefficients in `s^∗(ℤ)`, when known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_decay: Option<GrowthVerdict>,
}

/// `H⌈H²⌉` for the widened inner grid.
fn widen_factor(ws: &WeightSequence) -> f64 {
    ws.h() * (ws.h() * ws.h()).ceil()
}

fn with_extra(grid: &[f64], extra: f64) -> Vec<f64> {
    let mut v = grid.to_vec();
    if !v.iter().any(|x| (x - extra).abs() <= 1e-12 * extra) {
        v.push(extra);
    }
    v
}

/// Regularity of a moderate net.
pub fn classify_regular(net: &Net, ws: &WeightSequence, class: Class, grids: &Grids) -> Result<RegularityVerdict> {
    let moderate = classify_moderate(net, ws, class, grids)?;
    if !moderate.bounded {
        return Err(Error::HypothesisFail(format!("net '{}' is not moderate in the {class:?} class (margin {:.3})", net.label(), moderate.margin)));
    }
    let n_max = net.n_max();
    let m = widen_factor(ws);
    let mut truncated = false;
    let mut test = |h: f64, lambda: f64| -> Result<BoundTest> {
        let norms = net.log_ud_norms(ws, h)?;
        truncated |= norms.iter().any(|e| e.truncated);
        let seq: Vec<f64> = norms
            .iter()
            .enumerate()
            .map(|(n, e)| if e.log_value == f64::NEG_INFINITY { e.log_value } else { e.log_value - ws.assoc(lambda * n as f64) })
            .collect();
        Ok(bounded_test(&seq, grids.tau))
    };
    let mut margins = Vec::new();
    let (outer_grid, pattern) = match class {
        Class::Beurling => (&grids.lambda, "∃λ ∀h"),
        Class::Roumieu => (&grids.h, "∃h ∀λ"),
    };
    for &o in outer_grid {
        let inner_grid = match class {
            Class::Beurling => with_extra(&grids.h, o * m),
            Class::Roumieu => with_extra(&grids.lambda, o / m),
        };
        let mut inner = Vec::with_capacity(inner_grid.len());
        for &i in &inner_grid {
            let t = match class {
                Class::Beurling => test(i, o)?,
                Class::Roumieu => test(o, i)?,
            };
            inner.push(InnerMargin { param: i, margin: t.margin, witness_n: t.witness });
        }
        let margin = inner.iter().map(|x| x.margin).fold(f64::NEG_INFINITY, f64::max);
        margins.push(OuterMargins { param: o, margin, inner });
    }
    let best = margins.iter().min_by(|a, b| a.margin.total_cmp(&b.margin));
    let margin = best.map_or(f64::NEG_INFINITY, |b| b.margin);
    let regular = margin <= grids.tau;
    Ok(RegularityVerdict {
        label: net.label().to_string(),
        class,
        regular,
        pattern: pattern.to_string(),
        margin,
        witness: if regular { best.map(|b| b.param) } else { None },
        margins,
        tau: grids.tau,
        n_max,
        truncated,
        moderate,
        coefficient_decay: None,
    })
}

/// Membership `(ĉ(k))_k ∈ s^∗(ℤ)` over `|k| ≤ DEFAULT_K_MAX`.
pub fn coefficient_decay_class(c: &CoefDistribution, ws: &WeightSequence, class: Class, mu_grid: &[f64]) -> GrowthVerdict {
    coefficient_membership(c, ws, class, Sign::Plus, mu_grid, DEFAULT_TAU, DEFAULT_K_MAX)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRegRow {
    pub lambda: f64,
    /// `K = σ'_λ(f̂)`; `None` when the sup is still growing at `K_max`.
    pub k_const: Option<f64>,
    /// `A(1+2πC)K`.
    pub bound_const: Option<f64>,
    /// `sup_n σ'_{Hλ}(f̂ − f̂_n) e^{M(λn)}`.
    pub fitted: f64,
    pub margin: f64,
    pub bounded: bool,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRegReport {
    pub label: String,
    pub rows: Vec<LemmaRegRow>,
    /// First grid `λ` with a bounded sequence and a finite `K`.
    pub witness: Option<f64>,
    pub pass: bool,
    pub n_max: usize,
    pub k_max: usize,
}

fn require_unit_plateau(m: &Mollifier) -> Result<()> {
    if m.r() != 1.0 {
        return Err(Error::MollifierFail { clause: format!("r = {} (regularity needs r = 1)", m.r()), k: 0, n: 0 });
    }
    Ok(())
}

/// `sup_n σ'_{Hλ}((f̂(k) − ι(f)ˆ_n(k))_k) e^{M(λn)} < ∞` at some grid `λ`.
pub fn check_lemmareg(f: &CoefDistribution, m: &Mollifier, ws: &WeightSequence, lambda_grid: &[f64], n_max: usize, k_max: usize, tau: f64) -> Result<LemmaRegReport> {
    require_unit_plateau(m)?;
    let kk = k_max as i64;
    let log_f: Vec<f64> = (-kk..=kk).map(|k| f.coef(k).norm().ln()).collect();
    let mut rows = Vec::new();
    for &lambda in lambda_grid {
        let sweep = sweep_seminorm(f, ws, lambda, Sign::Minus, k_max);
        let k_const = (!sweep.truncated).then(|| sweep.value());
        let damp: Vec<f64> = (-kk..=kk).zip(&log_f).map(|(k, lf)| lf - ws.assoc(ws.h() * lambda * k as f64)).collect();
        let seq: Vec<f64> = (0..=n_max)
            .map(|n| {
                let s = (-kk..=kk)
                    .zip(&damp)
                    .map(|(k, d)| {
                        let r = (Complex64::new(1.0, 0.0) - 2.0 * PI * m.c(k, n)).norm();
                        if r == 0.0 { f64::NEG_INFINITY } else { d + r.ln() }
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                if s == f64::NEG_INFINITY { s } else { s + ws.assoc(lambda * n as f64) }
            })
            .collect();
        let t = bounded_test(&seq, tau);
        let fitted = seq.iter().copied().fold(f64::NEG_INFINITY, f64::max).exp();
        let bound_const = k_const.map(|k| ws.a() * (1.0 + 2.0 * PI * m.c_bound()) * k);
        rows.push(LemmaRegRow {
            lambda,
            k_const,
            bound_const,
            fitted,
            margin: t.margin,
            bounded: t.bounded,
            within_bound: bound_const.is_some_and(|b| fitted <= b * (1.0 + 1e-9)),
        });
    }
    let witness = rows.iter().find(|r| r.bounded && r.k_const.is_some()).map(|r| r.lambda);
    Ok(LemmaRegReport { label: f.label(), rows, witness, pass: witness.is_some(), n_max, k_max })
}

/// `|f̂(k)| ≤ K(e^{M(λn)−M(hk)} + e^{M(Hlk)−M(ln)})` with the smallest such `K` on the sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinedCheck {
    pub lambda: f64,
    pub h: f64,
    pub l: f64,
    pub k_fit: f64,
    /// Roumieu: `μ = min(h/H, Hl)` and whether `|f̂(k)| ≤ 2AK e^{−M(μk)}` for `|k| ≤ n_max/⌈H²⌉`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub label: String,
    pub class: Class,
    pub regular: RegularityVerdict,
    pub member: GrowthVerdict,
    /// Both true or both false.
    pub consistent: bool,
    pub lemma: LemmaRegReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub combined: Option<CombinedCheck>,
}

fn combined_check(f: &CoefDistribution, ws: &WeightSequence, class: Class, regular: &RegularityVerdict, l: f64, n_max: usize) -> Option<CombinedCheck> {
    let w = regular.witness?;
    let m = widen_factor(ws);
    let (lambda, h) = match class {
        Class::Beurling => (w, w * m),
        Class::Roumieu => (w / m, w),
    };
    let hh = ws.h();
    let k_max = n_max as i64;
    let mut log_k = f64::NEG_INFINITY;
    for k in -k_max..=k_max {
        let lf = f.coef(k).norm().ln();
        if lf == f64::NEG_INFINITY {
            continue;
        }
        let ka = k.unsigned_abs() as f64;
        for n in 0..=n_max {
            let a = ws.assoc(lambda * n as f64) - ws.assoc(h * ka);
            let b = ws.assoc(hh * l * ka) - ws.assoc(l * n as f64);
            let ls = a.max(b) + (-(a - b).abs()).exp().ln_1p();
            log_k = log_k.max(lf - ls);
        }
    }
    let k_fit = log_k.exp();
    let (mu, decay_holds) = match class {
        Class::Roumieu => {
            let mu = (h / hh).min(hh * l);
            let kk = (n_max as f64 / (hh * hh).ceil()) as i64;
            let bound = (2.0 * ws.a() * k_fit).ln();
            let holds = (-kk..=kk).all(|k| f.coef(k).norm().ln() <= bound - ws.assoc(mu * k.unsigned_abs() as f64) + 1e-9);
            (Some(mu), Some(holds))
        }
        Class::Beurling => (None, None),
    };
    Some(CombinedCheck { lambda, h, l, k_fit, mu, decay_holds })
}

/// The regularity theorem on one instance: `ι(f)` regular iff `f̂ ∈ s^∗(ℤ)`.
pub fn regularity_theorem_check(f: &CoefDistribution, m: &Mollifier, ws: &WeightSequence, class: Class, grids: &Grids, n_max: usize) -> Result<TheoremReport> {
    require_unit_plateau(m)?;
    let net = embed(f, m, n_max)?;
    let member = coefficient_decay_class(f, ws, class, &grids.lambda);
    let mut regular = classify_regular(&net, ws, class, grids)?;
    regular.coefficient_decay = Some(member.clone());
    let k_max = (4 * n_max).max(64);
    let lemma = check_lemmareg(f, m, ws, &grids.lambda, n_max, k_max, grids.tau)?;
    let combined = lemma.witness.and_then(|l| combined_check(f, ws, class, &regular, l, n_max));
    Ok(TheoremReport { label: f.label(), class, consistent: regular.regular == member.bounded, regular, member, lemma, combined })
}
