//! Finite-sample boundedness decisions and the quantifier patterns built on them.
//!
//! Every "sup over n is finite" condition is decided by [`bounded_test`] on the log-scale
//! sequence `e_n = log a_n`: the head `n ≤ n₀` fixes a baseline and the tail may not exceed it
//! by more than `τ`. Quantified conditions (`∀h ∃λ`, `∃λ ∃h`, ...) are reduced to a single
//! margin: `∀` takes the maximum of the inner margins, `∃` the minimum, so `bounded` is always
//! `margin ≤ τ`.

use serde::{Deserialize, Serialize};

/// Default head/tail tolerance in log scale.
pub const DEFAULT_TAU: f64 = 0.5;

/// Default `h`/`λ` grid.
pub const DEFAULT_GRID: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

pub fn default_grid() -> Vec<f64> {
    DEFAULT_GRID.to_vec()
}

/// Beurling `(M_p)` or Roumieu `{M_p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Class {
    Beurling,
    Roumieu,
}

impl std::str::FromStr for Class {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "beurling" => Ok(Class::Beurling),
            "roumieu" => Ok(Class::Roumieu),
            other => Err(crate::Error::Parse(format!("unknown class '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    FullNorm,
    SupNorm,
    Coefficient,
    RjFamily,
    /// Growth of a plain sequence of numbers (weight relations, generalized numbers).
    Sequence,
}

/// What was being decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Moderate,
    Negligible,
    Regular,
    Member,
    Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quant {
    ForAll,
    Exists,
}

impl Quant {
    fn symbol(self) -> &'static str {
        match self {
            Quant::ForAll => "∀",
            Quant::Exists => "∃",
        }
    }
}

/// Outcome of one head-versus-tail test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundTest {
    pub bounded: bool,
    /// `max_{n>n₀} e_n − max_{n≤n₀} e_n`.
    pub margin: f64,
    pub witness: usize,
    pub n0: usize,
}

/// Head index used by [`bounded_test`] for a sequence indexed `0..=n_max`.
pub fn head_len(n_max: usize) -> usize {
    8.max(n_max / 8)
}

/// Decides `sup_n a_n < ∞` from `log_values[n] = log a_n`, `n = 0..=n_max`.
///
/// `−∞` entries (zero values) satisfy every bound; `NaN` entries count as `+∞`.
pub fn bounded_test(log_values: &[f64], tau: f64) -> BoundTest {
    let n_max = log_values.len().saturating_sub(1);
    let n0 = head_len(n_max);
    if let Some(bad) = log_values.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
        return BoundTest { bounded: false, margin: f64::INFINITY, witness: bad, n0 };
    }
    let baseline = log_values.iter().take(n0 + 1).copied().fold(f64::NEG_INFINITY, f64::max);
    let mut tail_max = f64::NEG_INFINITY;
    let mut witness = n0.min(n_max);
    for (n, &v) in log_values.iter().enumerate().skip(n0 + 1) {
        if v > tail_max {
            tail_max = v;
            witness = n;
        }
    }
    let margin = if tail_max == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if baseline == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        tail_max - baseline
    };
    BoundTest { bounded: margin <= tau, margin, witness, n0 }
}

/// Parameters actually used for a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct GridUsed {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<usize>,
    /// The parameters of the deciding test, outer first.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deciding: Option<Vec<f64>>,
}

/// Report of a desk-scale boundedness classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthVerdict {
    pub bounded: bool,
    /// Log-scale tail excess over the head baseline after quantifier reduction.
    pub margin: f64,
    pub witness_n: usize,
    pub grid: GridUsed,
    pub method: Method,
    pub property: Property,
    pub class: Option<Class>,
    /// Quantifier pattern, e.g. `∀h ∃λ`.
    pub pattern: String,
    pub tau: f64,
    pub n_max: usize,
    /// Some norm in the evaluation was cut at the end of the stored weight range.
    pub truncated: bool,
    pub desk_scale: bool,
}

impl GrowthVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("verdict serializes")
    }
}

/// Reduction of a one- or two-level quantified family of bound tests.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduced {
    pub margin: f64,
    pub witness: usize,
    /// Grid indices of the deciding test (outer, inner).
    pub deciding: (usize, usize),
}

fn pick(q: Quant, current: Option<(f64, usize, (usize, usize))>, margin: f64, witness: usize, at: (usize, usize)) -> Option<(f64, usize, (usize, usize))> {
    match current {
        None => Some((margin, witness, at)),
        Some((m, _, _)) => {
            let better = match q {
                Quant::ForAll => margin > m,
                Quant::Exists => margin < m,
            };
            if better {
                Some((margin, witness, at))
            } else {
                current
            }
        }
    }
}

/// Reduces `Q_outer o ∈ outer, Q_inner i ∈ inner(o): bounded(test(o, i))`.
///
/// `inner_len(o)` gives the size of the inner grid for outer index `o`, so the inner grid may
/// depend on the outer parameter.
pub fn reduce2<F>(outer: Quant, inner: Quant, outer_len: usize, inner_len: impl Fn(usize) -> usize, test: F) -> Reduced
where
    F: Fn(usize, usize) -> BoundTest,
{
    let mut best_outer = None;
    for o in 0..outer_len {
        let mut best_inner = None;
        for i in 0..inner_len(o) {
            let t = test(o, i);
            best_inner = pick(inner, best_inner, t.margin, t.witness, (o, i));
        }
        if let Some((m, w, at)) = best_inner {
            best_outer = pick(outer, best_outer, m, w, at);
        }
    }
    let (margin, witness, deciding) = best_outer.unwrap_or((f64::NEG_INFINITY, 0, (0, 0)));
    Reduced { margin, witness, deciding }
}

/// Reduces `Q i ∈ grid: bounded(test(i))`.
pub fn reduce1<F>(q: Quant, len: usize, test: F) -> Reduced
where
    F: Fn(usize) -> BoundTest,
{
    reduce2(q, Quant::ForAll, len, |_| 1, |o, _| test(o))
}

pub fn pattern2(outer: Quant, outer_name: &str, inner: Quant, inner_name: &str) -> String {
    format!("{}{} {}{}", outer.symbol(), outer_name, inner.symbol(), inner_name)
}

pub fn pattern1(q: Quant, name: &str) -> String {
    format!("{}{}", q.symbol(), name)
}
