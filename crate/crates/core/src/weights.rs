//! Weight sequences `M_p`, their associated functions and the relations `⊂` / `≺`.
//!
//! Everything is stored in log scale: `log M_p` overflows nowhere in the ranges used here,
//! while `M_p = p!²` itself leaves double precision near `p = 85`.
//!
//! The associated function `M(t) = sup_p (p log t − log M_p)` is evaluated through the ratio
//! form: under log-convexity the sup is attained at `P = #{p ≥ 1 : m_p ≤ t}` with
//! `m_p = M_p / M_{p−1}`, and `M(t) = Σ_{p ≤ P} log(t / m_p) = P log t − log M_P`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::verdict::{self, GridUsed, GrowthVerdict, Method, Property, Quant};
use crate::{Error, Result};

/// Largest range on which (M.1)/(M.2) are certified pairwise.
const CERTIFY_LIMIT: usize = 4096;

/// Constructor descriptor of a weight sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WeightSpec {
    /// `M_p = p!^s`.
    Gevrey {
        s: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p_max: Option<usize>,
    },
    /// Explicit `log M_p` table with optional (M.2) constants.
    Table {
        #[serde(rename = "logM")]
        log_m: Vec<f64>,
        #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
    },
}

impl WeightSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Gevrey { s: f64 },
    Table,
}

/// A certified weight sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSequence {
    kind: Kind,
    /// `log M_p` for `0 ≤ p ≤ p_max`.
    log_m: Arc<Vec<f64>>,
    p_max: usize,
    a: f64,
    h: f64,
    label: String,
}

/// Value of an associated function together with its maximizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assoc {
    pub value: f64,
    pub argmax: u64,
    /// The maximizer sits at the end of the stored range, so the true sup may be larger.
    pub truncated: bool,
}

/// Read access to `log M_p`, shared by plain and `r_j`-modified sequences.
pub trait LogWeights {
    /// `log M_p`, or `None` beyond the available range.
    fn log_weight(&self, p: usize) -> Option<f64>;
    /// Last index that may be used.
    fn limit(&self) -> usize;

    /// `log m_p = log M_p − log M_{p−1}` for `p ≥ 1`.
    fn log_ratio(&self, p: usize) -> Option<f64> {
        Some(self.log_weight(p)? - self.log_weight(p - 1)?)
    }
}

impl WeightSequence {
    /// Gevrey sequence `p!^s` with `A = 1`, `H = 2^s`.
    pub fn gevrey(s: f64, p_max: usize) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidSpec(format!("gevrey exponent must be positive, got {s}")));
        }
        check_p_max(p_max)?;
        let log_m: Vec<f64> = (0..=p_max).map(|p| gevrey_log(s, p as f64)).collect();
        let ws = WeightSequence {
            kind: Kind::Gevrey { s },
            log_m: Arc::new(log_m),
            p_max,
            a: 1.0,
            h: 2f64.powf(s),
            label: format!("p!^{s}"),
        };
        ws.check_conditions()?;
        ws.verify_m2(ws.a.ln(), ws.h.ln())
            .map_err(|detail| Error::CertificationFail { p_max, detail })?;
        Ok(ws)
    }

    /// Explicit table of `log M_p`; `(A, H)` are verified when given and searched otherwise.
    pub fn from_log_table(log_m: Vec<f64>, constants: Option<(f64, f64)>) -> Result<Self> {
        if log_m.is_empty() {
            return Err(Error::InvalidSpec("empty table".into()));
        }
        if log_m[0] != 0.0 {
            return Err(Error::InvalidSpec(format!("log M_0 must be 0 (M_0 = 1), got {}", log_m[0])));
        }
        if log_m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSpec("non-finite table entry".into()));
        }
        let p_max = log_m.len() - 1;
        check_p_max(p_max)?;
        let mut ws = WeightSequence {
            kind: Kind::Table,
            log_m: Arc::new(log_m),
            p_max,
            a: 1.0,
            h: 1.0,
            label: format!("table[{}]", p_max + 1),
        };
        ws.check_conditions()?;
        let (a, h) = match constants {
            Some((a, h)) => {
                if a < 1.0 || h < 1.0 {
                    return Err(Error::InvalidSpec(format!("(M.2) constants must be >= 1, got A={a}, H={h}")));
                }
                ws.verify_m2(a.ln(), h.ln()).map_err(|detail| Error::CertificationFail { p_max, detail })?;
                (a, h)
            }
            None => ws.search_m2()?,
        };
        ws.a = a;
        ws.h = h;
        Ok(ws)
    }

    /// Builds a sequence from a descriptor; `p_max` applies to Gevrey specs without their own.
    pub fn build(spec: &WeightSpec, p_max: usize) -> Result<Self> {
        match spec {
            WeightSpec::Gevrey { s, p_max: own } => Self::gevrey(*s, own.unwrap_or(p_max)),
            WeightSpec::Table { log_m, a, h } => {
                let constants = match (a, h) {
                    (Some(a), Some(h)) => Some((*a, *h)),
                    (None, None) => None,
                    _ => return Err(Error::InvalidSpec("give both A and H or neither".into())),
                };
                Self::from_log_table(log_m.clone(), constants)
            }
        }
    }

    /// Same sequence on a different stored range. Tables can only be shortened.
    pub fn with_p_max(&self, p_max: usize) -> Result<Self> {
        match self.kind {
            Kind::Gevrey { s } => Self::gevrey(s, p_max),
            Kind::Table => {
                if p_max > self.p_max {
                    return Err(Error::InvalidSpec(format!("table stops at p = {}", self.p_max)));
                }
                Self::from_log_table(self.log_m[..=p_max].to_vec(), Some((self.a, self.h)))
            }
        }
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }
    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn gevrey_exponent(&self) -> Option<f64> {
        match self.kind {
            Kind::Gevrey { s } => Some(s),
            Kind::Table => None,
        }
    }

    pub fn spec(&self) -> WeightSpec {
        match self.kind {
            Kind::Gevrey { s } => WeightSpec::Gevrey { s, p_max: Some(self.p_max) },
            Kind::Table => WeightSpec::Table { log_m: self.log_m.to_vec(), a: Some(self.a), h: Some(self.h) },
        }
    }

    /// `log M_p` on the stored range; Gevrey sequences extend analytically beyond it.
    pub fn log_m(&self, p: usize) -> Option<f64> {
        match (self.log_m.get(p), &self.kind) {
            (Some(v), _) => Some(*v),
            (None, Kind::Gevrey { s }) => Some(gevrey_log(*s, p as f64)),
            (None, Kind::Table) => None,
        }
    }

    /// `sup_{0 ≤ p ≤ p_max} (p log t − log M_p)`, with `M(t) = M(|t|)` and `M(0) = 0`.
    pub fn associated(&self, t: f64) -> Assoc {
        self.assoc_upto(t, self.p_max as u64)
    }

    /// As [`associated`](Self::associated), but a maximizer at `p_max` is an error.
    pub fn associated_function(&self, t: f64) -> Result<f64> {
        let a = self.associated(t);
        if a.truncated {
            Err(Error::Truncation { value: a.value, limit: self.p_max })
        } else {
            Ok(a.value)
        }
    }

    /// The associated function with the stored range raised on demand.
    ///
    /// Gevrey sequences are evaluated without truncation; tables return the sup over their
    /// range (check [`associated`](Self::associated) for the truncation flag).
    pub fn assoc(&self, t: f64) -> f64 {
        match self.kind {
            Kind::Gevrey { .. } => self.assoc_upto(t, u64::MAX).value,
            Kind::Table => self.associated(t).value,
        }
    }

    fn assoc_upto(&self, t: f64, limit: u64) -> Assoc {
        let t = t.abs();
        if t == 0.0 || t.is_nan() {
            return Assoc { value: 0.0, argmax: 0, truncated: false };
        }
        let lt = t.ln();
        match self.kind {
            Kind::Gevrey { s } => {
                // count of p >= 1 with s·log p <= log t
                let mut p = (lt / s).exp().floor();
                if !p.is_finite() || p > 9.0e15 {
                    p = 9.0e15;
                }
                while p >= 1.0 && s * p.ln() > lt {
                    p -= 1.0;
                }
                while p < 9.0e15 && s * (p + 1.0).ln() <= lt {
                    p += 1.0;
                }
                let unbounded = p as u64;
                let argmax = unbounded.min(limit);
                let value = argmax as f64 * lt - gevrey_log(s, argmax as f64);
                Assoc { value: value.max(0.0), argmax, truncated: unbounded > limit }
            }
            Kind::Table => {
                let limit = (limit.min(self.p_max as u64)) as usize;
                let argmax = ratio_count(self, limit, lt);
                let value = argmax as f64 * lt - self.log_m[argmax];
                Assoc { value: value.max(0.0), argmax: argmax as u64, truncated: argmax == limit && limit > 0 }
            }
        }
    }

    /// The sequence `M_p · Π_{j ≤ p} r_j`.
    pub fn modified<'a>(&'a self, rs: &'a RSequence) -> Modified<'a> {
        Modified { ws: self, rs }
    }

    /// Associated function `M_{r_j}` of `M_p Π_{j≤p} r_j`, over `p ≤ min(p_max, J_max)`.
    pub fn associated_rj(&self, rs: &RSequence, t: f64) -> Assoc {
        self.modified(rs).associated(t)
    }

    /// As [`associated_rj`](Self::associated_rj), a maximizer at the range end is an error.
    pub fn associated_function_rj(&self, rs: &RSequence, t: f64) -> Result<f64> {
        let a = self.associated_rj(rs, t);
        if a.truncated {
            Err(Error::Truncation { value: a.value, limit: self.modified(rs).limit() })
        } else {
            Ok(a.value)
        }
    }

    /// Identity string used as a cache key.
    pub fn fingerprint(&self) -> String {
        match self.kind {
            Kind::Gevrey { s } => format!("gevrey:{s}:{}", self.p_max),
            Kind::Table => {
                let sum: f64 = self.log_m.iter().sum();
                format!("table:{}:{sum:e}:{}:{}", self.p_max, self.a, self.h)
            }
        }
    }

    fn check_conditions(&self) -> Result<()> {
        let lm = &self.log_m;
        for p in 1..self.p_max {
            let lhs = 2.0 * lm[p];
            let rhs = lm[p - 1] + lm[p + 1];
            if lhs > rhs + 1e-12 * (1.0 + lhs.abs()) {
                return Err(Error::InvalidSpec(format!("(M.1) fails at p = {p}: 2 log M_p = {lhs} > {rhs}")));
            }
        }
        let first = lm[1] - lm[0];
        let last = lm[self.p_max] - lm[self.p_max - 1];
        if last <= first + std::f64::consts::LN_2 {
            return Err(Error::DivergenceFail { p_max: self.p_max, last: last.exp(), twice_first: 2.0 * first.exp() });
        }
        Ok(())
    }

    /// Largest excess `log M_{p+q} − (p+q) log H − log M_p − log M_q`, split by whether
    /// `p+q` lies in the lower or upper half of the certified range.
    fn m2_excess(&self, log_h: f64) -> (f64, f64, (usize, usize)) {
        let range = self.p_max.min(CERTIFY_LIMIT);
        let lm = &self.log_m;
        let (mut lower, mut upper) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut worst = (0, 0);
        let mut worst_val = f64::NEG_INFINITY;
        for n in 0..=range {
            for p in 0..=n / 2 {
                let q = n - p;
                let e = lm[n] - n as f64 * log_h - lm[p] - lm[q];
                if e > worst_val {
                    worst_val = e;
                    worst = (p, q);
                }
                if 2 * n <= range {
                    lower = lower.max(e);
                } else {
                    upper = upper.max(e);
                }
            }
        }
        (lower, upper, worst)
    }

    fn verify_m2(&self, log_a: f64, log_h: f64) -> std::result::Result<(), String> {
        let (lower, upper, (p, q)) = self.m2_excess(log_h);
        let worst = lower.max(upper);
        if worst > log_a + 1e-9 * (1.0 + worst.abs()) {
            Err(format!("M_(p+q) <= A H^(p+q) M_p M_q fails at p = {p}, q = {q}: needs log A >= {worst:.6}"))
        } else {
            Ok(())
        }
    }

    /// Grid search over `H ∈ {2^{1/4}, …, 2^4}`: among `H` whose required `log A` is already
    /// attained on the lower half of the range, take the smallest `A`, then the smallest `H`.
    fn search_m2(&self) -> Result<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for j in 1..=16 {
            let h = 2f64.powf(j as f64 / 4.0);
            let (lower, upper, _) = self.m2_excess(h.ln());
            let settled = upper <= lower.max(0.0) + 1e-9;
            if !settled {
                continue;
            }
            let log_a = lower.max(upper).max(0.0);
            if best.map_or(true, |(la, _)| log_a < la - 1e-12) {
                best = Some((log_a, h));
            }
        }
        best.map(|(la, h)| (la.exp(), h)).ok_or_else(|| Error::CertificationFail {
            p_max: self.p_max,
            detail: "no H in {2^(1/4), ..., 2^4} gives a settled constant A".into(),
        })
    }
}

impl LogWeights for WeightSequence {
    fn log_weight(&self, p: usize) -> Option<f64> {
        self.log_m(p)
    }
    fn limit(&self) -> usize {
        self.p_max
    }
}

fn check_p_max(p_max: usize) -> Result<()> {
    if p_max < 8 {
        Err(Error::InvalidSpec(format!("p_max must be at least 8, got {p_max}")))
    } else {
        Ok(())
    }
}

fn gevrey_log(s: f64, p: f64) -> f64 {
    if p < 2.0 {
        0.0
    } else {
        s * ln_gamma(p + 1.0)
    }
}

/// Number of `p ∈ 1..=limit` with `log m_p ≤ lt`, by bisection on the nondecreasing ratios.
fn ratio_count<W: LogWeights + ?Sized>(w: &W, limit: usize, lt: f64) -> usize {
    let (mut lo, mut hi) = (0usize, limit);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        match w.log_ratio(mid) {
            Some(r) if r <= lt => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}

/// Nondecreasing sequence `r_j` with `r_0 = 1`, a member of the family `𝓡` on a finite range.
#[derive(Debug, Clone, PartialEq)]
pub struct RSequence {
    r: Vec<f64>,
    /// `Σ_{j ≤ p} log r_j`.
    log_prod: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RSequenceFile {
    pub r: Vec<f64>,
}

impl RSequence {
    pub fn new(r: Vec<f64>) -> Result<Self> {
        if r.len() < 3 {
            return Err(Error::InvalidSpec("r_j table needs at least 3 entries".into()));
        }
        if r[0] != 1.0 {
            return Err(Error::InvalidSpec(format!("r_0 must be 1, got {}", r[0])));
        }
        if r.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidSpec("r_j must be positive and finite".into()));
        }
        if let Some(j) = r.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidSpec(format!("r_j decreases at j = {}", j + 1)));
        }
        let last = *r.last().unwrap();
        if last <= 2.0 * r[1] {
            return Err(Error::DivergenceFail { p_max: r.len() - 1, last, twice_first: 2.0 * r[1] });
        }
        let log_prod = r
            .iter()
            .scan(0.0, |acc, v| {
                *acc += v.ln();
                Some(*acc)
            })
            .collect();
        Ok(RSequence { r, log_prod })
    }

    /// `r_j = j + 1` for `0 ≤ j ≤ j_max`.
    pub fn linear(j_max: usize) -> Result<Self> {
        Self::new((0..=j_max).map(|j| (j + 1) as f64).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RSequenceFile = serde_json::from_str(text)?;
        Self::new(file.r)
    }

    pub fn j_max(&self) -> usize {
        self.r.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.r
    }

    /// `log Π_{j ≤ p} r_j`.
    pub fn log_product(&self, p: usize) -> Option<f64> {
        self.log_prod.get(p).copied()
    }
}

/// View of `M_p Π_{j ≤ p} r_j`.
#[derive(Debug, Clone, Copy)]
pub struct Modified<'a> {
    ws: &'a WeightSequence,
    rs: &'a RSequence,
}

impl Modified<'_> {
    pub fn associated(&self, t: f64) -> Assoc {
        let t = t.abs();
        if t == 0.0 || t.is_nan() {
            return Assoc { value: 0.0, argmax: 0, truncated: false };
        }
        let lt = t.ln();
        let limit = self.limit();
        let p = ratio_count(self, limit, lt);
        let value = p as f64 * lt - self.log_weight(p).expect("within range");
        Assoc { value: value.max(0.0), argmax: p as u64, truncated: p == limit }
    }
}

impl LogWeights for Modified<'_> {
    fn log_weight(&self, p: usize) -> Option<f64> {
        if p > self.limit() {
            return None;
        }
        Some(self.ws.log_m(p)? + self.rs.log_product(p)?)
    }
    fn limit(&self) -> usize {
        self.ws.p_max.min(self.rs.j_max())
    }
}

/// One row of the `2M(t) ≤ M(Ht) + log A` check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub excess: f64,
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub a: f64,
    pub h: f64,
    pub rows: Vec<LemmaRow>,
    /// `max_t 2M(t) − M(Ht) − log A` over the grid.
    pub max_excess: f64,
    pub pass: bool,
}

/// Checks `2M(t) ≤ M(Ht) + log A` on a grid, using the sequence's certified `(A, H)`.
pub fn check_lemma_2m(ws: &WeightSequence, t_grid: &[f64]) -> LemmaReport {
    let log_a = ws.a.ln();
    let rows: Vec<LemmaRow> = t_grid
        .iter()
        .map(|&t| {
            let lhs = 2.0 * ws.assoc(t);
            let rhs = ws.assoc(ws.h * t) + log_a;
            let truncated = ws.gevrey_exponent().is_none() && ws.associated(ws.h * t).truncated;
            LemmaRow { t, lhs, rhs, excess: lhs - rhs, truncated }
        })
        .collect();
    let max_excess = rows.iter().map(|r| r.excess).fold(f64::NEG_INFINITY, f64::max);
    LemmaReport { a: ws.a, h: ws.h, pass: max_excess <= 1e-9, rows, max_excess }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationKind {
    /// `M_p ⊂ N_p`: `M_p ≤ C h^p N_p` for some `h`.
    Subset,
    /// `M_p ≺ N_p`: the same for every `h`.
    Strict,
}

/// Desk-scale decision of `M_p ⊂ N_p` or `M_p ≺ N_p` over `p ≤ p_max` and an `h` grid.
pub fn relation(m: &WeightSequence, n: &WeightSequence, kind: RelationKind, p_max: usize, h_grid: &[f64], tau: f64) -> GrowthVerdict {
    let p_max = p_max.min(p_max_of(m)).min(p_max_of(n));
    let rows: Vec<Vec<f64>> = h_grid
        .iter()
        .map(|&h| {
            (0..=p_max)
                .map(|p| match (m.log_m(p), n.log_m(p)) {
                    (Some(a), Some(b)) => a - b - p as f64 * h.ln(),
                    _ => f64::NAN,
                })
                .collect()
        })
        .collect();
    let q = match kind {
        RelationKind::Subset => Quant::Exists,
        RelationKind::Strict => Quant::ForAll,
    };
    let red = verdict::reduce1(q, h_grid.len(), |i| verdict::bounded_test(&rows[i], tau));
    GrowthVerdict {
        bounded: red.margin <= tau,
        margin: red.margin,
        witness_n: red.witness,
        grid: GridUsed { h: Some(h_grid.to_vec()), deciding: h_grid.get(red.deciding.0).map(|h| vec![*h]), ..Default::default() },
        method: Method::Sequence,
        property: Property::Relation,
        class: None,
        pattern: verdict::pattern1(q, "h"),
        tau,
        n_max: p_max,
        truncated: false,
        desk_scale: true,
    }
}

fn p_max_of(ws: &WeightSequence) -> usize {
    match ws.kind {
        Kind::Gevrey { .. } => usize::MAX,
        Kind::Table => ws.p_max,
    }
}

/// Log-spaced grid of `count` points from `lo` to `hi`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force `sup_{p ≤ limit} (p log t − s log p!)` with `log p!` as a running sum.
    fn brute(s: f64, t: f64, limit: usize) -> f64 {
        let mut lf = 0.0;
        let mut best: f64 = 0.0;
        for p in 1..=limit {
            lf += (p as f64).ln();
            best = best.max(p as f64 * t.ln() - s * lf);
        }
        best
    }

    #[test]
    fn gevrey_presets_carry_constants() {
        let g1 = WeightSequence::gevrey(1.0, 64).unwrap();
        assert_eq!((g1.a(), g1.h()), (1.0, 2.0));
        assert!((g1.log_m(5).unwrap() - 120f64.ln()).abs() < 1e-12);
        let g2 = WeightSequence::gevrey(2.0, 64).unwrap();
        assert_eq!(g2.h(), 4.0);
        assert!((g2.log_m(5).unwrap() - 2.0 * 120f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn spot_values_of_factorial_weight() {
        let g = WeightSequence::gevrey(1.0, 2000).unwrap();
        assert!((g.associated_function(10.0).unwrap() - 7.9214).abs() < 1e-3);
        assert!((g.associated_function(20.0).unwrap() - 17.5790).abs() < 1e-3);
        assert_eq!(g.associated_function(1.0).unwrap(), 0.0);
        assert_eq!(g.assoc(0.0), 0.0);
        assert_eq!(g.assoc(-10.0), g.assoc(10.0));
        assert!((g.associated(10.0).value - brute(1.0, 10.0, 2000)).abs() < 1e-9);
    }

    #[test]
    fn truncation_is_flagged() {
        let g = WeightSequence::gevrey(1.0, 16).unwrap();
        let a = g.associated(100.0);
        assert!(a.truncated);
        assert_eq!(a.argmax, 16);
        assert!(matches!(g.associated_function(100.0), Err(Error::Truncation { .. })));
        assert!(g.assoc(100.0) > a.value);
    }

    #[test]
    fn constant_table_is_rejected() {
        let flat = vec![0.0; 20];
        assert!(matches!(WeightSequence::from_log_table(flat, None), Err(Error::DivergenceFail { .. })));
        let bad_origin = vec![1.0; 20];
        assert!(matches!(WeightSequence::from_log_table(bad_origin, None), Err(Error::InvalidSpec(_))));
        let nonconvex: Vec<f64> = (0..20).map(|p| (p as f64).sqrt()).collect();
        assert!(matches!(WeightSequence::from_log_table(nonconvex, None), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn table_search_recovers_factorial_constants() {
        let mut lm = vec![0.0];
        for p in 1..=64 {
            lm.push(lm[p - 1] + (p as f64).ln());
        }
        let ws = WeightSequence::from_log_table(lm.clone(), None).unwrap();
        assert!((ws.a() - 1.0).abs() < 1e-9);
        assert!((ws.h() - 2.0).abs() < 1e-12);
        let g = WeightSequence::gevrey(1.0, 64).unwrap();
        for t in [0.5, 3.0, 10.0, 40.0] {
            assert!((ws.associated(t).value - g.associated(t).value).abs() < 1e-9);
        }
        // H = 1 cannot hold for p!
        assert!(matches!(
            WeightSequence::from_log_table(lm, Some((1.0, 1.0))),
            Err(Error::CertificationFail { .. })
        ));
    }

    #[test]
    fn spec_json_round() {
        let g = WeightSpec::from_json(r#"{"kind":"gevrey","s":1.0,"p_max":64}"#).unwrap();
        assert_eq!(g, WeightSpec::Gevrey { s: 1.0, p_max: Some(64) });
        let t = WeightSpec::from_json(r#"{"kind":"table","logM":[0,0,1],"A":1,"H":2}"#).unwrap();
        assert!(matches!(t, WeightSpec::Table { a: Some(_), h: Some(_), .. }));
        assert!(WeightSpec::from_json(r#"{"kind":"bogus"}"#).is_err());
    }

    #[test]
    fn rj_associated_function() {
        let g = WeightSequence::gevrey(1.0, 2000).unwrap();
        let rs = RSequence::linear(2000).unwrap();
        // M_p (p+1)! = p!(p+1)!
        let mut best: f64 = 0.0;
        let (mut lf, mut lf1) = (0.0, 0.0);
        for p in 1..=2000usize {
            lf += (p as f64).ln();
            lf1 += (p as f64 + 1.0).ln();
            best = best.max(p as f64 * 10f64.ln() - lf - lf1);
        }
        assert!((g.associated_function_rj(&rs, 10.0).unwrap() - best).abs() < 1e-9);
        assert_eq!(g.associated_function_rj(&rs, 0.5).unwrap(), 0.0);

        let mut r = vec![1.0; 21];
        r.extend((2..40).map(|j| j as f64));
        let prefix = RSequence::new(r).unwrap();
        for t in [2.0, 5.0, 12.0] {
            assert!((g.associated_rj(&prefix, t).value - g.associated(t).value).abs() < 1e-9);
        }
    }

    #[test]
    fn rsequence_validation() {
        assert!(RSequence::new(vec![2.0, 2.0, 5.0]).is_err());
        assert!(RSequence::new(vec![1.0, 3.0, 2.0, 9.0]).is_err());
        assert!(matches!(RSequence::new(vec![1.0, 1.0, 1.5]), Err(Error::DivergenceFail { .. })));
        assert!(RSequence::from_json(r#"{"r":[1,2,3,5]}"#).is_ok());
    }

    #[test]
    fn lemma_examples() {
        let g1 = WeightSequence::gevrey(1.0, 64).unwrap();
        let rep = check_lemma_2m(&g1, &[10.0]);
        assert!(rep.pass);
        assert!((rep.rows[0].lhs - 15.8429).abs() < 2e-3);
        assert!((rep.rows[0].rhs - 17.5790).abs() < 1e-3);
        let small = check_lemma_2m(&g1, &[1e-6]);
        assert_eq!(small.rows[0].lhs, 0.0);
        assert!(small.pass);
        let g2 = WeightSequence::gevrey(2.0, 64).unwrap();
        assert!(check_lemma_2m(&g2, &log_grid(1e-2, 1e4, 25)).pass);
    }

    #[test]
    fn relation_examples() {
        let g1 = WeightSequence::gevrey(1.0, 64).unwrap();
        let g2 = WeightSequence::gevrey(2.0, 64).unwrap();
        let grid = verdict::default_grid();
        assert!(relation(&g1, &g2, RelationKind::Strict, 64, &grid, 0.5).bounded);
        let same = relation(&g1, &g1, RelationKind::Subset, 64, &grid, 0.5);
        assert!(same.bounded);
        assert!(!relation(&g2, &g1, RelationKind::Subset, 64, &grid, 0.5).bounded);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-2, 1e4, 40);
        assert_eq!(g.len(), 40);
        assert!((g[0] - 1e-2).abs() < 1e-15);
        assert!((g[39] - 1e4).abs() < 1e-8);
    }
}
