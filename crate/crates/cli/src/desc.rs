//! Descriptor strings for weights, distributions, mollifiers, nets and operators.

use std::fs;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use periodic_gf::algebra::Net;
use periodic_gf::embedding::{const_embed, embed, Mollifier};
use periodic_gf::operators::{UltraSpec, Ultrapolynomial};
use periodic_gf::series::{CoefDistribution, TrigPoly};
use periodic_gf::verdict::{default_grid, Class, DEFAULT_TAU};
use periodic_gf::weights::{WeightSequence, WeightSpec};

pub const DEFAULT_P_MAX: usize = 2000;

fn read(path: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read '{path}'"))
}

/// `gevrey:<s>` or `file:<path>`.
pub fn weights(desc: &str) -> Result<WeightSequence> {
    if let Some(s) = desc.strip_prefix("gevrey:") {
        let s: f64 = s.parse().with_context(|| format!("bad gevrey exponent in '{desc}'"))?;
        return Ok(WeightSequence::gevrey(s, DEFAULT_P_MAX)?);
    }
    if let Some(path) = desc.strip_prefix("file:") {
        return weights_file(path);
    }
    bail!("unknown weight descriptor '{desc}'")
}

/// A weight-spec file, or a bare `log M_p` array.
pub fn weights_file(path: &str) -> Result<WeightSequence> {
    let text = read(path)?;
    let spec = match serde_json::from_str::<Vec<f64>>(&text) {
        Ok(log_m) => WeightSpec::Table { log_m, a: None, h: None },
        Err(_) => WeightSpec::from_json(&text)?,
    };
    let p_max = match &spec {
        WeightSpec::Gevrey { p_max, .. } => p_max.unwrap_or(DEFAULT_P_MAX),
        WeightSpec::Table { log_m, .. } => log_m.len().saturating_sub(1),
    };
    Ok(WeightSequence::build(&spec, p_max)?)
}

/// A preset name or `file:<path>` with a coefficient table.
pub fn dist(desc: &str, ws: &WeightSequence) -> Result<CoefDistribution> {
    if let Some(path) = desc.strip_prefix("file:") {
        return Ok(CoefDistribution::from_poly(&TrigPoly::from_json(&read(path)?)?));
    }
    Ok(CoefDistribution::preset(desc, ws)?)
}

/// `dirichlet`, `cutoff:trapezoid:r=<r>:R=<R>` or `file:<path>`.
pub fn mollifier(desc: &str) -> Result<Mollifier> {
    if let Some(path) = desc.strip_prefix("file:") {
        return Ok(Mollifier::from_json(&read(path)?)?);
    }
    Ok(Mollifier::parse(desc)?)
}

fn is_mollifier(s: &str) -> bool {
    s == "dirichlet" || s.starts_with("cutoff:") || s.starts_with("file:")
}

/// Splits `<dist>:<mollifier>`; the mollifier defaults to `dirichlet`.
fn split_embed(rest: &str) -> (&str, &str) {
    for (i, _) in rest.match_indices(':') {
        if is_mollifier(&rest[i + 1..]) {
            return (&rest[..i], &rest[i + 1..]);
        }
    }
    (rest, "dirichlet")
}

pub struct NetContext<'a> {
    pub ws: &'a WeightSequence,
    pub class: Class,
    pub n_max: usize,
    pub k_max: usize,
}

/// `dirichlet`, `embed:<dist>[:<mollifier>]`, `const:<dist>`, `scaled:<dist>:<rate>`, and
/// products `a*b`.
pub fn net(desc: &str, cx: &NetContext) -> Result<Net> {
    let mut parts = desc.split('*');
    let first = parts.next().ok_or_else(|| anyhow!("empty net descriptor"))?;
    let mut acc = single_net(first, cx)?;
    for p in parts {
        acc = acc.mul(&single_net(p, cx)?);
    }
    Ok(acc.with_label(desc))
}

fn single_net(desc: &str, cx: &NetContext) -> Result<Net> {
    if desc == "dirichlet" {
        return Ok(Net::dirichlet(cx.n_max)?);
    }
    if let Some(rest) = desc.strip_prefix("embed:") {
        let (d, m) = split_embed(rest);
        return Ok(embed(&dist(d, cx.ws)?, &mollifier(m)?, cx.n_max)?);
    }
    if let Some(rest) = desc.strip_prefix("const:") {
        let e = const_embed(&dist(rest, cx.ws)?, cx.ws, cx.class, &default_grid(), DEFAULT_TAU, cx.k_max, cx.n_max)?;
        return Ok(e.net);
    }
    if let Some(rest) = desc.strip_prefix("scaled:") {
        let (d, rate) = rest.rsplit_once(':').ok_or_else(|| anyhow!("scaled net needs '<dist>:<rate>', got '{rest}'"))?;
        let rate: f64 = rate.parse().with_context(|| format!("bad rate in '{desc}'"))?;
        let f = dist(d, cx.ws)?.truncate(cx.k_max).trimmed();
        return Ok(Net::scaled(&f, rate, cx.n_max)?);
    }
    bail!("unknown net descriptor '{desc}'")
}

/// `structure_beurling[:λ]`, `structure_roumieu`, `poly:a0,a1,…` or `file:<path>`.
pub fn operator(desc: &str, ws: &WeightSequence, class: Class) -> Result<Ultrapolynomial> {
    if let Some(path) = desc.strip_prefix("file:") {
        return Ok(Ultrapolynomial::build(&UltraSpec::from_json(&read(path)?)?, ws, class)?);
    }
    if let Some(list) = desc.strip_prefix("poly:") {
        let a = list
            .split(',')
            .map(|s| s.trim().parse::<f64>().map(|v| Complex64::new(v, 0.0)))
            .collect::<std::result::Result<Vec<_>, _>>()
            .with_context(|| format!("bad coefficient list in '{desc}'"))?;
        return Ok(Ultrapolynomial::table(a, ws, class, None)?);
    }
    if desc == "structure_roumieu" {
        return Ok(Ultrapolynomial::build(&UltraSpec::Form { form: desc.into(), lambda: None, r: None, k: None }, ws, class)?);
    }
    if let Some(rest) = desc.strip_prefix("structure_beurling") {
        let lambda = match rest.strip_prefix(':') {
            Some(l) => l.parse().with_context(|| format!("bad λ in '{desc}'"))?,
            None if rest.is_empty() => 1.0,
            None => bail!("unknown operator descriptor '{desc}'"),
        };
        return Ok(Ultrapolynomial::structure_beurling(lambda, ws)?);
    }
    bail!("unknown operator descriptor '{desc}'")
}

/// Comma-separated positive reals.
pub fn grid(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| v.trim().parse::<f64>().with_context(|| format!("bad grid value '{v}'"))).collect()
}
