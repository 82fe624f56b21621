use std::fmt::Write as _;
use std::fs;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use periodic_gf::algebra::{classify_moderate, classify_negligible, classify_negligible_supnorm, coef_classify, Grids, Mode, Net};
use periodic_gf::embedding::{check_product_preservation, embed};
use periodic_gf::operators::{
    apply_operator, apply_operator_net, default_rj, lower_bound_check, structure_factorize, FactorParams, Form, OpClass, Ultrapolynomial, FACTOR_K_MAX,
};
use periodic_gf::regularity::{classify_regular, regularity_theorem_check};
use periodic_gf::series::{CoefDistribution, DEFAULT_K_MAX};
use periodic_gf::verdict::Class;
use periodic_gf::weights::{check_lemma_2m, log_grid, WeightSequence};

use crate::desc::{self, NetContext};
use crate::{ClassifyMethod, ClassifyMode, Common};

pub struct Report {
    pub json: Value,
    pub pass: bool,
    pub csv: Option<String>,
}

impl Report {
    fn info(json: Value) -> Self {
        Report { json, pass: true, csv: None }
    }
}

/// Writes the report and maps the verdict to an exit status.
pub fn emit(r: &Report, common: &Common) -> Result<ExitCode> {
    let text = serde_json::to_string_pretty(&r.json)? + "\n";
    match &common.out {
        Some(path) => fs::write(path, &text).with_context(|| format!("cannot write '{}'", path.display()))?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(csv)) = (&common.csv, &r.csv) {
        fs::write(path, csv).with_context(|| format!("cannot write '{}'", path.display()))?;
    }
    Ok(if common.assert && !r.pass { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn grids(c: &Common) -> Result<Grids> {
    let mut g = Grids::default();
    if let Some(h) = &c.h_grid {
        g.h = desc::grid(h)?;
    }
    if let Some(l) = &c.lambda_grid {
        g.lambda = desc::grid(l)?;
    }
    g.tau = c.tau;
    Ok(g)
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

pub fn weights(gevrey: Option<f64>, table: Option<&str>, t: &[f64], c: &Common) -> Result<Report> {
    let ws = match (gevrey, table) {
        (Some(s), None) => WeightSequence::gevrey(s, desc::DEFAULT_P_MAX)?,
        (None, Some(path)) => desc::weights_file(path)?,
        (None, None) => desc::weights(&c.weights)?,
        (Some(_), Some(_)) => bail!("--gevrey and --table are exclusive"),
    };
    let ts = if t.is_empty() { vec![1.0, 10.0, 100.0] } else { t.to_vec() };
    let values: Vec<Value> = ts
        .iter()
        .map(|&t| {
            let a = ws.associated(t);
            json!({"t": t, "M": if a.truncated { ws.assoc(t) } else { a.value }, "argmax_p": a.argmax, "truncated": a.truncated && ws.gevrey_exponent().is_none()})
        })
        .collect();
    let lemma = check_lemma_2m(&ws, &log_grid(1e-2, 1e4, 40));
    let pass = lemma.pass;
    Ok(Report {
        json: json!({
            "weights": ws.label(),
            "p_max": ws.p_max(),
            "certified": {"M1": true, "M2": true, "A": ws.a(), "H": ws.h()},
            "values": values,
            "lemma_2M": {"pass": lemma.pass, "max_excess": lemma.max_excess, "A": lemma.a, "H": lemma.h},
        }),
        pass,
        csv: None,
    })
}

fn growth_csv(net: &Net, ws: &WeightSequence, hs: &[f64]) -> Result<String> {
    let cols = hs.iter().map(|&h| net.log_ud_norms(ws, h)).collect::<periodic_gf::Result<Vec<_>>>()?;
    let mut s = String::from("n");
    for h in hs {
        write!(s, ",log_norm_h={h}")?;
    }
    s.push('\n');
    for n in 0..=net.n_max() {
        write!(s, "{n}")?;
        for col in &cols {
            write!(s, ",{}", col[n].log_value)?;
        }
        s.push('\n');
    }
    Ok(s)
}

pub fn classify(net_desc: &str, mode: ClassifyMode, method: ClassifyMethod, c: &Common) -> Result<Report> {
    let ws = desc::weights(&c.weights)?;
    let g = grids(c)?;
    let cx = NetContext { ws: &ws, class: c.class, n_max: c.nmax, k_max: c.kmax.unwrap_or(DEFAULT_K_MAX) };
    let net = desc::net(net_desc, &cx)?;
    let (json, pass) = match (mode, method) {
        (ClassifyMode::Moderate, ClassifyMethod::Full) => {
            let v = classify_moderate(&net, &ws, c.class, &g)?;
            (v.to_json(), v.bounded)
        }
        (ClassifyMode::Negligible, ClassifyMethod::Full) => {
            let v = classify_negligible(&net, &ws, c.class, &g)?;
            (v.to_json(), v.bounded)
        }
        (ClassifyMode::Negligible, ClassifyMethod::Sup) => {
            let m = classify_moderate(&net, &ws, c.class, &g)?;
            let v = classify_negligible_supnorm(&net, &ws, c.class, &g.lambda, g.tau, &m)?;
            (v.to_json(), v.bounded)
        }
        (ClassifyMode::Moderate, ClassifyMethod::Coef) => {
            let v = coef_classify(&net, &ws, c.class, Mode::Moderate, &g)?;
            (v.to_json(), v.bounded)
        }
        (ClassifyMode::Negligible, ClassifyMethod::Coef) => {
            let v = coef_classify(&net, &ws, c.class, Mode::Negligible, &g)?;
            (v.to_json(), v.bounded)
        }
        (ClassifyMode::Regular, ClassifyMethod::Full) => {
            let v = classify_regular(&net, &ws, c.class, &g)?;
            (serde_json::to_value(&v)?, v.regular)
        }
        (ClassifyMode::Moderate, ClassifyMethod::Sup) => bail!("the sup-norm method decides negligibility only"),
        (ClassifyMode::Regular, _) => bail!("regularity is decided from full norms only"),
    };
    let csv = if c.csv.is_some() { Some(growth_csv(&net, &ws, &g.h)?) } else { None };
    Ok(Report { json: json!({"net": net_desc, "weights": ws.label(), "verdict": json}), pass, csv })
}

pub fn embed_cmd(dist: &str, mollifier: &str, c: &Common) -> Result<Report> {
    let ws = desc::weights(&c.weights)?;
    let f = desc::dist(dist, &ws)?;
    let m = desc::mollifier(mollifier)?;
    let net = embed(&f, &m, c.nmax)?;
    let rows: Vec<Value> = net.entries()?.iter().enumerate().map(|(n, p)| json!({"n": n, "coef": p.to_entries()})).collect();
    Ok(Report::info(json!({
        "dist": f.label(),
        "mollifier": {"C": m.c_bound(), "R": m.big_r(), "r": m.r()},
        "rows": rows,
    })))
}

pub fn product(f: &str, g: &str, mollifier: &str, slack: f64, c: &Common) -> Result<Report> {
    let ws = desc::weights(&c.weights)?;
    let (fd, gd) = (desc::dist(f, &ws)?, desc::dist(g, &ws)?);
    let m = desc::mollifier(mollifier)?;
    let k_max = c.kmax.unwrap_or(4 * c.nmax);
    let r = check_product_preservation(&fd, &gd, &m, &ws, c.class, &grids(c)?, c.nmax, k_max, slack)?;
    let pass = r.pass();
    let mut json = serde_json::to_value(&r)?;
    json["pass"] = json!(pass);
    Ok(Report { json, pass, csv: None })
}

fn op_json(p: &Ultrapolynomial) -> Value {
    let form = match p.form() {
        Form::Table(a) => json!({"table": a.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()}),
        Form::StructureBeurling { lambda } => json!({"structure_beurling": {"lambda": lambda}}),
        Form::StructureRoumieu { r, k } => json!({"structure_roumieu": {"r_len": r.j_max(), "k_len": k.j_max()}}),
    };
    let class = match p.class() {
        OpClass::Beurling { l, c } => json!({"class": "beurling", "L": l, "C": c}),
        OpClass::Roumieu { table } => json!({"class": "roumieu", "C_L": table}),
    };
    json!({"form": form, "bound": class})
}

pub fn apply(op: &str, dist: Option<&str>, net: Option<&str>, c: &Common) -> Result<Report> {
    let ws = desc::weights(&c.weights)?;
    let p = desc::operator(op, &ws, c.class)?;
    if let Some(d) = dist {
        let f = desc::dist(d, &ws)?;
        let out = apply_operator(&p, &f);
        let k_max = c.kmax.unwrap_or(16) as i64;
        let rows: Vec<Value> = (-k_max..=k_max)
            .map(|k| {
                let (a, b) = (f.coef(k), out.coef(k));
                json!({"k": k, "re": finite(b.re), "im": finite(b.im), "input_re": a.re, "input_im": a.im})
            })
            .collect();
        return Ok(Report::info(json!({"operator": op_json(&p), "dist": f.label(), "coefficients": rows})));
    }
    let net_desc = net.expect("clap requires --dist or --net");
    let cx = NetContext { ws: &ws, class: c.class, n_max: c.nmax, k_max: c.kmax.unwrap_or(DEFAULT_K_MAX) };
    let input = desc::net(net_desc, &cx)?;
    let g = grids(c)?;
    let before = classify_moderate(&input, &ws, c.class, &g)?;
    let after = classify_moderate(&apply_operator_net(&p, &input), &ws, c.class, &g)?;
    let pass = !before.bounded || after.bounded;
    Ok(Report {
        json: json!({"operator": op_json(&p), "net": net_desc, "input_moderate": before.to_json(), "output_moderate": after.to_json(), "closure_holds": pass}),
        pass,
        csv: None,
    })
}

pub fn factorize(dist: &str, lambda: Option<f64>, target: Option<&str>, c: &Common) -> Result<Report> {
    let ws = desc::weights(&c.weights)?;
    let f = desc::dist(dist, &ws)?;
    let target = match target {
        Some(t) => desc::weights(t)?,
        None => match ws.gevrey_exponent() {
            Some(s) => WeightSequence::gevrey(s + 1.0, desc::DEFAULT_P_MAX)?,
            None => bail!("--target is required for non-Gevrey weights"),
        },
    };
    let params = match lambda {
        Some(l) => FactorParams::Beurling { lambda: l },
        None => FactorParams::Roumieu { r: default_rj(), k: default_rj() },
    };
    let k_max = c.kmax.unwrap_or(FACTOR_K_MAX);
    let fz = structure_factorize(&f, &ws, &params, &target, k_max)?;
    let lower = lower_bound_check(&fz.p, &ws, lambda.unwrap_or(1.0), &log_grid(1.0, 100.0, 25))?;
    let pass = fz.reconstruction_residual <= 1e-12 && fz.in_target.bounded && lower.pass;
    let sample: Vec<Value> = (-8i64..=8).map(|k| json!({"k": k, "re": fz.g.coef(k).re, "im": fz.g.coef(k).im})).collect();
    Ok(Report {
        json: json!({
            "dist": f.label(),
            "weights": ws.label(),
            "target": target.label(),
            "operator": op_json(&fz.p),
            "reconstruction_residual": fz.reconstruction_residual,
            "growth": fz.growth,
            "g_in_target": fz.in_target.to_json(),
            "g_in_roumieu_m": fz.in_roumieu_m.as_ref().map(|v| v.to_json()),
            "decay_margin_at_lambda": fz.decay_at_lambda,
            "lower_bound": lower,
            "g_sample": sample,
            "k_max": fz.k_max,
            "pass": pass,
        }),
        pass,
        csv: None,
    })
}

pub fn regularity(dist: &str, mollifier: &str, c: &Common) -> Result<Report> {
    let ws = desc::weights(&c.weights)?;
    let f = desc::dist(dist, &ws)?;
    let m = desc::mollifier(mollifier)?;
    let r = regularity_theorem_check(&f, &m, &ws, c.class, &grids(c)?, c.nmax)?;
    Ok(Report { pass: r.regular.regular, json: serde_json::to_value(&r)?, csv: None })
}

/// `u = ι(sin)ι(δ)`, `v = u·ι(cot̃)`, `w = ι(cos)ι(δ)` with the Dirichlet mollifier.
pub fn demo_schwartz(c: &Common) -> Result<Report> {
    let ws = desc::weights(&c.weights)?;
    let g = grids(c)?;
    let m = desc::mollifier("dirichlet")?;
    let n_max = c.nmax;
    let io = |name: &str| -> Result<Net> { Ok(embed(&CoefDistribution::preset(name, &ws)?, &m, n_max)?) };
    let delta = io("delta")?;
    let u = io("sin")?.mul(&delta).with_label("ι(sin)ι(δ)");
    let v = u.mul(&io("cot_reg")?).with_label("ι(sin)ι(δ)ι(cot)");
    let w = io("cos")?.mul(&delta).with_label("ι(cos)ι(δ)");
    let sup = u.log_sup_norms()?.into_iter().map(f64::exp).collect::<Vec<_>>();
    let in_band = sup.iter().enumerate().skip(16).all(|(_, s)| (0.30..=0.32).contains(s));
    let u_neg = classify_negligible(&u, &ws, c.class, &g)?;
    let vw_neg = classify_negligible(&v.sub(&w), &ws, c.class, &g)?;
    let wd = w.sub(&delta);
    let wd_neg = classify_negligible(&wd, &ws, c.class, &g)?;
    let edge: Vec<Value> = wd.get(n_max)?.trimmed().iter().filter(|(_, z)| z.norm() > 1e-15).map(|(k, z)| json!({"k": k, "re": z.re, "im": z.im})).collect();
    let pass = in_band && !u_neg.bounded && !vw_neg.bounded;
    let class = match c.class {
        Class::Beurling => "beurling",
        Class::Roumieu => "roumieu",
    };
    Ok(Report {
        json: json!({
            "class": class,
            "weights": ws.label(),
            "sup_norm_u": sup,
            "limit": std::f64::consts::FRAC_1_PI,
            "sup_norm_u_in_band_from_16": in_band,
            "u_negligible": u_neg.to_json(),
            "v_minus_w_negligible": vw_neg.to_json(),
            "w_minus_delta_negligible": wd_neg.to_json(),
            "w_minus_delta_at_nmax": edge,
            "grid": {"h": g.h, "lambda": g.lambda},
            "pass": pass,
        }),
        pass,
        csv: None,
    })
}
