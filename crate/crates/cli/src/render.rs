//! Text, JSON and LaTeX renderers for elements and verification reports.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::ValueEnum;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use rhpwn_core::lie::{AlgebraKind, Element, Generator, JacobiReport, PairReport};
use rhpwn_core::oracle::OracleError;
use rhpwn_core::sandwich::TheoremReport;
use rhpwn_core::scalar::{CScalar, Rational};
use rhpwn_core::testfn::{FnLabel, FnSymbol};
use rhpwn_core::wick::{coeff_json, BracketDecomposition, WNExpr};

use crate::dsl::parse_label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Latex,
}

fn atom_text(g: &Generator) -> String {
    let head = if g.kind == AlgebraKind::Rhpwn { "B" } else { "Bh" };
    let mut s = format!("{head}[{},{}]", g.n, g.k);
    if let Some(label) = &g.label {
        write!(s, "@{label}").unwrap();
    }
    s
}

/// Canonical text form, e.g. `3*B[2,2] - 1/2*B[3,0] + (1+i)*B[0,3]@f`.
pub fn element_text(e: &Element) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (g, c)) in e.terms().enumerate() {
        let (negative, mag) = if c.is_real() && c.re().is_negative() { (true, -c) } else { (false, c.clone()) };
        match (idx, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !mag.is_one() {
            if mag.is_real() {
                write!(out, "{mag}*").unwrap();
            } else {
                write!(out, "({mag})*").unwrap();
            }
        }
        out.push_str(&atom_text(g));
    }
    out
}

fn rational_latex(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        let sign = if r.is_negative() { "-" } else { "" };
        format!("{sign}\\frac{{{}}}{{{}}}", r.numer().abs(), r.denom())
    }
}

fn scalar_latex(c: &CScalar) -> String {
    let (re, im) = (c.re(), c.im());
    let imag = |v: &Rational| -> String {
        if v.is_one() {
            "i".into()
        } else if *v == -Rational::one() {
            "-i".into()
        } else {
            format!("{}i", rational_latex(v))
        }
    };
    match (re.is_zero(), im.is_zero()) {
        (_, true) => rational_latex(re),
        (true, false) => imag(im),
        (false, false) => {
            let im_part = imag(im);
            let joined = if im_part.starts_with('-') { im_part } else { format!("+{im_part}") };
            format!("{}{joined}", rational_latex(re))
        }
    }
}

fn symbol_latex(s: &FnSymbol) -> String {
    if s.conjugated {
        format!("\\bar{{{}}}", s.name)
    } else {
        s.name.clone()
    }
}

fn atom_latex(g: &Generator) -> String {
    let head = if g.kind == AlgebraKind::Rhpwn { "B" } else { "\\hat{B}" };
    let mut s = format!("{head}^{{{}}}_{{{}}}", g.n, g.k);
    match &g.label {
        Some(FnLabel::Formal(symbols)) => {
            let parts: Vec<String> = symbols.iter().map(symbol_latex).collect();
            write!(s, "({})", parts.join(" ")).unwrap();
        }
        Some(FnLabel::Concrete(_)) => s.push_str("(\\varphi)"),
        None => {}
    }
    s
}

pub fn element_latex(e: &Element) -> String {
    if e.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (g, c)) in e.terms().enumerate() {
        let (negative, mag) = if c.is_real() && c.re().is_negative() { (true, -c) } else { (false, c.clone()) };
        match (idx, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        if !mag.is_one() {
            if mag.is_real() {
                write!(out, "{} ", scalar_latex(&mag)).unwrap();
            } else {
                write!(out, "\\left({}\\right) ", scalar_latex(&mag)).unwrap();
            }
        }
        out.push_str(&atom_latex(g));
    }
    out
}

fn label_json(label: &FnLabel) -> Value {
    match label {
        FnLabel::Formal(_) => json!(label.to_string()),
        FnLabel::Concrete(step) => json!({ "step": step.to_records() }),
    }
}

pub fn element_json(e: &Element) -> Value {
    let terms: Vec<Value> = e
        .terms()
        .map(|(g, c)| {
            let mut t = json!({ "n": g.n, "k": g.k, "coeff": coeff_json(c) });
            if let Some(label) = &g.label {
                t["label"] = label_json(label);
            }
            t
        })
        .collect();
    json!({ "kind": e.kind().name(), "terms": terms })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed element JSON: {0}")]
pub struct JsonError(pub String);

fn bad(msg: impl Into<String>) -> JsonError {
    JsonError(msg.into())
}

fn big_from_json(v: &Value) -> Result<BigInt, JsonError> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from).ok_or_else(|| bad("non-integer number")),
        Value::String(s) => BigInt::from_str(s).map_err(|_| bad(format!("bad integer {s:?}"))),
        _ => Err(bad("expected an integer")),
    }
}

fn coeff_from_json(v: &Value) -> Result<CScalar, JsonError> {
    let parts = v.as_array().filter(|a| a.len() == 4).ok_or_else(|| bad("coeff must have 4 entries"))?;
    let p: Vec<BigInt> = parts.iter().map(big_from_json).collect::<Result<_, _>>()?;
    if p[1].is_zero() || p[3].is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(CScalar::new(Rational::new(p[0].clone(), p[1].clone()), Rational::new(p[2].clone(), p[3].clone())))
}

/// Inverse of [`element_json`] for formal labels.
pub fn element_from_json(v: &Value) -> Result<Element, JsonError> {
    let kind_name = v["kind"].as_str().ok_or_else(|| bad("missing kind"))?;
    let kind = AlgebraKind::from_name(kind_name).ok_or_else(|| bad(format!("unknown kind {kind_name:?}")))?;
    let terms = v["terms"].as_array().ok_or_else(|| bad("missing terms"))?;
    let mut out = Element::zero(kind);
    for t in terms {
        let n = t["n"].as_i64().ok_or_else(|| bad("missing n"))?;
        let k = t["k"].as_i64().ok_or_else(|| bad("missing k"))?;
        let c = coeff_from_json(&t["coeff"])?;
        let mut g = Generator::relaxed(kind, n, k);
        match &t["label"] {
            Value::Null => {}
            Value::String(s) => g = g.with_label(parse_label(s).map_err(|e| bad(e.to_string()))?),
            _ => return Err(bad("only formal labels can be read back")),
        }
        out = out.add(&Element::term(c, g)).map_err(|e| bad(e.to_string()))?;
    }
    Ok(out)
}

pub fn element(e: &Element, fmt: Format) -> String {
    match fmt {
        Format::Text => element_text(e),
        Format::Json => element_json(e).to_string(),
        Format::Latex => element_latex(e),
    }
}

fn generator_pair_text(a: &Generator, b: &Generator) -> String {
    format!("[{}, {}]", atom_text(a), atom_text(b))
}

pub fn jacobi(r: &JacobiReport, fmt: Format) -> String {
    let mode = match r.sample_seed {
        Some(seed) => format!("sampled, seed {seed}"),
        None => "exhaustive".into(),
    };
    match fmt {
        Format::Json => json!({
            "check": "jacobi",
            "kind": r.kind.name(),
            "n_range": r.n_range.to_string(),
            "k_range": r.k_range.to_string(),
            "generators": r.generators,
            "triples": r.triples,
            "sample_seed": r.sample_seed,
            "pass": r.pass(),
            "failures": r.failures.iter().map(|f| json!({
                "triple": f.triple.iter().map(atom_text).collect::<Vec<_>>(),
                "defect": element_json(&f.defect),
            })).collect::<Vec<_>>(),
        })
        .to_string(),
        Format::Text | Format::Latex => {
            let mut s = format!(
                "jacobi {} n={} k={}: {} generators, {} triples ({mode}), {} failures: {}",
                r.kind,
                r.n_range,
                r.k_range,
                r.generators,
                r.triples,
                r.failures.len(),
                verdict(r.pass())
            );
            for f in &r.failures {
                let names: Vec<String> = f.triple.iter().map(atom_text).collect();
                let defect = if fmt == Format::Latex { element_latex(&f.defect) } else { element_text(&f.defect) };
                write!(s, "\n  ({}) defect {defect}", names.join(", ")).unwrap();
            }
            s
        }
    }
}

pub fn pairs(check: &str, r: &PairReport, fmt: Format) -> String {
    match fmt {
        Format::Json => json!({
            "check": check,
            "kind": r.kind.name(),
            "n_range": r.n_range.to_string(),
            "k_range": r.k_range.to_string(),
            "generators": r.generators,
            "pairs": r.pairs,
            "pass": r.pass(),
            "failures": r.failures.iter().map(|(a, b, e)| json!({
                "pair": [atom_text(a), atom_text(b)],
                "result": element_json(e),
            })).collect::<Vec<_>>(),
        })
        .to_string(),
        Format::Text | Format::Latex => {
            let mut s = format!(
                "{check} {} n={} k={}: {} generators, {} pairs, {} failures: {}",
                r.kind,
                r.n_range,
                r.k_range,
                r.generators,
                r.pairs,
                r.failures.len(),
                verdict(r.pass())
            );
            for (a, b, e) in &r.failures {
                let res = if fmt == Format::Latex { element_latex(e) } else { element_text(e) };
                write!(s, "\n  {} -> {res}", generator_pair_text(a, b)).unwrap();
            }
            s
        }
    }
}

pub fn theorem_grid(reports: &[TheoremReport], fmt: Format) -> String {
    let failures: Vec<&TheoremReport> = reports.iter().filter(|r| !r.pass).collect();
    let dropped: usize = reports.iter().map(|r| r.dropped_singular_count).sum();
    let pass = failures.is_empty();
    match fmt {
        Format::Json => json!({
            "check": "verify-w",
            "tuples": reports.len(),
            "pass": pass,
            "dropped_singular_terms": dropped,
            "results": reports.iter().map(TheoremReport::to_json).collect::<Vec<_>>(),
        })
        .to_string(),
        Format::Text => {
            let mut s = String::new();
            for r in reports {
                writeln!(
                    s,
                    "[Bh[{},{}], Bh[{},{}]] = {}*Bh[{},{}]  L0-residual {}  dropped {}  {}",
                    r.n,
                    r.k,
                    r.big_n,
                    r.big_k,
                    r.expected_coeff,
                    r.n + r.big_n - 2,
                    r.k + r.big_k,
                    r.l0_residual.len(),
                    r.dropped_singular_count,
                    verdict(r.pass)
                )
                .unwrap();
            }
            write!(s, "verify-w: {} tuples, {} failures: {}", reports.len(), failures.len(), verdict(pass)).unwrap();
            s
        }
        Format::Latex => {
            let mut s = String::from("\\begin{align*}\n");
            for r in reports {
                writeln!(
                    s,
                    "[\\hat{{B}}^{{{}}}_{{{}}}(g), \\hat{{B}}^{{{}}}_{{{}}}(f)] &= {} \\, \\hat{{B}}^{{{}}}_{{{}}}(gf) \\\\",
                    r.n,
                    r.k,
                    r.big_n,
                    r.big_k,
                    r.expected_coeff,
                    r.n + r.big_n - 2,
                    r.k + r.big_k
                )
                .unwrap();
            }
            write!(s, "\\end{{align*}}\n% {} tuples, {} failures: {}", reports.len(), failures.len(), verdict(pass))
                .unwrap();
            s
        }
    }
}

/// Rows are `(L, n, k, N, K, θ)`.
pub fn theta_table(rows: &[(i64, i64, i64, i64, i64, BigInt)], fmt: Format) -> String {
    match fmt {
        Format::Json => Value::Array(
            rows.iter()
                .map(|(l, n, k, nn, kk, v)| json!({"L": l, "n": n, "k": k, "N": nn, "K": kk, "theta": v.to_string()}))
                .collect(),
        )
        .to_string(),
        Format::Text => rows
            .iter()
            .map(|(l, n, k, nn, kk, v)| format!("theta_{l}({n},{k};{nn},{kk}) = {v}"))
            .collect::<Vec<_>>()
            .join("\n"),
        Format::Latex => rows
            .iter()
            .map(|(l, n, k, nn, kk, v)| format!("\\theta_{{{l}}}({n},{k};{nn},{kk}) = {v}"))
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

pub fn wick_expr(e: &WNExpr, fmt: Format) -> String {
    match fmt {
        Format::Json => e.to_json().to_string(),
        Format::Text => e.to_string(),
        Format::Latex => {
            if e.is_zero() {
                return "0".into();
            }
            e.terms()
                .map(|(w, c)| {
                    let word = w.to_string().replace('·', " ").replace('†', "^\\dagger").replace('δ', "\\delta");
                    format!("\\left({}\\right) {word}", scalar_latex(c))
                })
                .collect::<Vec<_>>()
                .join(" + ")
        }
    }
}

pub fn decomposition(d: &BracketDecomposition, fmt: Format) -> String {
    match fmt {
        Format::Json => d.to_json().to_string(),
        Format::Text | Format::Latex => {
            let (rn, rk) = d.regular_index;
            let mut s = if fmt == Format::Latex {
                format!("\\text{{regular: }} {} \\, B^{{{rn}}}_{{{rk}}}", d.regular_coeff)
            } else {
                format!("regular: {}*B[{rn},{rk}]@{}", d.regular_coeff, d.regular_testfn)
            };
            for t in &d.singular_terms {
                let pp = match &t.point_product {
                    Some(v) => v.to_string(),
                    None => "g(0)f(0)".into(),
                };
                write!(
                    s,
                    "\nsingular L={}: theta={} * ({pp}) * b0^+^{} b0^{}",
                    t.order, t.theta, t.creators, t.annihilators
                )
                .unwrap();
            }
            write!(s, "\nsingular part vanishes: {}", if d.singular_vanishes() { "yes" } else { "no" }).unwrap();
            s
        }
    }
}

/// Rows are `(label, result)` for every oracle check.
pub fn oracle(rows: &[(String, Result<bool, OracleError>)], fmt: Format) -> String {
    let pass = rows.iter().all(|(_, r)| matches!(r, Ok(true)));
    let status = |r: &Result<bool, OracleError>| match r {
        Ok(true) => "PASS".to_string(),
        Ok(false) => "FAIL".to_string(),
        Err(e) => format!("ERROR ({e})"),
    };
    match fmt {
        Format::Json => json!({
            "check": "oracle",
            "pass": pass,
            "results": rows.iter().map(|(name, r)| json!({
                "check": name,
                "pass": matches!(r, Ok(true)),
                "error": r.as_ref().err().map(ToString::to_string),
            })).collect::<Vec<_>>(),
        })
        .to_string(),
        Format::Text | Format::Latex => {
            let mut s: String = rows.iter().map(|(name, r)| format!("{name}: {}\n", status(r))).collect();
            write!(s, "oracle: {} checks: {}", rows.len(), verdict(pass)).unwrap();
            s
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{eval_element, parse_element, Options};

    fn el(s: &str) -> Element {
        eval_element(s, Options::default()).unwrap()
    }

    #[test]
    fn text_forms() {
        assert_eq!(element_text(&el("[B[1,2],B[2,1]]")), "3*B[2,2]");
        assert_eq!(element_text(&el("[B[2,1],B[1,2]]")), "-3*B[2,2]");
        assert_eq!(element_text(&el("-B[3,0] + B[0,3]/2")), "1/2*B[0,3] - B[3,0]");
        assert_eq!(element_text(&el("(1/2+3/4*i)*Bh[2,-1]")), "(1/2+3/4*i)*Bh[2,-1]");
        assert_eq!(element_text(&el("-i*B[3,0]@f.g~")), "(-i)*B[3,0]@f.g~");
        assert_eq!(element_text(&Element::zero(AlgebraKind::Rhpwn)), "0");
    }

    #[test]
    fn json_forms() {
        let zero = Element::zero(AlgebraKind::Rhpwn);
        assert_eq!(element(&zero, Format::Json), r#"{"kind":"RHPWN","terms":[]}"#);
        let e = el("3*B[2,2]@f - i/7*B[0,5]");
        assert_eq!(element_from_json(&element_json(&e)).unwrap(), e);
        assert!(element_from_json(&json!({"kind": "nope", "terms": []})).is_err());
    }

    #[test]
    fn text_round_trip() {
        for s in ["3*B[2,2] - 1/2*B[0,3]@f~", "(2-i)*Bh[4,-3] + Bh[2,0]", "0"] {
            let kind = if s.contains("Bh") { AlgebraKind::Winfinity } else { AlgebraKind::Rhpwn };
            let e = parse_element(s, kind, false).unwrap();
            assert_eq!(parse_element(&element_text(&e), kind, false).unwrap(), e);
        }
    }

    #[test]
    fn latex_forms() {
        assert_eq!(element_latex(&el("3*B[2,2]")), "3 B^{2}_{2}");
        assert_eq!(element_latex(&el("-Bh[2,-3]/2")), "-\\frac{1}{2} \\hat{B}^{2}_{-3}");
        assert_eq!(element_latex(&el("(1-i)*B[3,0]@f~")), "\\left(1-i\\right) B^{3}_{0}(\\bar{f})");
    }
}
