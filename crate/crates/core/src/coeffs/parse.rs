//! Problem-definition files.
//!
//! ```text
//! # Example: logarithmic weights on (-1, 1)
//! name = log-weights
//! param.ap = 0.5
//! interval.b_minus = -1
//! interval.b_plus = 1
//! plus.w = {ap}*x^-1*neglog(x)^{-1-ap}
//! plus.r = 1
//! minus.w = 1*x^-1*neglog(x)^-2
//! minus.r = 1
//! ```
//!
//! Expressions: `term (+ term)*` with `term := NUM | NUM*x^NUM*neglog(x)^NUM | reflect(alpha,beta)`;
//! the factors of a product may appear in any order and may be omitted. `reflect(alpha,beta)` on the
//! minus side means `alpha * (plus-side expression)(beta*|x|)`. `table(x:y, ...)` gives tabulated data.
//! `{expr}` is replaced by a sum/difference of numbers and `param.*` values before parsing.

use std::collections::BTreeMap;

use super::expr::{CoefficientExpr, PowerLogTerm, Tabulated};
use super::problem::ProblemSpec;
use crate::error::{Error, Result};

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Parses a problem file. `overrides` replace or add `param.*` values.
pub fn parse_problem(text: &str, overrides: &BTreeMap<String, f64>) -> Result<ProblemSpec> {
    let mut entries: BTreeMap<String, (usize, usize, String)> = BTreeMap::new();
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        };
        if content.trim().is_empty() {
            continue;
        }
        let eq = content.find('=').ok_or_else(|| perr(line, 1, "expected `key = value`"))?;
        let key = content[..eq].trim().to_string();
        let value_start = eq + 1 + (content[eq + 1..].len() - content[eq + 1..].trim_start().len());
        let value = content[eq + 1..].trim().to_string();
        if key.is_empty() {
            return Err(perr(line, 1, "empty key"));
        }
        if value.is_empty() {
            return Err(perr(line, eq + 2, format!("missing value for `{key}`")));
        }
        if let Some(name) = key.strip_prefix("param.") {
            let v = parse_number(&value).ok_or_else(|| perr(line, value_start + 1, "parameter must be a number"))?;
            params.insert(name.to_string(), v);
            continue;
        }
        const KNOWN: [&str; 7] = ["name", "interval.b_minus", "interval.b_plus", "plus.w", "plus.r", "minus.w", "minus.r"];
        if !KNOWN.contains(&key.as_str()) {
            return Err(perr(line, 1, format!("unknown key `{key}`")));
        }
        if entries.contains_key(&key) {
            return Err(perr(line, 1, format!("duplicate key `{key}`")));
        }
        entries.insert(key, (line, value_start + 1, value));
    }
    for (k, v) in overrides {
        params.insert(k.clone(), *v);
    }
    let get = |k: &str| entries.get(k).ok_or_else(|| perr(0, 0, format!("missing key `{k}`")));
    let name = entries.get("name").map(|e| e.2.clone()).unwrap_or_else(|| "problem".to_string());

    let interval = |k: &str| -> Result<f64> {
        let (line, col, v) = get(k)?;
        let s = substitute(v, &params, *line, *col)?;
        parse_bound(&s).ok_or_else(|| perr(*line, *col, format!("invalid interval bound `{s}`")))
    };
    let b_minus = interval("interval.b_minus")?;
    let b_plus = interval("interval.b_plus")?;

    let expr = |k: &str, base: Option<&CoefficientExpr>| -> Result<CoefficientExpr> {
        let (line, col, v) = get(k)?;
        let s = substitute(v, &params, *line, *col)?;
        parse_expr(&s, base).map_err(|e| match e {
            Error::Parse { col: c, msg, .. } => perr(*line, col + c - 1, msg),
            other => other,
        })
    };
    let w_plus = expr("plus.w", None)?;
    let r_plus = expr("plus.r", None)?;
    let w_minus = expr("minus.w", Some(&w_plus))?;
    let r_minus = expr("minus.r", Some(&r_plus))?;
    ProblemSpec::new(name, b_minus, b_plus, w_plus, r_plus, w_minus, r_minus)
}

fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let ok = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        && s.chars().any(|c| c.is_ascii_digit());
    if ok {
        s.parse::<f64>().ok().filter(|v| v.is_finite())
    } else {
        None
    }
}

fn parse_bound(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        other => parse_number(other),
    }
}

/// Replaces `{a + b - c}` groups by their numeric value.
fn substitute(s: &str, params: &BTreeMap<String, f64>, line: usize, col: usize) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    let mut offset = 0;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| perr(line, col + offset + open, "unclosed `{`"))?
            + open;
        let inner = &rest[open + 1..close];
        let v = eval_linear(inner, params).map_err(|m| perr(line, col + offset + open, m))?;
        out.push_str(&format!("{v:?}"));
        offset += close + 1;
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

fn eval_linear(s: &str, params: &BTreeMap<String, f64>) -> std::result::Result<f64, String> {
    let mut total = 0.0;
    let mut sign = 1.0;
    let mut atom = String::new();
    let flush = |atom: &mut String, sign: f64, total: &mut f64| -> std::result::Result<(), String> {
        let a = atom.trim();
        if a.is_empty() {
            return Err("empty term in placeholder".into());
        }
        let v = match parse_number(a) {
            Some(v) => v,
            None => *params.get(a).ok_or_else(|| format!("unknown parameter `{a}`"))?,
        };
        *total += sign * v;
        atom.clear();
        Ok(())
    };
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let exponent_sign = (c == '-' || c == '+')
            && i > 0
            && matches!(chars[i - 1], 'e' | 'E')
            && atom.trim().chars().next().map_or(false, |f| f.is_ascii_digit() || f == '.');
        if (c == '+' || c == '-') && !exponent_sign {
            if atom.trim().is_empty() {
                if c == '-' {
                    sign = -sign;
                }
            } else {
                flush(&mut atom, sign, &mut total)?;
                sign = if c == '-' { -1.0 } else { 1.0 };
            }
        } else {
            atom.push(c);
        }
        i += 1;
    }
    flush(&mut atom, sign, &mut total)?;
    Ok(total)
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        perr(0, self.pos + 1, msg)
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{}`", c as char)))
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let mut i = self.pos;
        if i < self.s.len() && (self.s[i] == b'-' || self.s[i] == b'+') {
            i += 1;
        }
        while i < self.s.len() && (self.s[i].is_ascii_digit() || self.s[i] == b'.') {
            i += 1;
        }
        if i < self.s.len() && (self.s[i] == b'e' || self.s[i] == b'E') {
            let mut j = i + 1;
            if j < self.s.len() && (self.s[j] == b'-' || self.s[j] == b'+') {
                j += 1;
            }
            if j < self.s.len() && self.s[j].is_ascii_digit() {
                while j < self.s.len() && self.s[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&self.s[start..i]).unwrap_or("");
        match parse_number(text) {
            Some(v) => {
                self.pos = i;
                Ok(v)
            }
            None => Err(self.err("expected a number")),
        }
    }
}

/// Parses one coefficient expression; `base` is the plus-side expression used by `reflect`.
pub fn parse_expr(s: &str, base: Option<&CoefficientExpr>) -> Result<CoefficientExpr> {
    let mut c = Cursor { s: s.as_bytes(), pos: 0 };
    let mut terms: Vec<PowerLogTerm> = Vec::new();
    let mut special: Option<CoefficientExpr> = None;
    loop {
        let start = c.pos;
        if c.keyword("reflect") {
            let base = base.ok_or_else(|| perr(0, start + 1, "reflect() is only allowed on the minus side"))?;
            c.expect(b'(')?;
            let alpha = c.number()?;
            c.expect(b',')?;
            let beta = c.number()?;
            c.expect(b')')?;
            special = Some(CoefficientExpr::reflect(alpha, beta, base.clone()));
        } else if c.keyword("table") {
            c.expect(b'(')?;
            let (mut xs, mut ys) = (Vec::new(), Vec::new());
            loop {
                xs.push(c.number()?);
                c.expect(b':')?;
                ys.push(c.number()?);
                if c.peek() == Some(b',') {
                    c.pos += 1;
                } else {
                    break;
                }
            }
            c.expect(b')')?;
            let table = Tabulated::new(xs, ys).map_err(|e| perr(0, start + 1, e.to_string()))?;
            special = Some(CoefficientExpr::Table { table });
        } else {
            terms.push(parse_product(&mut c)?);
        }
        match c.peek() {
            None => break,
            Some(b'+') => {
                c.pos += 1;
            }
            Some(ch) => return Err(c.err(format!("unexpected `{}`", ch as char))),
        }
    }
    match special {
        Some(e) if terms.is_empty() => Ok(e),
        Some(_) => Err(perr(0, 1, "reflect()/table() cannot be combined with other terms")),
        None => {
            if terms.iter().all(|t| t.power == 0.0 && t.logpower == 0.0) {
                Ok(CoefficientExpr::constant(terms.iter().map(|t| t.scale).sum()))
            } else {
                Ok(CoefficientExpr::sum(terms))
            }
        }
    }
}

fn parse_product(c: &mut Cursor) -> Result<PowerLogTerm> {
    let mut term = PowerLogTerm::constant(1.0);
    loop {
        if c.keyword("neglog") {
            c.expect(b'(')?;
            if !c.keyword("x") {
                return Err(c.err("expected `x`"));
            }
            c.expect(b')')?;
            let p = if c.peek() == Some(b'^') {
                c.pos += 1;
                c.number()?
            } else {
                1.0
            };
            term.logpower += p;
        } else if c.keyword("x") {
            let p = if c.peek() == Some(b'^') {
                c.pos += 1;
                c.number()?
            } else {
                1.0
            };
            term.power += p;
        } else {
            term.scale *= c.number()?;
        }
        if c.peek() == Some(b'*') {
            c.pos += 1;
        } else {
            break;
        }
    }
    Ok(term)
}
