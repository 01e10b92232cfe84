//! Tokenizer for covector and form-field literals such as
//! `"2.0 dx1^dx2 - 1/2 sin@3 dx3^dx4"`.

use crate::error::{Error, Result};
use crate::number::Scalar;

/// One parsed term: `sign · number · tag · basis`, each part optional.
#[derive(Debug, Clone, PartialEq)]
pub struct LiteralTerm {
    pub coefficient: f64,
    pub tag: Option<String>,
    /// 1-based indices in the order written (not yet sorted).
    pub basis: Option<Vec<usize>>,
}

fn is_separator_minus(prev: Option<char>, prev2: Option<char>) -> bool {
    match prev {
        None => true,
        Some(c) if c.is_whitespace() => true,
        // exponent of a float literal: `1e-5`
        Some('e') | Some('E') => !matches!(prev2, Some(d) if d.is_ascii_digit() || d == '.'),
        Some(':') | Some('/') | Some('*') => false,
        Some(_) => true,
    }
}

fn split_tokens(s: &str) -> Vec<String> {
    let mut spaced = String::with_capacity(s.len() + 8);
    let chars: Vec<char> = s.chars().collect();
    for (i, &c) in chars.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| chars[j]);
        let prev2 = i.checked_sub(2).map(|j| chars[j]);
        match c {
            '−' => spaced.push_str(" - "),
            '+' if !matches!(prev, Some('e') | Some('E')) => spaced.push_str(" + "),
            '-' if is_separator_minus(prev, prev2) => spaced.push_str(" - "),
            _ => spaced.push(c),
        }
    }
    spaced.split_whitespace().map(str::to_owned).collect()
}

fn parse_basis(tok: &str) -> Result<Vec<usize>> {
    tok.split(['^', '∧'])
        .map(|part| {
            part.strip_prefix("dx")
                .and_then(|d| d.parse::<usize>().ok())
                .filter(|&i| i >= 1)
                .ok_or_else(|| Error::Parse(format!("bad basis factor {part:?} in {tok:?}")))
        })
        .collect()
}

#[derive(Default)]
struct Pending {
    sign: f64,
    number: Option<f64>,
    tag: Option<String>,
    basis: Option<Vec<usize>>,
    touched: bool,
}

impl Pending {
    fn new(sign: f64) -> Self {
        Pending { sign, ..Default::default() }
    }

    fn finish(self) -> LiteralTerm {
        LiteralTerm {
            coefficient: self.sign * self.number.unwrap_or(1.0),
            tag: self.tag,
            basis: self.basis,
        }
    }
}

/// Split a literal into terms. Terms are separated by `+`/`-`/`−`; within a
/// term the order is `[number] [tag] [basis]`.
pub fn parse_terms(s: &str) -> Result<Vec<LiteralTerm>> {
    let mut out = Vec::new();
    let mut cur = Pending::new(1.0);
    let mut expect_term = false;
    for tok in split_tokens(s) {
        match tok.as_str() {
            "+" | "-" => {
                if cur.touched {
                    out.push(std::mem::replace(&mut cur, Pending::new(1.0)).finish());
                } else if expect_term {
                    return Err(Error::Parse(format!("dangling sign in {s:?}")));
                }
                let sign = if tok == "-" { -1.0 } else { 1.0 };
                cur.sign *= sign;
                expect_term = true;
                continue;
            }
            _ => {}
        }
        expect_term = false;
        if tok.starts_with("dx") {
            if cur.basis.is_some() {
                out.push(std::mem::replace(&mut cur, Pending::new(1.0)).finish());
            }
            cur.basis = Some(parse_basis(&tok)?);
        } else if tok.contains('@') || tok == "const" {
            if cur.basis.is_some() || cur.tag.is_some() {
                out.push(std::mem::replace(&mut cur, Pending::new(1.0)).finish());
            }
            cur.tag = Some(tok);
        } else {
            let x: Scalar = tok.parse()?;
            if cur.number.is_some() || cur.tag.is_some() || cur.basis.is_some() {
                out.push(std::mem::replace(&mut cur, Pending::new(1.0)).finish());
            }
            cur.number = Some(x.value());
        }
        cur.touched = true;
    }
    if expect_term {
        return Err(Error::Parse(format!("trailing sign in {s:?}")));
    }
    if cur.touched {
        out.push(cur.finish());
    }
    if out.is_empty() {
        return Err(Error::Parse("empty literal".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splits_signed_terms() {
        let t = parse_terms("2.0 dx1^dx2 + 1.0 dx3^dx4").unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].coefficient, 2.0);
        assert_eq!(t[1].basis, Some(vec![3, 4]));

        let t = parse_terms("dx1^dx2 − dx3^dx4").unwrap();
        assert_eq!(t[1].coefficient, -1.0);

        let t = parse_terms("dx1^dx2-dx3^dx4").unwrap();
        assert_eq!(t[1].coefficient, -1.0);

        let t = parse_terms("-1e-3 dx2 - 1/2 sin@3 dx1").unwrap();
        assert_eq!(t[0].coefficient, -1e-3);
        assert_eq!(t[1].coefficient, -0.5);
        assert_eq!(t[1].tag.as_deref(), Some("sin@3"));
    }

    #[test]
    fn scalar_terms_have_no_basis() {
        let t = parse_terms("3").unwrap();
        assert_eq!(t, vec![LiteralTerm { coefficient: 3.0, tag: None, basis: None }]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_terms("").is_err());
        assert!(parse_terms("2 dy1").is_err());
        assert!(parse_terms("dx1 +").is_err());
        assert!(parse_terms("dx0").is_err());
    }
}
