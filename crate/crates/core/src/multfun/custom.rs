//! Text format for prime-power rules.
//!
//! ```text
//! # comment
//! name mobius_like
//! k 1
//! real
//! *  odd  -1 0
//! *  even  1 0
//! ```
//!
//! Rule lines are `p_condition a_condition value_re value_im`; the first line
//! matching `(p, a)` wins and unmatched prime powers map to 0.
//! `p_condition` is `*`, `=N`, `<N`, `<=N`, `>N`, `>=N` or `N..M` (inclusive).
//! `a_condition` is `*`, `N`, `>=N`, `odd` or `even`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PrimeCondition {
    Any,
    Eq(u64),
    Lt(u64),
    Le(u64),
    Gt(u64),
    Ge(u64),
    Range(u64, u64),
}

impl PrimeCondition {
    pub fn matches(&self, p: u64) -> bool {
        match *self {
            Self::Any => true,
            Self::Eq(n) => p == n,
            Self::Lt(n) => p < n,
            Self::Le(n) => p <= n,
            Self::Gt(n) => p > n,
            Self::Ge(n) => p >= n,
            Self::Range(a, b) => a <= p && p <= b,
        }
    }

    /// Whether the condition holds for every sufficiently large prime.
    pub fn holds_eventually(&self) -> bool {
        matches!(self, Self::Any | Self::Gt(_) | Self::Ge(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ExponentCondition {
    Any,
    Eq(u32),
    Ge(u32),
    Odd,
    Even,
}

impl ExponentCondition {
    pub fn matches(&self, a: u32) -> bool {
        match *self {
            Self::Any => true,
            Self::Eq(n) => a == n,
            Self::Ge(n) => a >= n,
            Self::Odd => a % 2 == 1,
            Self::Even => a % 2 == 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RuleLine {
    pub prime: PrimeCondition,
    pub exponent: ExponentCondition,
    pub value: Complex64,
}

/// Parsed contents of a rule file.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleFile {
    pub name: Option<String>,
    pub bound_k: Option<u32>,
    pub real: bool,
    pub lines: Vec<RuleLine>,
}

fn parse_u64(tok: &str, line: usize) -> Result<u64> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected an integer, found {tok:?}"),
    })
}

fn parse_prime_condition(tok: &str, line: usize) -> Result<PrimeCondition> {
    let c = if tok == "*" {
        PrimeCondition::Any
    } else if let Some((a, b)) = tok.split_once("..") {
        PrimeCondition::Range(parse_u64(a, line)?, parse_u64(b, line)?)
    } else if let Some(r) = tok.strip_prefix("<=") {
        PrimeCondition::Le(parse_u64(r, line)?)
    } else if let Some(r) = tok.strip_prefix(">=") {
        PrimeCondition::Ge(parse_u64(r, line)?)
    } else if let Some(r) = tok.strip_prefix('<') {
        PrimeCondition::Lt(parse_u64(r, line)?)
    } else if let Some(r) = tok.strip_prefix('>') {
        PrimeCondition::Gt(parse_u64(r, line)?)
    } else if let Some(r) = tok.strip_prefix('=') {
        PrimeCondition::Eq(parse_u64(r, line)?)
    } else {
        PrimeCondition::Eq(parse_u64(tok, line)?)
    };
    Ok(c)
}

fn parse_exponent_condition(tok: &str, line: usize) -> Result<ExponentCondition> {
    let c = match tok {
        "*" => ExponentCondition::Any,
        "odd" => ExponentCondition::Odd,
        "even" => ExponentCondition::Even,
        _ => {
            let (ge, digits) = match tok.strip_prefix(">=") {
                Some(r) => (true, r),
                None => (false, tok),
            };
            let a = parse_u64(digits, line)?;
            if a == 0 || a > u32::MAX as u64 {
                return Err(Error::Parse {
                    line,
                    msg: "exponent conditions start at 1".to_string(),
                });
            }
            if ge {
                ExponentCondition::Ge(a as u32)
            } else {
                ExponentCondition::Eq(a as u32)
            }
        }
    };
    Ok(c)
}

fn parse_real(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("expected a number, found {tok:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: "rule values must be finite".to_string(),
        });
    }
    Ok(v)
}

/// Parses the rule text format.
pub fn parse(text: &str) -> Result<RuleFile> {
    let mut file = RuleFile {
        name: None,
        bound_k: None,
        real: false,
        lines: Vec::new(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        match toks.as_slice() {
            ["name", n] => file.name = Some((*n).to_string()),
            ["k", k] => {
                let k = parse_u64(k, line)?;
                if k == 0 || k > u32::MAX as u64 {
                    return Err(Error::Parse {
                        line,
                        msg: "k must be a positive 32-bit integer".to_string(),
                    });
                }
                file.bound_k = Some(k as u32);
            }
            ["real"] => file.real = true,
            [p, a, re, im] => file.lines.push(RuleLine {
                prime: parse_prime_condition(p, line)?,
                exponent: parse_exponent_condition(a, line)?,
                value: Complex64::new(parse_real(re, line)?, parse_real(im, line)?),
            }),
            _ => {
                return Err(Error::Parse {
                    line,
                    msg: format!("unrecognised line {content:?}"),
                })
            }
        }
    }
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_directives_and_rules() {
        let f = parse("# demo\nname m\nk 1\nreal\n* odd -1 0\n=2 >=2 0.5 0.25\n10..20 1 3 0 # tail\n").unwrap();
        assert_eq!(f.name.as_deref(), Some("m"));
        assert_eq!(f.bound_k, Some(1));
        assert!(f.real);
        assert_eq!(f.lines.len(), 3);
        assert_eq!(f.lines[1].prime, PrimeCondition::Eq(2));
        assert_eq!(f.lines[1].exponent, ExponentCondition::Ge(2));
        assert!(f.lines[2].prime.matches(13) && !f.lines[2].prime.matches(21));
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse("k 2\n* 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse("* 0 1 0").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse("* 1 inf 0").is_err());
    }

    #[test]
    fn eventual_conditions() {
        assert!(PrimeCondition::Ge(5).holds_eventually());
        assert!(!PrimeCondition::Range(1, 100).holds_eventually());
    }
}
