//! Complex-number parsing for CLI flags: `a+bi`, `2i`, `i`, `-0.5i`,
//! plain reals, and the literal `exp(i*pi/3)` for the hexagonal modulus.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::str::FromStr;

/// A complex CLI argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_complex(s).map(ComplexArg)
    }
}

pub fn parse_complex(input: &str) -> Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    if s == "exp(i*pi/3)" || s == "exp(pi*i/3)" {
        return Ok(Complex64::from_polar(1.0, PI / 3.0));
    }
    // Split at the last top-level + or - that is not an exponent sign
    // and not the leading sign.
    let bytes = s.as_bytes();
    let mut split = None;
    for idx in (1..bytes.len()).rev() {
        let c = bytes[idx] as char;
        if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
            split = Some(idx);
            break;
        }
    }
    let (first, second) = match split {
        Some(idx) => (&s[..idx], &s[idx..]),
        None => (&s[..], ""),
    };
    if second.is_empty() {
        // Single term: pure real or pure imaginary.
        return parse_term(first);
    }
    let a = parse_term(first)?;
    let b = parse_term(second)?;
    if a.im != 0.0 && b.im != 0.0 {
        return Err(format!("two imaginary terms in '{input}'"));
    }
    Ok(a + b)
}

fn parse_term(term: &str) -> Result<Complex64, String> {
    if let Some(stripped) = term.strip_suffix(['i', 'I']) {
        let coeff = match stripped {
            "" | "+" => 1.0,
            "-" => -1.0,
            other => {
                f64::from_str(other).map_err(|e| format!("bad imaginary part '{term}': {e}"))?
            }
        };
        Ok(Complex64::new(0.0, coeff))
    } else {
        f64::from_str(term)
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|e| format!("bad real part '{term}': {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("i").unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(
            parse_complex("0.5-0.25i").unwrap(),
            Complex64::new(0.5, -0.25)
        );
        assert_eq!(parse_complex("3.5").unwrap(), Complex64::new(3.5, 0.0));
        assert_eq!(
            parse_complex("-2.5+0.9i").unwrap(),
            Complex64::new(-2.5, 0.9)
        );
        assert_eq!(
            parse_complex("1e-3+2e-4i").unwrap(),
            Complex64::new(1e-3, 2e-4)
        );
        assert_eq!(
            parse_complex(" 0.4 + 0.9i ").unwrap(),
            Complex64::new(0.4, 0.9)
        );
    }

    #[test]
    fn hexagonal_literal_is_exact() {
        let tau = parse_complex("exp(i*pi/3)").unwrap();
        assert_eq!(tau, Complex64::from_polar(1.0, PI / 3.0));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_complex("").is_err());
        assert!(parse_complex("2i+3i").is_err());
        assert!(parse_complex("abc").is_err());
    }
}
