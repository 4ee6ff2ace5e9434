//! Parsing of command-line literals: complex numbers such as `1.5-0.2i`,
//! rationals such as `-1/3`, and comma-separated tuples of either.

use num_complex::Complex64;

use crate::error::{Result, ThetaError};
use crate::torus::{CVec2, RealCharacteristic, SiegelMatrix};

fn invalid(what: &str, s: &str) -> ThetaError {
    ThetaError::InvalidInput(format!("cannot parse {what} from {s:?}"))
}

/// A real number, optionally written as a fraction `p/q`.
pub fn parse_real(s: &str) -> Result<f64> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| invalid("a fraction", s))?;
            let q: f64 = q.trim().parse().map_err(|_| invalid("a fraction", s))?;
            if q == 0.0 {
                return Err(invalid("a fraction", s));
            }
            p / q
        }
        None => s.parse().map_err(|_| invalid("a real number", s))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid("a finite real number", s))
    }
}

/// Complex literals `a`, `bi`, `i`, `-i`, `a+bi`, `a-i`, with exponents allowed
/// in either part.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(invalid("a complex number", s));
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(&t).map_err(|_| invalid("a complex number", s))?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| invalid("a complex number", s))?,
    };
    let re = if re.is_empty() {
        0.0
    } else {
        re.parse::<f64>().map_err(|_| invalid("a complex number", s))?
    };
    let z = Complex64::new(re, im);
    if z.is_finite() {
        Ok(z)
    } else {
        Err(invalid("a finite complex number", s))
    }
}

fn fields<'a>(s: &'a str, n: usize, what: &str) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(ThetaError::InvalidInput(format!(
            "expected {n} comma-separated entries for {what}, got {} in {s:?}",
            parts.len()
        )));
    }
    Ok(parts)
}

/// `z11,z12,z22` as complex literals.
pub fn parse_siegel(s: &str) -> Result<SiegelMatrix> {
    let p = fields(s, 3, "Z")?;
    SiegelMatrix::new(parse_complex(p[0])?, parse_complex(p[1])?, parse_complex(p[2])?)
}

/// `v1,v2` as complex literals.
pub fn parse_cvec2(s: &str) -> Result<CVec2> {
    let p = fields(s, 2, "v")?;
    Ok(CVec2::new(parse_complex(p[0])?, parse_complex(p[1])?))
}

/// `c1a,c1b,c2a,c2b` as reals or fractions.
pub fn parse_characteristic(s: &str) -> Result<RealCharacteristic> {
    let p = fields(s, 4, "the characteristic")?;
    let r: Vec<f64> = p.iter().map(|x| parse_real(x)).collect::<Result<_>>()?;
    Ok(RealCharacteristic::new([r[0], r[1]], [r[2], r[3]]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        let cases = [
            ("i", c(0., 1.)),
            ("-i", c(0., -1.)),
            ("+i", c(0., 1.)),
            ("2i", c(0., 2.)),
            ("0.5", c(0.5, 0.)),
            ("-3", c(-3., 0.)),
            ("1+i", c(1., 1.)),
            ("1-i", c(1., -1.)),
            ("0.1+1.2i", c(0.1, 1.2)),
            ("-0.25-0.5i", c(-0.25, -0.5)),
            ("1e-3+2e+1i", c(1e-3, 20.)),
            ("1E-3-2.5e-2i", c(1e-3, -0.025)),
            (" 0.2 + 0.3i ", c(0.2, 0.3)),
        ];
        for (s, want) in cases {
            assert_eq!(parse_complex(s).unwrap(), want, "{s}");
        }
    }

    #[test]
    fn malformed_literals() {
        for s in ["", "x", "1+", "i1", "1+2j", "1++i", "nan", "inf", "1/0"] {
            assert!(parse_complex(s).is_err(), "{s}");
        }
    }

    #[test]
    fn fractions() {
        assert_eq!(parse_real("1/2").unwrap(), 0.5);
        assert_eq!(parse_real("-1/3").unwrap(), -1.0 / 3.0);
        assert!(parse_real("1/0").is_err());
    }

    #[test]
    fn tuples() {
        let z = parse_siegel("i,0,i").unwrap();
        assert!(z.is_diagonal());
        assert!(parse_siegel("i,0").is_err());
        assert!(matches!(parse_siegel("i,0,-i"), Err(ThetaError::NotPositiveDefinite { .. })));
        let ch = parse_characteristic("0,1/2,1/2,0").unwrap();
        assert_eq!(ch, RealCharacteristic::new([0., 0.5], [0.5, 0.]));
        assert_eq!(parse_cvec2("0.1+0.2i,-i").unwrap(), CVec2::new(c(0.1, 0.2), c(0., -1.)));
    }
}
