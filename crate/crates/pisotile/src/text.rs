//! Small deterministic parsers and formatters used by the CLI and fuzz
//! targets: rationals as "P/Q", digit words as comma-separated integers,
//! and significant-digit decimal rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::qfield::{PisotQuad, QuadElem, Rational};

const MAX_NUMERIC_LEN: usize = 4096;

/// Parses "P/Q" or "P" into a reduced rational with positive denominator.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    if s.len() > MAX_NUMERIC_LEN {
        return Err(Error::Parse("rational literal too long".into()));
    }
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let num: BigInt = num_str
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer {num_str:?}")))?;
    let den: BigInt = match den_str {
        Some(d) => d.parse().map_err(|_| Error::Parse(format!("bad integer {d:?}")))?,
        None => BigInt::from(1),
    };
    if den.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Rational::new(num, den))
}

/// Formats a rational as "P/Q", or "P" when integral.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses a comma-separated digit word, e.g. "10,2,0". Whitespace around
/// digits is tolerated; the empty string is the empty word.
pub fn parse_digit_word(s: &str) -> Result<Vec<i64>, Error> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.len() > MAX_NUMERIC_LEN {
        return Err(Error::Parse("digit word too long".into()));
    }
    s.split(',')
        .map(|part| {
            let part = part.trim();
            part.parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad digit {part:?}")))
        })
        .collect()
}

pub fn format_digit_word(w: &[i64]) -> String {
    w.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
}

/// Decimal rendering with a fixed number of significant digits, by exact
/// scaling of a rational. Deterministic, round-half-away-from-zero.
pub fn format_sig(r: &Rational, sig: u32) -> String {
    if r.is_zero() {
        return "0".into();
    }
    let neg = r.is_negative();
    let abs = r.abs();
    // find exponent e with 10^e <= abs < 10^{e+1}
    let ten = BigInt::from(10);
    let mut e: i64 = 0;
    let one = Rational::from_integer(BigInt::from(1));
    let mut scaled = abs.clone();
    while scaled >= Rational::from_integer(ten.clone()) {
        scaled = scaled / Rational::from_integer(ten.clone());
        e += 1;
    }
    while scaled < one {
        scaled = scaled * Rational::from_integer(ten.clone());
        e -= 1;
    }
    // round abs * 10^(sig-1-e) to an integer
    let shift = sig as i64 - 1 - e;
    let factor = Rational::from_integer(ten.pow(shift.unsigned_abs() as u32));
    let scaled_val = if shift >= 0 { &abs * &factor } else { &abs / &factor };
    let half = Rational::new(BigInt::from(1), BigInt::from(2));
    let rounded = (scaled_val + half).floor().to_integer();
    let digits = rounded.to_string();
    // digits has sig digits (or sig+1 after a carry like 999.95 -> 1000)
    let e = e + (digits.len() as i64 - sig as i64);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if e >= 0 && e < 15 {
        let int_len = (e + 1) as usize;
        if int_len >= digits.len() {
            out.push_str(&digits);
            for _ in 0..(int_len - digits.len()) {
                out.push('0');
            }
        } else {
            out.push_str(&digits[..int_len]);
            let frac = digits[int_len..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else if e < 0 && e > -5 {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(digits.trim_end_matches('0'));
    } else {
        // scientific
        let mantissa = digits.trim_end_matches('0');
        out.push_str(&mantissa[..1]);
        if mantissa.len() > 1 {
            out.push('.');
            out.push_str(&mantissa[1..]);
        }
        out.push('e');
        out.push_str(&e.to_string());
    }
    out
}

/// Renders an element in the sqrt(d) form "(P + Q*sqrt(d))/R" with a common
/// integer denominator, eliding trivial parts: "0", "7/12", "(7 - sqrt(7))/12".
pub fn format_sqrt_form(x: &QuadElem, ctx: &PisotQuad) -> String {
    let (p, q) = x.sqrt_coords(ctx.sqrt_scale());
    if q.is_zero() {
        return format_rational(&p);
    }
    let denom = p.denom().lcm(q.denom());
    let pn = (&p * Rational::from_integer(denom.clone())).to_integer();
    let qn = (&q * Rational::from_integer(denom.clone())).to_integer();
    let d = ctx.d();
    let sqrt_term = |coef: &BigInt| -> String {
        let a = coef.abs();
        if a == BigInt::from(1) {
            format!("sqrt({d})")
        } else {
            format!("{a}*sqrt({d})")
        }
    };
    let core = if pn.is_zero() {
        if qn.is_negative() {
            format!("-{}", sqrt_term(&qn))
        } else {
            sqrt_term(&qn)
        }
    } else {
        let sign = if qn.is_negative() { '-' } else { '+' };
        format!("{} {} {}", pn, sign, sqrt_term(&qn))
    };
    if denom == BigInt::from(1) {
        if pn.is_zero() {
            core
        } else {
            format!("({core})")
        }
    } else {
        format!("({core})/{denom}")
    }
}

/// Renders an element in basis coordinates "(U + V*B)/R".
pub fn format_basis_form(x: &QuadElem) -> String {
    let u = x.u();
    let v = x.v();
    if v.is_zero() {
        return format_rational(u);
    }
    let denom = u.denom().lcm(v.denom());
    let un = (u * Rational::from_integer(denom.clone())).to_integer();
    let vn = (v * Rational::from_integer(denom.clone())).to_integer();
    let sign = if vn.is_negative() { '-' } else { '+' };
    let vabs = vn.abs();
    let core = format!("{un} {sign} {vabs}*B");
    if denom == BigInt::from(1) {
        format!("({core})")
    } else {
        format!("({core})/{denom}")
    }
}
