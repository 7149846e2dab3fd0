//! Hexadecimal floating-point notation (`0x1.8p+1`), exact in both directions.

use std::fmt::Write;

/// Formats `x` in C99 `%a` style with trailing zero nibbles trimmed.
pub fn format(x: f64) -> String {
    assert!(x.is_finite(), "hex formatting of non-finite value");
    let bits = x.to_bits();
    let mut out = String::new();
    if bits >> 63 == 1 {
        out.push('-');
    }
    let exp_field = ((bits >> 52) & 0x7ff) as i32;
    let mut mantissa = bits & ((1u64 << 52) - 1);
    if exp_field == 0 && mantissa == 0 {
        out.push_str("0x0p+0");
        return out;
    }
    let (lead, exp) = if exp_field == 0 { (0, -1022) } else { (1, exp_field - 1023) };
    write!(out, "0x{lead}").unwrap();
    if mantissa != 0 {
        let mut digits = 13;
        while mantissa & 0xf == 0 {
            mantissa >>= 4;
            digits -= 1;
        }
        write!(out, ".{mantissa:0digits$x}").unwrap();
    }
    write!(out, "p{exp:+}").unwrap();
    out
}

/// Parses the output of [`format`]; returns `None` on malformed input or
/// when the value is not exactly representable.
pub fn parse(s: &str) -> Option<f64> {
    let (negative, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let rest = rest.strip_prefix("0x")?;
    let (mant, exp) = rest.split_once('p')?;
    let exp: i32 = exp.parse().ok()?;
    let (int_part, frac) = match mant.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mant, ""),
    };
    if frac.len() > 13 || int_part.len() != 1 {
        return None;
    }
    let lead = u64::from_str_radix(int_part, 16).ok()?;
    if lead > 1 {
        return None;
    }
    let frac_bits = if frac.is_empty() {
        0
    } else {
        u64::from_str_radix(frac, 16).ok()? << (4 * (13 - frac.len()))
    };
    let bits = match (lead, exp) {
        (0, _) if frac_bits == 0 => 0,
        (0, -1022) => frac_bits,
        (0, _) => return None,
        (_, e) if (-1022..=1023).contains(&e) => (((e + 1023) as u64) << 52) | frac_bits,
        _ => return None,
    };
    let value = f64::from_bits(bits);
    Some(if negative { -value } else { value })
}
