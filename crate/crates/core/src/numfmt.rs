//! Numeric formatting helpers shared by the CSV writers.

/// Formats `x` with the given number of significant digits.
///
/// Uses plain decimal notation when the exponent is moderate and falls back
/// to scientific notation otherwise, so values round-trip through `parse`
/// at the stated precision. Infinities print as `inf`/`-inf`.
pub fn sig_digits(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if exp < -4 || exp >= digits as i32 + 4 {
        format!("{:.*e}", digits - 1, x)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_trailing_zeros(s)
    }
}

fn trim_trailing_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// Parses a float that may be `inf`/`-inf` as written by [`sig_digits`].
pub fn parse_float(tok: &str) -> Option<f64> {
    match tok.trim() {
        "inf" | "Inf" | "INF" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-Inf" | "-INF" | "-infinity" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}
