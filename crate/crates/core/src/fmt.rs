//! Number formatting shared by the CSV exporters.

/// Formats `v` with `digits` significant digits in the style of C's `%g`:
/// fixed notation for decimal exponents in `[-5, digits)`, scientific
/// otherwise, trailing zeros trimmed.
pub fn format_sig(v: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { "-" } else { "+" };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, v)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::format_sig;

    #[test]
    fn matches_printf_g() {
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(1.0, 9), "1");
        assert_eq!(format_sig(0.4, 12), "0.4");
        assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_sig(-2.5e-7, 9), "-2.5e-07");
        assert_eq!(format_sig(123456789012.0, 9), "1.23456789e+11");
        assert_eq!(format_sig(99999.99999, 9), "100000");
        assert_eq!(format_sig(4.605170185988092, 12), "4.60517018599");
    }
}
