//! Locale-independent number formatting for tables, in the style of C's `%.{digits}g`.

/// Significant digits used in every CSV table.
pub const CSV_DIGITS: usize = 12;

/// Format `x` with `digits` significant digits, trailing zeros removed. Fixed notation is used
/// for decimal exponents in `[-4, digits)`, scientific (`1.5e-07`) otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

/// [`format_sig`] at [`CSV_DIGITS`].
pub fn sig12(x: f64) -> String {
    format_sig(x, CSV_DIGITS)
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
