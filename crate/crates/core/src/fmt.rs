//! Byte-stable number formatting for artifact files.

/// Significant digits used for every floating-point value written to disk.
pub const SIG_DIGITS: usize = 12;

/// Format `x` with at most `digits` significant digits, in plain decimal
/// notation with trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x.is_infinite() {
            if x > 0.0 { "inf".into() } else { "-inf".into() }
        } else {
            "0".into()
        };
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .unwrap_or(0);
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    let mut s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// [`sig`] at [`SIG_DIGITS`].
pub fn num(x: f64) -> String {
    sig(x, SIG_DIGITS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(-0.0), "0");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(2.0 / 3.0), "0.666666666667");
        assert_eq!(num(26.28), "26.28");
        assert_eq!(num(0.99999999999995), "1");
        assert_eq!(num(1.5e-7), "0.00000015");
        assert_eq!(num(-1.25), "-1.25");
        assert_eq!(num(123456789012345.0), "123456789012345");
    }

    #[test]
    fn twelve_digits_roundtrip_close() {
        for &x in &[0.123456789012345, 7.62e-3, 0.031622776601683794] {
            let y: f64 = num(x).parse().unwrap();
            assert!(((x - y) / x).abs() < 1e-11);
        }
    }
}
