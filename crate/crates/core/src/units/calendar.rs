//! Calendar rendering for the `Time` point kind (seconds since the Unix epoch).

use chrono::DateTime;

use crate::decimal::Decimal;

/// `YYYY-MM-DD hh:mm:ss[.fff]` in UTC, or `None` when out of range.
pub fn format_time(seconds: &Decimal) -> Option<String> {
    let whole = seconds.to_rational().floor();
    let frac = &seconds.to_rational() - &whole;
    let secs: i64 = num_traits::ToPrimitive::to_i64(whole.numer())?;
    let dt = DateTime::from_timestamp(secs, 0)?;
    let mut s = dt.format("%Y-%m-%d %H:%M:%S").to_string();
    if !num_traits::Zero::is_zero(&frac) {
        let f = Decimal::from_rational(&frac).to_string();
        s.push_str(f.trim_start_matches('0'));
    }
    Some(s)
}

/// Renders a time interval in seconds as `1y 1d 2h 4m 0s`-style components
/// using 365-day years.
pub fn format_interval(seconds: &Decimal) -> String {
    let Some(total) = seconds.to_i64() else {
        return format!("{seconds} s");
    };
    let sign = if total < 0 { "-" } else { "" };
    let mut rest = total.unsigned_abs();
    let mut parts = Vec::new();
    for (unit, size) in [("y", 365 * 86_400u64), ("d", 86_400), ("h", 3_600), ("m", 60)] {
        let n = rest / size;
        rest %= size;
        if n > 0 || !parts.is_empty() {
            parts.push(format!("{n}{unit}"));
        }
    }
    parts.push(format!("{rest}s"));
    format!("{sign}{}", parts.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_and_fraction() {
        assert_eq!(format_time(&Decimal::zero()).unwrap(), "1970-01-01 00:00:00");
        assert_eq!(format_time(&"1508752860.5".parse().unwrap()).unwrap(), "2017-10-23 10:01:00.5");
    }

    #[test]
    fn interval_components() {
        // 1 year, 1 day, 2 hours and 4 minutes
        let s = 365 * 86_400 + 86_400 + 2 * 3_600 + 4 * 60;
        assert_eq!(format_interval(&Decimal::from(s)), "1y 1d 2h 4m 0s");
        assert_eq!(format_interval(&Decimal::from(59)), "59s");
        assert_eq!(format_interval(&Decimal::from(-61)), "-1m 1s");
    }
}
