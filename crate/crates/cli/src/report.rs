//! Flat `key=value` reports and number formatting shared by every command.

use std::fmt::{self, Display};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Report {
        let mut r = Report::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        let value = value.to_string();
        debug_assert!(!key.contains('=') && !value.contains('\n'));
        self.entries.push((key.to_string(), value));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// Splits each line at the first `=`; lines without one are skipped.
    pub fn parse(text: &str) -> Report {
        let entries = text
            .lines()
            .filter_map(|line| line.split_once('='))
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        Report { entries }
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// `x` with `digits` significant digits in positional notation; `inf`/`nan`
/// spelled out.
pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Rounding can carry into a new leading digit (9.99.. -> 10.0).
    let rounded: f64 = s.parse().unwrap_or(x);
    let new_mag = rounded.abs().log10().floor() as i64;
    if new_mag > magnitude && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        let mut r = Report::new("solve");
        r.push("opt_value", "12/5");
        r.push("ratio", "inf");
        let text = r.to_string();
        assert_eq!(text, "command=solve\nopt_value=12/5\nratio=inf\n");
        assert_eq!(Report::parse(&text), r);
        assert_eq!(r.get("opt_value"), Some("12/5"));
        assert_eq!(r.get("missing"), None);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(sig(10.47213595499958, 12), "10.4721359550");
        assert_eq!(sig(0.25, 12), "0.250000000000");
        assert_eq!(sig(39.59591794226542, 6), "39.5959");
        assert_eq!(sig(9.9999999999999, 3), "10.0");
        assert_eq!(sig(f64::INFINITY, 12), "inf");
        assert_eq!(sig(1234.25, 2), "1234");
    }
}
