//! Plain-text reports: `[section]` headers followed by `key: value` lines.

use std::fmt::{self, Display};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    sections: Vec<(String, Vec<(String, String)>)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, name: impl Into<String>) -> &mut Self {
        self.sections.push((name.into(), Vec::new()));
        self
    }

    pub fn field(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        if self.sections.is_empty() {
            self.section("result");
        }
        self.sections.last_mut().unwrap().1.push((key.into(), value.to_string()));
        self
    }

    /// First value stored under `key` in `section`.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .iter()
            .filter(|(s, _)| s == section)
            .flat_map(|(_, kv)| kv.iter())
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Reads back the text form.
    pub fn parse(text: &str) -> Option<Self> {
        let mut r = Report::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                r.section(name);
            } else {
                let (k, v) = line.split_once(':')?;
                r.field(k.trim(), v.trim());
            }
        }
        Some(r)
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (name, kv)) in self.sections.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            writeln!(f, "[{name}]")?;
            for (k, v) in kv {
                writeln!(f, "{k}: {v}")?;
            }
        }
        Ok(())
    }
}

/// Fixed-precision float formatting shared by all reports.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.9}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let mut r = Report::new();
        r.section("profile").field("name", "XS").field("n", 14);
        r.section("fit").field("epsilon_star", fmt_f64(0.25));
        let text = r.to_string();
        assert!(text.starts_with("[profile]\nname: XS\n"));
        let back = Report::parse(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.get("fit", "epsilon_star"), Some("0.250000000"));
    }
}
