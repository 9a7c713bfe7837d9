//! Line-oriented `key=value` reports.

use std::fmt;

/// One report line: ordered fields.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Record {
    fields: Vec<(String, String)>,
}

impl Record {
    pub fn new(claim: &str) -> Record {
        Record::default().with("claim", claim)
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Record {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }
}

fn quote(v: &str) -> String {
    if !v.is_empty() && !v.contains(|c: char| c.is_whitespace() || c == '"' || c == '\\') {
        return v.to_string();
    }
    let mut out = String::from("\"");
    for c in v.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, v)) in self.fields.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{k}={}", quote(v))?;
        }
        Ok(())
    }
}

/// The outcome of an experiment. Rendering is deterministic; timing is
/// kept apart so that identical runs print identical reports.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
    /// Number of records that contradict the claim under test.
    pub violations: usize,
    pub elapsed: std::time::Duration,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn violation(&mut self, r: Record) {
        self.violations += 1;
        self.records.push(r);
    }

    pub fn extend(&mut self, other: Report) {
        self.records.extend(other.records);
        self.violations += other.violations;
        self.elapsed += other.elapsed;
    }

    pub fn find(&self, key: &str, value: &str) -> impl Iterator<Item = &Record> {
        let (key, value) = (key.to_string(), value.to_string());
        self.records.iter().filter(move |r| r.get(&key) == Some(value.as_str()))
    }

    pub fn render(&self) -> String {
        self.records.iter().map(|r| format!("{r}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quoting() {
        let r = Record::new("x").with("type", "bool -> T bool").with("n", 3).with("w", "-");
        assert_eq!(r.to_string(), "claim=x type=\"bool -> T bool\" n=3 w=-");
        assert_eq!(r.get("n"), Some("3"));
    }
}
