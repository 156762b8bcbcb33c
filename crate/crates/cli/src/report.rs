//! Structured-text run reports: a header line, `key: value` pairs, and named
//! sections, emitted in insertion order so repeated runs differ only where
//! the values do.

pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            lines: vec![format!("# qbeat {command} report")],
        }
    }

    pub fn kv(&mut self, key: &str, value: impl Into<String>) {
        self.lines.push(format!("{key}: {}", value.into()));
    }

    pub fn section(&mut self, name: &str, body: &str) {
        self.lines.push(String::new());
        self.lines.push(format!("## {name}"));
        self.lines.push(body.to_string());
    }

    pub fn render(&self) -> String {
        let mut text = self.lines.join("\n");
        text.push('\n');
        text
    }
}
