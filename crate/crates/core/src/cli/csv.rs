use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Seventeen significant digits, locale-independent.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// In-memory CSV with a leading `# config_hash=` comment.
#[derive(Debug, Clone)]
pub struct CsvTable {
    buf: String,
    columns: usize,
}

impl CsvTable {
    pub fn new(hash: &str, header: &[&str]) -> Self {
        let mut buf = format!("# config_hash={hash}\n");
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    /// Appends a row of pre-formatted cells.
    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.buf.push_str(&cells.join(","));
        self.buf.push('\n');
    }

    pub fn row_f64(&mut self, lead: &[String], values: &[f64]) {
        let mut line = lead.join(",");
        for v in values {
            if !line.is_empty() {
                line.push(',');
            }
            let _ = write!(line, "{}", fmt_f64(*v));
        }
        self.buf.push_str(&line);
        self.buf.push('\n');
    }

    pub fn as_str(&self) -> &str {
        &self.buf
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, &self.buf)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02e23] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn header_follows_hash() {
        let mut t = CsvTable::new("abc", &["t", "v"]);
        t.row_f64(&[], &[0.0, 1.0]);
        let lines: Vec<&str> = t.as_str().lines().collect();
        assert_eq!(lines[0], "# config_hash=abc");
        assert_eq!(lines[1], "t,v");
        assert_eq!(lines.len(), 3);
    }
}
