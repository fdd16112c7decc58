//! Table rendering and number formatting.

use std::io::{self, Write};

use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Tsv,
    Markdown,
}

/// How numbers are turned into cells.
#[derive(Debug, Clone, Copy)]
pub struct NumberStyle {
    pub digits: usize,
    pub raw: bool,
}

impl NumberStyle {
    /// Rounds half away from zero; values that round to 0 or 1 print bare.
    pub fn cell(&self, v: f64) -> String {
        if self.raw {
            return format!("{v:?}");
        }
        let r = round_half_away(v, self.digits);
        if r == 0.0 {
            "0".to_string()
        } else if r == 1.0 {
            "1".to_string()
        } else {
            format!("{r:.*}", self.digits)
        }
    }
}

pub fn round_half_away(v: f64, digits: usize) -> f64 {
    let scale = 10f64.powi(digits as i32);
    let r = (v * scale).round() / scale;
    // avoid "-0"
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match format {
            Format::Csv | Format::Tsv => {
                let delim = if format == Format::Csv { b',' } else { b'\t' };
                let mut w = csv::WriterBuilder::new().delimiter(delim).from_writer(out);
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                w.flush()
            }
            Format::Markdown => {
                let esc = |s: &str| s.replace('|', "\\|");
                writeln!(out, "| {} |", self.headers.iter().map(|h| esc(h)).collect::<Vec<_>>().join(" | "))?;
                writeln!(out, "|{}", "---|".repeat(self.headers.len()))?;
                for row in &self.rows {
                    writeln!(out, "| {} |", row.iter().map(|c| esc(c)).collect::<Vec<_>>().join(" | "))?;
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_half_away(0.4425, 3), 0.443);
        assert_eq!(round_half_away(-0.0004, 3), 0.0);
        let s = NumberStyle { digits: 3, raw: false };
        assert_eq!(s.cell(0.99961), "1");
        assert_eq!(s.cell(0.00049), "0");
        assert_eq!(s.cell(0.46), "0.460");
        let raw = NumberStyle { digits: 3, raw: true };
        assert_eq!(raw.cell(0.1), "0.1");
    }

    #[test]
    fn csv_quotes_and_markdown_pipes() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["x,y".into(), "1|2".into()]);
        let mut buf = Vec::new();
        t.write(Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n\"x,y\",1|2\n");
        let mut buf = Vec::new();
        t.write(Format::Markdown, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "| a | b |\n|---|---|\n| x,y | 1\\|2 |\n");
    }
}
