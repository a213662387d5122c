//! Minimal CSV writer. Numbers are printed in scientific notation with 17
//! significant digits, independent of locale, and lines end in LF.

use std::io::{self, Write};

pub fn format_f64(x: f64) -> String {
    // Normalize −0 so that reruns never differ by the sign of a zero.
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub struct CsvWriter<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(CsvWriter {
            out,
            columns: header.len(),
        })
    }

    /// Writes `labels` verbatim followed by the formatted numbers.
    pub fn row(&mut self, labels: &[&str], values: &[f64]) -> io::Result<()> {
        debug_assert_eq!(labels.len() + values.len(), self.columns);
        let mut line = String::with_capacity(24 * self.columns);
        for (i, l) in labels.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(l);
        }
        for (i, v) in values.iter().enumerate() {
            if i > 0 || !labels.is_empty() {
                line.push(',');
            }
            line.push_str(&format_f64(*v));
        }
        line.push('\n');
        self.out.write_all(line.as_bytes())
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}
