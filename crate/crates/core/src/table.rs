//! CSV tables with a fixed numeric format: 10 significant digits, `.` decimal
//! separator, LF line endings. Identical inputs always yield identical bytes.

use std::path::Path;

use crate::error::{Error, Result};

/// Formats `x` with 10 significant digits, trailing zeros trimmed.
///
/// Fixed notation is used for decimal exponents in `[-5, 10)`, scientific
/// notation otherwise.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.9e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let digits = digits.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if !(-5..10).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        return if tail.is_empty() {
            format!("{sign}{head}e{exp}")
        } else {
            format!("{sign}{head}.{tail}e{exp}")
        };
    }
    if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        return format!("{sign}0.{zeros}{digits}");
    }
    let int_len = exp as usize + 1;
    if digits.len() <= int_len {
        format!("{sign}{digits}{}", "0".repeat(int_len - digits.len()))
    } else {
        let (int, frac) = digits.split_at(int_len);
        format!("{sign}{int}.{frac}")
    }
}

/// An in-memory CSV table of pre-formatted cells.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| match e.into_kind() {
                csv::ErrorKind::Io(io) => Error::io(path, io),
                other => Error::Parse {
                    path: path.into(),
                    line: 0,
                    message: format!("{other:?}"),
                },
            })?;
        let to_parse = |e: csv::Error| Error::Parse {
            path: path.into(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        };
        let header = reader.headers().map_err(to_parse)?.iter().map(String::from).collect();
        let mut table = Table { header, rows: Vec::new() };
        for rec in reader.records() {
            table.rows.push(rec.map_err(to_parse)?.iter().map(String::from).collect());
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(66.0), "66");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(-0.25), "-0.25");
        assert_eq!(fmt_sig(0.1443276788774), "0.1443276789");
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(-1.234e-7), "-1.234e-7");
        assert_eq!(fmt_sig(12345678901.0), "1.23456789e10");
        assert_eq!(fmt_sig(1000.0), "1000");
        assert_eq!(fmt_sig(0.00012), "0.00012");
        assert_eq!(fmt_sig(9.99999999999), "10");
    }

    #[test]
    fn table_bytes_use_lf() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "".into()]);
        assert_eq!(t.to_bytes(), b"a,b\n1,\n");
    }

    proptest! {
        #[test]
        fn ten_significant_digits_round_trip(x in -1e12f64..1e12) {
            let s = fmt_sig(x);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - x).abs() <= 5e-10 * x.abs(), "{x} -> {s}");
        }
    }
}
