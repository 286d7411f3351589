//! Deterministic CSV/JSON emission.
//!
//! Numbers are serialized with 12 significant digits; reruns of the same
//! configuration produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::CliError;

/// One cell of an output record.
#[derive(Debug, Clone)]
pub enum Field {
    Int(usize),
    Num(f64),
    Text(String),
}

/// An ordered list of named cells; all records in one emission share the
/// same schema.
#[derive(Debug, Clone, Default)]
pub struct Record(pub Vec<(&'static str, Field)>);

impl Record {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn int(mut self, key: &'static str, value: usize) -> Self {
        self.0.push((key, Field::Int(value)));
        self
    }

    pub fn num(mut self, key: &'static str, value: f64) -> Self {
        self.0.push((key, Field::Num(value)));
        self
    }

    pub fn text(mut self, key: &'static str, value: impl Into<String>) -> Self {
        self.0.push((key, Field::Text(value.into())));
        self
    }

    /// Full-precision value plus a fixed-decimals display column.
    pub fn num_with_display(
        self,
        key: &'static str,
        display_key: &'static str,
        value: f64,
        decimals: usize,
    ) -> Self {
        self.num(key, value)
            .text(display_key, display_decimals(value, decimals))
    }
}

/// Significant-digit formatting in the style of `%.{sig}g`: plain decimal in
/// a moderate exponent window, scientific notation outside it, trailing
/// zeros trimmed.
pub fn format_sig(value: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if value == 0.0 {
        return "0".to_string();
    }
    if value.is_nan() {
        return "nan".to_string();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exponent = value.abs().log10().floor() as i32;
    if exponent >= -4 && exponent < sig as i32 {
        let places = (sig as i32 - 1 - exponent).max(0) as usize;
        trim_zeros(format!("{value:.places$}"))
    } else {
        let formatted = format!("{:.*e}", sig - 1, value);
        let (mantissa, exp) = formatted
            .split_once('e')
            .expect("exponential format contains e");
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}

/// Fixed-decimals display rounding. Values sitting on a decimal midpoint
/// (within float fuzz) round half to even, matching how the reference tables
/// were printed.
pub fn display_decimals(value: f64, decimals: usize) -> String {
    let scale = 10f64.powi(decimals as i32);
    let scaled = value * scale;
    let floor = scaled.floor();
    let fraction = scaled - floor;
    let units = if (fraction - 0.5).abs() < 1e-6 {
        if (floor as i64).rem_euclid(2) == 0 {
            floor
        } else {
            floor + 1.0
        }
    } else {
        scaled.round()
    };
    let value = units / scale;
    // never print a signed zero
    let value = if value == 0.0 { 0.0 } else { value };
    format!("{value:.decimals$}")
}

fn field_csv(field: &Field) -> String {
    match field {
        Field::Int(v) => v.to_string(),
        Field::Num(v) => format_sig(*v, 12),
        Field::Text(t) => {
            if t.contains(',') || t.contains('"') || t.contains('\n') {
                format!("\"{}\"", t.replace('"', "\"\""))
            } else {
                t.clone()
            }
        }
    }
}

fn field_json(field: &Field) -> String {
    match field {
        Field::Int(v) => v.to_string(),
        Field::Num(v) => {
            if v.is_finite() {
                format_sig(*v, 12)
            } else {
                // JSON has no literal for these
                format!("\"{}\"", field_csv(field))
            }
        }
        Field::Text(t) => format!("\"{}\"", t.replace('\\', "\\\\").replace('"', "\\\"")),
    }
}

/// CSV with a header row taken from `columns`; `comment` becomes a leading
/// `#` provenance line. An empty record list still yields the header.
pub fn to_csv(columns: &[&str], records: &[Record], comment: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(c) = comment {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&columns.join(","));
    out.push('\n');
    for record in records {
        assert!(
            record.0.iter().map(|(k, _)| *k).eq(columns.iter().copied()),
            "record schema must match the declared columns"
        );
        let row: Vec<String> = record.0.iter().map(|(_, f)| field_csv(f)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// JSON array of objects, keys in record order.
pub fn to_json(records: &[Record]) -> String {
    let mut out = String::from("[");
    for (i, record) in records.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str("\n  {");
        for (j, (key, field)) in record.0.iter().enumerate() {
            if j > 0 {
                out.push_str(", ");
            }
            out.push_str(&format!("\"{key}\": {}", field_json(field)));
        }
        out.push('}');
    }
    if !records.is_empty() {
        out.push('\n');
    }
    out.push_str("]\n");
    out
}

/// Writes to the path, or to stdout when no path is given.
pub fn write_output(content: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| CliError::Io(format!("creating {}: {e}", parent.display())))?;
                }
            }
            fs::write(p, content).map_err(|e| CliError::Io(format!("writing {}: {e}", p.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .map_err(|e| CliError::Io(format!("writing stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_formats() {
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(0.8645, 12), "0.8645");
        assert_eq!(format_sig(1.0 / 182.0, 12), "0.00549450549451");
        assert_eq!(format_sig(1.323006598e9, 12), "1323006598");
        assert_eq!(format_sig(7.557e16, 12), "7.557e16");
        assert_eq!(format_sig(1.0, 12), "1");
        assert_eq!(format_sig(-2.5e-7, 12), "-2.5e-7");
    }

    #[test]
    fn four_sig_figures() {
        assert_eq!(format_sig(1323006598.2, 4), "1.323e9");
        assert_eq!(format_sig(0.8042, 4), "0.8042");
    }

    #[test]
    fn display_rounding_matches_reference_style() {
        assert_eq!(display_decimals(0.8645, 3), "0.864");
        assert_eq!(display_decimals(0.5625, 3), "0.562");
        assert_eq!(display_decimals(0.6715, 3), "0.672");
        assert_eq!(display_decimals(0.778525, 3), "0.779");
        assert_eq!(display_decimals(0.0054945054945, 3), "0.005");
        assert_eq!(display_decimals(0.7356506875, 4), "0.7357");
    }

    #[test]
    fn csv_and_json_shapes() {
        let records = vec![
            Record::new()
                .int("depth", 1)
                .num("value", 0.25)
                .text("note", "a,b"),
            Record::new()
                .int("depth", 2)
                .num("value", 0.5)
                .text("note", "plain"),
        ];
        let csv = to_csv(&["depth", "value", "note"], &records, Some("mirrors: demo"));
        assert_eq!(
            csv,
            "# mirrors: demo\ndepth,value,note\n1,0.25,\"a,b\"\n2,0.5,plain\n"
        );
        let json = to_json(&records);
        assert!(json.starts_with("[\n  {\"depth\": 1, \"value\": 0.25, \"note\": \"a,b\"}"));
        assert!(json.ends_with("]\n"));
    }

    #[test]
    fn empty_records_give_header_only_output() {
        assert_eq!(to_csv(&["a", "b"], &[], Some("x")), "# x\na,b\n");
        assert_eq!(to_json(&[]), "[]\n");
    }
}
