//! JSON and CSV rendering with 17-significant-digit floats.

use std::io;

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

/// Report schema version stamped into every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// `v` with 17 significant digits in scientific notation.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Pretty-printer that writes every float through [`format_f64`].
struct DigitsFormatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, writer: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(writer $(, $arg)*)
            }
        )*
    };
}

impl Formatter for DigitsFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );
}

/// Pretty JSON with 17-digit floats and a trailing newline. Non-finite
/// floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, DigitsFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report types serialize infallibly");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// CSV text from a header and rows of preformatted cells.
pub fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Serializes complex vectors as `[[re, im], …]`.
pub fn serialize_complex_vec<S: Serializer>(values: &[Complex64], serializer: S) -> Result<S::Ok, S::Error> {
    let mut seq = serializer.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&[v.re, v.im])?;
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        x: f64,
        n: u32,
        s: &'static str,
        v: Vec<f64>,
    }

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_f64(19.0 / 9.0), "2.1111111111111112e0");
        assert_eq!(format_f64(0.1).parse::<f64>().unwrap(), 0.1);
        let json = to_json(&Sample { x: 1.0 / 3.0, n: 3, s: "a", v: vec![0.5, -2.0] });
        assert!(json.contains("\"x\": 3.3333333333333331e-1"), "{json}");
        assert!(json.contains("\"n\": 3"));
        assert!(json.contains("-2.0000000000000000e0"));
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["x"].as_f64().unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&["lag", "value"], vec![vec!["1".into(), format_f64(0.25)]]);
        assert_eq!(csv, "lag,value\n1,2.5000000000000000e-1\n");
    }
}
