//! Output formatting shared by the commands.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// Twelve significant digits in scientific notation, or `nan`.
pub fn number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_owned()
    } else {
        format!("{x:.11e}")
    }
}

pub fn csv_row(fields: impl IntoIterator<Item = f64>) -> String {
    fields.into_iter().map(number).collect::<Vec<_>>().join(",")
}

pub fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Writes to `out`, or standard output when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    let result = match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    result.map_err(|e| CliError::Config(format!("cannot write output: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(number(0.332070123456789), "3.32070123457e-1");
        assert_eq!(number(100.0), "1.00000000000e2");
        assert_eq!(number(f64::NAN), "nan");
        assert_eq!(number(0.332070123456789).parse::<f64>().unwrap(), 0.332070123457);
        assert_eq!(csv_row([1.0, f64::NAN]), "1.00000000000e0,nan");
    }
}
