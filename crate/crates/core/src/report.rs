//! Output formatting: JSON and CSV with numbers at 12 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

/// `x` rounded to 12 significant digits, printed in shortest form.
pub fn fmt12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    round12(x).to_string()
}

pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().unwrap_or(0.0));
            if let Some(m) = serde_json::Number::from_f64(x) {
                *n = m;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
pub fn to_json<T: Serialize>(x: &T) -> Result<String> {
    let mut v = serde_json::to_value(x)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

/// CSV from a header and rows of already formatted cells.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(fmt12(0.1), "0.1");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(123456789.123456789), "123456789.123");
        assert_eq!(fmt12(-2.0), "-2");
        let s = to_json(&serde_json::json!({"a": [std::f64::consts::PI, 3], "b": "x"})).unwrap();
        assert!(s.contains("3.14159265359") && s.contains("\"x\""));
        let c = to_csv(&["p", "note"], &[vec!["2".into(), "a,b".into()]]).unwrap();
        assert_eq!(c, "p,note\n2,\"a,b\"\n");
    }
}
