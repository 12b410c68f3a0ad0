//! Deterministic text output: every float is printed with 17 significant
//! digits (`{:.16e}`), which round-trips f64 exactly, and both the CSV and
//! JSON emitters are hand-rolled so identical invocations produce identical
//! bytes.

use nilspec::linalg::Matrix;

pub fn fmt_f64(x: f64) -> String {
    // normalize -0.0 so outputs don't depend on how a zero was reached
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// A float as a JSON value; non-finite values become null.
pub fn json_f64(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".into()
    }
}

pub fn json_str(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn json_vec(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|&x| json_f64(x)).collect();
    format!("[{}]", items.join(","))
}

/// Matrix in the same JSON shape the CLI accepts as input.
pub fn json_matrix(m: &Matrix) -> String {
    format!(
        r#"{{"rows":{},"cols":{},"entries":{}}}"#,
        m.rows(),
        m.cols(),
        json_vec(m.entries())
    )
}

/// An already-serialized key/value object, keys in the order given.
pub fn json_object(fields: &[(&str, String)]) -> String {
    let items: Vec<String> = fields
        .iter()
        .map(|(k, v)| format!("{}:{}", json_str(k), v))
        .collect();
    format!("{{{}}}", items.join(","))
}

pub fn json_array(items: Vec<String>) -> String {
    format!("[{}]", items.join(","))
}
