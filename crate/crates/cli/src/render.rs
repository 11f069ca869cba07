//! JSON rendering with explicit float policy: the default writer emits
//! every float with 17 significant digits so outputs are reproducible
//! bit-for-bit across runs and machines; `--pretty` rounds to 6
//! significant digits and indents for reading.

use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FloatStyle {
    /// 17 significant digits, exponential notation.
    Exact,
    /// 6 significant digits, shortest display.
    Rounded,
}

fn render_f64(x: f64, style: FloatStyle, out: &mut String) {
    match style {
        FloatStyle::Exact => out.push_str(&format!("{x:.16e}")),
        FloatStyle::Rounded => {
            let rounded: f64 = format!("{x:.5e}").parse().expect("rounded float");
            out.push_str(&format!("{rounded}"));
            if rounded.fract() == 0.0 && rounded.is_finite() && rounded.abs() < 1e15 {
                out.push_str(".0");
            }
        }
    }
}

fn render_value(value: &Value, style: FloatStyle, pretty: bool, indent: usize, out: &mut String) {
    let pad = |out: &mut String, level: usize| {
        if pretty {
            out.push('\n');
            out.push_str(&"  ".repeat(level));
        }
    };
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                render_f64(n.as_f64().expect("numeric"), style, out);
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string escapes"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                pad(out, indent + 1);
                render_value(item, style, pretty, indent + 1, out);
            }
            if !items.is_empty() {
                pad(out, indent);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, v)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                pad(out, indent + 1);
                out.push_str(&serde_json::to_string(k).expect("key escapes"));
                out.push(':');
                if pretty {
                    out.push(' ');
                }
                render_value(v, style, pretty, indent + 1, out);
            }
            if !map.is_empty() {
                pad(out, indent);
            }
            out.push('}');
        }
    }
}

pub fn render(value: &Value, style: FloatStyle, pretty: bool) -> String {
    let mut out = String::new();
    render_value(value, style, pretty, 0, &mut out);
    out
}

/// Canonical byte serialization used for output digests.
pub fn canonical(value: &Value) -> String {
    render(value, FloatStyle::Exact, false)
}
