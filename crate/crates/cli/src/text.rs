//! Plain-text rendering of a JSON report.

use std::fmt::Write;

use serde_json::Value;

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// Objects whose values are all scalars print on one line as `k=v`.
fn inline(v: &Value) -> Option<String> {
    match v {
        _ if is_scalar(v) => Some(scalar(v)),
        Value::Array(xs) if xs.iter().all(is_scalar) => {
            Some(format!("[{}]", xs.iter().map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Object(m) if m.values().all(is_scalar) => Some(format!(
            "{{{}}}",
            m.iter().map(|(k, v)| format!("{k}={}", scalar(v))).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = inline(v) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    let _ = writeln!(out, "{pad}{key}:");
    match v {
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                render(out, &format!("[{}]", i + 1), x, depth + 1);
            }
        }
        Value::Object(m) => {
            for (k, x) in m {
                render(out, k, x, depth + 1);
            }
        }
        _ => unreachable!("scalars are inline"),
    }
}

pub fn render_report(report: &Value) -> String {
    let mut out = String::new();
    let Value::Object(m) = report else {
        return scalar(report);
    };
    // the variable mapping comes first so every later x_k is readable
    if let Some(Value::Object(sections)) = m.get("sections") {
        if let Some(Value::Array(vars)) = sections.get("variables") {
            let pairs: Vec<String> = vars.iter().map(|v| format!("{} = {}", scalar(&v["var"]), scalar(&v["end"]))).collect();
            let _ = writeln!(out, "variables: {}", pairs.join(", "));
        }
    }
    for (k, v) in m {
        match (k.as_str(), v) {
            ("sections", Value::Object(sections)) => {
                for (name, s) in sections.iter().filter(|(name, _)| *name != "variables") {
                    render(&mut out, name, s, 0);
                }
            }
            (_, Value::Array(xs)) if xs.is_empty() => {}
            (_, Value::Array(xs)) if xs.iter().all(is_scalar) => {
                for x in xs {
                    let _ = writeln!(out, "{k}: {}", scalar(x));
                }
            }
            _ => render(&mut out, k, v, 0),
        }
    }
    out
}
