use serde_json::Value;

/// Plain-text rendering of a JSON report.
pub fn text(v: &Value) -> String {
    let mut out = String::new();
    walk(v, 0, &mut out);
    out
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn walk(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if let Some(s) = scalar(val) {
                    out.push_str(&format!("{}{}: {}\n", pad, k, s));
                } else if let Some(line) = flat_array(val).filter(|l| l.len() <= 100) {
                    out.push_str(&format!("{}{}: [{}]\n", pad, k, line));
                } else {
                    out.push_str(&format!("{}{}:\n", pad, k));
                    walk(val, indent + 2, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if let Some(s) = scalar(item).or_else(|| flat_array(item).map(|l| format!("[{}]", l))) {
                    out.push_str(&format!("{}- {}\n", pad, s));
                } else {
                    out.push_str(&format!("{}-\n", pad));
                    walk(item, indent + 2, out);
                }
            }
        }
        other => out.push_str(&format!("{}{}\n", pad, scalar(other).unwrap_or_default())),
    }
}

fn flat_array(v: &Value) -> Option<String> {
    let items = v.as_array()?;
    let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
    parts.map(|p| p.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn nested_values() {
        let v = json!({"name": "x", "dims": [1, 0, 1], "reports": [{"status": "pass"}]});
        assert_eq!(text(&v), "dims: [1, 0, 1]\nname: x\nreports:\n  -\n    status: pass\n");
    }
}
