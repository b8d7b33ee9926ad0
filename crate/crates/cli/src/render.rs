//! Plain-text rendering of reports: one `key: value` line per leaf.

use serde_json::Value;

pub fn text(doc: &Value) -> String {
    let mut out = String::new();
    if let Some(result) = doc.get("result") {
        walk(&mut out, "", result);
    }
    if let Some(t) = doc.get("timing_ms") {
        out.push_str(&format!("timing_ms: {t}\n"));
    }
    out
}

fn walk(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                walk(out, &key, v);
            }
        }
        Value::Array(items) if items.iter().any(|i| i.is_object()) => {
            for (i, item) in items.iter().enumerate() {
                walk(out, &format!("{prefix}[{i}]"), item);
            }
            if items.is_empty() {
                out.push_str(&format!("{prefix}: []\n"));
            }
        }
        Value::String(s) => out.push_str(&format!("{prefix}: {s}\n")),
        other => out.push_str(&format!("{prefix}: {other}\n")),
    }
}
