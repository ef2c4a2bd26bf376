//! Plain-text rendering of the JSON documents for `--pretty`.

use serde_json::Value;

pub fn render(value: &Value) -> String {
    let mut out = String::new();
    block(value, 0, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) if items.iter().all(is_scalar) => {
            format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", "))
        }
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(|i| !matches!(i, Value::Object(_) | Value::Array(_))),
        _ => true,
    }
}

fn block(value: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.chars().count()).max().unwrap_or(0);
            for (key, v) in map {
                if is_scalar(v) {
                    out.push_str(&format!("{pad}{key:<width$}  {}\n", scalar(v)));
                } else if let Some(rows) = table_rows(v) {
                    out.push_str(&format!("{pad}{key}:\n"));
                    table(&rows, indent + 2, out);
                } else {
                    out.push_str(&format!("{pad}{key}:\n"));
                    block(v, indent + 2, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if is_scalar(item) {
                    out.push_str(&format!("{pad}- {}\n", scalar(item)));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    block(item, indent + 2, out);
                }
            }
        }
        v => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

/// Arrays of flat objects with identical keys become tables.
fn table_rows(v: &Value) -> Option<Vec<&serde_json::Map<String, Value>>> {
    let items = v.as_array()?;
    let rows: Vec<_> = items.iter().map(Value::as_object).collect::<Option<_>>()?;
    let first = rows.first()?;
    let same = rows.iter().all(|r| r.keys().eq(first.keys()) && r.values().all(is_scalar));
    same.then_some(rows)
}

fn table(rows: &[&serde_json::Map<String, Value>], indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let headers: Vec<&String> = rows[0].keys().collect();
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.values().map(scalar).collect()).collect();
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| cells.iter().map(|c| c[i].chars().count()).chain([h.chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |fields: Vec<String>| {
        let parts: Vec<String> = fields.iter().zip(&widths).map(|(f, w)| format!("{f:<w$}")).collect();
        format!("{pad}{}\n", parts.join("  ").trim_end())
    };
    out.push_str(&line(headers.iter().map(|h| h.to_string()).collect()));
    for row in cells {
        out.push_str(&line(row));
    }
}
