//! Deterministic CSV and JSON assembly.
//!
//! Every float is rendered at a fixed 15 significant digits so that
//! repeated runs of one configuration are byte-identical and recorded
//! goldens survive toolchain updates; shortest-round-trip formatting would
//! tie the bytes to the serializer. Non-finite values come out as `inf` in
//! CSV and `null` in JSON.

/// Fixed-precision float field.
pub fn num(x: f64) -> String {
    format!("{x:.14e}")
}

/// A JSON value with caller-controlled key order.
pub enum J {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<J>),
    Obj(Vec<(&'static str, J)>),
}

impl J {
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String) {
        match self {
            J::Null => out.push_str("null"),
            J::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            J::Int(i) => out.push_str(&i.to_string()),
            J::Num(x) if x.is_finite() => out.push_str(&num(*x)),
            J::Num(_) => out.push_str("null"),
            J::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        c if (c as u32) < 0x20 => {
                            out.push_str(&format!("\\u{:04x}", c as u32));
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            J::Arr(items) => {
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    item.write(out);
                }
                out.push(']');
            }
            J::Obj(fields) => {
                out.push('{');
                for (i, (key, value)) in fields.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('"');
                    out.push_str(key);
                    out.push_str("\":");
                    value.write(out);
                }
                out.push('}');
            }
        }
    }
}

fn csv_field(raw: &str) -> String {
    if raw.contains(',') || raw.contains('"') || raw.contains('\n') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw.to_string()
    }
}

/// Assembles a CSV document from a header line and preformatted fields.
pub fn csv<R, F>(header: &str, rows: R) -> String
where
    R: IntoIterator<Item = Vec<F>>,
    F: AsRef<str>,
{
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        let mut first = true;
        for field in row {
            if !first {
                out.push(',');
            }
            out.push_str(&csv_field(field.as_ref()));
            first = false;
        }
        out.push('\n');
    }
    out
}
