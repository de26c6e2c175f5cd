//! Deterministic structured output: a small JSON value with fixed section
//! order, sorted keys inside each map, and numbers printed with 15
//! significant digits so repeated runs are byte-identical.

use std::io::Write;

#[derive(Debug, Clone)]
pub enum Json {
    Num(f64),
    Int(i64),
    Str(String),
    Bool(bool),
    Arr(Vec<Json>),
    Obj(Vec<(String, Json)>),
}

pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0.0".into();
    }
    // 15 significant digits
    format!("{:.14e}", x)
}

impl Json {
    pub fn write<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        match self {
            Json::Num(x) => write!(w, "{}", fmt_num(*x)),
            Json::Int(i) => write!(w, "{i}"),
            Json::Bool(b) => write!(w, "{b}"),
            Json::Str(s) => write!(w, "{}", escape(s)),
            Json::Arr(items) => {
                write!(w, "[")?;
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        write!(w, ",")?;
                    }
                    item.write(w)?;
                }
                write!(w, "]")
            }
            Json::Obj(entries) => {
                write!(w, "{{")?;
                for (k, (key, val)) in entries.iter().enumerate() {
                    if k > 0 {
                        write!(w, ",")?;
                    }
                    write!(w, "{}:", escape(key))?;
                    val.write(w)?;
                }
                write!(w, "}}")
            }
        }
    }

    pub fn to_string_pretty(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("in-memory write");
        let mut s = String::from_utf8(buf).expect("valid utf8");
        s.push('\n');
        s
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// A run report: config echo, keyed numeric values, string diagnostics.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: String,
    pub config: Vec<(String, Json)>,
    pub values: Vec<(String, f64)>,
    pub extra: Vec<(String, Json)>,
    pub diagnostics: Vec<(String, String)>,
    pub status: &'static str,
    pub message: String,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.into(),
            config: Vec::new(),
            values: Vec::new(),
            extra: Vec::new(),
            diagnostics: Vec::new(),
            status: "ok",
            message: String::new(),
        }
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.values.push((key.into(), v));
    }

    pub fn values_indexed(&mut self, key: &str, vs: &[f64]) {
        for (i, v) in vs.iter().enumerate() {
            self.values.push((format!("{key}_{:02}", i + 1), *v));
        }
    }

    pub fn diagnostic(&mut self, key: &str, text: impl Into<String>) {
        self.diagnostics.push((key.into(), text.into()));
    }

    pub fn to_json(&self) -> Json {
        let mut config = self.config.clone();
        config.sort_by(|a, b| a.0.cmp(&b.0));
        let mut values: Vec<(String, Json)> = self
            .values
            .iter()
            .map(|(k, v)| (k.clone(), Json::Num(*v)))
            .collect();
        values.sort_by(|a, b| a.0.cmp(&b.0));
        let mut diags: Vec<(String, Json)> = self
            .diagnostics
            .iter()
            .map(|(k, v)| (k.clone(), Json::Str(v.clone())))
            .collect();
        diags.sort_by(|a, b| a.0.cmp(&b.0));
        let mut entries = vec![
            ("command".to_string(), Json::Str(self.command.clone())),
            ("config".to_string(), Json::Obj(config)),
            ("values".to_string(), Json::Obj(values)),
        ];
        let mut extra = self.extra.clone();
        extra.sort_by(|a, b| a.0.cmp(&b.0));
        entries.extend(extra);
        entries.push(("diagnostics".to_string(), Json::Obj(diags)));
        entries.push(("status".to_string(), Json::Str(self.status.into())));
        entries.push(("message".to_string(), Json::Str(self.message.clone())));
        Json::Obj(entries)
    }

    /// key,value rows of the numeric results.
    pub fn to_csv(&self) -> String {
        let mut rows: Vec<(String, f64)> = self.values.clone();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        let mut s = String::from("key,value\n");
        for (k, v) in rows {
            s.push_str(&format!("{k},{}\n", fmt_num(v)));
        }
        s
    }
}
