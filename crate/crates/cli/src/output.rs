//! CSV curves with a `#` metadata header.

use std::fmt::Write as _;

use dressed_core::Spec;

use crate::config::spec_pairs;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone)]
pub struct CurveOutput {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

impl CurveOutput {
    pub fn new(command: &str, spec: &Spec, columns: Vec<&'static str>) -> Self {
        let mut meta = vec![("command".to_string(), command.to_string()), ("version".to_string(), VERSION.to_string())];
        meta.extend(spec_pairs(spec).into_iter().map(|(k, v)| (k.to_string(), v)));
        meta.push(("regime".to_string(), spec.regime().kind.as_str().to_string()));
        Self { meta, columns, rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}={v}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}
