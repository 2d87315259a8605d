use ccm_core::rational::{self, Rational};
use ccm_core::subgroup::Subgroup;
use ccm_core::{Element, GroupHandle, GroupKind};
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Rows for the CSV form of tabular commands.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub request: Value,
    pub result: Value,
    pub table: Option<Table>,
    pub timing_ms: u128,
    /// Failed checks that should turn into exit code 1 once the report is written.
    pub failures: usize,
}

impl Report {
    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "request": self.request,
            "result": self.result,
            "schema": SCHEMA_VERSION,
            "timing_ms": self.timing_ms,
            "version": VERSION,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("reports are plain JSON");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let table = self
            .table
            .as_ref()
            .ok_or_else(|| CliError::schema(format!("`{}` has no tabular output; use --format json", self.command)))?;
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&table.headers).map_err(io)?;
        for row in &table.rows {
            w.write_record(row).map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

pub fn rat(r: &Rational) -> Value {
    Value::String(rational::format(r))
}

pub fn element(g: &GroupHandle, x: &Element) -> Value {
    match (g.kind(), x) {
        (GroupKind::VirtuallyAbelian(_), Element::Affine { v, q }) => json!({ "v": v, "q": q }),
        (GroupKind::CentralPairing(_), Element::Pairing { a, nu }) => json!({ "a": a, "nu": nu }),
        _ => Value::String(g.format_element(x)),
    }
}

pub fn elements(g: &GroupHandle, xs: &[Element]) -> Value {
    Value::Array(xs.iter().map(|x| element(g, x)).collect())
}

pub fn subgroup(h: &Subgroup) -> Value {
    json!({
        "generators": elements(h.group(), &h.canonical_generators()),
        "index": h.index().to_string(),
    })
}

pub fn group(g: &GroupHandle) -> Value {
    json!({
        "class": g.class_name(),
        "name": g.name(),
        "order": g.order().map_or_else(|| "infinite".to_string(), |n| n.to_string()),
    })
}
