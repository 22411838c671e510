//! Report records and their three renderings. JSON is the machine format: keys are
//! sorted and the only nondeterministic field is `wall_time_ms`, which can be
//! omitted. The table format is for people and is never parsed back.

use std::collections::BTreeMap;

use polyext::combinat::GradedSpace;
use polyext::ext::ExtTable;
use serde::Serialize;

/// One entry of a dimension table: dim in bidegree (s, t).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimEntry {
    pub s: u32,
    pub t: u32,
    pub dim: usize,
}

/// Final state of one record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    /// Outside the supported class; not an error.
    Unsupported,
    /// The computation could not finish.
    Error,
    /// A checked invariant failed.
    VerificationFailed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok | Status::Unsupported => 0,
            Status::Error => 1,
            Status::VerificationFailed => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRecord {
    pub engine_version: String,
    pub operation: String,
    pub p: u32,
    pub r: Option<u32>,
    pub ambient: Option<usize>,
    pub f: Option<String>,
    pub g: Option<String>,
    pub tables: BTreeMap<String, Vec<DimEntry>>,
    pub euler: Option<i64>,
    pub verdict: Option<String>,
    pub status: Status,
    pub notes: Vec<String>,
    pub wall_time_ms: Option<u64>,
}

impl ReportRecord {
    pub fn new(operation: &str, p: u32) -> Self {
        ReportRecord {
            engine_version: polyext::ENGINE_VERSION.to_string(),
            operation: operation.to_string(),
            p,
            r: None,
            ambient: None,
            f: None,
            g: None,
            tables: BTreeMap::new(),
            euler: None,
            verdict: None,
            status: Status::Ok,
            notes: Vec::new(),
            wall_time_ms: None,
        }
    }

    pub fn with_pair(mut self, f: &impl ToString, g: &impl ToString) -> Self {
        self.f = Some(f.to_string());
        self.g = Some(g.to_string());
        self
    }

    pub fn add_ext(&mut self, name: &str, t: &ExtTable) {
        self.tables.insert(name.to_string(), t.dims.iter().map(|(&(s, t), &dim)| DimEntry { s, t, dim }).collect());
    }

    pub fn add_graded(&mut self, name: &str, g: &GradedSpace) {
        self.tables.insert(name.to_string(), g.dims().iter().map(|(&s, &dim)| DimEntry { s, t: 0, dim }).collect());
    }

    /// Dimensions summed over t, indexed by s from 0 to the top nonzero degree.
    pub fn dims_by_s(&self, name: &str) -> Vec<usize> {
        let mut out = Vec::new();
        for e in self.tables.get(name).into_iter().flatten() {
            if e.dim == 0 {
                continue;
            }
            if out.len() <= e.s as usize {
                out.resize(e.s as usize + 1, 0);
            }
            out[e.s as usize] += e.dim;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Render records; a single record is a JSON object, several are an array.
pub fn render(records: &[ReportRecord], format: Format) -> String {
    match format {
        Format::Json => render_json(records),
        Format::Table => records.iter().map(render_table).collect::<Vec<_>>().join("\n"),
        Format::Csv => render_csv(records),
    }
}

fn render_json(records: &[ReportRecord]) -> String {
    // serde_json::Value keeps object keys in a BTreeMap, so the output is key-sorted
    let value = if records.len() == 1 {
        serde_json::to_value(&records[0])
    } else {
        serde_json::to_value(records)
    }
    .expect("records serialize");
    let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
    s.push('\n');
    s
}

fn render_table(r: &ReportRecord) -> String {
    let mut out = String::new();
    let mut line = |k: &str, v: String| out.push_str(&format!("{k:<10} {v}\n"));
    line("operation", r.operation.clone());
    for (k, v) in [("F", &r.f), ("G", &r.g)] {
        if let Some(v) = v {
            line(k, v.clone());
        }
    }
    line("p", r.p.to_string());
    if let Some(x) = r.r {
        line("r", x.to_string());
    }
    if let Some(x) = r.ambient {
        line("ambient", format!("k^{x}"));
    }
    for (name, entries) in &r.tables {
        line(name, format!("{:?}", r.dims_by_s(name)));
        if entries.iter().any(|e| e.t != 0) {
            let cells: Vec<String> = entries.iter().map(|e| format!("({},{})={}", e.s, e.t, e.dim)).collect();
            line("", cells.join(" "));
        }
    }
    if let Some(x) = r.euler {
        line("euler", x.to_string());
    }
    if let Some(x) = &r.verdict {
        line("verdict", x.clone());
    }
    line("status", format!("{:?}", r.status));
    for n in &r.notes {
        line("note", n.clone());
    }
    if let Some(ms) = r.wall_time_ms {
        line("time", format!("{ms} ms"));
    }
    out
}

fn render_csv(records: &[ReportRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = ["operation", "f", "g", "p", "r", "ambient", "table", "s", "t", "dim", "euler", "verdict", "status"];
    w.write_record(header).expect("in-memory write");
    let opt = |x: Option<String>| x.unwrap_or_default();
    for r in records {
        let status = serde_json::to_value(r.status).expect("status serializes").as_str().unwrap_or_default().to_string();
        let head = [r.operation.clone(), opt(r.f.clone()), opt(r.g.clone()), r.p.to_string(), opt(r.r.map(|x| x.to_string())), opt(r.ambient.map(|x| x.to_string()))];
        let tail = [opt(r.euler.map(|x| x.to_string())), opt(r.verdict.clone()), status];
        let mut rows: Vec<[String; 4]> =
            r.tables.iter().flat_map(|(name, es)| es.iter().map(move |e| [name.clone(), e.s.to_string(), e.t.to_string(), e.dim.to_string()])).collect();
        if rows.is_empty() {
            rows.push(Default::default());
        }
        for row in rows {
            w.write_record(head.iter().chain(row.iter()).chain(tail.iter())).expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
}
