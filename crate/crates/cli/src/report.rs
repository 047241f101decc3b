//! Task reports in JSON and plain text.

use std::fmt::Write;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaskReport {
    pub id: String,
    pub op: String,
    pub status: Status,
    /// Raw verdict before applying an expected-failure option.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    pub witnesses: Vec<Witness>,
    pub metrics: Vec<Metric>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl TaskReport {
    pub fn new(id: &str, op: &str) -> Self {
        TaskReport {
            id: id.to_string(),
            op: op.to_string(),
            status: Status::Error,
            outcome: None,
            witnesses: Vec::new(),
            metrics: Vec::new(),
            message: None,
            elapsed_ms: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub summary: Summary,
    pub tasks: Vec<TaskReport>,
}

impl Report {
    pub fn new(tasks: Vec<TaskReport>) -> Self {
        let count = |s| tasks.iter().filter(|t| t.status == s).count();
        let summary = Summary { pass: count(Status::Pass), fail: count(Status::Fail), error: count(Status::Error) };
        Report { summary, tasks }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0 && self.summary.error == 0
    }

    /// The report with timings removed, for byte-for-byte comparison.
    pub fn without_timings(&self) -> Report {
        let mut r = self.clone();
        for t in &mut r.tasks {
            t.elapsed_ms = None;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for t in &self.tasks {
            let _ = write!(out, "{:<5} {} ({})", t.status.label(), t.id, t.op);
            if let Some(ms) = t.elapsed_ms {
                let _ = write!(out, " [{ms:.1} ms]");
            }
            out.push('\n');
            if let Some(m) = &t.message {
                let _ = writeln!(out, "      {m}");
            }
            for w in &t.witnesses {
                let _ = writeln!(out, "      {} = {}", w.name, w.value);
            }
            for m in &t.metrics {
                if m.value.fract() == 0.0 && m.value.abs() < 1e15 {
                    let _ = writeln!(out, "      {} = {}", m.name, m.value);
                } else {
                    let _ = writeln!(out, "      {} = {:e}", m.name, m.value);
                }
            }
        }
        let s = &self.summary;
        let _ = writeln!(out, "summary: {} pass, {} fail, {} error", s.pass, s.fail, s.error);
        out
    }
}
