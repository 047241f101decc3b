//! JSON task files: a chart, ordered definitions and verification tasks.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use genholo_core::coeffs::{Chart, GaussianRational, Polynomial};
use genholo_core::gcs::GCStructure;
use genholo_core::poismod::PoissonBivector;
use rayon::prelude::*;
use serde::Deserialize;

use crate::expr::{parse_as, parse_constant, parse_expr, parse_polynomial, Env, ExprError, Kind, Value};
use crate::ops;
use crate::report::{Report, Status, TaskReport};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskFile {
    pub version: u32,
    pub chart: ChartSpec,
    #[serde(default)]
    pub defs: Vec<Def>,
    pub tasks: Vec<Task>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub complex_dim: usize,
    #[serde(default)]
    pub fiber_dim: usize,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum DefKind {
    Scalar,
    Form,
    Gvector,
    Matrix,
    Bivector,
    Spinor,
    Points,
    Structure,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Def {
    pub name: String,
    pub kind: DefKind,
    #[serde(default)]
    pub expr: Option<String>,
    #[serde(default)]
    pub data: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub id: String,
    pub op: String,
    #[serde(default)]
    pub args: BTreeMap<String, String>,
    #[serde(default)]
    pub options: serde_json::Map<String, serde_json::Value>,
}

/// Problems that make a task file unusable as a whole.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid task file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid task file: {0}")]
    Schema(String),
}

impl TaskFile {
    pub fn load(path: &Path) -> Result<TaskFile, LoadError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
        TaskFile::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<TaskFile, LoadError> {
        let file: TaskFile = serde_json::from_str(text)?;
        file.validate()?;
        Ok(file)
    }

    fn validate(&self) -> Result<(), LoadError> {
        if self.version != 1 {
            return Err(LoadError::Schema(format!("unsupported version {}", self.version)));
        }
        if self.chart.complex_dim == 0 || self.chart.complex_dim > 4 {
            return Err(LoadError::Schema("complex_dim must be between 1 and 4".into()));
        }
        if self.chart.fiber_dim > 1 {
            return Err(LoadError::Schema("fiber_dim must be 0 or 1".into()));
        }
        let mut names = HashSet::new();
        for d in &self.defs {
            if !names.insert(d.name.as_str()) {
                return Err(LoadError::Schema(format!("definition `{}` is repeated", d.name)));
            }
        }
        let mut ids = HashSet::new();
        for t in &self.tasks {
            if !ids.insert(t.id.as_str()) {
                return Err(LoadError::Schema(format!("task id `{}` is repeated", t.id)));
            }
        }
        Ok(())
    }

    pub fn chart(&self) -> Chart {
        if self.chart.fiber_dim == 1 {
            Chart::fibered(self.chart.complex_dim)
        } else {
            Chart::new(self.chart.complex_dim)
        }
    }
}

/// Weighted points.
#[derive(Clone, Debug, PartialEq)]
pub struct Points {
    pub points: Vec<Vec<GaussianRational>>,
    pub weights: Option<Vec<GaussianRational>>,
}

/// An evaluated definition.
#[derive(Clone, Debug)]
pub enum Object {
    Value(Value),
    Matrix(Vec<Vec<Value>>),
    Bivector(PoissonBivector),
    Points(Points),
    Structure(Arc<GCStructure>),
}

/// Evaluated definitions; a failed definition keeps its error message.
pub struct Context {
    pub chart: Chart,
    objects: BTreeMap<String, Result<Object, String>>,
    env: Env,
}

impl Context {
    pub fn build(file: &TaskFile) -> Context {
        let chart = file.chart();
        let mut ctx = Context { chart, objects: BTreeMap::new(), env: Env::new() };
        for d in &file.defs {
            let obj = ctx.evaluate(d).map_err(|e| e.to_string());
            if let Ok(Object::Value(v)) = &obj {
                ctx.env.insert(d.name.clone(), v.clone());
            }
            ctx.objects.insert(d.name.clone(), obj);
        }
        ctx
    }

    pub fn env(&self) -> &Env {
        &self.env
    }

    pub fn get(&self, name: &str) -> Result<&Object, String> {
        match self.objects.get(name) {
            None => Err(format!("undefined name `{name}`")),
            Some(Err(e)) => Err(format!("definition `{name}` failed: {e}")),
            Some(Ok(o)) => Ok(o),
        }
    }

    fn expr_of<'a>(&self, d: &'a Def) -> Result<&'a str, ExprError> {
        d.expr.as_deref().ok_or_else(|| ExprError::Type(format!("definition `{}` needs an `expr`", d.name)))
    }

    fn data_of<'a>(&self, d: &'a Def) -> Result<&'a serde_json::Value, ExprError> {
        d.data.as_ref().ok_or_else(|| ExprError::Type(format!("definition `{}` needs `data`", d.name)))
    }

    fn evaluate(&self, d: &Def) -> Result<Object, ExprError> {
        let c = self.chart;
        Ok(match d.kind {
            DefKind::Scalar => Object::Value(parse_as(self.expr_of(d)?, c, &self.env, Kind::Scalar)?),
            DefKind::Form | DefKind::Spinor => Object::Value(parse_as(self.expr_of(d)?, c, &self.env, Kind::Form)?),
            DefKind::Gvector => Object::Value(parse_as(self.expr_of(d)?, c, &self.env, Kind::GVector)?),
            DefKind::Matrix => {
                let rows = self.data_of(d)?.as_array().ok_or_else(|| bad_data(d, "a list of rows"))?;
                let mut out = Vec::new();
                for row in rows {
                    let row = row.as_array().ok_or_else(|| bad_data(d, "a list of rows"))?;
                    let vals = row
                        .iter()
                        .map(|e| {
                            parse_expr(&json_text(e).ok_or_else(|| bad_data(d, "expression strings"))?, c, &self.env)
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    out.push(vals);
                }
                if out.is_empty() || out.iter().any(|r| r.len() != out.len()) {
                    return Err(bad_data(d, "a square matrix"));
                }
                Object::Matrix(out)
            }
            DefKind::Bivector => {
                if let Some(e) = &d.expr {
                    Object::Bivector(PoissonBivector::surface(parse_polynomial(e, c, &self.env)?)?)
                } else {
                    let entries = self.data_of(d)?.as_array().ok_or_else(|| bad_data(d, "a list of [i, j, expr]"))?;
                    let mut upper = Vec::new();
                    for e in entries {
                        let t =
                            e.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad_data(d, "[i, j, expr] triples"))?;
                        let idx = |v: &serde_json::Value| {
                            v.as_u64().filter(|&k| k >= 1 && k as usize <= c.n).map(|k| k as usize - 1)
                        };
                        let (i, j) = (idx(&t[0]), idx(&t[1]));
                        let (Some(i), Some(j)) = (i, j) else {
                            return Err(bad_data(d, "indices between 1 and the dimension"));
                        };
                        let text = json_text(&t[2]).ok_or_else(|| bad_data(d, "expression strings"))?;
                        upper.push((i, j, parse_polynomial(&text, c, &self.env)?));
                    }
                    Object::Bivector(PoissonBivector::from_upper(c, &upper)?)
                }
            }
            DefKind::Points => {
                let data = self.data_of(d)?;
                let pts = data.get("points").and_then(|p| p.as_array()).ok_or_else(|| bad_data(d, "`points`"))?;
                let mut points = Vec::new();
                for p in pts {
                    let coords = p.as_array().ok_or_else(|| bad_data(d, "points as coordinate lists"))?;
                    points.push(coords.iter().map(|x| constant(d, x, c)).collect::<Result<Vec<_>, _>>()?);
                }
                let weights = match data.get("weights") {
                    None => None,
                    Some(w) => {
                        let w = w.as_array().ok_or_else(|| bad_data(d, "`weights` as a list"))?;
                        Some(w.iter().map(|x| constant(d, x, c)).collect::<Result<Vec<_>, _>>()?)
                    }
                };
                Object::Points(Points { points, weights })
            }
            DefKind::Structure => Object::Structure(Arc::new(self.structure(d)?)),
        })
    }

    fn structure(&self, d: &Def) -> Result<GCStructure, ExprError> {
        let data = self.data_of(d)?;
        let field = |k: &str| data.get(k).and_then(|v| v.as_str());
        let m = self.chart.n;
        Ok(match field("type") {
            Some("complex") => GCStructure::from_complex(m)?,
            Some("symplectic") => match field("omega") {
                Some(e) => GCStructure::from_symplectic(&self.form_ref(e)?)?,
                None => GCStructure::from_symplectic(&GCStructure::standard_omega(m))?,
            },
            Some("poisson") => {
                let name = field("bivector").ok_or_else(|| bad_data(d, "`bivector`"))?;
                match self.get(name).map_err(ExprError::Type)? {
                    Object::Bivector(b) => GCStructure::from_poisson(b)?,
                    _ => return Err(ExprError::Type(format!("`{name}` is not a bivector"))),
                }
            }
            Some("spinor") => {
                let e = field("spinor").ok_or_else(|| bad_data(d, "`spinor`"))?;
                GCStructure::from_spinor(&self.form_ref(e)?)?
            }
            _ => return Err(bad_data(d, "`type` among complex, symplectic, poisson, spinor")),
        })
    }

    fn form_ref(&self, e: &str) -> Result<genholo_core::forms::Form, ExprError> {
        match parse_as(e, self.chart, &self.env, Kind::Form)? {
            Value::Form(f) => Ok(f),
            _ => unreachable!("coerced to form"),
        }
    }
}

fn bad_data(d: &Def, what: &str) -> ExprError {
    ExprError::Type(format!("definition `{}`: data must be {what}", d.name))
}

fn json_text(v: &serde_json::Value) -> Option<String> {
    match v {
        serde_json::Value::String(s) => Some(s.clone()),
        serde_json::Value::Number(n) if n.is_i64() => Some(n.to_string()),
        _ => None,
    }
}

fn constant(d: &Def, v: &serde_json::Value, c: Chart) -> Result<GaussianRational, ExprError> {
    let text = json_text(v).ok_or_else(|| bad_data(d, "integers or expression strings"))?;
    parse_constant(&text, c)
}

/// Polynomial from a scalar value.
pub fn value_polynomial(v: &Value) -> Option<Polynomial> {
    v.as_scalar().and_then(|f| f.as_polynomial().cloned())
}

/// Runs every task with `jobs` worker threads; the report keeps task order.
pub fn run(file: &TaskFile, jobs: usize) -> Report {
    let ctx = Context::build(file);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let tasks = pool.install(|| file.tasks.par_iter().map(|t| run_task(&ctx, t)).collect::<Vec<_>>());
    Report::new(tasks)
}

fn run_task(ctx: &Context, t: &Task) -> TaskReport {
    let start = Instant::now();
    let result = ops::dispatch(ctx, t);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let expect_fail = t.options.get("expect").and_then(|v| v.as_str()) == Some("fail");
    let mut rep = TaskReport::new(&t.id, &t.op);
    rep.elapsed_ms = Some(elapsed_ms);
    match result {
        Ok(o) => {
            rep.status = if o.pass != expect_fail { Status::Pass } else { Status::Fail };
            rep.outcome = Some(if o.pass { "pass" } else { "fail" }.to_string());
            rep.witnesses = o.witnesses;
            rep.metrics = o.metrics;
            rep.message = o.message;
        }
        Err(e) => {
            rep.status = Status::Error;
            rep.message = Some(e);
        }
    }
    rep
}
