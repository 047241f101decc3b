//! Verification operations addressable from task files.

use genholo_core::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use genholo_core::forms::{Form, Orientation};
use genholo_core::gcs::{is_pure, GCStructure};
use genholo_core::pbundle::{
    build_spinor, build_spinor_unchecked, check_total_integrability, fiber_grid, mobius_theta,
};
use genholo_core::poismod::{
    canonical_module_check, from_sections, gh_check, jacobi_check, module_check, to_generalized, ConnectionMatrix,
    GHConnection, PoissonBivector,
};
use genholo_core::serre::{flux, star_identity, star_identity_scaled, validate_serre_data, QuadratureSpec};
use genholo_core::{Error, Verdict};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value as Json;

use crate::expr::{parse_as, parse_constant, parse_polynomial, Kind, Value};
use crate::report::{Metric, Witness};
use crate::task::{Context, Object, Points, Task};

/// Result of one operation before the expected-failure option is applied.
#[derive(Debug, Default)]
pub struct Outcome {
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    pub metrics: Vec<Metric>,
    pub message: Option<String>,
}

impl Outcome {
    fn passed() -> Self {
        Outcome { pass: true, ..Default::default() }
    }

    fn failed(msg: impl Into<String>) -> Self {
        Outcome { pass: false, message: Some(msg.into()), ..Default::default() }
    }

    fn from_verdict(v: Verdict) -> Self {
        Outcome { pass: v.pass, message: v.failure, ..Default::default() }
    }

    fn witness(mut self, name: &str, value: impl ToString) -> Self {
        self.witnesses.push(Witness { name: name.to_string(), value: value.to_string() });
        self
    }

    fn metric(mut self, name: &str, value: f64) -> Self {
        self.metrics.push(Metric { name: name.to_string(), value });
        self
    }

    fn require(mut self, ok: bool, msg: impl FnOnce() -> String) -> Self {
        if !ok {
            self.pass = false;
            let m = msg();
            self.message = Some(match self.message.take() {
                Some(prev) => format!("{prev}; {m}"),
                None => m,
            });
        }
        self
    }
}

type OpResult = Result<Outcome, String>;

pub const OPS: &[&str] = &[
    "check-pure",
    "integrable",
    "tau",
    "uk",
    "dolbeault",
    "module-check",
    "canonical-module",
    "from-sections",
    "gh-check",
    "jacobi",
    "submanifold",
    "serre-validate",
    "serre-flux",
    "star-identity",
    "mobius",
    "pbundle-build",
    "pbundle-integrable",
];

pub fn dispatch(ctx: &Context, t: &Task) -> OpResult {
    let a = Args { ctx, task: t };
    let res = match t.op.as_str() {
        "check-pure" => check_pure(&a),
        "integrable" => integrable(&a),
        "tau" => tau(&a),
        "uk" => uk(&a),
        "dolbeault" => dolbeault(&a),
        "module-check" => op_module_check(&a),
        "canonical-module" => canonical(&a),
        "from-sections" => op_from_sections(&a),
        "gh-check" => op_gh_check(&a),
        "jacobi" => jacobi(&a),
        "submanifold" => submanifold(&a),
        "serre-validate" => serre_validate(&a),
        "serre-flux" => serre_flux(&a),
        "star-identity" => op_star_identity(&a),
        "mobius" => mobius(&a),
        "pbundle-build" => pbundle_build(&a),
        "pbundle-integrable" => pbundle_integrable(&a),
        other => return Err(format!("unknown op `{other}`")),
    };
    res.or_else(|e| match e {
        Failure::Verdict(m) => Ok(Outcome::failed(m)),
        Failure::Error(m) => Err(m),
    })
}

/// Errors that amount to a negative verdict versus unusable input.
enum Failure {
    Verdict(String),
    Error(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NoWitness(_)
            | Error::NonIntegrable(_)
            | Error::GHCheckFail(_)
            | Error::ImpureSpinor(_)
            | Error::JacobiFail(_)
            | Error::NotDivisible(_)
            | Error::SingularP
            | Error::NotUnimodular(_)
            | Error::NotInEbar(_)
            | Error::UInconsistent(_)
            | Error::QuadratureDiverged { .. } => Failure::Verdict(e.to_string()),
            _ => Failure::Error(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Error(e)
    }
}

impl From<crate::expr::ExprError> for Failure {
    fn from(e: crate::expr::ExprError) -> Self {
        Failure::Error(e.to_string())
    }
}

type R<T> = Result<T, Failure>;

struct Args<'a> {
    ctx: &'a Context,
    task: &'a Task,
}

impl<'a> Args<'a> {
    fn chart(&self) -> Chart {
        self.ctx.chart
    }

    fn name(&self, key: &str) -> R<&'a str> {
        self.task.args.get(key).map(String::as_str).ok_or_else(|| Failure::Error(format!("missing argument `{key}`")))
    }

    fn has(&self, key: &str) -> bool {
        self.task.args.contains_key(key)
    }

    fn object(&self, key: &str) -> R<&'a Object> {
        let name = self.name(key)?;
        Ok(self.ctx.get(name)?)
    }

    fn structure(&self, key: &str) -> R<std::sync::Arc<GCStructure>> {
        match self.object(key)? {
            Object::Structure(s) => Ok(s.clone()),
            Object::Value(v) => Ok(std::sync::Arc::new(GCStructure::from_spinor(&as_form(v)?)?)),
            _ => Err(Failure::Error(format!("argument `{key}` must be a structure"))),
        }
    }

    fn bivector(&self, key: &str) -> R<&'a PoissonBivector> {
        match self.object(key)? {
            Object::Bivector(b) => Ok(b),
            _ => Err(Failure::Error(format!("argument `{key}` must be a bivector"))),
        }
    }

    fn value(&self, key: &str) -> R<&'a Value> {
        match self.object(key)? {
            Object::Value(v) => Ok(v),
            _ => Err(Failure::Error(format!("argument `{key}` must be a scalar, form or gvector"))),
        }
    }

    fn form(&self, key: &str) -> R<Form> {
        as_form(self.value(key)?)
    }

    fn matrix(&self, key: &str) -> R<&'a Vec<Vec<Value>>> {
        match self.object(key)? {
            Object::Matrix(m) => Ok(m),
            _ => Err(Failure::Error(format!("argument `{key}` must be a matrix"))),
        }
    }

    fn points(&self, key: &str) -> R<&'a Points> {
        match self.object(key)? {
            Object::Points(p) => Ok(p),
            _ => Err(Failure::Error(format!("argument `{key}` must be points"))),
        }
    }

    fn opt(&self, key: &str) -> Option<&'a Json> {
        self.task.options.get(key)
    }

    fn opt_u32(&self, key: &str, default: u32) -> R<u32> {
        match self.opt(key) {
            None => Ok(default),
            Some(v) => v
                .as_u64()
                .and_then(|x| u32::try_from(x).ok())
                .ok_or_else(|| Failure::Error(format!("option `{key}` must be a nonnegative integer"))),
        }
    }

    fn opt_str(&self, key: &str) -> R<Option<&'a str>> {
        match self.opt(key) {
            None => Ok(None),
            Some(v) => v.as_str().map(Some).ok_or_else(|| Failure::Error(format!("option `{key}` must be a string"))),
        }
    }

    fn opt_expr(&self, key: &str, kind: Kind) -> R<Option<Value>> {
        match self.opt_str(key)? {
            None => Ok(None),
            Some(s) => Ok(Some(parse_as(s, self.chart(), self.ctx.env(), kind)?)),
        }
    }

    /// Sample points from the `points` argument, or a default grid that
    /// meets the coordinate hyperplanes.
    fn sample_points(&self) -> R<Vec<Vec<GaussianRational>>> {
        if self.has("points") {
            return Ok(self.points("points")?.points.clone());
        }
        Ok(default_points(self.chart()))
    }
}

fn as_form(v: &Value) -> R<Form> {
    v.as_form().ok_or_else(|| Failure::Error(format!("expected a form, found a {}", v.type_name())))
}

fn default_points(chart: Chart) -> Vec<Vec<GaussianRational>> {
    let g = |re, im| GaussianRational::from_parts((re, 1), (im, 1));
    let base = [g(0, 0), g(1, 0), g(0, 1), g(2, -1), g(-1, 3)];
    let n = chart.n;
    let mut out = Vec::new();
    for (k, first) in base.iter().enumerate() {
        let mut p = vec![first.clone()];
        for j in 1..n {
            p.push(base[(k + 2 * j + 1) % base.len()].clone());
        }
        out.push(p);
    }
    out
}

fn point_text(p: &[GaussianRational]) -> String {
    format!("({})", p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))
}

fn check_pure(a: &Args) -> R<Outcome> {
    let rho = match a.object("structure") {
        Ok(Object::Structure(s)) => s.rho().clone(),
        _ => a.form("spinor")?,
    };
    let mut out = Outcome::passed();
    for p in a.sample_points()? {
        let v = is_pure(&rho, &p)?;
        out = out.require(v.pure, || {
            format!("not pure at {} (annihilator dimension {})", point_text(&p), v.annihilator_dim)
        });
    }
    let pairing = rho.mukai(&rho.conjugate());
    out = out.require(!pairing.is_zero(), || "pairing with the conjugate vanishes".into());
    Ok(out.witness("pairing", pairing))
}

fn integrable(a: &Args) -> R<Outcome> {
    let s = a.structure("structure")?;
    let w = s.check_integrable()?;
    let mut out = Outcome::passed().witness("witness", &w);
    if let Some(expected) = a.opt_expr("witness", Kind::GVector)? {
        let expected = expected.as_gvector().expect("coerced");
        let slack = &w - &expected;
        let ok = slack.clifford(s.rho()).is_zero();
        out = out.require(ok, || format!("witness differs from {expected} by {slack}, which is not in E"));
    }
    Ok(out)
}

fn tau(a: &Args) -> R<Outcome> {
    let s = a.structure("structure")?;
    let t = s.tau();
    let mut out = Outcome::passed().witness("tau", &t);
    if let Some(expected) = a.opt_expr("equals", Kind::Scalar)? {
        let expected = expected.as_scalar().expect("coerced");
        out = out.require(t == expected, || format!("tau = {t}, expected {expected}"));
    }
    if let Some(types) = a.opt("types") {
        let types = types
            .as_array()
            .ok_or_else(|| Failure::Error("option `types` must be a list".into()))?
            .iter()
            .map(|x| x.as_u64().ok_or_else(|| Failure::Error("option `types` must hold integers".into())))
            .collect::<R<Vec<_>>>()?;
        let points = a.points("points")?;
        if types.len() != points.points.len() {
            return Err(Failure::Error("option `types` needs one entry per point".into()));
        }
        for (p, &want) in points.points.iter().zip(&types) {
            let got = s.type_at(p)?;
            out =
                out.require(u64::from(got) == want, || format!("type at {} is {got}, expected {want}", point_text(p)));
        }
    }
    Ok(out)
}

fn uk(a: &Args) -> R<Outcome> {
    let s = a.structure("structure")?;
    let f = a.form("form")?;
    let dec = s.uk_decompose(&f)?;
    let mut out = Outcome::passed();
    for k in dec.support() {
        out = out.witness(&format!("U{k}"), dec.level(k));
    }
    out = out.require(dec.sum() == f, || "components do not recombine to the form".into());
    if let Some(level) = a.opt("level") {
        let level = level.as_i64().ok_or_else(|| Failure::Error("option `level` must be an integer".into()))?;
        let support = dec.support();
        out = out.require(support.iter().all(|&k| i64::from(k) == level), || {
            format!("form has components in levels {support:?}, expected only {level}")
        });
        if a.opt("check_d").and_then(Json::as_bool) == Some(true) {
            let (lower, upper) = s.decompose_d(&f)?;
            out = out.witness("dbar", &lower).witness("del", &upper);
        }
    }
    Ok(out)
}

/// Every monomial in all real-chart variables up to `deg`.
fn all_monomials(chart: Chart, deg: u32) -> Vec<Polynomial> {
    let n = chart.nvars();
    let mut out = vec![Polynomial::one(chart)];
    let mut frontier = vec![(vec![0u16; n], 0usize)];
    for _ in 0..deg {
        let mut next = Vec::new();
        for (e, start) in &frontier {
            for v in *start..n {
                let mut e2 = e.clone();
                e2[v] += 1;
                let p = Polynomial::monomial(chart, e2.clone().into(), GaussianRational::from_int(1));
                out.push(p);
                next.push((e2, v));
            }
        }
        frontier = next;
    }
    out
}

fn dolbeault(a: &Args) -> R<Outcome> {
    let s = a.structure("structure")?;
    let fs: Vec<RationalFn> = if a.has("function") {
        let v = a.value("function")?;
        vec![v.as_scalar().ok_or_else(|| Failure::Error("argument `function` must be a scalar".into()))?]
    } else {
        let deg = a.opt_u32("degree", 3)?;
        all_monomials(a.chart(), deg)
            .into_iter()
            .map(|p| RationalFn::new(p, Polynomial::one(a.chart())).expect("nonzero"))
            .collect()
    };
    let mut out = Outcome::passed().metric("functions", fs.len() as f64);
    for f in &fs {
        let Some(closed) = s.dolbeault_closed_form(f) else {
            return Err(Failure::Error("structure has no closed-form Dolbeault operator".into()));
        };
        let projected = s.dolbeault_function(f);
        if fs.len() == 1 {
            out = out.witness("dbar_J", &projected);
        }
        out = out.require(projected == closed, || format!("f = {f}: projection {projected} differs from {closed}"));
    }
    Ok(out)
}

/// Connection matrix whose entries are holomorphic vector fields.
fn connection(a: &Args, key: &str) -> R<ConnectionMatrix> {
    let m = a.matrix(key)?;
    let chart = a.chart();
    let entries = m
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    let g = v
                        .as_gvector()
                        .ok_or_else(|| Failure::Error(format!("matrix `{key}` holds a {}", v.type_name())))?;
                    if !g.form().is_zero() {
                        return Err(Failure::Error(format!("entry {g} of `{key}` must be a vector field")));
                    }
                    Ok(g.vec().to_vec())
                })
                .collect::<R<Vec<_>>>()
        })
        .collect::<R<Vec<_>>>()?;
    Ok(ConnectionMatrix::new(chart, entries)?)
}

fn polynomial_matrix(a: &Args, key: &str) -> R<Vec<Vec<Polynomial>>> {
    a.matrix(key)?
        .iter()
        .map(|row| {
            row.iter()
                .map(|v| {
                    v.as_scalar()
                        .and_then(|f| f.as_polynomial().cloned())
                        .ok_or_else(|| Failure::Error(format!("matrix `{key}` must hold polynomials")))
                })
                .collect()
        })
        .collect()
}

fn op_module_check(a: &Args) -> R<Outcome> {
    let sigma = a.bivector("bivector")?;
    let c = connection(a, "connection")?;
    let bound = a.opt_u32("bound", 2)?;
    Ok(Outcome::from_verdict(module_check(sigma, &c, bound)))
}

fn canonical(a: &Args) -> R<Outcome> {
    let sigma = a.bivector("bivector")?;
    let bound = a.opt_u32("bound", 3)?;
    let y = genholo_core::poismod::canonical_module(sigma);
    Ok(Outcome::from_verdict(canonical_module_check(sigma, bound)).witness("connection", y))
}

fn op_from_sections(a: &Args) -> R<Outcome> {
    let p = polynomial_matrix(a, "sections")?;
    let m = from_sections(&p)?;
    let bound = a.opt_u32("bound", 2)?;
    Ok(Outcome::from_verdict(module_check(&m.sigma, &m.connection, bound))
        .witness("bivector", &m.sigma)
        .witness("connection", &m.connection)
        .witness("det", &m.det))
}

/// Generalized holomorphic connection: either given directly with
/// `generalized: true`, or converted from a Poisson connection matrix.
fn gh_connection(a: &Args, s: &GCStructure) -> R<GHConnection> {
    if a.opt("generalized").and_then(Json::as_bool) == Some(true) {
        let m = a.matrix("connection")?;
        let entries = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| v.as_gvector().ok_or_else(|| Failure::Error("connection entries must be gvectors".into())))
                    .collect::<R<Vec<_>>>()
            })
            .collect::<R<Vec<_>>>()?;
        return Ok(GHConnection::new(entries, s)?);
    }
    if a.has("sections") {
        let p = polynomial_matrix(a, "sections")?;
        return Ok(to_generalized(&from_sections(&p)?.connection, s)?);
    }
    Ok(to_generalized(&connection(a, "connection")?, s)?)
}

fn op_gh_check(a: &Args) -> R<Outcome> {
    let s = a.structure("structure")?;
    let g = gh_connection(a, &s)?;
    Ok(Outcome::from_verdict(gh_check(&g, &s)?).witness("connection", &g))
}

fn jacobi(a: &Args) -> R<Outcome> {
    let sigma = a.bivector("bivector")?;
    let bound = a.opt_u32("bound", 2)?;
    jacobi_check(sigma, bound)?;
    Ok(Outcome::passed())
}

fn submanifold(a: &Args) -> R<Outcome> {
    let s = a.structure("structure")?;
    let tangent = match a.opt("tangent") {
        None => Vec::new(),
        Some(t) => t
            .as_array()
            .ok_or_else(|| Failure::Error("option `tangent` must be a list of expressions".into()))?
            .iter()
            .map(|e| {
                let src = e
                    .as_str()
                    .ok_or_else(|| Failure::Error("option `tangent` must be a list of expressions".into()))?;
                Ok(parse_as(src, a.chart(), a.ctx.env(), Kind::GVector)?.as_gvector().expect("coerced"))
            })
            .collect::<R<Vec<_>>>()?,
    };
    let mut out = Outcome::passed();
    for p in &a.points("points")?.points {
        let v = s.submanifold_check(&tangent, p)?;
        out = out.require(v.via_j == v.via_uk, || format!("criteria disagree at {}", point_text(p)));
        out = out
            .require(v.generalized_complex, || format!("not a generalized complex submanifold at {}", point_text(p)));
    }
    Ok(out)
}

fn serre_validate(a: &Args) -> R<Outcome> {
    let s = a.structure("structure")?;
    let pts = a.points("points")?;
    let weights =
        pts.weights.as_ref().ok_or_else(|| Failure::Error("points need `weights` for serre-validate".into()))?;
    let v = validate_serre_data(&pts.points, weights, &s)?;
    let mut out = Outcome { pass: v.pass, ..Default::default() }
        .witness("weights_balanced", v.weights_balanced)
        .witness("in_u0", v.in_u0);
    if let Some(z) = v.sigma_t_zero {
        out = out.witness("sigma_t_zero", z);
    }
    if !v.failures.is_empty() {
        out.message = Some(v.failures.join("; "));
    }
    Ok(out)
}

pub fn parse_radius(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let parse = |t: &str| t.trim().parse::<BigInt>().map_err(|_| format!("invalid radius `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d == BigInt::from(0) {
                return Err(format!("invalid radius `{s}`"));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(s)?)),
    }
}

fn serre_flux(a: &Args) -> R<Outcome> {
    let radii = match a.opt("radii") {
        None => vec!["1/2".to_string(), "2".to_string()],
        Some(r) => r
            .as_array()
            .ok_or_else(|| Failure::Error("option `radii` must be a list".into()))?
            .iter()
            .map(|x| match x {
                Json::String(s) => Ok(s.clone()),
                Json::Number(n) => Ok(n.to_string()),
                _ => Err(Failure::Error("radii must be strings or integers".into())),
            })
            .collect::<R<Vec<_>>>()?,
    };
    let radii = radii.iter().map(|r| parse_radius(r)).collect::<Result<Vec<_>, _>>()?;
    let mut spec =
        QuadratureSpec::new(a.opt_u32("eta_order", 24)? as usize, a.opt_u32("xi_order", 48)? as usize, radii)?;
    if let Some(t) = a.opt("tolerance") {
        spec = spec
            .with_tolerance(t.as_f64().ok_or_else(|| Failure::Error("option `tolerance` must be a number".into()))?);
    }
    let c2 = Chart::new(2);
    let f = match a.opt_str("test_fn")? {
        None => Polynomial::one(c2),
        Some(s) => parse_polynomial(s, c2, &Default::default())?,
    };
    let r = flux(&spec, &f)?;
    let mut out = Outcome::passed().witness("test_fn", &f);
    for (rad, v) in r.radii.iter().zip(&r.values) {
        out = out.metric(&format!("flux_re@{rad}"), v.re).metric(&format!("flux_im@{rad}"), v.im);
    }
    out = out
        .metric("extrapolated_re", r.extrapolated.re)
        .metric("extrapolated_im", r.extrapolated.im)
        .metric("spread", r.spread);
    out = out.require(r.spread < spec.tolerance, || format!("spread {:e} exceeds {:e}", r.spread, spec.tolerance));
    Ok(out)
}

fn op_star_identity(a: &Args) -> R<Outcome> {
    let o = match a.opt_str("orientation")? {
        None | Some("standard") => Orientation::Standard,
        Some("reversed") => Orientation::Reversed,
        Some(other) => return Err(Failure::Error(format!("unknown orientation `{other}`"))),
    };
    let id = star_identity(o);
    let mut out = Outcome::from_verdict(id.verdict()).witness("lhs", &id.lhs).witness("rhs", &id.rhs);
    if let Some(s) = a.opt_str("scale")? {
        let lambda = parse_constant(s, Chart::new(2))?;
        let v = star_identity_scaled(&lambda)?;
        out = out.require(v.pass, || v.failure.clone().unwrap_or_default());
    }
    Ok(out)
}

fn mobius(a: &Args) -> R<Outcome> {
    let m = polynomial_matrix(a, "matrix")?;
    let t = mobius_theta(&m)?;
    Ok(Outcome::passed()
        .witness("theta", &t.theta)
        .witness("alpha", &t.alpha)
        .witness("flat", t.flat)
        .require(t.flat, || "a^-1 da is not flat".into())
        .require(t.structure_equation, || "d(dw + theta) differs from alpha ^ (dw + theta)".into()))
}

fn total_spinor(a: &Args) -> R<(Form, std::sync::Arc<GCStructure>)> {
    let s = a.structure("structure")?;
    let g = if a.has("connection") || a.has("sections") { gh_connection(a, &s)? } else { GHConnection::zero(&s, 2) };
    let unchecked = a.opt("unchecked").and_then(Json::as_bool) == Some(true);
    let rho = if unchecked { build_spinor_unchecked(&g, &s)? } else { build_spinor(&g, &s)? };
    Ok((rho, s))
}

fn pbundle_build(a: &Args) -> R<Outcome> {
    let (rho, _) = total_spinor(a)?;
    Ok(Outcome::passed().witness("spinor", &rho))
}

fn pbundle_integrable(a: &Args) -> R<Outcome> {
    let (rho, _) = total_spinor(a)?;
    let base = a.sample_points()?;
    let pts = fiber_grid(&base);
    let t = check_total_integrability(&rho, &pts)?;
    Ok(Outcome::passed().witness("spinor", &rho).witness("witness", &t.witness).metric("points", pts.len() as f64))
}
