//! Expression language for scalars, forms and generalized vectors.
//!
//! ```text
//! expr := sum
//! sum  := ['-'] prod (('+' | '-') prod)*
//! prod := pow (('*' | '/') pow)*
//! pow  := atom ('^' (natural | atom))*
//! atom := integer | 'i' | ident | call | '(' expr ')'
//! ```
//!
//! `x^n` with a natural-number literal `n` is a power; `a^b` with any other
//! right operand is the wedge product. The canonical generalized-vector
//! text `vec: ...; form: ...` is accepted as a whole expression.

use std::collections::HashMap;
use std::fmt;

use genholo_core::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use genholo_core::forms::{hodge_star, Form};
use genholo_core::gtangent::GVector;
use num_bigint::BigInt;
use num_rational::BigRational;

/// A parsed value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Scalar(RationalFn),
    Form(Form),
    Vector(GVector),
}

/// Requested type of a parsed value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    Form,
    GVector,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("{line}:{column}: expected {}, found {found}", expected.join(" or "))]
    Parse { line: usize, column: usize, expected: Vec<String>, found: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("undefined name `{0}`")]
    Undefined(String),
    #[error("{0}")]
    Core(#[from] genholo_core::Error),
}

pub type ExprResult<T> = std::result::Result<T, ExprError>;

impl Value {
    pub fn chart(&self) -> Chart {
        match self {
            Value::Scalar(f) => f.chart(),
            Value::Form(a) => a.chart(),
            Value::Vector(v) => v.chart(),
        }
    }

    pub fn kind(&self) -> Kind {
        match self {
            Value::Scalar(_) => Kind::Scalar,
            Value::Form(_) => Kind::Form,
            Value::Vector(_) => Kind::GVector,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Scalar(_) => "scalar",
            Value::Form(_) => "form",
            Value::Vector(_) => "gvector",
        }
    }

    /// Scalars and degree-0 forms.
    pub fn as_scalar(&self) -> Option<RationalFn> {
        match self {
            Value::Scalar(f) => Some(f.clone()),
            Value::Form(a) if a.terms().all(|(m, _)| m == 0) => Some(a.coeff(0)),
            Value::Vector(v) if v.is_zero() => Some(RationalFn::zero(v.chart())),
            _ => None,
        }
    }

    pub fn as_form(&self) -> Option<Form> {
        match self {
            Value::Scalar(f) => Some(Form::scalar(f.clone())),
            Value::Form(a) => Some(a.clone()),
            Value::Vector(v) if v.vec().iter().all(RationalFn::is_zero) => Some(v.form().clone()),
            _ => None,
        }
    }

    /// Vectors, one-forms and zero.
    pub fn as_gvector(&self) -> Option<GVector> {
        match self {
            Value::Vector(v) => Some(v.clone()),
            Value::Scalar(f) if f.is_zero() => Some(GVector::zero(f.chart())),
            Value::Form(a) => GVector::from_form(a.clone()).ok(),
            _ => None,
        }
    }

    pub fn coerce(&self, kind: Kind) -> ExprResult<Value> {
        let got = match kind {
            Kind::Scalar => self.as_scalar().map(Value::Scalar),
            Kind::Form => self.as_form().map(Value::Form),
            Kind::GVector => self.as_gvector().map(Value::Vector),
        };
        got.ok_or_else(|| ExprError::Type(format!("expected {kind:?}, found {} `{self}`", self.type_name())))
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Scalar(x) => write!(f, "{x}"),
            Value::Form(x) => write!(f, "{x}"),
            Value::Vector(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
}

fn lex(src: &str, origin: (usize, usize)) -> ExprResult<Lexer> {
    let chars: Vec<char> = src.chars().collect();
    let (mut line, mut col) = origin;
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = (line, col);
        if c.is_ascii_digit() {
            let j = (i..chars.len()).find(|&k| !chars[k].is_ascii_digit()).unwrap_or(chars.len());
            let s: String = chars[i..j].iter().collect();
            toks.push((Tok::Int(s.parse().expect("digits")), start.0, start.1));
            col += j - i;
            i = j;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let j = (i..chars.len())
                .find(|&k| !(chars[k].is_ascii_alphanumeric() || chars[k] == '_'))
                .unwrap_or(chars.len());
            toks.push((Tok::Ident(chars[i..j].iter().collect()), start.0, start.1));
            col += j - i;
            i = j;
        } else if "+-*/^(),".contains(c) {
            toks.push((Tok::Sym(c), start.0, start.1));
            col += 1;
            i += 1;
        } else {
            return Err(ExprError::Parse {
                line,
                column: col,
                expected: vec!["an expression".into()],
                found: format!("`{c}`"),
            });
        }
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks })
}

/// Names bound in the environment of a parse.
pub type Env = HashMap<String, Value>;

struct Parser<'a> {
    chart: Chart,
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    env: &'a Env,
}

const BUILTINS: [&str; 10] = ["w", "cl", "cb", "d", "dbar", "del", "iX", "mu", "conj", "star"];

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> ExprResult<T> {
        let (tok, line, column) = &self.toks[self.pos];
        Err(ExprError::Parse {
            line: *line,
            column: *column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: tok.to_string(),
        })
    }

    fn expect(&mut self, c: char) -> ExprResult<()> {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            Ok(())
        } else {
            self.error(&[&format!("`{c}`")])
        }
    }

    fn sum(&mut self) -> ExprResult<Value> {
        let mut acc = if *self.peek() == Tok::Sym('-') {
            self.next();
            neg(self.prod()?)
        } else {
            self.prod()?
        };
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.next();
                    acc = add(acc, self.prod()?)?;
                }
                Tok::Sym('-') => {
                    self.next();
                    acc = add(acc, neg(self.prod()?))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn prod(&mut self) -> ExprResult<Value> {
        let mut acc = self.pow()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.next();
                    acc = mul(acc, self.pow()?)?;
                }
                Tok::Sym('/') => {
                    self.next();
                    acc = div(acc, self.pow()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn pow(&mut self) -> ExprResult<Value> {
        let mut acc = self.atom()?;
        while *self.peek() == Tok::Sym('^') {
            self.next();
            if let Tok::Int(n) = self.peek().clone() {
                self.next();
                let e: u32 = (&n).try_into().map_err(|_| ExprError::Type(format!("exponent {n} is too large")))?;
                acc = power(acc, e)?;
            } else if *self.peek() == Tok::Sym('-') {
                return self.error(&["a natural exponent", "a form"]);
            } else {
                let rhs = self.atom()?;
                if matches!((&acc, &rhs), (Value::Scalar(_), Value::Scalar(_))) {
                    return Err(ExprError::Type("exponent must be a natural number".into()));
                }
                acc = wedge(&acc, &rhs)?;
            }
        }
        Ok(acc)
    }

    fn atom(&mut self) -> ExprResult<Value> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.next();
                let c = GaussianRational::from(BigRational::from_integer(n));
                Ok(Value::Scalar(RationalFn::constant(self.chart, c)))
            }
            Tok::Sym('(') => {
                self.next();
                let v = self.sum()?;
                self.expect(')')?;
                Ok(v)
            }
            Tok::Sym('-') => {
                self.next();
                Ok(neg(self.pow()?))
            }
            Tok::Ident(name) => {
                self.next();
                if *self.peek() == Tok::Sym('(') && BUILTINS.contains(&name.as_str()) {
                    self.next();
                    let mut args = vec![self.sum()?];
                    while *self.peek() == Tok::Sym(',') {
                        self.next();
                        args.push(self.sum()?);
                    }
                    self.expect(')')?;
                    return call(self.chart, &name, args);
                }
                self.ident(&name)
            }
            _ => self.error(&["a number", "a name", "`(`"]),
        }
    }

    fn ident(&mut self, name: &str) -> ExprResult<Value> {
        let chart = self.chart;
        if name == "i" {
            return Ok(Value::Scalar(RationalFn::constant(chart, GaussianRational::i())));
        }
        for v in 0..chart.nvars() {
            if chart.var_name(v) == name {
                return Ok(Value::Scalar(RationalFn::var(chart, v)));
            }
        }
        for g in 0..chart.nvars() {
            if chart.gen_name(g) == name {
                return Ok(Value::Form(Form::gen(chart, g)));
            }
            if chart.vec_name(g) == name {
                return Ok(Value::Vector(GVector::coord(chart, g)));
            }
        }
        match self.env.get(name) {
            Some(v) => Ok(v.clone()),
            None => Err(ExprError::Undefined(name.to_string())),
        }
    }
}

fn neg(v: Value) -> Value {
    match v {
        Value::Scalar(f) => Value::Scalar(-f),
        Value::Form(a) => Value::Form(-a),
        Value::Vector(x) => Value::Vector(-&x),
    }
}

fn type_error<T>(op: &str, a: &Value, b: &Value) -> ExprResult<T> {
    Err(ExprError::Type(format!("cannot {op} {} and {}", a.type_name(), b.type_name())))
}

fn add(a: Value, b: Value) -> ExprResult<Value> {
    match (&a, &b) {
        (Value::Scalar(x), Value::Scalar(y)) => Ok(Value::Scalar(x + y)),
        (Value::Vector(_), _) | (_, Value::Vector(_)) => match (a.as_gvector(), b.as_gvector()) {
            (Some(x), Some(y)) => Ok(Value::Vector(&x + &y)),
            _ => type_error("add", &a, &b),
        },
        _ => {
            let (x, y) = (a.as_form().expect("form"), b.as_form().expect("form"));
            Ok(Value::Form(&x + &y))
        }
    }
}

fn mul(a: Value, b: Value) -> ExprResult<Value> {
    if let (Some(x), Some(y)) = (a.as_scalar(), b.as_scalar()) {
        return Ok(Value::Scalar(&x * &y));
    }
    let (s, other) = match (a.as_scalar(), b.as_scalar()) {
        (Some(s), _) => (s, b),
        (_, Some(s)) => (s, a),
        _ => return Err(ExprError::Type("product of two non-scalars; use `^` or w(...) to wedge".into())),
    };
    Ok(match other {
        Value::Form(x) => Value::Form(x.scale(&s)),
        Value::Vector(x) => Value::Vector(x.scale(&s)),
        Value::Scalar(x) => Value::Scalar(&x * &s),
    })
}

fn div(a: Value, b: Value) -> ExprResult<Value> {
    let d = b.as_scalar().ok_or_else(|| ExprError::Type(format!("cannot divide by {}", b.type_name())))?;
    let inv = d.inv().ok_or_else(|| ExprError::Type("division by zero".into()))?;
    mul(a, Value::Scalar(inv))
}

fn power(a: Value, e: u32) -> ExprResult<Value> {
    match a.as_scalar() {
        Some(s) => Ok(Value::Scalar(s.pow(e))),
        None => Err(ExprError::Type(format!("cannot raise {} to a power", a.type_name()))),
    }
}

fn wedge(a: &Value, b: &Value) -> ExprResult<Value> {
    match (a.as_form(), b.as_form()) {
        (Some(x), Some(y)) => Ok(Value::Form(x.wedge(&y))),
        _ => type_error("wedge", a, b),
    }
}

fn arity(name: &str, args: &[Value], n: usize) -> ExprResult<()> {
    if args.len() == n || (name == "w" && !args.is_empty()) {
        Ok(())
    } else {
        Err(ExprError::Type(format!("{name} takes {n} argument(s), got {}", args.len())))
    }
}

fn form_arg(name: &str, v: &Value) -> ExprResult<Form> {
    v.as_form().ok_or_else(|| ExprError::Type(format!("{name} expects a form, got {}", v.type_name())))
}

fn vec_arg(name: &str, v: &Value) -> ExprResult<GVector> {
    v.as_gvector().ok_or_else(|| ExprError::Type(format!("{name} expects a generalized vector, got {}", v.type_name())))
}

fn call(chart: Chart, name: &str, args: Vec<Value>) -> ExprResult<Value> {
    let n = match name {
        "w" => 0,
        "cl" | "cb" | "iX" | "mu" => 2,
        _ => 1,
    };
    arity(name, &args, n)?;
    match name {
        "w" => {
            let mut acc = Form::one(chart);
            for a in &args {
                acc = acc.wedge(&form_arg(name, a)?);
            }
            Ok(Value::Form(acc))
        }
        "cl" => Ok(Value::Form(vec_arg(name, &args[0])?.clifford(&form_arg(name, &args[1])?))),
        "cb" => Ok(Value::Vector(vec_arg(name, &args[0])?.courant(&vec_arg(name, &args[1])?))),
        "iX" => Ok(Value::Form(form_arg(name, &args[1])?.interior(vec_arg(name, &args[0])?.vec()))),
        "mu" => Ok(Value::Form(form_arg(name, &args[0])?.mukai(&form_arg(name, &args[1])?))),
        "d" => Ok(Value::Form(form_arg(name, &args[0])?.ext_d())),
        "dbar" => Ok(Value::Form(form_arg(name, &args[0])?.dbar_part())),
        "del" => Ok(Value::Form(form_arg(name, &args[0])?.del_part())),
        "star" => Ok(Value::Form(hodge_star(&form_arg(name, &args[0])?)?)),
        "conj" => Ok(match &args[0] {
            Value::Scalar(f) => Value::Scalar(f.conjugate()),
            Value::Form(a) => Value::Form(a.conjugate()),
            Value::Vector(v) => Value::Vector(v.conjugate()),
        }),
        _ => unreachable!("builtin list"),
    }
}

fn parse_sum(src: &str, origin: (usize, usize), chart: Chart, env: &Env) -> ExprResult<Value> {
    let lexer = lex(src, origin)?;
    let mut p = Parser { chart, toks: lexer.toks, pos: 0, env };
    let v = p.sum()?;
    if *p.peek() != Tok::End {
        return p.error(&["an operator", "end of input"]);
    }
    Ok(v)
}

/// Position just after `offset` characters of `src`, starting at 1:1.
fn position(src: &str, offset: usize) -> (usize, usize) {
    let mut pos = (1, 1);
    for c in src.chars().take(offset) {
        if c == '\n' {
            pos = (pos.0 + 1, 1);
        } else {
            pos.1 += 1;
        }
    }
    pos
}

/// Parses an expression over `chart`, resolving unknown names in `env`.
pub fn parse_expr(src: &str, chart: Chart, env: &Env) -> ExprResult<Value> {
    let trimmed = src.trim_start();
    let lead = src.chars().count() - trimmed.chars().count();
    if let Some(rest) = trimmed.strip_prefix("vec:") {
        let Some(split) = rest.find(';') else {
            let (line, column) = position(src, src.chars().count());
            return Err(ExprError::Parse { line, column, expected: vec!["`;`".into()], found: "end of input".into() });
        };
        let vec_src = &rest[..split];
        let after = &rest[split + 1..];
        let form_start = lead + 4 + vec_src.chars().count() + 1;
        let form_trim = after.trim_start();
        let Some(form_src) = form_trim.strip_prefix("form:") else {
            let (line, column) = position(src, form_start + after.chars().count() - form_trim.chars().count());
            return Err(ExprError::Parse {
                line,
                column,
                expected: vec!["`form:`".into()],
                found: "other text".into(),
            });
        };
        let v = parse_sum(vec_src, position(src, lead + 4), chart, env)?;
        let form_offset = form_start + after.chars().count() - form_trim.chars().count() + 5;
        let f = parse_sum(form_src, position(src, form_offset), chart, env)?;
        let v = v.as_gvector().filter(|x| x.form().is_zero());
        let f = f.as_form().filter(|a| a.is_zero() || a.degree() == Some(1));
        return match (v, f) {
            (Some(v), Some(f)) => Ok(Value::Vector(&v + &GVector::from_form(f)?)),
            _ => Err(ExprError::Type("`vec:` must hold a vector field and `form:` a one-form".into())),
        };
    }
    parse_sum(src, (1, 1), chart, env)
}

/// Parses and coerces to the requested kind.
pub fn parse_as(src: &str, chart: Chart, env: &Env, kind: Kind) -> ExprResult<Value> {
    parse_expr(src, chart, env)?.coerce(kind)
}

/// Parses a polynomial (a scalar with trivial denominator).
pub fn parse_polynomial(src: &str, chart: Chart, env: &Env) -> ExprResult<Polynomial> {
    let f = parse_as(src, chart, env, Kind::Scalar)?;
    match f {
        Value::Scalar(f) => {
            f.as_polynomial().cloned().ok_or_else(|| ExprError::Type(format!("`{src}` is not a polynomial")))
        }
        _ => unreachable!("coerced to scalar"),
    }
}

/// Parses a constant Gaussian rational such as `1/2-3*i`.
pub fn parse_constant(src: &str, chart: Chart) -> ExprResult<GaussianRational> {
    let f = parse_as(src, chart, &Env::new(), Kind::Scalar)?;
    match f {
        Value::Scalar(f) => f.constant_value().ok_or_else(|| ExprError::Type(format!("`{src}` is not a constant"))),
        _ => unreachable!("coerced to scalar"),
    }
}
