//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Terms are kept strictly descending in graded-lex order: total degree
//! first, then exponents compared in variable index order
//! (`z1, zb1, z2, zb2, ..., w, wb`), larger exponent first. Zero
//! coefficients are never stored, so structural equality is mathematical
//! equality.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::chart::Chart;
use super::gaussian::GaussianRational;
use crate::error::{Error, Result};

pub type Exponents = SmallVec<[u16; 6]>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    chart: Chart,
    terms: Vec<(Exponents, GaussianRational)>,
}

fn total_degree(e: &[u16]) -> u32 {
    e.iter().map(|&x| u32::from(x)).sum()
}

/// Graded-lex comparison; `Greater` means `a` sorts first.
pub fn glex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    total_degree(a).cmp(&total_degree(b)).then_with(|| a.cmp(b))
}

fn divides(a: &[u16], b: &[u16]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

impl Polynomial {
    pub fn zero(chart: Chart) -> Self {
        Polynomial { chart, terms: Vec::new() }
    }

    pub fn one(chart: Chart) -> Self {
        Self::constant(chart, GaussianRational::one())
    }

    pub fn constant(chart: Chart, c: GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero(chart);
        }
        Polynomial { chart, terms: vec![(SmallVec::from_elem(0, chart.nvars()), c)] }
    }

    pub fn from_int(chart: Chart, n: i64) -> Self {
        Self::constant(chart, GaussianRational::from_int(n))
    }

    /// The coordinate function with variable index `idx`.
    pub fn var(chart: Chart, idx: usize) -> Self {
        let mut e: Exponents = SmallVec::from_elem(0, chart.nvars());
        e[idx] = 1;
        Polynomial { chart, terms: vec![(e, GaussianRational::one())] }
    }

    pub fn monomial(chart: Chart, exps: Exponents, c: GaussianRational) -> Self {
        assert_eq!(exps.len(), chart.nvars());
        if c.is_zero() {
            return Self::zero(chart);
        }
        Polynomial { chart, terms: vec![(exps, c)] }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, possibly zero) terms.
    pub fn from_terms<I>(chart: Chart, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponents, GaussianRational)>,
    {
        let mut acc: HashMap<Exponents, GaussianRational> = HashMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), chart.nvars());
            match acc.get_mut(&e) {
                Some(v) => *v += &c,
                None => {
                    acc.insert(e, c);
                }
            }
        }
        Self::from_map(chart, acc)
    }

    fn from_map(chart: Chart, acc: HashMap<Exponents, GaussianRational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| glex_cmp(&b.0, &a.0));
        Polynomial { chart, terms }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn terms(&self) -> &[(Exponents, GaussianRational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.iter().all(|&x| x == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && !self.is_zero() && self.terms[0].1.is_one()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    /// Value of a constant polynomial.
    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.is_zero() {
            Some(GaussianRational::zero())
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn leading(&self) -> Option<&(Exponents, GaussianRational)> {
        self.terms.first()
    }

    /// Leading coefficient (graded-lex); zero for the zero polynomial.
    pub fn lc(&self) -> GaussianRational {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(GaussianRational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|t| total_degree(&t.0)).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|t| t.0[var]).max().unwrap_or(0)
    }

    /// Bit mask of the variables that occur.
    pub fn vars_used(&self) -> u64 {
        let mut m = 0u64;
        for (e, _) in &self.terms {
            for (i, &x) in e.iter().enumerate() {
                if x > 0 {
                    m |= 1 << i;
                }
            }
        }
        m
    }

    fn check_chart(&self, o: &Polynomial) {
        assert_eq!(self.chart, o.chart, "polynomials live on different charts");
    }

    pub fn scale(&self, c: &GaussianRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.chart);
        }
        Polynomial { chart: self.chart, terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect() }
    }

    /// Multiplies by the monomial `exps`.
    pub fn shift(&self, exps: &[u16]) -> Polynomial {
        Polynomial {
            chart: self.chart,
            terms: self
                .terms
                .iter()
                .map(|(e, k)| (e.iter().zip(exps).map(|(a, b)| a + b).collect(), k.clone()))
                .collect(),
        }
    }

    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            None => self.clone(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.inv().unwrap()),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.chart);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to variable `var`.
    pub fn derive(&self, var: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .map(|(e, c)| {
                let mut e2 = e.clone();
                let k = e2[var];
                e2[var] -= 1;
                (e2, c * &GaussianRational::from_int(i64::from(k)))
            })
            .collect();
        // Differentiation of one variable keeps graded-lex order of the rest.
        let mut p = Polynomial { chart: self.chart, terms };
        p.terms.sort_by(|a, b| glex_cmp(&b.0, &a.0));
        p
    }

    /// Swaps `z_i <-> zb_i` (and `w <-> wb`) and conjugates coefficients.
    pub fn conjugate(&self) -> Polynomial {
        let mut terms: Vec<_> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut e2 = e.clone();
                for pair in e2.chunks_mut(2) {
                    pair.swap(0, 1);
                }
                (e2, c.conj())
            })
            .collect();
        terms.sort_by(|a, b| glex_cmp(&b.0, &a.0));
        Polynomial { chart: self.chart, terms }
    }

    /// Evaluates with an explicit value for every variable.
    pub fn eval_vars(&self, values: &[GaussianRational]) -> GaussianRational {
        assert_eq!(values.len(), self.chart.nvars());
        let mut acc = GaussianRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = &t * &values[i].pow(u32::from(k));
                }
            }
            acc += &t;
        }
        acc
    }

    /// Evaluates at a point given by one value per complex coordinate
    /// (`z_1..z_n`, then `w` on fibered charts); barred variables receive
    /// the conjugate values.
    pub fn eval(&self, point: &[GaussianRational]) -> GaussianRational {
        self.eval_vars(&point_to_vars(self.chart, point))
    }

    /// Substitutes a constant for one variable.
    pub fn substitute(&self, var: usize, value: &GaussianRational) -> Polynomial {
        let terms = self.terms.iter().map(|(e, c)| {
            let mut e2 = e.clone();
            let k = e2[var];
            e2[var] = 0;
            (e2, c * &value.pow(u32::from(k)))
        });
        Polynomial::from_terms(self.chart, terms.collect::<Vec<_>>())
    }

    /// Re-embeds into a chart with the same base and extra trailing variables.
    pub fn lift(&self, chart: Chart) -> Polynomial {
        assert!(chart.n == self.chart.n && chart.nvars() >= self.chart.nvars());
        let extra = chart.nvars() - self.chart.nvars();
        Polynomial {
            chart,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2.extend(std::iter::repeat_n(0, extra));
                    (e2, c.clone())
                })
                .collect(),
        }
    }

    /// True when no barred (antiholomorphic) variable occurs.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.iter().skip(1).step_by(2).all(|&x| x == 0))
    }

    /// Exact quotient `self / q`, or `NotDivisible` when `q` does not divide.
    pub fn div_exact(&self, q: &Polynomial) -> Result<Polynomial> {
        self.check_chart(q);
        if q.is_zero() {
            return Err(Error::NotDivisible("division by the zero polynomial".into()));
        }
        if let Some(c) = q.constant_value() {
            return Ok(self.scale(&c.inv().unwrap()));
        }
        if q.is_monomial() {
            let (qe, qc) = &q.terms[0];
            let inv = qc.inv().unwrap();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (e, c) in &self.terms {
                if !divides(qe, e) {
                    return Err(Error::NotDivisible(format!("{q} does not divide {self}")));
                }
                terms.push((e.iter().zip(qe).map(|(a, b)| a - b).collect(), c * &inv));
            }
            return Ok(Polynomial { chart: self.chart, terms });
        }
        let (lq_e, lq_c) = &q.terms[0];
        let lq_inv = lq_c.inv().unwrap();
        let mut rem = self.clone();
        let mut quot: Vec<(Exponents, GaussianRational)> = Vec::new();
        while let Some((re, rc)) = rem.terms.first() {
            if !divides(lq_e, re) {
                return Err(Error::NotDivisible(format!("{q} does not divide {self}")));
            }
            let te: Exponents = re.iter().zip(lq_e).map(|(a, b)| a - b).collect();
            let tc = rc * &lq_inv;
            let sub = q.shift(&te).scale(&tc);
            rem = &rem - &sub;
            quot.push((te, tc));
        }
        // Quotient terms are produced in strictly descending order.
        Ok(Polynomial { chart: self.chart, terms: quot })
    }

    /// Coefficients with respect to `var`: entry `k` multiplies `var^k`.
    pub fn to_univariate(&self, var: usize) -> Vec<Polynomial> {
        let deg = usize::from(self.degree_in(var));
        let mut buckets: Vec<Vec<(Exponents, GaussianRational)>> = vec![Vec::new(); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = usize::from(e2[var]);
            e2[var] = 0;
            buckets[k].push((e2, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut ts| {
                ts.sort_by(|a, b| glex_cmp(&b.0, &a.0));
                Polynomial { chart: self.chart, terms: ts }
            })
            .collect()
    }

    pub fn from_univariate(chart: Chart, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            for (e, v) in &c.terms {
                let mut e2 = e.clone();
                e2[var] += k as u16;
                terms.push((e2, v.clone()));
            }
        }
        terms.sort_by(|a, b| glex_cmp(&b.0, &a.0));
        Polynomial { chart, terms }
    }

    /// Largest monomial dividing every term, and the cofactor.
    pub fn split_monomial_content(&self) -> (Exponents, Polynomial) {
        let nv = self.chart.nvars();
        let mut m: Exponents = SmallVec::from_elem(u16::MAX, nv);
        for (e, _) in &self.terms {
            for (a, &b) in m.iter_mut().zip(e.iter()) {
                *a = (*a).min(b);
            }
        }
        if self.terms.is_empty() {
            m = SmallVec::from_elem(0, nv);
        }
        if m.iter().all(|&x| x == 0) {
            return (m, self.clone());
        }
        let terms =
            self.terms.iter().map(|(e, c)| (e.iter().zip(m.iter()).map(|(a, b)| a - b).collect(), c.clone())).collect();
        (m, Polynomial { chart: self.chart, terms })
    }

    /// Complexity score used to prefer simple pivots.
    pub fn weight(&self) -> usize {
        self.terms.len() * 16 + self.total_degree() as usize
    }
}

/// Expands per-coordinate values into a full variable assignment.
pub fn point_to_vars(chart: Chart, point: &[GaussianRational]) -> Vec<GaussianRational> {
    assert_eq!(point.len(), chart.complex_dim(), "point has wrong number of coordinates");
    let mut vals = Vec::with_capacity(chart.nvars());
    for p in point {
        vals.push(p.clone());
        vals.push(p.conj());
    }
    vals
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, o: &Polynomial) -> Polynomial {
        self.check_chart(o);
        merge(self, o, false)
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, o: &Polynomial) -> Polynomial {
        self.check_chart(o);
        merge(self, o, true)
    }
}

fn merge(a: &Polynomial, b: &Polynomial, negate_b: bool) -> Polynomial {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    while i < a.terms.len() || j < b.terms.len() {
        let ord = if i == a.terms.len() {
            Ordering::Less
        } else if j == b.terms.len() {
            Ordering::Greater
        } else {
            glex_cmp(&a.terms[i].0, &b.terms[j].0)
        };
        match ord {
            Ordering::Greater => {
                out.push(a.terms[i].clone());
                i += 1;
            }
            Ordering::Less => {
                let (e, c) = &b.terms[j];
                out.push((e.clone(), if negate_b { -c } else { c.clone() }));
                j += 1;
            }
            Ordering::Equal => {
                let c = if negate_b { &a.terms[i].1 - &b.terms[j].1 } else { &a.terms[i].1 + &b.terms[j].1 };
                if !c.is_zero() {
                    out.push((a.terms[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    Polynomial { chart: a.chart, terms: out }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, o: &Polynomial) -> Polynomial {
        self.check_chart(o);
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero(self.chart);
        }
        if let Some(c) = self.constant_value() {
            return o.scale(&c);
        }
        if let Some(c) = o.constant_value() {
            return self.scale(&c);
        }
        if o.terms.len() == 1 {
            let (e, c) = &o.terms[0];
            return self.shift(e).scale(c);
        }
        if self.terms.len() == 1 {
            let (e, c) = &self.terms[0];
            return o.shift(e).scale(c);
        }
        let mut acc: HashMap<Exponents, GaussianRational> = HashMap::with_capacity(self.terms.len() * o.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += &c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        Polynomial::from_map(self.chart, acc)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { chart: self.chart, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, o: Polynomial) -> Polynomial {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// How a coefficient multiplies a symbol in canonical text.
pub(crate) enum CoeffStyle {
    One,
    MinusOne,
    /// Real or purely imaginary: printed inline with its sign.
    Inline(String),
    /// Both parts nonzero: printed in parentheses.
    Paren(String),
}

pub(crate) fn coeff_style(c: &GaussianRational) -> CoeffStyle {
    if c.is_one() {
        CoeffStyle::One
    } else if (-c).is_one() {
        CoeffStyle::MinusOne
    } else if c.is_real() || c.is_imaginary() {
        CoeffStyle::Inline(c.to_string())
    } else {
        CoeffStyle::Paren(format!("({c})"))
    }
}

/// Renders `coeff * symbol` (symbol may be empty for a constant).
pub(crate) fn render_term(c: &GaussianRational, symbol: &str) -> String {
    if symbol.is_empty() {
        return match coeff_style(c) {
            CoeffStyle::Paren(s) => s,
            _ => c.to_string(),
        };
    }
    match coeff_style(c) {
        CoeffStyle::One => symbol.to_string(),
        CoeffStyle::MinusOne => format!("-{symbol}"),
        CoeffStyle::Inline(s) | CoeffStyle::Paren(s) => format!("{s}*{symbol}"),
    }
}

pub(crate) fn join_terms(parts: impl IntoIterator<Item = String>) -> String {
    let mut out = String::new();
    for p in parts {
        if !out.is_empty() && !p.starts_with('-') {
            out.push('+');
        }
        out.push_str(&p);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl Polynomial {
    pub(crate) fn monomial_text(&self, e: &[u16]) -> String {
        let mut parts = Vec::new();
        for (i, &k) in e.iter().enumerate() {
            match k {
                0 => {}
                1 => parts.push(self.chart.var_name(i)),
                _ => parts.push(format!("{}^{}", self.chart.var_name(i), k)),
            }
        }
        parts.join("*")
    }
}

/// Canonical text: graded-lex descending, coefficients in lowest terms,
/// no whitespace, e.g. `z1^2*zb2-3/2*i*z2+(1+i)`.
impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.terms.iter().map(|(e, c)| render_term(c, &self.monomial_text(e)));
        write!(f, "{}", join_terms(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Chart {
        Chart::new(2)
    }
    fn z(i: usize) -> Polynomial {
        Polynomial::var(c2(), 2 * i)
    }
    fn zb(i: usize) -> Polynomial {
        Polynomial::var(c2(), 2 * i + 1)
    }

    #[test]
    fn power_rule() {
        // derive(z1^2 zb2, z1) = 2 z1 zb2
        let p = &(&z(0) * &z(0)) * &zb(1);
        let d = p.derive(0);
        assert_eq!(d, (&z(0) * &zb(1)).scale(&GaussianRational::from_int(2)));
        assert!(Polynomial::from_int(c2(), 7).derive(0).is_zero());
    }

    #[test]
    fn conjugate_example() {
        let p = z(0).scale(&GaussianRational::i());
        assert_eq!(p.conjugate(), zb(0).scale(&-GaussianRational::i()));
        let r2 = &(&z(0) * &zb(0)) + &(&z(1) * &zb(1));
        assert_eq!(r2.conjugate(), r2);
    }

    #[test]
    fn exact_division_examples() {
        let num = &(&z(0) * &z(0)) - &(&zb(0) * &zb(0));
        let den = &z(0) - &zb(0);
        assert_eq!(num.div_exact(&den).unwrap(), &z(0) + &zb(0));
        assert!(matches!((&z(0) * &zb(1)).div_exact(&z(1)), Err(Error::NotDivisible(_))));
    }

    #[test]
    fn evaluation_uses_conjugates() {
        let p = &z(0) * &zb(0);
        let pt = [GaussianRational::from_parts((1, 1), (1, 1)), GaussianRational::zero()];
        assert_eq!(p.eval(&pt), GaussianRational::from_int(2));
    }

    #[test]
    fn canonical_text() {
        let p = &(&z(0) * &z(0)) * &zb(1);
        let q = &p - &z(1).scale(&GaussianRational::from_parts((0, 1), (3, 2)));
        let q = &q + &Polynomial::constant(c2(), GaussianRational::from_parts((1, 1), (1, 1)));
        assert_eq!(q.to_string(), "z1^2*zb2-3/2*i*z2+(1+i)");
        assert_eq!(Polynomial::zero(c2()).to_string(), "0");
        let r2 = &(&z(0) * &zb(0)) + &(&z(1) * &zb(1));
        assert_eq!(r2.to_string(), "z1*zb1+z2*zb2");
    }

    #[test]
    fn univariate_roundtrip() {
        let p = &(&(&z(0) * &z(0)) * &zb(1)) + &(&z(0) + &Polynomial::from_int(c2(), 3));
        let u = p.to_univariate(0);
        assert_eq!(u.len(), 3);
        assert_eq!(Polynomial::from_univariate(c2(), 0, &u), p);
    }
}
