//! The fraction field Q(i)(z, zb, w, wb).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::chart::Chart;
use super::gaussian::GaussianRational;
use super::gcd::gcd;
use super::poly::Polynomial;
use crate::error::{Error, Result};

/// A reduced fraction `num / den` with `gcd(num, den) = 1` and a monic
/// (graded-lex) denominator, so structural equality is equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalFn {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFn {
    pub fn zero(chart: Chart) -> Self {
        RationalFn { num: Polynomial::zero(chart), den: Polynomial::one(chart) }
    }

    pub fn one(chart: Chart) -> Self {
        RationalFn { num: Polynomial::one(chart), den: Polynomial::one(chart) }
    }

    pub fn constant(chart: Chart, c: GaussianRational) -> Self {
        RationalFn { num: Polynomial::constant(chart, c), den: Polynomial::one(chart) }
    }

    pub fn from_int(chart: Chart, n: i64) -> Self {
        Self::constant(chart, GaussianRational::from_int(n))
    }

    pub fn var(chart: Chart, idx: usize) -> Self {
        Polynomial::var(chart, idx).into()
    }

    /// Builds `num / den`, reducing to canonical form.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::PoleError);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Polynomial, den: Polynomial) -> Self {
        let chart = den.chart();
        if num.is_zero() {
            return Self::zero(chart);
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().unwrap();
            return RationalFn { num: num.scale(&inv), den: Polynomial::one(chart) };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() { (num, den) } else { (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap()) };
        let lc = den.lc();
        if lc.is_one() {
            RationalFn { num, den }
        } else {
            let inv = lc.inv().unwrap();
            RationalFn { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn chart(&self) -> Chart {
        self.num.chart()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn constant_value(&self) -> Option<GaussianRational> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> RationalFn {
        if c.is_zero() {
            return Self::zero(self.chart());
        }
        RationalFn { num: self.num.scale(c), den: self.den.clone() }
    }

    pub fn inv(&self) -> Option<RationalFn> {
        if self.is_zero() {
            return None;
        }
        Some(Self::reduce(self.den.clone(), self.num.clone()))
    }

    pub fn pow(&self, e: u32) -> RationalFn {
        // Powers of reduced fractions stay reduced; only the sign of the
        // leading coefficient of the denominator is already 1.
        RationalFn { num: self.num.pow(e), den: self.den.pow(e) }
    }

    /// Formal partial derivative (quotient rule), normalized.
    pub fn derive(&self, var: usize) -> RationalFn {
        let dn = self.num.derive(var);
        if self.den.is_one() {
            return RationalFn { num: dn, den: self.den.clone() };
        }
        let dd = self.den.derive(var);
        if dd.is_zero() {
            return Self::reduce(dn, self.den.clone());
        }
        // (n' d - n d') / d^2; the result denominator divides d^2.
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::reduce(num, &self.den * &self.den)
    }

    pub fn conjugate(&self) -> RationalFn {
        Self::reduce(self.num.conjugate(), self.den.conjugate())
    }

    /// Exact value at a point (one value per complex coordinate).
    pub fn eval(&self, point: &[GaussianRational]) -> Result<GaussianRational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::PoleError);
        }
        Ok(&self.num.eval(point) / &d)
    }

    pub fn eval_vars(&self, values: &[GaussianRational]) -> Result<GaussianRational> {
        let d = self.den.eval_vars(values);
        if d.is_zero() {
            return Err(Error::PoleError);
        }
        Ok(&self.num.eval_vars(values) / &d)
    }

    pub fn substitute(&self, var: usize, value: &GaussianRational) -> Result<RationalFn> {
        let den = self.den.substitute(var, value);
        if den.is_zero() {
            return Err(Error::PoleError);
        }
        Ok(Self::reduce(self.num.substitute(var, value), den))
    }

    pub fn lift(&self, chart: Chart) -> RationalFn {
        RationalFn { num: self.num.lift(chart), den: self.den.lift(chart) }
    }

    pub fn is_holomorphic(&self) -> bool {
        self.num.is_holomorphic() && self.den.is_holomorphic()
    }

    pub fn weight(&self) -> usize {
        self.num.weight() + if self.den.is_one() { 0 } else { self.den.weight() + 8 }
    }
}

impl From<Polynomial> for RationalFn {
    fn from(p: Polynomial) -> Self {
        let chart = p.chart();
        RationalFn { num: p, den: Polynomial::one(chart) }
    }
}

impl<'a> Add<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn add(self, o: &RationalFn) -> RationalFn {
        add_sub(self, o, false)
    }
}

impl<'a> Sub<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn sub(self, o: &RationalFn) -> RationalFn {
        add_sub(self, o, true)
    }
}

fn add_sub(a: &RationalFn, b: &RationalFn, negate: bool) -> RationalFn {
    let comb = |x: &Polynomial, y: &Polynomial| if negate { x - y } else { x + y };
    if b.is_zero() {
        return a.clone();
    }
    if a.is_zero() {
        return if negate { -b } else { b.clone() };
    }
    if a.den == b.den {
        let num = comb(&a.num, &b.num);
        if a.den.is_one() {
            return RationalFn { num, den: a.den.clone() };
        }
        return RationalFn::reduce(num, a.den.clone());
    }
    // Henrici: with g = gcd(d1, d2), n = n1 (d2/g) + n2 (d1/g), d = d1 (d2/g),
    // and gcd(n, d) = gcd(n, g).
    let g = gcd(&a.den, &b.den);
    let (a2, b2) = if g.is_one() {
        (b.den.clone(), a.den.clone())
    } else {
        (b.den.div_exact(&g).unwrap(), a.den.div_exact(&g).unwrap())
    };
    let num = comb(&(&a.num * &a2), &(&b.num * &b2));
    let den = &a.den * &a2;
    if num.is_zero() {
        return RationalFn::zero(a.chart());
    }
    if g.is_one() {
        return RationalFn { num, den };
    }
    let h = gcd(&num, &g);
    if h.is_one() {
        RationalFn { num, den }
    } else {
        RationalFn::reduce(num.div_exact(&h).unwrap(), den.div_exact(&h).unwrap())
    }
}

impl<'a> Mul<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    fn mul(self, o: &RationalFn) -> RationalFn {
        if self.is_zero() || o.is_zero() {
            return RationalFn::zero(self.chart());
        }
        if self.den.is_one() && o.den.is_one() {
            return RationalFn { num: &self.num * &o.num, den: self.den.clone() };
        }
        // Cross-cancel: gcd(n1, d2) and gcd(n2, d1).
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let q = |p: &Polynomial, g: &Polynomial| if g.is_one() { p.clone() } else { p.div_exact(g).unwrap() };
        let num = &q(&self.num, &g1) * &q(&o.num, &g2);
        let den = &q(&self.den, &g2) * &q(&o.den, &g1);
        let lc = den.lc();
        if lc.is_one() {
            RationalFn { num, den }
        } else {
            let inv = lc.inv().unwrap();
            RationalFn { num: num.scale(&inv), den: den.scale(&inv) }
        }
    }
}

impl<'a> Div<&'a RationalFn> for &'a RationalFn {
    type Output = RationalFn;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: &RationalFn) -> RationalFn {
        self * &o.inv().expect("division by the zero rational function")
    }
}

impl Neg for &RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        RationalFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RationalFn {
    type Output = RationalFn;
    fn neg(self) -> RationalFn {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFn {
            type Output = RationalFn;
            fn $m(self, o: RationalFn) -> RationalFn {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl RationalFn {
    /// Canonical text for `self * symbol`; single-term polynomials are
    /// written inline, anything else is parenthesized.
    pub(crate) fn render_times(&self, symbol: &str) -> String {
        if symbol.is_empty() {
            return self.to_string();
        }
        if self.den.is_one() && self.num.len() == 1 {
            let (e, c) = &self.num.terms()[0];
            let mono = self.num.monomial_text(e);
            let sym = if mono.is_empty() { symbol.to_string() } else { format!("{mono}*{symbol}") };
            return super::poly::render_term(c, &sym);
        }
        format!("({self})*{symbol}")
    }
}

/// Canonical text: the polynomial when the denominator is 1, otherwise
/// `(num)/(den)`.
impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl Zero for RationalFn {
    fn zero() -> Self {
        panic!("RationalFn::zero needs a chart; use RationalFn::zero(chart)")
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RationalFn {
    fn one() -> Self {
        panic!("RationalFn::one needs a chart; use RationalFn::one(chart)")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Chart {
        Chart::new(2)
    }
    fn v(i: usize) -> RationalFn {
        RationalFn::var(c2(), i)
    }

    fn r2() -> RationalFn {
        &(&v(0) * &v(1)) + &(&v(2) * &v(3))
    }

    #[test]
    fn quotient_rule_on_inverse_radius() {
        // d/dz1 (1/r^2) = -zb1 / r^4, checked against the hand-derived quotient rule.
        let inv = r2().inv().unwrap();
        let expect = -&(&v(1) / &r2().pow(2));
        assert_eq!(inv.derive(0), expect);
        assert_eq!(inv.derive(0).to_string(), "(-zb1)/(z1^2*zb1^2+2*z1*zb1*z2*zb2+z2^2*zb2^2)");
    }

    #[test]
    fn pole_detection() {
        let inv = r2().inv().unwrap();
        let origin = [GaussianRational::zero(), GaussianRational::zero()];
        assert_eq!(inv.eval(&origin), Err(Error::PoleError));
    }

    #[test]
    fn normalization_is_canonical() {
        let a = &v(0) / &(&v(0) * &v(2));
        assert_eq!(a, v(2).inv().unwrap());
        let two = RationalFn::from_int(c2(), 2);
        let b = &v(0) / &(&two * &v(2));
        assert!(b.den().lc().is_one());
        assert_eq!(b.num().lc(), GaussianRational::from_ratio(1, 2));
    }

    #[test]
    fn sum_cancels_to_zero() {
        let a = &v(0) / &r2();
        let b = &v(0) / &r2();
        assert!((&a - &b).is_zero());
        let s = &(&v(0) / &(&v(0) + &v(2))) + &(&v(2) / &(&v(0) + &v(2)));
        assert!(s.is_one());
    }
}
