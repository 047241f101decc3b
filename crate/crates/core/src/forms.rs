//! Differential forms with rational-function coefficients.
//!
//! A basis form is a bitmask over the chart's one-form generators
//! (`dz1..dzn, dzb1..dzbn, dw, dwb`); the generator with the lowest index
//! comes first in the wedge product.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Form {
    chart: Chart,
    terms: BTreeMap<u32, RationalFn>,
}

/// Sign of `e_a ^ e_b` relative to `e_{a|b}`; zero when they overlap.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of contracting generator `g` out of `mask` (it must be present).
pub fn interior_sign(g: usize, mask: u32) -> i32 {
    if (mask & ((1u32 << g) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn mask_gens(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |g| mask >> g & 1 == 1)
}

fn signed(c: &RationalFn, s: i32) -> RationalFn {
    if s < 0 {
        -c
    } else {
        c.clone()
    }
}

/// Sign of the reversal anti-automorphism on degree-`k` forms.
pub fn reversal_sign(k: u32) -> i32 {
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

impl Form {
    pub fn zero(chart: Chart) -> Self {
        Form { chart, terms: BTreeMap::new() }
    }

    pub fn scalar(f: RationalFn) -> Self {
        Self::basis(0, f)
    }

    pub fn one(chart: Chart) -> Self {
        Self::scalar(RationalFn::one(chart))
    }

    pub fn constant(chart: Chart, c: GaussianRational) -> Self {
        Self::scalar(RationalFn::constant(chart, c))
    }

    /// `f * e_mask`.
    pub fn basis(mask: u32, f: RationalFn) -> Self {
        let chart = f.chart();
        let mut terms = BTreeMap::new();
        if !f.is_zero() {
            terms.insert(mask, f);
        }
        Form { chart, terms }
    }

    /// The basis one-form with generator index `g`.
    pub fn gen(chart: Chart, g: usize) -> Self {
        assert!(g < chart.nvars(), "generator outside chart");
        Self::basis(1 << g, RationalFn::one(chart))
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, RationalFn)>>(chart: Chart, terms: I) -> Self {
        let mut f = Form::zero(chart);
        for (m, c) in terms {
            f.add_term(m, &c);
        }
        f
    }

    fn add_term(&mut self, mask: u32, c: &RationalFn) {
        if c.is_zero() {
            return;
        }
        let merged = match self.terms.get(&mask) {
            Some(old) => old + c,
            None => c.clone(),
        };
        if merged.is_zero() {
            self.terms.remove(&mask);
        } else {
            self.terms.insert(mask, merged);
        }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &RationalFn)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coeff(&self, mask: u32) -> RationalFn {
        self.terms.get(&mask).cloned().unwrap_or_else(|| RationalFn::zero(self.chart))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The degree when every term has the same degree.
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.count_ones());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Degree-`k` component.
    pub fn part(&self, k: u32) -> Form {
        self.filter(|m| m.count_ones() == k)
    }

    pub fn bidegree_of(&self, mask: u32) -> (u32, u32) {
        let p = mask_gens(mask).filter(|&g| self.chart.gen_is_holomorphic(g)).count() as u32;
        (p, mask.count_ones() - p)
    }

    /// The `(p, q)` component.
    pub fn bipart(&self, p: u32, q: u32) -> Form {
        let chart = self.chart;
        let mut out = Form::zero(chart);
        for (m, c) in &self.terms {
            if self.bidegree_of(*m) == (p, q) {
                out.terms.insert(*m, c.clone());
            }
        }
        out
    }

    fn filter(&self, keep: impl Fn(u32) -> bool) -> Form {
        Form {
            chart: self.chart,
            terms: self.terms.iter().filter(|(m, _)| keep(**m)).map(|(m, c)| (*m, c.clone())).collect(),
        }
    }

    /// Coefficient of the top-degree basis form.
    pub fn top_coeff(&self) -> RationalFn {
        self.coeff(self.chart.top_mask())
    }

    pub fn scale(&self, f: &RationalFn) -> Form {
        if f.is_zero() {
            return Form::zero(self.chart);
        }
        self.map_coeffs(|c| c * f)
    }

    pub fn scale_c(&self, c: &GaussianRational) -> Form {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&RationalFn) -> RationalFn) -> Form {
        let mut out = Form::zero(self.chart);
        for (m, c) in &self.terms {
            let v = f(c);
            if !v.is_zero() {
                out.terms.insert(*m, v);
            }
        }
        out
    }

    pub fn wedge(&self, o: &Form) -> Form {
        self.check_chart(o);
        let mut out = Form::zero(self.chart);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let s = wedge_sign(*ma, *mb);
                if s != 0 {
                    out.add_term(ma | mb, &signed(&(ca * cb), s));
                }
            }
        }
        out
    }

    fn check_chart(&self, o: &Form) {
        assert_eq!(self.chart, o.chart, "forms live on different charts");
    }

    pub fn pow(&self, k: u32) -> Form {
        let mut acc = Form::one(self.chart);
        for _ in 0..k {
            acc = acc.wedge(self);
        }
        acc
    }

    /// `exp(a)` for a form whose terms all have positive even degree
    /// (so that the series is a finite polynomial).
    pub fn exp(&self) -> Form {
        assert!(self.terms.keys().all(|m| m.count_ones() % 2 == 0 && *m != 0), "exp needs a nilpotent even form");
        let mut acc = Form::one(self.chart);
        let mut term = Form::one(self.chart);
        let mut k = 1i64;
        loop {
            term = term.wedge(self).scale_c(&GaussianRational::from_ratio(1, k));
            if term.is_zero() {
                return acc;
            }
            acc = &acc + &term;
            k += 1;
        }
    }

    /// Contraction with the coordinate vector field dual to generator `g`.
    pub fn interior_gen(&self, g: usize) -> Form {
        let mut out = Form::zero(self.chart);
        for (m, c) in &self.terms {
            if m >> g & 1 == 1 {
                out.add_term(m & !(1 << g), &signed(c, interior_sign(g, *m)));
            }
        }
        out
    }

    /// Contraction with the vector field `sum_g x[g] * e_g`.
    pub fn interior(&self, x: &[RationalFn]) -> Form {
        let mut out = Form::zero(self.chart);
        for (g, xg) in x.iter().enumerate() {
            if !xg.is_zero() {
                out = &out + &self.interior_gen(g).scale(xg);
            }
        }
        out
    }

    fn d_over(&self, vars: impl Fn(usize) -> bool) -> Form {
        let chart = self.chart;
        let mut out = Form::zero(chart);
        for (m, c) in &self.terms {
            for v in (0..chart.nvars()).filter(|&v| vars(v)) {
                let g = chart.gen_of_var(v);
                if m >> g & 1 == 1 {
                    continue;
                }
                let dc = c.derive(v);
                if !dc.is_zero() {
                    out.add_term(m | 1 << g, &signed(&dc, wedge_sign(1 << g, *m)));
                }
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn ext_d(&self) -> Form {
        self.d_over(|_| true)
    }

    /// The part of `d` raising the antiholomorphic degree.
    pub fn dbar_part(&self) -> Form {
        let chart = self.chart;
        self.d_over(|v| !chart.gen_is_holomorphic(chart.gen_of_var(v)))
    }

    /// The part of `d` raising the holomorphic degree.
    pub fn del_part(&self) -> Form {
        let chart = self.chart;
        self.d_over(|v| chart.gen_is_holomorphic(chart.gen_of_var(v)))
    }

    pub fn conjugate(&self) -> Form {
        let chart = self.chart;
        let mut out = Form::zero(chart);
        for (m, c) in &self.terms {
            let images: Vec<usize> = mask_gens(*m).map(|g| chart.conj_gen(g)).collect();
            let mut inversions = 0;
            for i in 0..images.len() {
                for j in i + 1..images.len() {
                    if images[i] > images[j] {
                        inversions += 1;
                    }
                }
            }
            let nm = images.iter().fold(0u32, |acc, g| acc | 1 << g);
            out.add_term(nm, &signed(&c.conjugate(), if inversions % 2 == 0 { 1 } else { -1 }));
        }
        out
    }

    /// Reversal anti-automorphism: degree-k terms times `(-1)^(k(k-1)/2)`.
    pub fn reversal(&self) -> Form {
        let mut out = Form::zero(self.chart);
        for (m, c) in &self.terms {
            out.terms.insert(*m, signed(c, reversal_sign(m.count_ones())));
        }
        out
    }

    /// Mukai pairing: the top-degree part of `a ^ rev(b)`.
    pub fn mukai(&self, o: &Form) -> Form {
        self.check_chart(o);
        let top = self.chart.top_mask();
        let mut out = Form::zero(self.chart);
        for (ma, ca) in &self.terms {
            let mb = top & !ma;
            if let Some(cb) = o.terms.get(&mb) {
                let s = wedge_sign(*ma, mb) * reversal_sign(mb.count_ones());
                out.add_term(top, &signed(&(ca * cb), s));
            }
        }
        out
    }

    /// `exp(-B) ^ a` for a closed homogeneous two-form `B`.
    pub fn bfield_on_form(b: &Form, a: &Form) -> Result<Form> {
        check_bfield(b)?;
        Ok((-b).exp().wedge(a))
    }

    /// Replaces every coefficient by its value at `point`.
    pub fn at_point(&self, point: &[GaussianRational]) -> Result<Form> {
        let mut out = Form::zero(self.chart);
        for (m, c) in &self.terms {
            out.add_term(*m, &RationalFn::constant(self.chart, c.eval(point)?));
        }
        Ok(out)
    }

    pub fn substitute(&self, var: usize, value: &GaussianRational) -> Result<Form> {
        let mut out = Form::zero(self.chart);
        for (m, c) in &self.terms {
            out.add_term(*m, &c.substitute(var, value)?);
        }
        Ok(out)
    }

    /// The same form viewed on a chart with more variables appended.
    pub fn lift(&self, chart: Chart) -> Form {
        assert_eq!(chart.n, self.chart.n, "lift only adjoins fiber variables");
        Form { chart, terms: self.terms.iter().map(|(m, c)| (*m, c.lift(chart))).collect() }
    }

    /// Coefficients as exact constants, or `None` if some coefficient is not
    /// constant.
    pub fn constant_coeffs(&self) -> Option<Vec<(u32, GaussianRational)>> {
        self.terms.iter().map(|(m, c)| c.constant_value().map(|v| (*m, v))).collect()
    }

    pub fn is_closed(&self) -> bool {
        self.ext_d().is_zero()
    }

    /// Canonical text of the basis form, e.g. `dz1^dzb2`.
    pub fn basis_text(chart: Chart, mask: u32) -> String {
        mask_gens(mask).map(|g| chart.gen_name(g)).collect::<Vec<_>>().join("^")
    }
}

/// A B-field must be a closed two-form.
pub(crate) fn check_bfield(b: &Form) -> Result<()> {
    if let Some(k) = b.terms.keys().map(|m| m.count_ones()).find(|&k| k != 2) {
        return Err(Error::WrongDegree { expected: 2, found: k as usize });
    }
    if !b.is_closed() {
        return Err(Error::NotClosed(b.ext_d().to_string()));
    }
    Ok(())
}

impl<'a> Add<&'a Form> for &'a Form {
    type Output = Form;
    fn add(self, o: &Form) -> Form {
        self.check_chart(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c);
        }
        out
    }
}

impl<'a> Sub<&'a Form> for &'a Form {
    type Output = Form;
    fn sub(self, o: &Form) -> Form {
        self.check_chart(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, &-c);
        }
        out
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.map_coeffs(|c| -c)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, o: Form) -> Form {
        &self + &o
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, o: Form) -> Form {
        &self - &o
    }
}

impl From<RationalFn> for Form {
    fn from(f: RationalFn) -> Self {
        Form::scalar(f)
    }
}

impl From<Polynomial> for Form {
    fn from(p: Polynomial) -> Self {
        Form::scalar(p.into())
    }
}

/// Canonical text: terms by basis mask ascending, `coeff*dz1^dz2`.
impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.terms.iter().map(|(m, c)| c.render_times(&Form::basis_text(self.chart, *m)));
        write!(f, "{}", crate::coeffs::poly::join_terms(parts))
    }
}

/// Orientation used by the flat Hodge star on `C^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `dx1^dy1^dx2^dy2` positive.
    Standard,
    Reversed,
}

/// Value of the complex-bilinear metric on a pair of generators of `C^2`:
/// `g(dz_i, dzb_i) = 4`, everything else zero. This is the inverse of the
/// flat metric `(dx^2 + dy^2) / 2` on each factor.
fn gen_metric(a: usize, b: usize) -> i64 {
    if a != b && a % 2 == b % 2 {
        4
    } else {
        0
    }
}

/// Induced metric on basis forms: the Gram determinant.
fn basis_metric(a: u32, b: u32) -> GaussianRational {
    let ga: Vec<usize> = mask_gens(a).collect();
    let gb: Vec<usize> = mask_gens(b).collect();
    if ga.len() != gb.len() {
        return GaussianRational::zero();
    }
    let rows: Vec<Vec<GaussianRational>> =
        ga.iter().map(|&i| gb.iter().map(|&j| GaussianRational::from_int(gen_metric(i, j))).collect()).collect();
    if rows.is_empty() {
        return GaussianRational::one();
    }
    det(rows)
}

fn det(mut m: Vec<Vec<GaussianRational>>) -> GaussianRational {
    let n = m.len();
    let mut acc = GaussianRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return GaussianRational::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        let inv = m[c][c].inv().unwrap();
        acc = &acc * &m[c][c];
        for r in c + 1..n {
            let f = &m[r][c] * &inv;
            if f.is_zero() {
                continue;
            }
            for k in c..n {
                let t = &f * &m[c][k];
                m[r][k] = &m[r][k] - &t;
            }
        }
    }
    acc
}

/// The Riemannian volume form as a multiple of `dz1^dz2^dzb1^dzb2`.
fn volume_factor(o: Orientation) -> GaussianRational {
    let v = GaussianRational::from_ratio(1, 16);
    match o {
        Orientation::Standard => v,
        Orientation::Reversed => -v,
    }
}

/// Hodge star of the basis form `mask` on `C^2`, as `(mask, coefficient)`
/// terms.
pub fn star_basis(mask: u32, o: Orientation) -> Vec<(u32, GaussianRational)> {
    let top = 0b1111u32;
    let vol = volume_factor(o);
    let mut out = Vec::new();
    for i in 0..16u32 {
        let g = basis_metric(i, mask);
        if g.is_zero() {
            continue;
        }
        let comp = top & !i;
        let s = GaussianRational::from_int(wedge_sign(i, comp) as i64);
        out.push((comp, &(&g * &vol) * &s));
    }
    out.sort_by_key(|t| t.0);
    out
}

/// The flat Hodge star on `C^2`, orientation `dx1^dy1^dx2^dy2`.
pub fn hodge_star(a: &Form) -> Result<Form> {
    hodge_star_oriented(a, Orientation::Standard)
}

pub fn hodge_star_oriented(a: &Form, o: Orientation) -> Result<Form> {
    let chart = a.chart();
    if chart.n != 2 || chart.fiber {
        return Err(Error::UnsupportedChart(format!("hodge star needs C^2, got {chart}")));
    }
    let mut out = Form::zero(chart);
    for (m, c) in a.terms() {
        for (nm, k) in star_basis(m, o) {
            out.add_term(nm, &c.scale(&k));
        }
    }
    Ok(out)
}

/// Induced metric pairing of two forms on `C^2` (complex bilinear).
pub fn metric_pairing(a: &Form, b: &Form) -> RationalFn {
    let mut acc = RationalFn::zero(a.chart());
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let g = basis_metric(ma, mb);
            if !g.is_zero() {
                acc = &acc + &(ca * cb).scale(&g);
            }
        }
    }
    acc
}

/// The volume form of the flat metric in the given orientation.
pub fn volume_form(chart: Chart, o: Orientation) -> Form {
    Form::basis(0b1111, RationalFn::constant(chart, volume_factor(o)))
}
