//! Sections `X + xi` of the complexified generalized tangent bundle.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::coeffs::{Chart, GaussianRational, RationalFn};
use crate::error::{Error, Result};
use crate::forms::{check_bfield, Form};

/// Vector part indexed like the one-form generators: component `g` is the
/// coefficient of the coordinate field dual to `d(var_of_gen(g))`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GVector {
    chart: Chart,
    vec: Vec<RationalFn>,
    form: Form,
}

/// `X(f)` for a vector field given by generator-indexed components.
pub fn apply_vector(chart: Chart, x: &[RationalFn], f: &RationalFn) -> RationalFn {
    let mut acc = RationalFn::zero(chart);
    for (g, xg) in x.iter().enumerate() {
        if !xg.is_zero() {
            let df = f.derive(chart.var_of_gen(g));
            if !df.is_zero() {
                acc = &acc + &(xg * &df);
            }
        }
    }
    acc
}

/// Lie bracket of vector fields.
pub fn lie_bracket(chart: Chart, x: &[RationalFn], y: &[RationalFn]) -> Vec<RationalFn> {
    (0..chart.nvars()).map(|g| &apply_vector(chart, x, &y[g]) - &apply_vector(chart, y, &x[g])).collect()
}

/// `L_X a = d i_X a + i_X d a`.
pub fn lie_derivative_along(x: &[RationalFn], a: &Form) -> Form {
    &a.interior(x).ext_d() + &a.ext_d().interior(x)
}

impl GVector {
    pub fn zero(chart: Chart) -> Self {
        GVector { chart, vec: vec![RationalFn::zero(chart); chart.nvars()], form: Form::zero(chart) }
    }

    pub fn new(vec: Vec<RationalFn>, form: Form) -> Result<Self> {
        let chart = form.chart();
        if vec.len() != chart.nvars() {
            return Err(Error::ChartMismatch(format!(
                "vector part has {} components, chart needs {}",
                vec.len(),
                chart.nvars()
            )));
        }
        if let Some(k) = form.terms().map(|(m, _)| m.count_ones()).find(|&k| k != 1) {
            return Err(Error::WrongDegree { expected: 1, found: k as usize });
        }
        Ok(GVector { chart, vec, form })
    }

    pub fn from_vector(chart: Chart, vec: Vec<RationalFn>) -> Self {
        assert_eq!(vec.len(), chart.nvars(), "vector part length");
        GVector { chart, vec, form: Form::zero(chart) }
    }

    pub fn from_form(form: Form) -> Result<Self> {
        let chart = form.chart();
        Self::new(vec![RationalFn::zero(chart); chart.nvars()], form)
    }

    /// Coordinate vector field dual to generator `g`.
    pub fn coord(chart: Chart, g: usize) -> Self {
        let mut v = Self::zero(chart);
        v.vec[g] = RationalFn::one(chart);
        v
    }

    /// The basis one-form `d(var_of_gen(g))` as a generalized vector.
    pub fn coform(chart: Chart, g: usize) -> Self {
        GVector { chart, vec: vec![RationalFn::zero(chart); chart.nvars()], form: Form::gen(chart, g) }
    }

    /// Components in the basis `e_0.., dz_0..` (vector part first).
    pub fn coords(&self) -> Vec<RationalFn> {
        let mut out = self.vec.clone();
        out.extend((0..self.chart.nvars()).map(|g| self.form.coeff(1 << g)));
        out
    }

    pub fn from_coords(chart: Chart, c: &[RationalFn]) -> Self {
        let n = chart.nvars();
        assert_eq!(c.len(), 2 * n, "coordinate vector length");
        let form = Form::from_terms(chart, (0..n).map(|g| (1u32 << g, c[n + g].clone())));
        GVector { chart, vec: c[..n].to_vec(), form }
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn vec(&self) -> &[RationalFn] {
        &self.vec
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn is_zero(&self) -> bool {
        self.form.is_zero() && self.vec.iter().all(RationalFn::is_zero)
    }

    pub fn is_vector(&self) -> bool {
        self.form.is_zero()
    }

    pub fn vector_part(&self) -> GVector {
        GVector::from_vector(self.chart, self.vec.clone())
    }

    pub fn form_part(&self) -> GVector {
        GVector {
            chart: self.chart,
            vec: vec![RationalFn::zero(self.chart); self.chart.nvars()],
            form: self.form.clone(),
        }
    }

    /// `xi(Y)` where `xi` is this form part and `Y` the vector part of `o`.
    fn pairing(&self, o: &GVector) -> RationalFn {
        let mut acc = RationalFn::zero(self.chart);
        for (g, yg) in o.vec.iter().enumerate() {
            if !yg.is_zero() {
                let c = self.form.coeff(1 << g);
                if !c.is_zero() {
                    acc = &acc + &(&c * yg);
                }
            }
        }
        acc
    }

    /// The symmetric pairing `(X + xi, Y + eta) = (i_X eta + i_Y xi) / 2`.
    pub fn inner(&self, o: &GVector) -> RationalFn {
        let s = &o.pairing(self) + &self.pairing(o);
        s.scale(&GaussianRational::from_ratio(1, 2))
    }

    /// Clifford action `(X + xi) . a = i_X a + xi ^ a`.
    pub fn clifford(&self, a: &Form) -> Form {
        &a.interior(&self.vec) + &self.form.wedge(a)
    }

    /// Lie derivative along the vector part; the form part must vanish.
    pub fn lie_derivative(&self, a: &Form) -> Result<Form> {
        if !self.form.is_zero() {
            return Err(Error::Precondition("lie derivative needs a pure vector field".into()));
        }
        Ok(lie_derivative_along(&self.vec, a))
    }

    /// Courant bracket
    /// `[X,Y] + L_X eta - L_Y xi - d(i_X eta - i_Y xi) / 2`.
    pub fn courant(&self, o: &GVector) -> GVector {
        let chart = self.chart;
        let vec = lie_bracket(chart, &self.vec, &o.vec);
        let skew = &o.pairing(self) - &self.pairing(o);
        let half_d = Form::scalar(skew).ext_d().scale_c(&GaussianRational::from_ratio(1, 2));
        let form = &(&lie_derivative_along(&self.vec, &o.form) - &lie_derivative_along(&o.vec, &self.form)) - &half_d;
        GVector { chart, vec, form }
    }

    /// B-field shear `X + xi -> X + xi + i_X B` for a closed two-form.
    pub fn bfield_transform(&self, b: &Form) -> Result<GVector> {
        check_bfield(b)?;
        Ok(self.bfield_unchecked(b))
    }

    pub(crate) fn bfield_unchecked(&self, b: &Form) -> GVector {
        GVector { chart: self.chart, vec: self.vec.clone(), form: &self.form + &b.interior(&self.vec) }
    }

    pub fn conjugate(&self) -> GVector {
        let chart = self.chart;
        let mut vec = vec![RationalFn::zero(chart); chart.nvars()];
        for (g, c) in self.vec.iter().enumerate() {
            vec[chart.conj_gen(g)] = c.conjugate();
        }
        GVector { chart, vec, form: self.form.conjugate() }
    }

    pub fn scale(&self, f: &RationalFn) -> GVector {
        GVector { chart: self.chart, vec: self.vec.iter().map(|c| c * f).collect(), form: self.form.scale(f) }
    }

    pub fn scale_c(&self, c: &GaussianRational) -> GVector {
        GVector { chart: self.chart, vec: self.vec.iter().map(|x| x.scale(c)).collect(), form: self.form.scale_c(c) }
    }

    /// Applies the vector part to a function.
    pub fn apply(&self, f: &RationalFn) -> RationalFn {
        apply_vector(self.chart, &self.vec, f)
    }

    pub fn at_point(&self, point: &[GaussianRational]) -> Result<GVector> {
        let vec = self
            .vec
            .iter()
            .map(|c| c.eval(point).map(|v| RationalFn::constant(self.chart, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(GVector { chart: self.chart, vec, form: self.form.at_point(point)? })
    }

    pub fn substitute(&self, var: usize, value: &GaussianRational) -> Result<GVector> {
        let vec = self.vec.iter().map(|c| c.substitute(var, value)).collect::<Result<Vec<_>>>()?;
        Ok(GVector { chart: self.chart, vec, form: self.form.substitute(var, value)? })
    }

    /// The same section on a chart with fiber variables adjoined.
    pub fn lift(&self, chart: Chart) -> GVector {
        let mut vec: Vec<RationalFn> = self.vec.iter().map(|c| c.lift(chart)).collect();
        vec.resize(chart.nvars(), RationalFn::zero(chart));
        GVector { chart, vec, form: self.form.lift(chart) }
    }

    /// Canonical text of the vector part, e.g. `z1*e2-e1`.
    pub fn vec_text(&self) -> String {
        let parts = self
            .vec
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(g, c)| c.render_times(&self.chart.vec_name(g)));
        crate::coeffs::poly::join_terms(parts)
    }
}

impl<'a> Add<&'a GVector> for &'a GVector {
    type Output = GVector;
    fn add(self, o: &GVector) -> GVector {
        assert_eq!(self.chart, o.chart, "chart mismatch");
        GVector {
            chart: self.chart,
            vec: self.vec.iter().zip(&o.vec).map(|(a, b)| a + b).collect(),
            form: &self.form + &o.form,
        }
    }
}

impl<'a> Sub<&'a GVector> for &'a GVector {
    type Output = GVector;
    fn sub(self, o: &GVector) -> GVector {
        assert_eq!(self.chart, o.chart, "chart mismatch");
        GVector {
            chart: self.chart,
            vec: self.vec.iter().zip(&o.vec).map(|(a, b)| a - b).collect(),
            form: &self.form - &o.form,
        }
    }
}

impl Neg for &GVector {
    type Output = GVector;
    fn neg(self) -> GVector {
        GVector { chart: self.chart, vec: self.vec.iter().map(|c| -c).collect(), form: -&self.form }
    }
}

impl Add for GVector {
    type Output = GVector;
    fn add(self, o: GVector) -> GVector {
        &self + &o
    }
}

impl Sub for GVector {
    type Output = GVector;
    fn sub(self, o: GVector) -> GVector {
        &self - &o
    }
}

/// Canonical text `vec: <vector part>; form: <one-form>`.
impl fmt::Display for GVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vec: {}; form: {}", self.vec_text(), self.form)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Chart {
        Chart::new(2)
    }
    fn var(i: usize) -> RationalFn {
        RationalFn::var(c2(), i)
    }
    fn e(g: usize) -> GVector {
        GVector::coord(c2(), g)
    }
    fn dz(g: usize) -> GVector {
        GVector::coform(c2(), g)
    }

    #[test]
    fn inner_examples() {
        let v = &e(0) + &dz(0);
        assert!(v.inner(&v).is_one());
        let w = dz(0).scale(&var(2));
        assert_eq!(e(0).inner(&w), var(2).scale(&GaussianRational::from_ratio(1, 2)));
    }

    #[test]
    fn clifford_examples() {
        let dz12 = Form::gen(c2(), 0).wedge(&Form::gen(c2(), 1));
        let v = &e(0) + &dz(0);
        assert_eq!(v.clifford(&dz12), Form::gen(c2(), 1));
        let rho = &Form::scalar(var(0)) + &dz12;
        assert_eq!((-&e(1)).clifford(&rho), Form::gen(c2(), 0));
    }

    #[test]
    fn courant_closure_example() {
        let a = &e(1).scale(&var(0)) + &dz(0);
        let b = &(-&e(0).scale(&var(0))) + &dz(1);
        assert_eq!(a.courant(&b), a);
        assert!(e(2).courant(&a).is_zero());
    }

    #[test]
    fn lie_derivative_example() {
        let x = e(1).scale(&var(0));
        assert_eq!(x.lie_derivative(&Form::gen(c2(), 1)).unwrap(), Form::gen(c2(), 0));
        assert!(dz(0).lie_derivative(&Form::one(c2())).is_err());
    }

    #[test]
    fn display() {
        let a = &e(1).scale(&var(0)) + &dz(0);
        assert_eq!(a.to_string(), "vec: z1*e2; form: dz1");
        assert_eq!(GVector::zero(c2()).to_string(), "vec: 0; form: 0");
    }
}
