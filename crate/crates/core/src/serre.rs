//! The local model `A0 = r^-4 dz1^dz2^(zb2 dzb1 - zb1 dzb2)` on `C^2`: its
//! exact identities away from the origin, validation of point-current
//! data, and the sphere-flux quadrature measuring `dbar A0 = c delta(0)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::coeffs::{Chart, Exponents, GaussianRational, Polynomial, RationalFn};
use crate::error::{Error, Result};
use crate::forms::{hodge_star_oriented, Form, Orientation};
use crate::gcs::{GCStructure, PointCurrent, StructureKind};
use crate::verdict::Verdict;

const DZ1: u32 = 1;
const DZ2: u32 = 2;
const DZB1: u32 = 4;
const DZB2: u32 = 8;

fn c2() -> Chart {
    Chart::new(2)
}

/// `r^2 = z1 zb1 + z2 zb2`.
pub fn r_squared(chart: Chart) -> Polynomial {
    let v = |i| Polynomial::var(chart, i);
    &(&v(0) * &v(1)) + &(&v(2) * &v(3))
}

/// The (2,1) form `A0` of the local model.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalModelForm {
    pub a0: Form,
}

impl LocalModelForm {
    /// `r^4 A0`, the polynomial numerator.
    pub fn numerator(&self) -> Form {
        let r4: RationalFn = r_squared(c2()).pow(2).into();
        self.a0.scale(&r4)
    }
}

pub fn local_model() -> LocalModelForm {
    let c = c2();
    let r4 = r_squared(c).pow(2);
    let coeff = |var: usize, sign: i64| {
        let num = Polynomial::var(c, var).scale(&GaussianRational::from_int(sign));
        RationalFn::new(num, r4.clone()).expect("r^4 is a nonzero polynomial")
    };
    let a0 = Form::from_terms(c, vec![(DZ1 | DZ2 | DZB1, coeff(3, 1)), (DZ1 | DZ2 | DZB2, coeff(1, -1))]);
    LocalModelForm { a0 }
}

/// `dbar A0 = 0` as a rational-function identity (valid off the origin).
pub fn check_dbar_closed_off_origin() -> Verdict {
    let a0 = local_model().a0;
    let dbar = a0.dbar_part();
    if dbar.is_zero() {
        Verdict::pass()
    } else {
        Verdict::fail(format!("dbar A0 = {dbar}"))
    }
}

/// Both sides of `*d(1/r^2)^(2,1) = A0 / 4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarIdentity {
    pub lhs: Form,
    pub rhs: Form,
}

impl StarIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn verdict(&self) -> Verdict {
        if self.holds() {
            Verdict::pass()
        } else {
            Verdict::fail(format!("lhs = {}; rhs = {}", self.lhs, self.rhs))
        }
    }
}

pub fn star_identity(o: Orientation) -> StarIdentity {
    let c = c2();
    let inv_r2 = RationalFn::new(Polynomial::one(c), r_squared(c)).expect("r^2 is nonzero");
    let d = Form::scalar(inv_r2).ext_d();
    let lhs = hodge_star_oriented(&d, o).expect("C^2 chart").bipart(2, 1);
    let rhs = local_model().a0.scale_c(&GaussianRational::from_ratio(1, 4));
    StarIdentity { lhs, rhs }
}

pub fn star_identity_check() -> Verdict {
    star_identity(Orientation::Standard).verdict()
}

/// Pullback of a form on `C^2` under `z -> lambda z`.
pub fn scale_pullback(a: &Form, lambda: &GaussianRational) -> Form {
    let lb = lambda.conj();
    let chart = a.chart();
    let factor = |holo: u32, anti: u32| &lambda.pow(holo) * &lb.pow(anti);
    let scale_poly = |p: &Polynomial| {
        Polynomial::from_terms(
            chart,
            p.terms().iter().map(|(e, k)| {
                let holo: u32 = e.iter().step_by(2).map(|&x| u32::from(x)).sum();
                let anti: u32 = e.iter().skip(1).step_by(2).map(|&x| u32::from(x)).sum();
                (e.clone(), k * &factor(holo, anti))
            }),
        )
    };
    let terms = a.terms().map(|(m, f)| {
        let holo = (m & 0b11).count_ones();
        let anti = (m & 0b1100).count_ones();
        let coeff = RationalFn::new(scale_poly(f.num()), scale_poly(f.den())).expect("lambda is nonzero");
        (m, coeff.scale(&factor(holo, anti)))
    });
    Form::from_terms(chart, terms.collect::<Vec<_>>())
}

/// The star identity pulled back by `z -> lambda z`, plus the invariance
/// `lambda^* A0 = A0`.
pub fn star_identity_scaled(lambda: &GaussianRational) -> Result<Verdict> {
    if lambda.is_zero() {
        return Err(Error::Precondition("scaling factor must be nonzero".into()));
    }
    let id = star_identity(Orientation::Standard);
    let lhs = scale_pullback(&id.lhs, lambda);
    let rhs = scale_pullback(&id.rhs, lambda);
    if lhs != rhs {
        return Ok(Verdict::fail(format!("scaled lhs = {lhs}; scaled rhs = {rhs}")));
    }
    let a0 = local_model().a0;
    let pulled = scale_pullback(&a0, lambda);
    if pulled != a0 {
        return Ok(Verdict::fail(format!("A0 not scale invariant: {pulled}")));
    }
    Ok(Verdict::pass())
}

/// Itemized result of validating point-current data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SerreDataVerdict {
    pub pass: bool,
    pub weights_balanced: bool,
    pub in_u0: bool,
    /// `None` when the structure is not Poisson.
    pub sigma_t_zero: Option<bool>,
    pub failures: Vec<String>,
}

/// Checks the data `(x_i, lambda_i)` for the Serre construction:
/// `sum lambda_i = 0`, every point is a generalized complex submanifold, and
/// for Poisson structures `sigma T = 0`, i.e. `sigma` vanishes at each
/// point.
pub fn validate_serre_data(
    points: &[Vec<GaussianRational>],
    weights: &[GaussianRational],
    s: &GCStructure,
) -> Result<SerreDataVerdict> {
    let t = PointCurrent::new(points.to_vec(), weights.to_vec())?;
    let mut failures = Vec::new();
    let total = weights.iter().fold(GaussianRational::zero(), |a, b| &a + b);
    let weights_balanced = total.is_zero();
    if !weights_balanced {
        failures.push(format!("weights sum to {total}, not 0"));
    }
    let u0 = s.point_current_u0(&t)?;
    for (i, ok) in u0.per_point.iter().enumerate() {
        if !ok {
            failures.push(format!("point {} is not a generalized complex submanifold", point_text(&points[i])));
        }
    }
    let sigma_t_zero = match s.kind() {
        StructureKind::Poisson { .. } => {
            let tau = s.tau();
            let mut all = true;
            for (p, l) in points.iter().zip(weights) {
                let v = &tau.eval(p)? * l;
                if !v.is_zero() {
                    all = false;
                    failures.push(format!("sigma T has weight {v} at {}", point_text(p)));
                }
            }
            Some(all)
        }
        _ => None,
    };
    Ok(SerreDataVerdict { pass: failures.is_empty(), weights_balanced, in_u0: u0.in_u0, sigma_t_zero, failures })
}

fn point_text(p: &[GaussianRational]) -> String {
    format!("({})", p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))
}

/// The frame `(z1, z2), (-zb2, zb1)` at a point off the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeVerdict {
    pub det: GaussianRational,
    pub r_squared: GaussianRational,
    pub orthogonal: bool,
}

impl GaugeVerdict {
    pub fn pass(&self) -> bool {
        self.orthogonal && self.det == self.r_squared
    }
}

pub fn gauge_matrix_check(point: &[GaussianRational]) -> Result<GaugeVerdict> {
    if point.len() != 2 {
        return Err(Error::Precondition("gauge check needs a point of C^2".into()));
    }
    if point.iter().all(Zero::is_zero) {
        return Err(Error::Precondition("gauge check is undefined at the origin".into()));
    }
    let (z1, z2) = (&point[0], &point[1]);
    let rows = [[z1.clone(), z2.clone()], [-z2.conj(), z1.conj()]];
    let det = &(&rows[0][0] * &rows[1][1]) - &(&rows[0][1] * &rows[1][0]);
    let r_squared = &(z1 * &z1.conj()) + &(z2 * &z2.conj());
    let herm = &(&rows[0][0] * &rows[1][0].conj()) + &(&rows[0][1] * &rows[1][1].conj());
    Ok(GaugeVerdict { det, r_squared, orthogonal: herm.is_zero() })
}

/// Quadrature orders and radii for the sphere flux.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub eta_order: usize,
    pub xi_order: usize,
    pub radii: Vec<BigRational>,
    pub tolerance: f64,
}

impl QuadratureSpec {
    pub fn new(eta_order: usize, xi_order: usize, radii: Vec<BigRational>) -> Result<Self> {
        if eta_order < 4 || xi_order < 4 {
            return Err(Error::Precondition("quadrature orders must be at least 4".into()));
        }
        if radii.is_empty() {
            return Err(Error::Precondition("at least one radius is required".into()));
        }
        for (i, r) in radii.iter().enumerate() {
            if !r.is_positive() {
                return Err(Error::Precondition(format!("radius {r} is not positive")));
            }
            if radii[..i].contains(r) {
                return Err(Error::Precondition(format!("radius {r} is repeated")));
            }
        }
        Ok(QuadratureSpec { eta_order, xi_order, radii, tolerance: 1e-8 })
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

/// Flux of `A0 * f` through the spheres `|z| = r`.
#[derive(Clone, Debug, PartialEq)]
pub struct FluxResult {
    pub radii: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Limit `r -> 0`, the estimate of `c f(0)`.
    pub extrapolated: Complex64,
    /// Largest relative disagreement between radii of the rescaled
    /// homogeneous contributions.
    pub spread: f64,
}

/// Trigonometric polynomial in Hopf coordinates
/// `z1 = r cos(eta) e^{i xi1}, z2 = r sin(eta) e^{i xi2}`; keys are
/// `(cos power, sin power, xi1 frequency, xi2 frequency, r power)`.
#[derive(Clone, Debug, Default, PartialEq)]
struct HopfPoly {
    terms: BTreeMap<(u16, u16, i16, i16, i16), GaussianRational>,
}

type HopfKey = (u16, u16, i16, i16, i16);

impl HopfPoly {
    fn term(key: HopfKey, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(key, c);
        }
        HopfPoly { terms }
    }

    fn add(&mut self, o: &HopfPoly) {
        for (k, c) in &o.terms {
            let e = self.terms.entry(*k).or_insert_with(GaussianRational::zero);
            *e += c;
            if e.is_zero() {
                self.terms.remove(k);
            }
        }
    }

    fn mul(&self, o: &HopfPoly) -> HopfPoly {
        let mut out = HopfPoly::default();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let k = (a.0 + b.0, a.1 + b.1, a.2 + b.2, a.3 + b.3, a.4 + b.4);
                out.add(&HopfPoly::term(k, ca * cb));
            }
        }
        out
    }

    fn neg(&self) -> HopfPoly {
        HopfPoly { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    fn from_polynomial(p: &Polynomial) -> HopfPoly {
        let mut out = HopfPoly::default();
        for (e, c) in p.terms() {
            out.add(&HopfPoly::term(monomial_key(e), c.clone()));
        }
        out
    }

    fn compile(&self) -> Vec<(HopfKey, Complex64)> {
        self.terms
            .iter()
            .map(|(k, c)| {
                let (re, im) = c.to_f64();
                (*k, Complex64::new(re, im))
            })
            .collect()
    }
}

fn monomial_key(e: &Exponents) -> HopfKey {
    let (a, b, c, d) = (e[0], e[1], e[2], e[3]);
    (a + b, c + d, a as i16 - b as i16, c as i16 - d as i16, (a + b + c + d) as i16)
}

/// Pullbacks of `dz1, dz2, dzb1, dzb2` as `(d eta, d xi1, d xi2)`
/// components.
fn generator_pullback(g: usize) -> [HopfPoly; 3] {
    let t = HopfPoly::term;
    let one = GaussianRational::one;
    let i = GaussianRational::i;
    let z = HopfPoly::default;
    match g {
        0 => [t((0, 1, 1, 0, 1), -one()), t((1, 0, 1, 0, 1), i()), z()],
        1 => [t((1, 0, 0, 1, 1), one()), z(), t((0, 1, 0, 1, 1), i())],
        2 => [t((0, 1, -1, 0, 1), -one()), t((1, 0, -1, 0, 1), -i()), z()],
        3 => [t((1, 0, 0, -1, 1), one()), z(), t((0, 1, 0, -1, 1), -i())],
        _ => unreachable!("C^2 has four generators"),
    }
}

fn det3(m: &[[HopfPoly; 3]; 3]) -> HopfPoly {
    let mut out = HopfPoly::default();
    for (p, sign) in [([0, 1, 2], 1), ([1, 2, 0], 1), ([2, 0, 1], 1), ([0, 2, 1], -1), ([2, 1, 0], -1), ([1, 0, 2], -1)]
    {
        let prod = m[0][p[0]].mul(&m[1][p[1]]).mul(&m[2][p[2]]);
        out.add(&if sign > 0 { prod } else { prod.neg() });
    }
    out
}

/// Coefficient of `d eta ^ d xi1 ^ d xi2` in the pullback of a 3-form with
/// polynomial coefficients.
fn pullback_three_form(a: &Form) -> HopfPoly {
    let mut out = HopfPoly::default();
    for (m, c) in a.terms() {
        let gens: Vec<usize> = (0..4).filter(|g| m & (1 << g) != 0).collect();
        let rows = [generator_pullback(gens[0]), generator_pullback(gens[1]), generator_pullback(gens[2])];
        let coeff = HopfPoly::from_polynomial(c.as_polynomial().expect("numerator form has polynomial coefficients"));
        out.add(&coeff.mul(&det3(&rows)));
    }
    out
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 0 { 0.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn power_table(base: f64, max: usize) -> Vec<f64> {
    let mut out = vec![1.0; max + 1];
    for k in 1..=max {
        out[k] = out[k - 1] * base;
    }
    out
}

/// Integrates `num / den` over the sphere of radius `r`, where both are
/// pulled back to Hopf coordinates; `num` is the `d eta d xi1 d xi2`
/// coefficient. The sign makes the result the integral over the sphere
/// oriented as the boundary of the ball.
fn sphere_integral(
    num: &[(HopfKey, Complex64)],
    den: &[(HopfKey, Complex64)],
    r: f64,
    spec: &QuadratureSpec,
) -> Complex64 {
    let nodes = gauss_legendre(spec.eta_order);
    let n = spec.xi_order;
    let maxpow = num.iter().chain(den).map(|(k, _)| k.0.max(k.1) as usize).max().unwrap_or(0);
    let maxfreq =
        num.iter().chain(den).map(|(k, _)| k.2.unsigned_abs().max(k.3.unsigned_abs()) as usize).max().unwrap_or(0);
    let xs: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
    let phases: Vec<Vec<Complex64>> = xs
        .iter()
        .map(|&x| (0..=2 * maxfreq).map(|k| Complex64::from_polar(1.0, (k as f64 - maxfreq as f64) * x)).collect())
        .collect();
    let eval = |terms: &[(HopfKey, Complex64)], cp: &[f64], sp: &[f64], e1: &[Complex64], e2: &[Complex64]| {
        let mut acc = Complex64::zero();
        for (k, c) in terms {
            let f = cp[k.0 as usize] * sp[k.1 as usize] * r.powi(k.4 as i32);
            acc += c * f * e1[(k.2 as i64 + maxfreq as i64) as usize] * e2[(k.3 as i64 + maxfreq as i64) as usize];
        }
        acc
    };
    let per_eta: Vec<Complex64> = nodes
        .par_iter()
        .map(|&(t, w)| {
            let eta = PI / 4.0 * (t + 1.0);
            let cp = power_table(eta.cos(), maxpow);
            let sp = power_table(eta.sin(), maxpow);
            let vals: Vec<Complex64> = (0..n * n)
                .map(|idx| {
                    let (e1, e2) = (&phases[idx / n], &phases[idx % n]);
                    eval(num, &cp, &sp, e1, e2) / eval(den, &cp, &sp, e1, e2)
                })
                .collect();
            pairwise_sum(&vals) * w
        })
        .collect();
    let cell = (2.0 * PI / n as f64).powi(2) * PI / 4.0;
    // (eta, xi1, xi2) is negatively oriented relative to the outward normal.
    -pairwise_sum(&per_eta) * cell
}

/// Sphere flux of `A0 * f` at each radius. The test function is split into
/// homogeneous parts; the degree-`d` part scales as `r^d`, so each
/// rescaled contribution must agree across radii and the degree-0 part is
/// the limit `r -> 0`.
pub fn flux(spec: &QuadratureSpec, test_fn: &Polynomial) -> Result<FluxResult> {
    let c = c2();
    if test_fn.chart() != c {
        return Err(Error::ChartMismatch(format!("test function lives on {}", test_fn.chart())));
    }
    if test_fn.total_degree() > 4 {
        return Err(Error::Precondition("test functions of degree at most 4 are supported".into()));
    }
    let model = local_model();
    let num_form = model.numerator();
    let den = HopfPoly::from_polynomial(&r_squared(c).pow(2)).compile();
    let mut by_degree: BTreeMap<u32, Vec<(Exponents, GaussianRational)>> = BTreeMap::new();
    for (e, k) in test_fn.terms() {
        by_degree.entry(e.iter().map(|&x| u32::from(x)).sum()).or_default().push((e.clone(), k.clone()));
    }
    let radii: Vec<f64> = spec.radii.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
    let mut values = vec![Complex64::zero(); radii.len()];
    let mut extrapolated = Complex64::zero();
    let mut spread: f64 = 0.0;
    for (d, terms) in by_degree {
        let part: RationalFn = Polynomial::from_terms(c, terms).into();
        let num = pullback_three_form(&num_form.scale(&part)).compile();
        let per_r: Vec<Complex64> = radii.iter().map(|&r| sphere_integral(&num, &den, r, spec)).collect();
        let rescaled: Vec<Complex64> = per_r.iter().zip(&radii).map(|(v, r)| v / r.powi(d as i32)).collect();
        let scale = rescaled.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for a in &rescaled {
            for b in &rescaled {
                spread = spread.max((a - b).norm() / scale);
            }
        }
        for (v, p) in values.iter_mut().zip(&per_r) {
            *v += p;
        }
        if d == 0 {
            extrapolated = rescaled.iter().sum::<Complex64>() / rescaled.len() as f64;
        }
    }
    if spread.is_nan() || spread > spec.tolerance {
        return Err(Error::QuadratureDiverged { spread, tolerance: spec.tolerance });
    }
    Ok(FluxResult { radii, values, extrapolated, spread })
}
