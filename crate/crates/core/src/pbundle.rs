//! Generalized complex structures on projectivized rank-2 bundles. The
//! fiber coordinate is `w`, adjoined to the base chart.

use rayon::prelude::*;

use crate::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::gcs::{integrability_witness, is_pure, GCStructure};
use crate::gtangent::GVector;
use crate::poismod::{gh_check, GHConnection};
use crate::verdict::Verdict;

/// Output of the Mobius pullback: `theta`, `alpha` and the certificates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTheta {
    /// `A = a^-1 da` on the base chart.
    pub connection: [[Form; 2]; 2],
    /// `A12 + (A11 - A22) w - A21 w^2` on the fibered chart.
    pub theta: Form,
    /// `2 w A21 - (A11 - A22)`.
    pub alpha: Form,
    /// `dA + A ^ A = 0`.
    pub flat: bool,
    /// `d(dw + theta) = alpha ^ (dw + theta)`.
    pub structure_equation: bool,
}

fn fiber_var(chart: Chart) -> RationalFn {
    RationalFn::var(chart, 2 * chart.n)
}

fn fiber_gen(chart: Chart) -> usize {
    2 * chart.n
}

fn check_square(a: &[Vec<Polynomial>]) -> Result<Chart> {
    if a.len() != 2 || a.iter().any(|r| r.len() != 2) {
        return Err(Error::Precondition("matrix must be 2x2".into()));
    }
    let chart = a[0][0].chart();
    if chart.fiber || a.iter().flatten().any(|p| p.chart() != chart) {
        return Err(Error::ChartMismatch("matrix entries must live on one base chart".into()));
    }
    Ok(chart)
}

/// Pulls back the fiber coordinate under `w -> (a11 w + a12) / (a21 w + a22)`
/// for `a` with `det a = 1`.
pub fn mobius_theta(a: &[Vec<Polynomial>]) -> Result<MobiusTheta> {
    let chart = check_square(a)?;
    let det = &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]);
    if !det.is_one() {
        return Err(Error::NotUnimodular(det.to_string()));
    }
    let f = |p: &Polynomial| RationalFn::from(p.clone());
    let inv = [[f(&a[1][1]), -f(&a[0][1])], [-f(&a[1][0]), f(&a[0][0])]];
    let da: Vec<Vec<Form>> = a.iter().map(|r| r.iter().map(|p| Form::scalar(f(p)).ext_d()).collect()).collect();
    let entry = |i: usize, k: usize| {
        let mut acc = Form::zero(chart);
        for j in 0..2 {
            acc = &acc + &da[j][k].scale(&inv[i][j]);
        }
        acc
    };
    let conn = [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]];
    let flat = (0..2).all(|i| {
        (0..2).all(|k| {
            let mut c = conn[i][k].ext_d();
            for j in 0..2 {
                c = &c + &conn[i][j].wedge(&conn[j][k]);
            }
            c.is_zero()
        })
    });
    let fc = chart.with_fiber();
    let w = fiber_var(fc);
    let l = |x: &Form| x.lift(fc);
    let diag = &l(&conn[0][0]) - &l(&conn[1][1]);
    let theta = &(&l(&conn[0][1]) + &diag.scale(&w)) - &l(&conn[1][0]).scale(&w.pow(2));
    let alpha = &l(&conn[1][0]).scale(&w.scale(&GaussianRational::from_int(2))) - &diag;
    let dw_theta = &Form::gen(fc, fiber_gen(fc)) + &theta;
    let structure_equation = dw_theta.ext_d() == alpha.wedge(&dw_theta);
    Ok(MobiusTheta { connection: conn, theta, alpha, flat, structure_equation })
}

/// Direct check that `(a21 w + a22)^2 d w~ = dw + theta` for the
/// transformed fiber coordinate `w~`.
pub fn mobius_transition_check(a: &[Vec<Polynomial>]) -> Result<Verdict> {
    let m = mobius_theta(a)?;
    let fc = m.theta.chart();
    let w = fiber_var(fc);
    let lf = |p: &Polynomial| RationalFn::from(p.lift(fc));
    let num = &(&lf(&a[0][0]) * &w) + &lf(&a[0][1]);
    let den = &(&lf(&a[1][0]) * &w) + &lf(&a[1][1]);
    let wt = &num / &den;
    let lhs = Form::scalar(wt).ext_d().scale(&den.pow(2));
    let rhs = &Form::gen(fc, fiber_gen(fc)) + &m.theta;
    if lhs == rhs {
        Ok(Verdict::pass())
    } else {
        Ok(Verdict::fail(format!("lhs = {lhs}; rhs = {rhs}")))
    }
}

/// `theta^{01} = G12 + (G11 - G22) w - G21 w^2` on the fibered chart.
pub fn theta_ebar(g: &GHConnection) -> Result<GVector> {
    if g.rank() != 2 {
        return Err(Error::Precondition("connection must have rank 2".into()));
    }
    let fc = g.entry(0, 0).chart().with_fiber();
    let w = fiber_var(fc);
    let l = |i, j| g.entry(i, j).lift(fc);
    let diag = &l(0, 0) - &l(1, 1);
    Ok(&(&l(0, 1) + &diag.scale(&w)) - &l(1, 0).scale(&w.pow(2)))
}

/// `(dw + theta^{01}) . rho` after checking that `G` is generalized
/// holomorphic.
pub fn build_spinor(g: &GHConnection, s: &GCStructure) -> Result<Form> {
    let v = gh_check(g, s)?;
    if !v.pass {
        return Err(Error::GHCheckFail(v.failure.unwrap_or_default()));
    }
    build_spinor_unchecked(g, s)
}

/// [`build_spinor`] without the flatness check.
pub fn build_spinor_unchecked(g: &GHConnection, s: &GCStructure) -> Result<Form> {
    let theta = theta_ebar(g)?;
    let fc = theta.chart();
    let rho = s.rho().lift(fc);
    Ok((&GVector::coform(fc, fiber_gen(fc)) + &theta).clifford(&rho))
}

/// Integrability witness of the total-space spinor together with purity at
/// the sample points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TotalIntegrability {
    pub witness: GVector,
    pub annihilator_dims: Vec<usize>,
}

/// Solves `d rho~ = beta . rho~` over the fibered chart and checks purity of
/// `rho~` at each sample point `(z1, ..., zn, w)`.
pub fn check_total_integrability(rho_tilde: &Form, points: &[Vec<GaussianRational>]) -> Result<TotalIntegrability> {
    let witness = integrability_witness(rho_tilde)?;
    let verdicts: Vec<Result<usize>> = points
        .par_iter()
        .map(|p| {
            let v = is_pure(rho_tilde, p)?;
            if v.pure {
                Ok(v.annihilator_dim)
            } else {
                Err(Error::ImpureSpinor(format!(
                    "({}), annihilator dimension {}",
                    p.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
                    v.annihilator_dim
                )))
            }
        })
        .collect();
    let annihilator_dims = verdicts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(TotalIntegrability { witness, annihilator_dims })
}

/// Sample grid: `w` in `{0, 1, i}` over the given base points.
pub fn fiber_grid(base: &[Vec<GaussianRational>]) -> Vec<Vec<GaussianRational>> {
    let ws = [GaussianRational::from_int(0), GaussianRational::from_int(1), GaussianRational::i()];
    base.iter()
        .flat_map(|b| {
            ws.iter().map(move |w| {
                let mut p = b.clone();
                p.push(w.clone());
                p
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poismod::{from_sections, to_generalized, PoissonBivector};

    fn c() -> Chart {
        Chart::new(2)
    }

    fn v(i: usize) -> Polynomial {
        Polynomial::var(c(), i)
    }

    fn g(re: i64, im: i64) -> GaussianRational {
        GaussianRational::from_parts((re, 1), (im, 1))
    }

    #[test]
    fn upper_triangular_theta() {
        let f = &v(0) * &v(3);
        let a = vec![vec![Polynomial::one(c()), f.clone()], vec![Polynomial::zero(c()), Polynomial::one(c())]];
        let m = mobius_theta(&a).unwrap();
        let fc = c().with_fiber();
        assert_eq!(m.theta, Form::scalar(RationalFn::from(f.lift(fc))).ext_d());
        assert!(m.alpha.is_zero() && m.flat && m.structure_equation);
        assert!(mobius_transition_check(&a).unwrap().pass);
    }

    #[test]
    fn lower_triangular_theta() {
        let gg = &v(2) + &v(1).pow(2);
        let a = vec![vec![Polynomial::one(c()), Polynomial::zero(c())], vec![gg.clone(), Polynomial::one(c())]];
        let m = mobius_theta(&a).unwrap();
        let fc = c().with_fiber();
        let dg = Form::scalar(RationalFn::from(gg.lift(fc))).ext_d();
        let w = fiber_var(fc);
        assert_eq!(m.theta, -dg.scale(&w.pow(2)));
        assert_eq!(m.alpha, dg.scale(&w.scale(&g(2, 0))));
        assert!(m.structure_equation);
        let dw_theta = &Form::gen(fc, 4) + &m.theta;
        assert_eq!(dw_theta.ext_d(), Form::gen(fc, 4).wedge(&dg).scale(&w.scale(&g(-2, 0))));
        assert_ne!(dw_theta.ext_d(), dw_theta.wedge(&m.alpha));
        assert!(mobius_transition_check(&a).unwrap().pass);
    }

    #[test]
    fn product_of_elementary_matrices() {
        let one = Polynomial::one(c());
        let f = &v(0) + &v(3);
        let gg = &v(2) * &v(1);
        let u1 = [[one.clone(), f.clone()], [Polynomial::zero(c()), one.clone()]];
        let u2 = [[one.clone(), Polynomial::zero(c())], [gg.clone(), one.clone()]];
        let mut a = vec![vec![Polynomial::zero(c()); 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                for j in 0..2 {
                    a[i][k] = &a[i][k] + &(&u1[i][j] * &u2[j][k]);
                }
            }
        }
        let m = mobius_theta(&a).unwrap();
        assert!(m.flat && m.structure_equation);
        assert!(mobius_transition_check(&a).unwrap().pass);
    }

    #[test]
    fn identity_and_non_unimodular() {
        let one = Polynomial::one(c());
        let zero = Polynomial::zero(c());
        let m = mobius_theta(&[vec![one.clone(), zero.clone()], vec![zero.clone(), one.clone()]]).unwrap();
        assert!(m.theta.is_zero() && m.alpha.is_zero());
        let bad = mobius_theta(&[vec![v(0), zero.clone()], vec![zero, one]]);
        assert!(matches!(bad, Err(Error::NotUnimodular(_))));
    }

    #[test]
    fn product_structure() {
        let s = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        let rho = build_spinor(&GHConnection::zero(&s, 2), &s).unwrap();
        let fc = c().with_fiber();
        assert_eq!(rho, Form::gen(fc, 4).wedge(&s.rho().lift(fc)));
        assert!(rho.coeff(0).is_zero());
        let base = s.check_integrable().unwrap().lift(fc);
        assert_eq!(rho.ext_d(), base.clifford(&rho));
    }

    #[test]
    fn sections_module_total_space() {
        let one = Polynomial::one(c());
        let zero = Polynomial::zero(c());
        let m = from_sections(&[vec![v(0), zero.clone()], vec![zero, one]]).unwrap();
        let s = GCStructure::from_poisson(&m.sigma).unwrap();
        let gh = to_generalized(&m.connection, &s).unwrap();
        let rho = build_spinor(&gh, &s).unwrap();
        assert!(rho.coeff(0).is_zero());
        let pts = fiber_grid(&[vec![g(0, 0), g(1, 0)], vec![g(2, 1), g(-1, 0)]]);
        let t = check_total_integrability(&rho, &pts).unwrap();
        assert_eq!(rho.ext_d(), t.witness.clifford(&rho));
        assert!(t.annihilator_dims.iter().all(|&d| d == 6));
    }
}
