//! Multivariate gcd over Q(i).
//!
//! Recursive primitive-PRS: pick a variable common to both inputs, view
//! them as univariate polynomials over the ring of the remaining variables,
//! split off contents recursively and run a primitive pseudo-remainder
//! sequence on the primitive parts. Monomial contents and constants are
//! handled up front since they dominate in practice.

use num_traits::Zero;

use super::gaussian::GaussianRational;
use super::poly::{Exponents, Polynomial};

/// Monic greatest common divisor; `gcd(0, 0) = 0`.
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let chart = a.chart();
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(chart);
    }
    if a == b {
        return a.monic();
    }
    let (ma, a1) = a.split_monomial_content();
    let (mb, b1) = b.split_monomial_content();
    let mg: Exponents = ma.iter().zip(mb.iter()).map(|(x, y)| *x.min(y)).collect();
    let mono = Polynomial::monomial(chart, mg, GaussianRational::from_int(1));
    if a1.is_constant() || b1.is_constant() {
        return mono;
    }
    let g = gcd_primitive(&a1, &b1);
    &mono * &g
}

/// gcd of two non-constant polynomials without monomial content.
fn gcd_primitive(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let chart = a.chart();
    let va = a.vars_used();
    let vb = b.vars_used();
    let common = va & vb;
    if common == 0 {
        return Polynomial::one(chart);
    }
    // A variable occurring in only one argument cannot occur in the gcd:
    // replace that argument by its content with respect to the variable.
    let only_a = va & !vb;
    if only_a != 0 {
        let x = only_a.trailing_zeros() as usize;
        let c = content(&a.to_univariate(x));
        return gcd(&c, b);
    }
    let only_b = vb & !va;
    if only_b != 0 {
        let x = only_b.trailing_zeros() as usize;
        let c = content(&b.to_univariate(x));
        return gcd(a, &c);
    }
    // Main variable: the common one with the smallest degree.
    let x = (0..chart.nvars())
        .filter(|i| common & (1 << i) != 0)
        .min_by_key(|&i| a.degree_in(i).max(b.degree_in(i)))
        .unwrap();
    let ua = a.to_univariate(x);
    let ub = b.to_univariate(x);
    let ca = content(&ua);
    let cb = content(&ub);
    let cg = gcd(&ca, &cb);
    let pa = divide_coeffs(&ua, &ca);
    let pb = divide_coeffs(&ub, &cb);
    let g = prs_gcd(pa, pb);
    let gp = Polynomial::from_univariate(chart, x, &g);
    (&cg * &gp).monic()
}

/// gcd of all coefficients of a univariate representation.
fn content(coeffs: &[Polynomial]) -> Polynomial {
    let chart = coeffs[0].chart();
    let mut nonzero: Vec<&Polynomial> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| (c.len(), c.total_degree()));
    let mut g = Polynomial::zero(chart);
    for c in nonzero {
        g = gcd(&g, c);
        if g.is_constant() {
            return Polynomial::one(chart);
        }
    }
    g
}

fn divide_coeffs(coeffs: &[Polynomial], c: &Polynomial) -> Vec<Polynomial> {
    if c.is_one() {
        return coeffs.to_vec();
    }
    coeffs.iter().map(|k| k.div_exact(c).expect("content divides every coefficient")).collect()
}

fn degree(u: &[Polynomial]) -> Option<usize> {
    u.iter().rposition(|c| !c.is_zero())
}

fn trim(mut u: Vec<Polynomial>) -> Vec<Polynomial> {
    while u.len() > 1 && u.last().is_some_and(|c| c.is_zero()) {
        u.pop();
    }
    u
}

/// Pseudo-remainder of `a` by `b` (without the trailing lc power).
fn prem(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    let db = degree(b).unwrap();
    let lb = &b[db];
    let mut r: Vec<Polynomial> = a.to_vec();
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * lb;
        }
        for (k, bc) in b.iter().enumerate() {
            if bc.is_zero() {
                continue;
            }
            let t = &lr * bc;
            r[k + shift] = &r[k + shift] - &t;
        }
        debug_assert!(r[dr].is_zero());
        r.truncate(dr);
        if r.is_empty() {
            break;
        }
    }
    trim(r)
}

/// Primitive part, normalized to a monic leading coefficient in the base field.
fn primitive(u: Vec<Polynomial>) -> Vec<Polynomial> {
    let c = content(&u);
    let mut p = divide_coeffs(&u, &c);
    let d = degree(&p).unwrap();
    let lcn = p[d].lc();
    if !lcn.is_zero() {
        let inv = lcn.inv().unwrap();
        for k in p.iter_mut() {
            *k = k.scale(&inv);
        }
    }
    p
}

/// gcd of two primitive univariate polynomials over the coefficient ring.
fn prs_gcd(mut a: Vec<Polynomial>, mut b: Vec<Polynomial>) -> Vec<Polynomial> {
    let chart = a[0].chart();
    if degree(&a) < degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let db = degree(&b);
        match db {
            None => return primitive(a),
            Some(0) => return vec![Polynomial::one(chart)],
            Some(_) => {}
        }
        let r = prem(&a, &b);
        if degree(&r).is_none() {
            return primitive(b);
        }
        a = b;
        b = primitive(r);
    }
}
