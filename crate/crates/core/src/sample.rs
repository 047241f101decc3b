//! Seeded random objects for property checks and the acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coeffs::{Chart, Exponents, GaussianRational, Polynomial, RationalFn};
use crate::forms::Form;
use crate::gtangent::GVector;

/// Small Gaussian rational with numerators in `-4..=4` and denominators
/// in `1..=3`; real with probability one half.
pub fn gaussian<R: Rng>(rng: &mut R) -> GaussianRational {
    let re = GaussianRational::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
    if rng.gen_bool(0.5) {
        re
    } else {
        let im = GaussianRational::from_ratio(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        &re + &(&im * &GaussianRational::i())
    }
}

pub fn nonzero_gaussian<R: Rng>(rng: &mut R) -> GaussianRational {
    loop {
        let c = gaussian(rng);
        if !num_traits::Zero::is_zero(&c) {
            return c;
        }
    }
}

/// Random polynomial with at most `terms` terms of total degree at most
/// `max_deg`. Only holomorphic variables are used when `holomorphic`.
pub fn polynomial<R: Rng>(rng: &mut R, chart: Chart, max_deg: u32, terms: usize, holomorphic: bool) -> Polynomial {
    let vars: Vec<usize> = (0..chart.nvars()).filter(|v| !holomorphic || v % 2 == 0).collect();
    let mut out = Polynomial::zero(chart);
    for _ in 0..terms {
        let deg = rng.gen_range(0..=max_deg);
        let mut e: Exponents = std::iter::repeat_n(0, chart.nvars()).collect();
        for _ in 0..deg {
            e[*vars.choose(rng).unwrap()] += 1;
        }
        out = &out + &Polynomial::monomial(chart, e, gaussian(rng));
    }
    out
}

/// Random form with polynomial coefficients on `count` random basis forms.
pub fn form<R: Rng>(rng: &mut R, chart: Chart, count: usize, max_deg: u32) -> Form {
    let top = chart.top_mask();
    let terms = (0..count).map(|_| {
        let m = rng.gen_range(0..=top);
        (m, RationalFn::from(polynomial(rng, chart, max_deg, 2, false)))
    });
    Form::from_terms(chart, terms.collect::<Vec<_>>())
}

/// Random form of fixed degree `k`.
pub fn homogeneous_form<R: Rng>(rng: &mut R, chart: Chart, k: u32, count: usize, max_deg: u32) -> Form {
    let masks: Vec<u32> = (0..=chart.top_mask()).filter(|m| m.count_ones() == k).collect();
    let terms: Vec<_> = (0..count)
        .map(|_| (*masks.choose(rng).unwrap(), RationalFn::from(polynomial(rng, chart, max_deg, 2, false))))
        .collect();
    Form::from_terms(chart, terms)
}

/// Random generalized vector with polynomial coefficients.
pub fn gvector<R: Rng>(rng: &mut R, chart: Chart, max_deg: u32) -> GVector {
    let coords: Vec<RationalFn> =
        (0..2 * chart.nvars())
            .map(|_| {
                if rng.gen_bool(0.6) {
                    polynomial(rng, chart, max_deg, 2, false).into()
                } else {
                    RationalFn::zero(chart)
                }
            })
            .collect();
    GVector::from_coords(chart, &coords)
}

/// Random point with one Gaussian rational per complex coordinate.
pub fn point<R: Rng>(rng: &mut R, chart: Chart) -> Vec<GaussianRational> {
    (0..chart.complex_dim()).map(|_| gaussian(rng)).collect()
}

/// Random `SL(2)` matrix `[[1, f], [0, 1]] [[1, 0], [g, 1]]` with `f, g` of
/// degree at most `max_deg`.
pub fn unimodular<R: Rng>(rng: &mut R, chart: Chart, max_deg: u32, holomorphic: bool) -> Vec<Vec<Polynomial>> {
    let f = polynomial(rng, chart, max_deg, 2, holomorphic);
    let g = polynomial(rng, chart, max_deg, 2, holomorphic);
    let one = Polynomial::one(chart);
    vec![vec![&one + &(&f * &g), f], vec![g, one]]
}
