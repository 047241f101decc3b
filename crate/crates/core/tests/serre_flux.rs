use std::f64::consts::PI;

use genholo_core::coeffs::{Chart, Polynomial};
use genholo_core::serre::{flux, local_model, QuadratureSpec};
use num_complex::Complex64;
use num_rational::BigRational;

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::new(24, 48, vec![r(1, 2), r(1, 1), r(2, 1)]).unwrap()
}

/// Determinant of a 4x4 complex matrix by cofactor expansion.
fn det4(m: [[Complex64; 4]; 4]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for p in permutations() {
        let inversions = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
        acc += (0..4).map(|i| m[i][p[i]]).product::<Complex64>() * sign;
    }
    acc
}

fn permutations() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

/// Stokes: the flux of `A0` through the unit sphere equals the integral of
/// `d(r^4 A0)` over the unit ball (r^4 is constant on the sphere). The top
/// coefficient of `d(r^4 A0)` is converted to the real volume density by
/// writing `dz = dx + i dy` in the basis `dx1, dy1, dx2, dy2`.
fn stokes_constant() -> f64 {
    let num = local_model().numerator();
    let top = num.ext_d();
    assert_eq!(top.degree(), Some(4));
    let k = top.coeff(0b1111).constant_value().expect("constant top coefficient").to_f64();
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let dz1 = [one, i, zero, zero];
    let dz2 = [zero, zero, one, i];
    let dzb1 = [one, -i, zero, zero];
    let dzb2 = [zero, zero, one, -i];
    let density = det4([dz1, dz2, dzb1, dzb2]);
    let ball_volume = PI * PI / 2.0;
    let v = Complex64::new(k.0, k.1) * density * ball_volume;
    assert!(v.im.abs() < 1e-12);
    v.re
}

#[test]
fn stokes_oracle_gives_minus_four_pi_squared() {
    let c = stokes_constant();
    assert!((c + 4.0 * PI * PI).abs() < 1e-12, "{c}");
}

#[test]
fn flux_of_one_matches_stokes() {
    let ch = Chart::new(2);
    let res = flux(&spec(), &Polynomial::one(ch)).unwrap();
    let c = stokes_constant();
    for v in &res.values {
        assert!((v.re - c).abs() / c.abs() < 1e-10 && v.im.abs() < 1e-9, "{v}");
    }
    assert!((res.extrapolated.re - c).abs() / c.abs() < 1e-10);
    assert!(res.spread < 1e-10, "{}", res.spread);
}

#[test]
fn flux_pairs_with_value_at_origin() {
    let ch = Chart::new(2);
    let c = stokes_constant();
    let v = |i| Polynomial::var(ch, i);
    let three = Polynomial::from_int(ch, 3);
    let cases = [
        (v(0), 0.0),
        (v(1), 0.0),
        (&(&v(0) * &v(1)) + &three, 3.0),
        (&(&v(2) * &v(3)) - &(&v(0) * &v(2)), 0.0),
        (&(&v(1) * &v(1)) + &Polynomial::one(ch), 1.0),
    ];
    for (f, at0) in cases {
        let res = flux(&spec(), &f).unwrap();
        assert!((res.extrapolated - Complex64::new(c * at0, 0.0)).norm() < 1e-8, "{f}: {}", res.extrapolated);
    }
    let res = flux(&spec(), &v(0)).unwrap();
    assert!(res.values.iter().all(|x| x.norm() < 1e-8));
}

#[test]
fn flux_converges_with_order() {
    let ch = Chart::new(2);
    let f = &(&Polynomial::var(ch, 0) * &Polynomial::var(ch, 1)).pow(2) + &Polynomial::one(ch);
    let radii = vec![r(1, 1)];
    let coarse = flux(&QuadratureSpec::new(4, 6, radii.clone()).unwrap(), &f).unwrap();
    let fine = flux(&QuadratureSpec::new(24, 48, radii).unwrap(), &f).unwrap();
    let exact_fine = fine.values[0];
    assert!((coarse.values[0] - exact_fine).norm() > 1e-6);
    let mid = flux(&QuadratureSpec::new(12, 24, vec![r(1, 1)]).unwrap(), &f).unwrap();
    assert!((mid.values[0] - exact_fine).norm() < 1e-10);
}

#[test]
fn rejects_bad_inputs() {
    let ch = Chart::new(2);
    let f = Polynomial::var(ch, 0).pow(5);
    assert!(flux(&spec(), &f).is_err());
}
