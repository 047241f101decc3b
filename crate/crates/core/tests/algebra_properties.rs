use genholo_core::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use genholo_core::forms::{hodge_star, metric_pairing, volume_form, Form, Orientation};
use genholo_core::gtangent::GVector;
use genholo_core::linalg::Matrix;
use genholo_core::sample;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c2() -> Chart {
    Chart::new(2)
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn poly(r: &mut ChaCha8Rng) -> Polynomial {
    sample::polynomial(r, c2(), 3, 4, false)
}

fn sign(k: u32) -> i64 {
    if (k * k.saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ring_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (poly(&mut r), poly(&mut r), poly(&mut r));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
    }

    #[test]
    fn derivatives_commute_and_conjugate(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = poly(&mut r);
        for u in 0..4 {
            for v in 0..4 {
                prop_assert_eq!(p.derive(u).derive(v), p.derive(v).derive(u));
            }
        }
        for i in 0..2 {
            prop_assert_eq!(p.derive(2 * i).conjugate(), p.conjugate().derive(2 * i + 1));
        }
    }

    #[test]
    fn exact_division_inverts_multiplication(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = poly(&mut r);
        let mut q = poly(&mut r);
        if q.is_zero() {
            q = Polynomial::one(c2());
        }
        prop_assert_eq!((&p * &q).div_exact(&q).unwrap(), p);
    }

    #[test]
    fn rational_functions_form_a_field(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a: RationalFn = poly(&mut r).into();
        let b = RationalFn::new(poly(&mut r), &poly(&mut r) + &Polynomial::one(c2()));
        if let Ok(b) = b {
            if let Some(inv) = b.inv() {
                prop_assert!((&b * &inv).is_one());
                prop_assert_eq!(&(&a * &b) / &b, a.clone());
            }
            prop_assert_eq!(&(&a + &b) - &b, a);
        }
    }

    #[test]
    fn d_squares_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::form(&mut r, c2(), 4, 3);
        prop_assert!(a.ext_d().ext_d().is_zero());
        prop_assert!(a.del_part().del_part().is_zero());
        prop_assert!(a.dbar_part().dbar_part().is_zero());
        prop_assert_eq!(a.dbar_part().del_part(), -a.del_part().dbar_part());
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>(), p in 0u32..=4, q in 0u32..=4) {
        let mut r = rng(seed);
        let a = sample::homogeneous_form(&mut r, c2(), p, 3, 2);
        let b = sample::homogeneous_form(&mut r, c2(), q, 3, 2);
        let s = if (p * q) % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale_c(&GaussianRational::from_int(s)));
    }

    #[test]
    fn mukai_sign_law(seed in any::<u64>(), p in 0u32..=4) {
        let mut r = rng(seed);
        let q = 4 - p;
        let a = sample::homogeneous_form(&mut r, c2(), p, 3, 2);
        let b = sample::homogeneous_form(&mut r, c2(), q, 3, 2);
        let parity = if (p * q) % 2 == 0 { 1 } else { -1 };
        let s = sign(p) * sign(q) * parity;
        prop_assert_eq!(a.mukai(&b), b.mukai(&a).scale_c(&GaussianRational::from_int(s)));
    }

    #[test]
    fn clifford_relation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let v = sample::gvector(&mut r, c2(), 2);
        let q = v.inner(&v);
        for m in 0..16u32 {
            let phi = Form::basis(m, RationalFn::one(c2()));
            prop_assert_eq!(v.clifford(&v.clifford(&phi)), phi.scale(&q));
        }
    }

    #[test]
    fn courant_jacobiator_has_no_vector_part(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = sample::gvector(&mut r, c2(), 2);
        let b = sample::gvector(&mut r, c2(), 2);
        let c = sample::gvector(&mut r, c2(), 2);
        let jac = &(&a.courant(&b).courant(&c) + &b.courant(&c).courant(&a)) + &c.courant(&a).courant(&b);
        prop_assert!(jac.vector_part().is_zero());
    }

    #[test]
    fn lie_derivative_is_a_derivation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x: Vec<RationalFn> = (0..4).map(|_| sample::polynomial(&mut r, c2(), 2, 2, false).into()).collect();
        let x = GVector::from_vector(c2(), x);
        let a = sample::form(&mut r, c2(), 3, 2);
        let b = sample::form(&mut r, c2(), 3, 2);
        let lhs = x.lie_derivative(&a.wedge(&b)).unwrap();
        let rhs = &x.lie_derivative(&a).unwrap().wedge(&b) + &a.wedge(&x.lie_derivative(&b).unwrap());
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn mukai_pairing_is_nondegenerate() {
    let mut m = Matrix::filled(16, 16, GaussianRational::from_int(0));
    for i in 0..16u32 {
        for j in 0..16u32 {
            let a = Form::basis(i, RationalFn::one(c2()));
            let b = Form::basis(j, RationalFn::one(c2()));
            m[(i as usize, j as usize)] = a.mukai(&b).top_coeff().constant_value().unwrap();
        }
    }
    assert_eq!(m.rank(), 16);
}

#[test]
fn hodge_star_matches_the_metric() {
    let vol = volume_form(c2(), Orientation::Standard);
    for i in 0..16u32 {
        for j in (0..16u32).filter(|j| j.count_ones() == i.count_ones()) {
            let a = Form::basis(i, RationalFn::one(c2()));
            let b = Form::basis(j, RationalFn::one(c2()));
            assert_eq!(a.wedge(&hodge_star(&b).unwrap()), vol.scale(&metric_pairing(&a, &b)), "{i} {j}");
        }
    }
}
