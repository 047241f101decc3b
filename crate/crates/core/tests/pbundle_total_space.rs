use genholo_core::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use genholo_core::gcs::GCStructure;
use genholo_core::gtangent::GVector;
use genholo_core::pbundle::*;
use genholo_core::poismod::{from_sections, gh_check, to_generalized, GHConnection, PoissonBivector};
use genholo_core::{sample, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn g(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_parts((re, 1), (im, 1))
}

fn normal() -> GCStructure {
    GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap()
}

#[test]
fn structure_equation_for_random_unimodular_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a = sample::unimodular(&mut rng, Chart::new(2), 1, false);
        let m = mobius_theta(&a).unwrap();
        assert!(m.flat && m.structure_equation);
        assert!(mobius_transition_check(&a).unwrap().pass);
    }
}

#[test]
fn non_flat_connection_has_no_witness() {
    let s = normal();
    let c = Chart::new(2);
    let mut field = vec![RationalFn::zero(c); 4];
    field[0] = RationalFn::var(c, 2);
    let z = GVector::zero(c);
    let gh = GHConnection::new(vec![vec![GVector::from_vector(c, field), z.clone()], vec![z.clone(), z]], &s).unwrap();
    assert!(!gh_check(&gh, &s).unwrap().pass);
    assert!(matches!(build_spinor(&gh, &s), Err(Error::GHCheckFail(_))));
    let rho = build_spinor_unchecked(&gh, &s).unwrap();
    assert!(matches!(check_total_integrability(&rho, &[]), Err(Error::NoWitness(_))));
}

#[test]
fn only_the_ebar_part_of_theta_enters() {
    let s = normal();
    let c = Chart::new(2);
    let one = Polynomial::one(c);
    let zero = Polynomial::zero(c);
    let m = from_sections(&[vec![Polynomial::var(c, 0), zero.clone()], vec![zero, one]]).unwrap();
    let gh = to_generalized(&m.connection, &s).unwrap();
    let rho = build_spinor(&gh, &s).unwrap();
    let fc = c.with_fiber();
    let theta = theta_ebar(&gh).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let mut pert = GVector::zero(fc);
        for e in s.e_frame() {
            let coeff: RationalFn = sample::polynomial(&mut rng, fc, 2, 2, false).into();
            pert = &pert + &e.lift(fc).scale(&coeff);
        }
        let dw = GVector::coform(fc, 4);
        let moved = (&(&dw + &theta) + &pert).clifford(&s.rho().lift(fc));
        assert_eq!(moved, rho);
    }
}

#[test]
fn product_witness_restricts_to_base_witness() {
    let s = normal();
    let rho = build_spinor(&GHConnection::zero(&s, 2), &s).unwrap();
    let base = vec![vec![g(0, 0), g(1, 0)], vec![g(1, 1), g(2, 0)], vec![g(0, 0), g(0, 1)]];
    let t = check_total_integrability(&rho, &fiber_grid(&base)).unwrap();
    assert_eq!(rho.ext_d(), t.witness.clifford(&rho));
    let fc = Chart::new(2).with_fiber();
    let lifted = s.check_integrable().unwrap().lift(fc);
    assert_eq!(rho.ext_d(), lifted.clifford(&rho));
    for w in [g(0, 0), g(1, 0), g(0, 1)] {
        let restricted = t.witness.substitute(4, &w).unwrap();
        assert_eq!(rho.ext_d(), restricted.clifford(&rho));
    }
}
