use genholo_core::coeffs::{Chart, GaussianRational, Polynomial, RationalFn};
use genholo_core::forms::Form;
use genholo_core::gcs::GCStructure;
use genholo_core::gtangent::GVector;
use genholo_core::linalg::Matrix;
use genholo_core::poismod::*;
use genholo_core::sample;
use genholo_core::serre::validate_serre_data;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c2() -> Chart {
    Chart::new(2)
}

fn structures() -> Vec<GCStructure> {
    vec![
        GCStructure::from_complex(2).unwrap(),
        GCStructure::from_symplectic(&GCStructure::standard_omega(2)).unwrap(),
        GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap(),
    ]
}

/// `ebar_I . rho` for the subset `mask` of the conjugate frame.
fn ubasis(s: &GCStructure, mask: u32) -> Form {
    let mut f = s.rho().clone();
    for k in (0..s.ebar_frame().len()).rev() {
        if mask >> k & 1 == 1 {
            f = s.ebar_frame()[k].clifford(&f);
        }
    }
    f
}

fn level(s: &GCStructure, mask: u32) -> i32 {
    s.m() as i32 - mask.count_ones() as i32
}

fn g(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_parts((re, 1), (im, 1))
}

#[test]
fn frames_annihilate_and_are_isotropic() {
    for s in structures() {
        for e in s.e_frame() {
            assert!(e.clifford(s.rho()).is_zero());
            for f in s.e_frame() {
                assert!(e.inner(f).is_zero());
            }
        }
    }
}

#[test]
fn j_eigenvalues_on_complex_basis_forms() {
    let s = GCStructure::from_complex(2).unwrap();
    for m in 0..16u32 {
        let a = Form::basis(m, RationalFn::one(c2()));
        let (p, q) = a.bidegree_of(m);
        let k = p as i64 - q as i64;
        let expect = a.scale_c(&(&GaussianRational::i() * &GaussianRational::from_int(k)));
        assert_eq!(s.j_action(&a).unwrap(), expect);
        assert_eq!(s.uk_decompose(&a).unwrap().concentrated_in(), Some(k as i32));
    }
}

#[test]
fn uk_levels_pair_only_with_opposite_levels() {
    let point = [g(1, 2), g(-1, 1)];
    for s in structures() {
        let r = s.ebar_frame().len();
        let basis: Vec<(u32, Form)> = (0..1u32 << r).map(|m| (m, ubasis(&s, m).at_point(&point).unwrap())).collect();
        for k in -(s.m() as i32)..=s.m() as i32 {
            let a: Vec<&Form> = basis.iter().filter(|(m, _)| level(&s, *m) == k).map(|t| &t.1).collect();
            let mut pairing = Matrix::filled(a.len(), 0, GaussianRational::from_int(0));
            let mut cols = Vec::new();
            for (mb, b) in &basis {
                let vals: Vec<GaussianRational> =
                    a.iter().map(|x| x.mukai(b).top_coeff().constant_value().unwrap()).collect();
                if level(&s, *mb) == -k {
                    cols.push(vals);
                } else {
                    assert!(vals.iter().all(num_traits::Zero::is_zero), "U_{k} pairs with U_{}", level(&s, *mb));
                }
            }
            if !cols.is_empty() {
                pairing =
                    Matrix::from_rows((0..a.len()).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect());
            }
            assert_eq!(pairing.rank(), a.len());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn uk_components_resum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::form(&mut rng, c2(), 4, 2);
        for s in structures() {
            prop_assert_eq!(s.uk_decompose(&a).unwrap().sum(), a.clone());
        }
    }

    #[test]
    fn d_moves_one_level(seed in any::<u64>(), p in 0u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in structures() {
            let mut a = Form::zero(c2());
            for m in (0..16u32).filter(|m| m.count_ones() == p) {
                let f: RationalFn = sample::polynomial(&mut rng, c2(), 2, 2, false).into();
                a = &a + &ubasis(&s, m).scale(&f);
            }
            let (dbar, del) = s.decompose_d(&a).unwrap();
            prop_assert_eq!(&dbar + &del, a.ext_d());
        }
    }

    #[test]
    fn dolbeault_closed_forms_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f: RationalFn = sample::polynomial(&mut rng, c2(), 3, 3, false).into();
        for s in structures().into_iter().skip(1) {
            prop_assert_eq!(Some(s.dolbeault_function(&f)), s.dolbeault_closed_form(&f));
        }
    }

    #[test]
    fn frame_brackets_stay_in_e(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for s in structures() {
            let mut combo = || {
                let mut v = GVector::zero(c2());
                for e in s.e_frame() {
                    let f: RationalFn = sample::polynomial(&mut rng, c2(), 2, 2, false).into();
                    v = &v + &e.scale(&f);
                }
                v
            };
            let (a, b) = (combo(), combo());
            prop_assert!(a.courant(&b).clifford(s.rho()).is_zero());
        }
    }

    #[test]
    fn serre_validation_is_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = GCStructure::from_poisson(&PoissonBivector::normal_form()).unwrap();
        let k = rng.gen_range(1..4);
        let mut pts: Vec<Vec<GaussianRational>> = (0..k).map(|i| vec![g(0, 0), g(i + 1, 0)]).collect();
        let mut w: Vec<GaussianRational> = (0..k).map(|_| sample::nonzero_gaussian(&mut rng)).collect();
        let before = validate_serre_data(&pts, &w, &s).unwrap();
        pts.push(vec![sample::nonzero_gaussian(&mut rng), sample::gaussian(&mut rng)]);
        w.push(sample::nonzero_gaussian(&mut rng));
        let after = validate_serre_data(&pts, &w, &s).unwrap();
        prop_assert!(!after.pass);
        prop_assert!(!after.in_u0);
        prop_assert!(after.failures.len() >= before.failures.len());
    }
}

fn times(a: &[Vec<Polynomial>], b: &[Vec<Polynomial>]) -> Vec<Vec<Polynomial>> {
    let c = a[0][0].chart();
    (0..2)
        .map(|i| (0..2).map(|k| (0..2).fold(Polynomial::zero(c), |acc, j| &acc + &(&a[i][j] * &b[j][k]))).collect())
        .collect()
}

fn base_sections() -> Vec<Vec<Polynomial>> {
    let c = c2();
    vec![vec![Polynomial::var(c, 0), Polynomial::zero(c)], vec![Polynomial::zero(c), Polynomial::one(c)]]
}

#[test]
fn sections_of_unimodular_modifications_give_modules() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let u = sample::unimodular(&mut rng, c2(), 1, true);
        let p = times(&base_sections(), &u);
        let m = from_sections(&p).unwrap();
        assert_eq!(m.sigma, PoissonBivector::normal_form());
        for i in 0..2 {
            for j in 0..2 {
                assert!(m.connection.entry(i, j).iter().all(RationalFn::is_polynomial));
            }
        }
        let res = sections_residual(&p, &m.sigma, &m.connection);
        assert!(res.iter().flatten().flatten().all(RationalFn::is_zero));
        assert!(module_check(&m.sigma, &m.connection, 2).pass);
        assert!(module_check(&m.sigma, &m.connection.trace(), 2).pass);
    }
}

#[test]
fn module_and_generalized_holomorphic_checks_agree() {
    let sigma = PoissonBivector::normal_form();
    let s = GCStructure::from_poisson(&sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut corpus = vec![ConnectionMatrix::zero(c2(), 2), canonical_module(&sigma)];
    for _ in 0..10 {
        let u = sample::unimodular(&mut rng, c2(), 1, true);
        let a = from_sections(&times(&base_sections(), &u)).unwrap().connection;
        let mut bump = vec![vec![vec![RationalFn::zero(c2()); 4]; 2]; 2];
        let (i, j) = (rng.gen_range(0..2), rng.gen_range(0..2));
        bump[i][j][rng.gen_range(0..2)] = sample::polynomial(&mut rng, c2(), 1, 2, true).into();
        corpus.push(a.plus(&ConnectionMatrix::new(c2(), bump).unwrap()));
        corpus.push(a);
    }
    let (mut passes, mut fails) = (0, 0);
    for a in &corpus {
        let m = module_check(&sigma, a, 2).pass;
        let gh = gh_check(&to_generalized(a, &s).unwrap(), &s).unwrap().pass;
        assert_eq!(m, gh, "{a}");
        if m {
            passes += 1;
        } else {
            fails += 1;
        }
    }
    assert!(corpus.len() >= 20 && passes > 0 && fails > 0);
}
