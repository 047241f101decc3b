use genholo::expr::{parse_as, parse_expr, Env, Value};
use genholo_core::coeffs::{Chart, RationalFn};
use genholo_core::sample;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn chart_of(spec: &str) -> Chart {
    match spec.strip_suffix('f') {
        Some(n) => Chart::fibered(n.parse().unwrap()),
        None => Chart::new(spec.parse().unwrap()),
    }
}

fn render(r: Result<Value, genholo::expr::ExprError>) -> String {
    match r {
        Ok(v) => format!("{}: {v}", v.type_name()),
        Err(e) => format!("error: {e}"),
    }
}

#[test]
fn golden_corpus_matches_and_round_trips() {
    let text = include_str!("golden/expressions.txt");
    let env = Env::new();
    let mut checked = 0;
    for (lineno, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.splitn(3, " | ").collect();
        assert_eq!(parts.len(), 3, "line {}", lineno + 1);
        let chart = chart_of(parts[0].trim());
        let got = render(parse_expr(parts[1], chart, &env));
        assert_eq!(got, parts[2], "line {}: {}", lineno + 1, parts[1]);
        if let Ok(v) = parse_expr(parts[1], chart, &env) {
            let canon = v.to_string();
            let again =
                parse_as(&canon, chart, &env, v.kind()).unwrap_or_else(|e| panic!("line {}: {canon}: {e}", lineno + 1));
            assert_eq!(again, v, "line {}", lineno + 1);
            assert_eq!(again.to_string(), canon);
        }
        checked += 1;
    }
    assert!(checked >= 40);
}

#[test]
fn errors_report_line_and_column_across_lines() {
    let e = parse_expr("z1\n+ )", Chart::new(2), &Env::new()).unwrap_err();
    assert_eq!(e.to_string(), "2:3: expected a number or a name or `(`, found `)`");
}

#[test]
fn definitions_resolve_through_the_environment() {
    let c = Chart::new(2);
    let mut env = Env::new();
    env.insert("rho".into(), parse_expr("z1 + dz1^dz2", c, &env).unwrap());
    let v = parse_expr("cl(-e2, rho) - d(rho)", c, &env).unwrap();
    assert_eq!(v.to_string(), "0");
}

fn charts() -> impl Strategy<Value = Chart> {
    prop_oneof![Just(Chart::new(1)), Just(Chart::new(2)), Just(Chart::new(3)), Just(Chart::fibered(2))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forms_round_trip(seed in any::<u64>(), chart in charts()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = sample::form(&mut rng, chart, 4, 2);
        let v = Value::Form(a);
        prop_assert_eq!(parse_as(&v.to_string(), chart, &Env::new(), v.kind()).unwrap(), v);
    }

    #[test]
    fn gvectors_round_trip(seed in any::<u64>(), chart in charts()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sample::gvector(&mut rng, chart, 2);
        let v = Value::Vector(g);
        prop_assert_eq!(parse_as(&v.to_string(), chart, &Env::new(), v.kind()).unwrap(), v);
    }

    #[test]
    fn rational_functions_round_trip(seed in any::<u64>(), chart in charts()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let num = sample::polynomial(&mut rng, chart, 3, 3, false);
        let den = sample::polynomial(&mut rng, chart, 2, 2, false);
        prop_assume!(!den.is_zero());
        let f = RationalFn::new(num, den).unwrap();
        let v = Value::Scalar(f);
        prop_assert_eq!(parse_as(&v.to_string(), chart, &Env::new(), v.kind()).unwrap(), v);
    }
}
