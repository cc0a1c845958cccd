use beurling_cli::grammar::{parse_spec, print_complex, Parsed};
use num_complex::Complex64;
use proptest::prelude::*;

const CORPUS: &[&str] = &[
    "z",
    "z^3",
    "1",
    "const(-1)",
    "const(exp(ipi/5)) * z^2",
    "blaschke(0.5)",
    "blaschke(0.5, 0.5; mult=1,2)",
    "blaschke(0.3+0.4i, -0.2i, 0; mult=2,1,3)",
    "atom(1, 2.0) * blaschke(0.3i)",
    "atom(exp(i2pi/3), 0.25) * atom(-1, 1e-3)",
    "mobius(2,1,1,2)",
    "mobius(1, 0, 0, 2)",
    "rot(-1)",
    "rot(exp(-ipi/7))",
    "autom(1, 0.3+0.2i)",
    "parabolic(b=2)",
    "parabolic(b=-3, zeta=exp(ipi/4))",
];

fn same(a: &Parsed, b: &Parsed) -> bool {
    match (a, b) {
        (Parsed::Map(x), Parsed::Map(y)) => x.approx_eq(y, 1e-15),
        (Parsed::Inner(x), Parsed::Inner(y)) => {
            let probes = [
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.6, 0.3),
                Complex64::new(0.0, -0.85),
            ];
            probes
                .iter()
                .all(|&p| (x.value(p).unwrap() - y.value(p).unwrap()).norm() < 1e-14)
                && x.finite_part().degree() == y.finite_part().degree()
                && x.atoms().len() == y.atoms().len()
        }
        _ => false,
    }
}

#[test]
fn corpus_round_trips() {
    for s in CORPUS {
        let first = parse_spec(s).unwrap();
        let printed = first.canonical();
        let second = parse_spec(&printed).unwrap();
        assert!(same(&first.parsed, &second.parsed), "{s} -> {printed}");
        assert_eq!(
            second.canonical(),
            parse_spec(&second.canonical()).unwrap().canonical(),
            "{s}"
        );
    }
}

fn disk_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.95, 0.0f64..std::f64::consts::TAU).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn term() -> impl Strategy<Value = String> {
    prop_oneof![
        (1u32..5).prop_map(|k| format!("z^{k}")),
        (prop::collection::vec((disk_point(), 1u32..4), 1..4)).prop_map(|zs| {
            let pts: Vec<String> = zs.iter().map(|(p, _)| print_complex(*p)).collect();
            let ks: Vec<String> = zs.iter().map(|(_, k)| k.to_string()).collect();
            format!("blaschke({}; mult={})", pts.join(", "), ks.join(","))
        }),
        (0.0f64..std::f64::consts::TAU, 0.01f64..5.0).prop_map(|(t, a)| format!(
            "atom({}, {a})",
            print_complex(Complex64::from_polar(1.0, t))
        )),
        (-3.0f64..3.0).prop_map(|t| format!("const(exp(i{t}))")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn generated_inner_specs_round_trip(terms in prop::collection::vec(term(), 1..5)) {
        let s = terms.join(" * ");
        let first = parse_spec(&s).unwrap();
        let second = parse_spec(&first.canonical()).unwrap();
        prop_assert!(same(&first.parsed, &second.parsed), "{} -> {}", s, first.canonical());
    }

    #[test]
    fn generated_automorphisms_round_trip(t in 0.0f64..std::f64::consts::TAU, a in disk_point()) {
        let s = format!("autom(exp(i{t}), {})", print_complex(a));
        let first = parse_spec(&s).unwrap();
        let second = parse_spec(&first.canonical()).unwrap();
        prop_assert!(same(&first.parsed, &second.parsed));
    }

    #[test]
    fn complex_numbers_print_exactly(re in -1e3f64..1e3, im in -1e3f64..1e3) {
        let z = Complex64::new(re, im);
        prop_assert_eq!(beurling_cli::grammar::parse_complex(&print_complex(z)).unwrap(), z);
    }
}
