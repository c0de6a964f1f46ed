use cubic_gamma::cli::{self, RatLit};
use cubic_gamma::numeric::{digits_to_bits, BigComplex};
use cubic_gamma::report::{CheckReport, Environment, Format, Record, Report, Status};
use cubic_gamma::verify::{recognize_integer_poly, CandidatePoly};
use proptest::prelude::*;
use rug::{Float, Rational};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // x^2 + bx + c with a non-real root comes back from its root
    #[test]
    fn quadratic_recognition_round_trip(b in -9i64..=9, extra in 1i64..40) {
        let c = (b * b) / 4 + extra;
        let d = 60;
        let bits = digits_to_bits(d);
        let disc = Float::with_val(bits, 4 * c - b * b).sqrt();
        let z = BigComplex::new(Float::with_val(bits, -b) / 2u32, disc / 2u32, d);
        let p = recognize_integer_poly(&z, 2, 8).unwrap().expect("recognized");
        let want = CandidatePoly::from_integers(&[1, b, c]).unwrap();
        let neg = CandidatePoly::from_integers(&[-1, -b, -c]).unwrap();
        prop_assert!(p == want || p == neg, "got {}", p.display());
    }

    #[test]
    fn rational_literal_parses(p in -10_000i64..10_000, q in 1i64..10_000) {
        let lit: RatLit = serde_json::from_str(&format!("\"{p}/{q}\"")).unwrap();
        prop_assert_eq!(lit.parse().unwrap(), Rational::from((p, q)));
        let int: RatLit = serde_json::from_str(&p.to_string()).unwrap();
        prop_assert_eq!(int.parse().unwrap(), Rational::from(p));
    }

    #[test]
    fn report_json_round_trip(
        names in proptest::collection::vec("[a-z_\\[\\]^0-9]{1,12}", 1..6),
        errs in proptest::collection::vec(-300i32..10, 1..6),
        saturated in any::<bool>(),
    ) {
        let tol = Float::with_val(64, 1e-10);
        let records: Vec<Record> = names
            .iter()
            .zip(errs.iter().cycle())
            .map(|(n, &e)| {
                let err = Float::with_val(64, 10f64.powi(e));
                let r = Record::new(n.clone(), vec!["1".into()], None, &err, &tol);
                if saturated { r.indeterminate() } else { r }
            })
            .collect();
        let expect_pass = errs.iter().cycle().take(names.len()).all(|&e| e < -10);
        let rep = Report::new("p", vec![CheckReport::new("gamma", records)], Environment { saturated, ..Default::default() });
        prop_assert_eq!(rep.status == Status::Pass, expect_pass);
        prop_assert!(rep.status != Status::Fail || !saturated);
        let back: Report = serde_json::from_str(&rep.emit(Format::Json)).unwrap();
        prop_assert_eq!(back, rep);
    }
}

#[test]
fn fixtures_survive_serialization() {
    for (name, text) in cli::FIXTURES {
        let cfg = cli::parse_config(text).unwrap();
        let again = serde_json::to_string(&cfg).unwrap();
        let cfg2 = cli::parse_config(&again).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(serde_json::to_value(&cfg).unwrap(), serde_json::to_value(&cfg2).unwrap(), "{name}");
    }
}
