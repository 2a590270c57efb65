//! `weights --w` accepts exactly the growths inside the published bounds.

use proptest::prelude::*;
use varpi_cli::{parse_args, run, CliError};
use varpi_core::Rational;

/// Admissible growth straight from the bound formulas.
fn admissible(p: i64, e: i64, f: u32, val_s: Rational, r: u32, w: Rational) -> bool {
    let q = Rational::from_integer(p.pow(f));
    let one = Rational::from_integer(1);
    let eps = Rational::new(e, p - 1);
    let r_rat = Rational::from_integer(r as i64);
    let accessible = val_s > eps - r_rat && !(eps > one && r_rat < eps.ceil());
    if !accessible || w < Rational::from_integer(0) {
        return false;
    }
    let higher = if r >= 2 {
        one / (q.pow(r as i32 - 2) * (q + one))
    } else {
        q / (q + one)
    };
    let strict = [q / (q + one), higher, (q - one) * (val_s + one - eps)];
    strict.iter().all(|b| w < *b) && w <= one / q
}

fn fmt(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]
    #[test]
    fn rejects_exactly_outside(
        ground in prop::sample::select(vec![(3i64, 1i64, 1u32), (5, 1, 1), (3, 2, 1), (3, 1, 2), (2, 3, 1)]),
        s in (-24i64..48, 1i64..9),
        r in 1u32..5,
        w in (0i64..40, 1i64..41),
    ) {
        let (p, e, f) = ground;
        let val_s = Rational::new(s.0, s.1);
        let w = Rational::new(w.0, w.1);
        let args = [
            "varpi".to_string(), "weights".into(),
            "--p".into(), p.to_string(), "--e".into(), e.to_string(), "--f".into(), f.to_string(),
            "--s-val".into(), fmt(val_s), "--r".into(), r.to_string(), "--w".into(), fmt(w),
        ];
        let cli = parse_args(args).expect("well-formed arguments");
        match run(&cli) {
            Ok(_) => prop_assert!(admissible(p, e, f, val_s, r, w)),
            Err(err @ CliError::Core(_)) => {
                prop_assert_eq!(err.exit_code(), 2);
                prop_assert!(!admissible(p, e, f, val_s, r, w));
            }
            Err(other) => prop_assert!(false, "unexpected {other}"),
        }
    }
}
