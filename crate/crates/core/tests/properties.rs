use proptest::prelude::*;

use simplest_cubic::character;
use simplest_cubic::classno;
use simplest_cubic::field;
use simplest_cubic::scan;
use simplest_cubic::thue;

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn class_number_is_h_raw_times_unit_index(m in -1i64..4000) {
        let r = classno::class_number(m).unwrap();
        let h = r.h.unwrap() as f64;
        prop_assert!((r.h_raw * r.unit_index as f64 - h).abs() < 1e-3 * h);
        prop_assert_eq!(classno::cross_check(&r, r.h.unwrap()).unwrap(), r.unit_index);
        prop_assert!(r.constraints.unwrap().all_pass(), "m = {}: {:?}", m, r.constraints);
        if r.field.index == 1 {
            prop_assert_eq!(r.unit_index, 1);
        }
    }

    #[test]
    fn reflected_parameter_gives_the_same_field(m in -1i64..1_000_000_000) {
        let a = field::build_field(m).unwrap();
        let b = field::build_field(-m - 3).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn field_invariants_for_large_m(m in 1_000_000i64..1_000_000_000_000) {
        let f = field::build_field(m).unwrap();
        prop_assert_eq!(f.conductor * f.index, f.d);
        prop_assert_eq!(f.field_disc, f.conductor.checked_mul(f.conductor));
        prop_assert_eq!(field::index_closed_form(m, &f.d_factors), f.index);
    }

    #[test]
    fn selected_character_detects_splitting(m in -1i64..200_000) {
        let f = field::build_field(m).unwrap();
        let chi = character::select_for_field(&f).unwrap();
        prop_assert_eq!(chi.modulus as u128, f.conductor);
        for q in [5u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 1009, 65537] {
            if (3 * f.d) % q as u128 != 0 {
                let split = chi.evaluate(false, q as i128) == character::CubicValue::One;
                prop_assert_eq!(split, character::roots_mod(m, q) == 3, "m = {}, q = {}", m, q);
            }
        }
    }

    #[test]
    fn thue_search_matches_exhaustive(m in -1i64..5000, bound in 1i64..40) {
        let lambdas = thue::divisor_lambdas(m).unwrap();
        prop_assert_eq!(thue::solve_bounded(m, &lambdas, bound), thue::solve_bounded_exhaustive(m, &lambdas, bound));
    }

    #[test]
    fn solutions_lie_in_full_orbits(m in -1i64..3000) {
        let sols = thue::solve_bounded(m, &thue::divisor_lambdas(m).unwrap(), 300);
        for s in &sols {
            let next = thue::orbit_step((s.x, s.y));
            if next.0.abs() <= 300 && next.1.abs() <= 300 {
                prop_assert!(sols.iter().any(|t| (t.x, t.y) == next));
            }
            prop_assert_eq!(thue::thue_eval(m, s.x, s.y), num_bigint::BigInt::from(s.lambda));
        }
    }
}

#[test]
fn scans_do_not_depend_on_worker_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let a = scan::scan_small_class(-1, 1500, &[1, 3, 27], None, 500).unwrap();
            let b = scan::scan_h_below_16(-1, 50_000, true, None).unwrap();
            (a.0, a.1.buckets, b.0, b.1.buckets)
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn subcases_partition_the_enumerated_fields() {
    for m in -1..5000i64 {
        let Some((index, subcase)) = scan::classify(m) else { continue };
        let f = field::build_field(m).unwrap();
        assert_eq!(f.index, index as u128, "m = {m}");
        match subcase {
            None => assert!(m == 0 || m == 3),
            Some(s) => {
                let q = f.d / simplest_cubic::refdata::list_divisor(index, s);
                let prime = simplest_cubic::arith::is_prime(q);
                use simplest_cubic::refdata::Subcase::*;
                assert_eq!(prime, matches!(s, PrimeF | NineP), "m = {m}");
            }
        }
    }
}
