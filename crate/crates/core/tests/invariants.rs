use proptest::prelude::*;
use sparc_core::bounds::{lemma1_bound, mistake_tail_bound_with, BoundQuery, BoundSelection};
use sparc_core::codec::{decode_bits, encode};
use sparc_core::exponent::{exponent_d, exponent_d1, exponent_d2, inverse_g, inverse_g2};
use sparc_core::outer::{rs_decode, rs_encode, RSSpec, RsDecodeOutcome};
use sparc_core::rate::{ChannelSpec, CodeSpec};
use sparc_core::Execution;

proptest! {
    #[test]
    fn restricted_exponent_is_smaller(delta in 0.0f64..10.0, s in 0.01f64..1.0) {
        let d = exponent_d(delta, s).unwrap().value;
        let d1 = exponent_d1(delta, s).unwrap().value;
        prop_assert!(d1 <= d + 1e-15);
        prop_assert!(d1 >= 0.0);
    }

    #[test]
    fn exponent_monotone(delta in 0.0f64..5.0, step in 0.0f64..1.0, s in 0.05f64..0.9) {
        let d = exponent_d(delta, s).unwrap().value;
        prop_assert!(exponent_d(delta + step, s).unwrap().value >= d - 1e-15);
        prop_assert!(exponent_d(delta, s + 0.1).unwrap().value <= d + 1e-15);
    }

    #[test]
    fn inverses_round_trip(r in 1e-6f64..20.0) {
        let g = inverse_g(r);
        prop_assert!((exponent_d(g, 1.0).unwrap().value - r).abs() <= 1e-9 * r);
        let g2 = inverse_g2(r);
        prop_assert!((exponent_d2(g2) - r).abs() <= 1e-9 * r);
    }

    #[test]
    fn bits_round_trip(l in 1usize..6, m in 1u32..6, signed: bool, seed: u64) {
        let code = CodeSpec::new(l, 1 << m, signed, 0.5).unwrap();
        let len = code.input_bits().unwrap();
        let bits: Vec<bool> = (0..len).map(|k| (seed.rotate_left(k as u32) & 1) == 1).collect();
        let beta = encode(&bits, &code).unwrap();
        prop_assert_eq!(decode_bits(&beta, &code).unwrap(), bits);
    }

    #[test]
    fn rs_corrects_up_to_t(
        msg in proptest::collection::vec(0u16..256, 20),
        errs in proptest::collection::btree_map(0usize..40, 1u16..256, 0..=10),
    ) {
        let rs = RSSpec::new(8, 40, 20).unwrap();
        let cw = rs_encode(&msg, &rs).unwrap();
        let mut rx = cw.clone();
        for (&p, &e) in &errs {
            rx[p] ^= e;
        }
        match rs_decode(&rx, &rs).unwrap() {
            RsDecodeOutcome::Decoded { message, corrected } => {
                prop_assert_eq!(message, msg);
                prop_assert_eq!(corrected, errs.len());
            }
            RsDecodeOutcome::Failure => prop_assert!(false, "failed with {} errors", errs.len()),
        }
    }
}

fn query(v: f64, l: usize, b: usize, frac: f64) -> BoundQuery {
    let channel = ChannelSpec::from_snr(v).unwrap();
    let code = CodeSpec::new(l, b, false, frac * channel.capacity()).unwrap();
    BoundQuery::new(channel, code, 0.0, 0.5, 1e-3).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tail_bound_shrinks_with_ell0(v in 1.0f64..50.0, l in 4usize..40, frac in 0.2f64..0.9) {
        let q = query(v, l, 64, frac);
        let mut prev = f64::INFINITY;
        for ell0 in 1..=l {
            let t = mistake_tail_bound_with(ell0, &q, BoundSelection::Minimum, Execution::Sequential).unwrap();
            prop_assert!(t.total <= prev);
            prop_assert!((0.0..=1.0).contains(&t.total));
            prev = t.total;
        }
    }

    #[test]
    fn lower_rate_gives_smaller_lemma1(v in 1.0f64..50.0, l in 4usize..40, frac in 0.2f64..0.8) {
        let hi = query(v, l, 64, frac + 0.1);
        let lo = query(v, l, 64, frac);
        for ell in 1..=l {
            prop_assert!(lemma1_bound(ell, &lo).unwrap() <= lemma1_bound(ell, &hi).unwrap() * (1.0 + 1e-9));
        }
    }

    #[test]
    fn parallel_tail_matches_sequential(v in 1.0f64..50.0, l in 4usize..60) {
        let q = query(v, l, 256, 0.7);
        let a = mistake_tail_bound_with(1, &q, BoundSelection::Minimum, Execution::Sequential).unwrap();
        let b = mistake_tail_bound_with(1, &q, BoundSelection::Minimum, Execution::with_workers(4)).unwrap();
        prop_assert_eq!(a, b);
    }
}
