use proptest::prelude::*;

use forbid_lab::checks::{propagation_checks, CheckOutcome};
use forbid_lab::extremal::best_partner_window;
use forbid_lab::{forbids, intersection_spectrum, mu, Bias, Family, Window};

fn family(max_m: u32) -> impl Strategy<Value = Family> {
    (2..=max_m).prop_flat_map(|m| {
        prop::collection::vec(any::<bool>(), 1usize << m)
            .prop_map(move |bits| Family::new(m, (0..1u32 << m).filter(|&s| bits[s as usize])).unwrap())
    })
}

fn pair(max_m: u32) -> impl Strategy<Value = (Family, Family)> {
    (2..=max_m).prop_flat_map(|m| {
        let side = prop::collection::vec(any::<bool>(), 1usize << m)
            .prop_map(move |bits| Family::new(m, (0..1u32 << m).filter(|&s| bits[s as usize])).unwrap());
        (side.clone(), side)
    })
}

fn bias() -> impl Strategy<Value = Bias> {
    (1i64..20).prop_map(|k| Bias::from_ratio(k, 20).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sections_partition_and_split_measure(f in family(8), p in bias()) {
        let (f0, f1) = f.sections().unwrap();
        prop_assert_eq!(f0.len() + f1.len(), f.len());
        let split = p.value() * mu(&f1, &p) + p.complement().value() * mu(&f0, &p);
        prop_assert_eq!(split, mu(&f, &p));
    }

    #[test]
    fn measure_is_additive((f, g) in pair(8), p in bias()) {
        let lhs = mu(&f.union(&g).unwrap(), &p) + mu(&f.intersection(&g).unwrap(), &p);
        prop_assert_eq!(lhs, mu(&f, &p) + mu(&g, &p));
    }

    #[test]
    fn complement_swaps_bias(f in family(8), p in bias()) {
        prop_assert_eq!(mu(&f.complement_family(), &p), mu(&f, &p.complement()));
    }

    #[test]
    fn spectrum_symmetric_and_total((f, g) in pair(7)) {
        let s = intersection_spectrum(&f, &g).unwrap();
        prop_assert_eq!(&s, &intersection_spectrum(&g, &f).unwrap());
        prop_assert_eq!(s.iter().sum::<u64>(), f.len() * g.len());
    }

    #[test]
    fn closure_grows_measure(f in family(7), p in bias()) {
        let up = f.upper_closure();
        let down = f.downward_closure();
        prop_assert!(up.is_upper_closed() && down.is_downward_closed());
        prop_assert!(f.is_subfamily_of(&up).unwrap() && f.is_subfamily_of(&down).unwrap());
        prop_assert!(mu(&up, &p) >= mu(&f, &p));
        prop_assert!(mu(&down, &p) >= mu(&f, &p));
    }

    #[test]
    fn window_propagates_to_sections(f in family(7), lo in 0u32..8, span in 0u32..3) {
        let m = f.ground_size();
        let lo = lo.min(m);
        let window = Window { lo, hi: (lo + span).min(m) };
        let g = best_partner_window(&f, window);
        prop_assume!(!g.is_empty());
        let mut out = CheckOutcome::new("propagation");
        propagation_checks(&f, &g, window, &mut out);
        prop_assert!(out.passed(), "{:?}", out.failures);
    }

    #[test]
    fn expansion_monotone_and_additive(f in family(6), s in 0u32..4, t in 0u32..4) {
        let fs = f.expand(s);
        prop_assert!(f.is_subfamily_of(&fs).unwrap());
        prop_assert!(fs.is_subfamily_of(&f.expand(s + t)).unwrap());
        prop_assert_eq!(fs.expand(t), f.expand(s + t));
    }

    #[test]
    fn layer_complement_duality(g in family(7), k in 0u32..8, lo in 0u32..8, hi in 0u32..8, seed in any::<u64>()) {
        let m = g.ground_size();
        let k = k.min(m);
        let (lo, hi) = (lo.min(hi).min(k), hi.max(lo).min(k));
        let layer = Family::layer(m, k).unwrap();
        let f = Family::new(m, layer.members().filter(|s| (seed >> (s % 64)) & 1 == 1)).unwrap();
        let left = forbids(&f, &g, Window { lo, hi }).unwrap();
        let right = forbids(&f, &g.complement_family(), Window { lo: k - hi, hi: k - lo }).unwrap();
        prop_assert_eq!(left, right);
    }
}
