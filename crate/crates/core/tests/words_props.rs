use gbsknot::words::{
    invert_letters, is_reduced, reduce_letters, Alphabet, GeneratorId, Letter, Word,
};
use proptest::prelude::*;

fn raw(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0u16..3, any::<bool>()), 0..=max).prop_map(|v| {
        v.into_iter()
            .map(|(g, i)| Letter {
                gen: GeneratorId(g),
                inverse: i,
            })
            .collect()
    })
}

fn alphabet() -> Alphabet {
    Alphabet::new(&["a", "b", "c"]).unwrap()
}

/// Stack-free reference: cancel the leftmost adjacent inverse pair until none remain.
fn naive_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut w = w.to_vec();
    while let Some(i) = (1..w.len()).find(|&i| w[i - 1].cancels(w[i])) {
        w.drain(i - 1..=i);
    }
    w
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn reduction_is_idempotent_and_matches_reference(w in raw(24)) {
        let r = reduce_letters(&w);
        prop_assert!(is_reduced(&r));
        prop_assert_eq!(reduce_letters(&r), r.clone());
        prop_assert_eq!(r.clone(), naive_reduce(&w));
        prop_assert_eq!((w.len() - r.len()) % 2, 0);
    }

    #[test]
    fn inverse_cancels(w in raw(16)) {
        let al = alphabet();
        let x = Word::from_letters(&al, &w);
        prop_assert!(x.concat(&x.inverse()).unwrap().is_empty());
        prop_assert!(x.inverse().concat(&x).unwrap().is_empty());
        prop_assert_eq!(x.inverse().inverse(), x.clone());
        prop_assert_eq!(reduce_letters(&invert_letters(&w)), x.inverse().letters().to_vec());
    }

    #[test]
    fn concatenation_is_reduction_of_juxtaposition(u in raw(12), v in raw(12)) {
        let al = alphabet();
        let (x, y) = (Word::from_letters(&al, &u), Word::from_letters(&al, &v));
        let mut joined = u.clone();
        joined.extend(v.iter().copied());
        prop_assert_eq!(x.concat(&y).unwrap().letters().to_vec(), reduce_letters(&joined));
        let xy_inv = x.concat(&y).unwrap().inverse();
        prop_assert_eq!(xy_inv, y.inverse().concat(&x.inverse()).unwrap());
    }

    #[test]
    fn exponent_sums_are_additive(u in raw(12), v in raw(12), e in -4i64..5) {
        let al = alphabet();
        let (x, y) = (Word::from_letters(&al, &u), Word::from_letters(&al, &v));
        for g in al.generators() {
            let naive: i64 = u.iter().filter(|l| l.gen == g).map(|l| l.sign()).sum();
            prop_assert_eq!(x.exponent_sum(g), naive);
            prop_assert_eq!(x.concat(&y).unwrap().exponent_sum(g), x.exponent_sum(g) + y.exponent_sum(g));
            prop_assert_eq!(x.pow(e).exponent_sum(g), e * x.exponent_sum(g));
        }
    }

    #[test]
    fn cyclic_reduction_conjugates_back(w in raw(20)) {
        let al = alphabet();
        let x = Word::from_letters(&al, &w);
        let (core, c) = x.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        let back = Word::product(&al, [&c, &core, &c.inverse()]).unwrap();
        prop_assert_eq!(back, x);
        for k in 0..core.len() {
            let r = core.rotate(k);
            prop_assert_eq!(r.len(), core.len());
            prop_assert!(r.is_cyclically_reduced());
        }
    }

    #[test]
    fn render_parse_round_trip(w in raw(20)) {
        let al = alphabet();
        let x = Word::from_letters(&al, &w);
        prop_assert_eq!(Word::parse(&al, &x.render()).unwrap(), x);
    }
}
