use gbsknot::gbs::{match_gbs, verify_ml_identity, GbsData};
use gbsknot::presentations::canonical_relator;
use gbsknot::words::{Alphabet, GeneratorId, Letter, Word};
use proptest::prelude::*;

const A: GeneratorId = GeneratorId(0);
const B: GeneratorId = GeneratorId(1);

fn word(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0u16..2, any::<bool>()), 0..=max).prop_map(|v| {
        v.into_iter()
            .map(|(g, i)| Letter {
                gen: GeneratorId(g),
                inverse: i,
            })
            .collect()
    })
}

fn gbs_data() -> impl Strategy<Value = GbsData> {
    (word(6), 0i64..4, -4i64..5, word(6), 0i64..4, 0i64..4).prop_map(|(w1, m, r, w2, n, k)| {
        let al = Alphabet::new(&["a", "b"]).unwrap();
        GbsData {
            w1: Word::from_letters(&al, &w1),
            m,
            r,
            w2: Word::from_letters(&al, &w2),
            n,
            k,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn match_gbs_recovers_assembled_relators(g in gbs_data()) {
        let rel = g.assemble(A, B).unwrap();
        prop_assume!(!canonical_relator(&rel).is_empty());
        let parsed = match_gbs(&rel, A, B);
        prop_assert!(parsed.is_some(), "no parse for {:?} from {:?}", rel, g);
        let parsed = parsed.unwrap();
        prop_assert!(parsed.is_valid());
        prop_assert!(parsed.equivalent(&g, A, B).unwrap());
        // re-parsing the reassembled relator is a fixed point
        let again = match_gbs(&parsed.assemble(A, B).unwrap(), A, B).unwrap();
        prop_assert_eq!(canonical_relator(&again.assemble(A, B).unwrap()), canonical_relator(&rel));
    }

    #[test]
    fn ml_identity_sums_are_linear(s in -20i64..20, t in -20i64..20, p in -50i64..50, q in -10i64..10) {
        let r = verify_ml_identity(s, t, p, q);
        prop_assert!(r.holds);
    }
}
