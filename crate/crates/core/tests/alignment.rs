//! Entity alignment against an exhaustive pairwise matcher on the fixtures.

mod common;

use std::collections::BTreeMap;

use common::alignment_oracle::{matrix_pairs, oracle_pairs, shape, small_table_mentions_cached};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use tablediff::entity_align::{build_matrix, EntityMention};

#[test]
fn matrix_matches_pairwise_oracle() {
    let families = small_table_mentions_cached();
    assert!(!families.is_empty());
    let mut checked = 0;
    for (id, (languages, mentions)) in families {
        let matrix = build_matrix(id, languages, mentions);
        assert_eq!(matrix_pairs(&matrix), oracle_pairs(mentions), "family {id}");
        checked += mentions.values().map(Vec::len).sum::<usize>();
    }
    assert!(checked > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matrix_ignores_input_order(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let families = small_table_mentions_cached();
        for (id, (languages, mentions)) in families {
            let baseline = build_matrix(id, languages, mentions);
            let mut langs = languages.clone();
            langs.shuffle(&mut rng);
            let permuted: BTreeMap<String, Vec<EntityMention>> = mentions
                .iter()
                .map(|(l, ms)| {
                    let mut ms = ms.clone();
                    ms.shuffle(&mut rng);
                    (l.clone(), ms)
                })
                .collect();
            let other = build_matrix(id, &langs, &permuted);
            prop_assert_eq!(shape(&baseline), shape(&other));
        }
    }
}
