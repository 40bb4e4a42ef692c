use std::collections::BTreeSet;

use morphtrie::builder::{build_corpus, detect_stem, BuilderParams, TrieMethod};
use morphtrie::segmenter::{score_segmentation, segment_all_splits};
use morphtrie::{DecodeConfig, EmbeddingStore, Lexicon, ModelParams, Trie};
use proptest::prelude::*;

fn store_strategy() -> impl Strategy<Value = EmbeddingStore> {
    prop::collection::btree_map("[a-e]{1,6}", prop::collection::vec(-1.0f32..1.0, 4), 2..25)
        .prop_filter_map("zero vector", |rows| {
            EmbeddingStore::from_rows(4, rows).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cosine_is_symmetric_and_bounded(store in store_strategy()) {
        let words: Vec<String> = store.words().map(str::to_string).collect();
        for a in &words {
            for b in &words {
                let x = store.cosine(a, b).unwrap();
                prop_assert_eq!(x, store.cosine(b, a).unwrap());
                prop_assert!((-1.0..=1.0).contains(&x));
            }
        }
    }

    #[test]
    fn neighbor_lists_are_prefix_consistent(store in store_strategy(), k in 1usize..10) {
        let w = store.words().next().unwrap().to_string();
        let long = store.nearest_neighbors(&w, k + 3).unwrap();
        let short = store.nearest_neighbors(&w, k).unwrap();
        prop_assert_eq!(&long[..short.len()], &short[..]);
        prop_assert!(short.iter().all(|n| n.word != w));
        prop_assert_eq!(short.len(), k.min(store.len() - 1));
        for pair in long.windows(2) {
            prop_assert!(pair[0].similarity >= pair[1].similarity);
        }
    }

    #[test]
    fn trie_rebuilds_from_its_words(words in prop::collection::vec("[a-dçı]{1,7}", 1..40)) {
        let trie = Trie::from_words(&words).unwrap();
        let unique: BTreeSet<String> = words.iter().cloned().collect();
        prop_assert_eq!(trie.word_count(), unique.len());
        let rebuilt = Trie::from_words(trie.words()).unwrap();
        prop_assert_eq!(rebuilt.branch_table(), trie.branch_table());
        prop_assert_eq!(rebuilt.to_lines(), trie.to_lines());
    }

    #[test]
    fn stems_are_nonempty_prefixes(store in store_strategy(), threshold in 0.0f64..1.0) {
        let params = BuilderParams { cosine_threshold: threshold, ..BuilderParams::default() };
        for w in store.words() {
            let stem = detect_stem(w, &store, &params).unwrap();
            prop_assert!(!stem.is_empty());
            prop_assert!(w.starts_with(&stem));
        }
    }

    #[test]
    fn trie_building_is_deterministic(store in store_strategy(), k in 1usize..6) {
        let params = BuilderParams { neighbor_k: k, ..BuilderParams::default() };
        let seeds: Vec<String> = store.words().map(str::to_string).collect();
        for method in [TrieMethod::SemanticRelatedness, TrieMethod::SameStem] {
            let a = build_corpus(&seeds, &store, &params, method).unwrap();
            let b = build_corpus(&seeds, &store, &params, method).unwrap();
            prop_assert_eq!(a.to_records(), b.to_records());
            if method == TrieMethod::SemanticRelatedness {
                for (_, t) in &a.tries {
                    prop_assert_eq!(t.word_count(), k.min(store.len() - 1) + 1);
                }
            }
        }
    }

    #[test]
    fn decoded_segments_concatenate(
        word in "[abc]{1,10}",
        lex in prop::collection::btree_map("[abc]{1,4}", 1u64..30, 0..10),
        alpha in 0.05f64..5.0,
    ) {
        let lexicon = Lexicon::from_counts(lex);
        let params = ModelParams::new(alpha, 3);
        let cfg = DecodeConfig::default();
        let seg = segment_all_splits(&word, &lexicon, &params, &cfg);
        prop_assert_eq!(seg.morphemes.concat(), word.clone());
        prop_assert!(seg.morphemes.iter().all(|m| !m.is_empty()));
        let rescored = score_segmentation(&seg.morphemes, &lexicon, &params, &cfg);
        prop_assert!((rescored - seg.score).abs() < 1e-9);
        // no explicit alternative scores higher
        let unsplit = score_segmentation(&[word.as_str()], &lexicon, &params, &cfg);
        prop_assert!(unsplit <= seg.score + 1e-12);
    }
}
