mod common;

use std::collections::BTreeSet;

use morphtrie::builder::{
    build_corpus, build_same_stem_trie, build_semantic_trie, detect_stem, BuilderParams,
    StemAlgorithm, TrieMethod,
};
use morphtrie::EmbeddingStore;

const YAP: [(&str, f32); 6] = [
    ("yap", 0.0),
    ("yapar", 0.26),
    ("yaptı", 0.52),
    ("yaptık", 0.78),
    ("yapıp", 1.04),
    ("yapış", 1.3),
];

/// The yap- family on an arc so that each word's two nearest neighbors are
/// its arc neighbors, plus distractors sharing no stem with it.
fn yap_store() -> EmbeddingStore {
    let mut rows: Vec<(String, Vec<f32>)> = YAP
        .iter()
        .map(|&(w, t)| (w.to_string(), vec![t.cos(), t.sin(), 0.0, 0.0]))
        .collect();
    rows.push(("kapı".into(), vec![0.13f32.cos(), 0.13f32.sin(), 0.5, 0.0]));
    rows.push(("yaz".into(), vec![0.0, 0.0, 0.0, 1.0]));
    rows.push(("yazdı".into(), vec![0.0, 0.1, 0.0, 1.0]));
    EmbeddingStore::from_rows(4, rows).unwrap()
}

fn k2() -> BuilderParams {
    BuilderParams {
        neighbor_k: 2,
        ..BuilderParams::default()
    }
}

#[test]
fn yap_family_stems() {
    let store = yap_store();
    for algo in [StemAlgorithm::Walk, StemAlgorithm::Shortest] {
        let params = BuilderParams {
            stem_algorithm: algo,
            ..k2()
        };
        for (w, _) in YAP {
            assert_eq!(
                detect_stem(w, &store, &params).unwrap(),
                "yap",
                "{w} {algo:?}"
            );
        }
        assert_eq!(detect_stem("kapı", &store, &params).unwrap(), "kapı");
        assert_eq!(detect_stem("yazdı", &store, &params).unwrap(), "yaz");
    }
}

#[test]
fn same_stem_trie_follows_neighbor_chain() {
    let store = yap_store();
    // manual BFS with k = 2 from seed yaptık: yap -> yapar; yaptık -> yaptı, yapıp;
    // yapar -> yap; yapıp -> yapış
    let trie = build_same_stem_trie("yaptık", &store, &k2()).unwrap();
    let expected: BTreeSet<&str> = YAP.iter().map(|p| p.0).collect();
    let got: BTreeSet<String> = trie.words().into_iter().collect();
    assert_eq!(got, expected.iter().map(|s| s.to_string()).collect());
    // the stem alone only reaches its arc neighbor directly
    let params = BuilderParams {
        expansion: morphtrie::builder::ExpansionQuery::StemOnly,
        ..k2()
    };
    let stem_only = build_same_stem_trie("yaptık", &store, &params).unwrap();
    assert_eq!(
        stem_only.words(),
        vec!["yapar".to_string(), "yaptık".to_string()]
    );
}

#[test]
fn same_stem_trie_cap_truncates_in_bfs_order() {
    let store = yap_store();
    let params = BuilderParams {
        max_expansion_words: 4,
        ..k2()
    };
    let trie = build_same_stem_trie("yaptık", &store, &params).unwrap();
    let got: BTreeSet<String> = trie.words().into_iter().collect();
    let expected: BTreeSet<String> = ["yaptık", "yapar", "yaptı", "yapıp"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(got, expected);
    assert_eq!(
        trie,
        build_same_stem_trie("yaptık", &store, &params).unwrap()
    );
}

#[test]
fn closed_seeds_give_singletons() {
    let store = yap_store();
    let set = build_corpus(
        &["kapı", "yaz", "missing"],
        &store,
        &k2(),
        TrieMethod::SameStem,
    )
    .unwrap();
    assert_eq!(set.len(), 3);
    assert_eq!(set.trie(0).words(), vec!["kapı".to_string()]);
    assert_eq!(set.trie(2).words(), vec!["missing".to_string()]);
    assert_eq!(
        set.trie(1).words(),
        vec!["yaz".to_string(), "yazdı".to_string()]
    );
}

#[test]
fn semantic_trie_sizes() {
    let store = yap_store();
    let p = BuilderParams {
        neighbor_k: 50,
        ..BuilderParams::default()
    };
    assert_eq!(
        build_semantic_trie("yap", &store, &p).unwrap().word_count(),
        store.len()
    );
    let trie = build_semantic_trie("yap", &store, &k2()).unwrap();
    let expected: BTreeSet<String> = std::iter::once("yap".to_string())
        .chain(
            store
                .nearest_neighbors("yap", 2)
                .unwrap()
                .into_iter()
                .map(|n| n.word),
        )
        .collect();
    assert_eq!(trie.words().into_iter().collect::<BTreeSet<_>>(), expected);
    assert_eq!(trie.word_count(), 3);
}

#[test]
fn five_seed_type_counts_match_recount() {
    let (words, store, _) = common::synthetic_corpus(45, 17);
    let seeds: Vec<String> = words.iter().step_by(9).take(5).cloned().collect();
    for method in [TrieMethod::SemanticRelatedness, TrieMethod::SameStem] {
        let set = build_corpus(
            &seeds,
            &store,
            &BuilderParams {
                neighbor_k: 6,
                ..BuilderParams::default()
            },
            method,
        )
        .unwrap();
        let mut union = BTreeSet::new();
        let mut entries = 0;
        for (_, trie) in &set.tries {
            let ws = trie.words();
            entries += ws.len();
            union.extend(ws);
        }
        let summary = set.summary();
        assert_eq!(summary.tries, 5);
        assert_eq!(summary.word_types, union.len());
        assert_eq!(summary.trie_entries, entries);
    }
}

#[test]
fn same_stem_members_share_the_root_stem() {
    let (words, store, _) = common::synthetic_corpus(90, 23);
    let params = BuilderParams {
        neighbor_k: 8,
        ..BuilderParams::default()
    };
    let set = build_corpus(&words, &store, &params, TrieMethod::SameStem).unwrap();
    for (seed, trie) in &set.tries {
        let stem = detect_stem(seed, &store, &params).unwrap();
        for w in trie.words() {
            assert_eq!(
                detect_stem(&w, &store, &params).unwrap(),
                stem,
                "{w} in trie of {seed}"
            );
        }
    }
}

#[test]
fn trie_set_save_load_round_trip() {
    let (words, store, _) = common::synthetic_corpus(30, 4);
    let params = BuilderParams {
        neighbor_k: 5,
        ..BuilderParams::default()
    };
    let set = build_corpus(&words, &store, &params, TrieMethod::SemanticRelatedness).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tries.tsv");
    set.save(&path, &params).unwrap();
    let first = std::fs::read(&path).unwrap();
    let (loaded, manifest) = morphtrie::TrieSet::load(&path).unwrap();
    assert_eq!(loaded.method, set.method);
    assert_eq!(loaded.len(), set.len());
    for ((sa, ta), (sb, tb)) in loaded.tries.iter().zip(&set.tries) {
        assert_eq!(sa, sb);
        assert_eq!(ta.words(), tb.words());
        assert_eq!(ta.branch_table(), tb.branch_table());
    }
    assert_eq!(manifest.params, params);
    assert_eq!(manifest.summary, set.summary());
    let again = build_corpus(&words, &store, &params, TrieMethod::SemanticRelatedness).unwrap();
    again.save(&path, &params).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), first);
}
