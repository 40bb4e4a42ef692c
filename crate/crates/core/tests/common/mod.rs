#![allow(dead_code)]

use std::path::PathBuf;

use morphtrie::builder::{build_corpus, BuilderParams, TrieMethod, TrieSet};
use morphtrie::{EmbeddingStore, ModelParams, Trie, WordList};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn toy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join("toy")
}

/// The four-word corpus {walked, walks, talked, talks} in one trie.
pub struct WalkCorpus {
    pub tries: TrieSet,
    pub store: EmbeddingStore,
    pub wordlist: WordList,
    pub params: ModelParams,
}

pub const WALK_WORDS: [&str; 4] = ["talked", "talks", "walked", "walks"];

pub fn walk_corpus() -> WalkCorpus {
    let tries = TrieSet {
        method: TrieMethod::SemanticRelatedness,
        tries: vec![("walked".into(), Trie::from_words(WALK_WORDS).unwrap())],
    };
    // cos(walk, walked) = cos(talk, talked) = 0.8, cos(walk, walks) = cos(talk, talks) = 0.6
    let store = EmbeddingStore::from_rows(
        3,
        vec![
            ("walk", vec![1.0, 0.0, 0.0]),
            ("walked", vec![0.8, 0.6, 0.0]),
            ("walks", vec![0.6, 0.8, 0.0]),
            ("talk", vec![0.0, 0.0, 1.0]),
            ("talked", vec![0.0, 0.6, 0.8]),
            ("talks", vec![0.0, 0.8, 0.6]),
        ],
    )
    .unwrap();
    let wordlist = WordList::from_pairs([
        ("walk", 20u64),
        ("talk", 20),
        ("walked", 5),
        ("walks", 5),
        ("talked", 5),
        ("talks", 5),
    ]);
    // alphabet {a, d, e, k, l, s, t, w}
    let params = ModelParams::new(1.0, 8);
    WalkCorpus {
        tries,
        store,
        wordlist,
        params,
    }
}

/// Exactly `n_words` words built from random stems and a fixed suffix
/// inventory, with vectors clustered by stem. Words are returned in
/// generation order.
pub fn synthetic_corpus(n_words: usize, seed: u64) -> (Vec<String>, EmbeddingStore, WordList) {
    const SUFFIXES: [&str; 9] = [
        "", "ler", "de", "im", "ci", "lerde", "lerim", "imde", "cilar",
    ];
    const LETTERS: &[u8] = b"abcdeghiklmnoprstuvyz";
    let dim = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stems: Vec<String> = Vec::new();
    let mut words = Vec::new();
    let mut rows = Vec::new();
    let mut wl = WordList::new();
    while words.len() < n_words {
        let len = rng.gen_range(4..=6);
        let stem: String = (0..len)
            .map(|_| LETTERS[rng.gen_range(0..LETTERS.len())] as char)
            .collect();
        if stems.contains(&stem) {
            continue;
        }
        stems.push(stem.clone());
        let center: Vec<f32> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for suf in SUFFIXES {
            let w = format!("{stem}{suf}");
            if words.len() == n_words || words.contains(&w) {
                continue;
            }
            let v: Vec<f32> = center
                .iter()
                .map(|c| c + rng.gen_range(-0.2..0.2))
                .collect();
            rows.push((w.clone(), v));
            wl.add(&w, rng.gen_range(1..30));
            words.push(w);
        }
    }
    let store = EmbeddingStore::from_rows(dim, rows).unwrap();
    (words, store, wl)
}

pub fn semantic_tries(words: &[String], store: &EmbeddingStore, k: usize) -> TrieSet {
    let params = BuilderParams {
        neighbor_k: k,
        ..BuilderParams::default()
    };
    build_corpus(words, store, &params, TrieMethod::SemanticRelatedness).unwrap()
}
