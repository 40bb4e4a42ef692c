//! Construction of the training tries from seed words and word embeddings.
//!
//! Two families are supported. *Same-stem* tries gather, by breadth-first
//! expansion over nearest-neighbor lists, the semantically close words that
//! share the seed's embedding-detected stem. *Semantic* tries hold the seed
//! and its `k` nearest neighbors regardless of form.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::trie::Trie;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StemAlgorithm {
    /// Right-to-left prefix walk re-anchored at every valid prefix.
    Walk,
    /// Shortest prefix whose cosine with the whole word clears the threshold.
    Shortest,
}

/// Which words have their neighbor lists expanded while growing a
/// same-stem trie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionQuery {
    /// The stem (or seed) first, then every newly inserted word.
    EachInsertedWord,
    /// Only the stem's neighbor list (the seed's if the stem has no vector).
    StemOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuilderParams {
    pub cosine_threshold: f64,
    pub neighbor_k: usize,
    pub max_expansion_words: usize,
    pub min_stem_length: usize,
    pub stem_algorithm: StemAlgorithm,
    pub expansion: ExpansionQuery,
}

impl Default for BuilderParams {
    fn default() -> Self {
        BuilderParams {
            cosine_threshold: 0.25,
            neighbor_k: 50,
            max_expansion_words: 100_000,
            min_stem_length: 2,
            stem_algorithm: StemAlgorithm::Walk,
            expansion: ExpansionQuery::EachInsertedWord,
        }
    }
}

impl BuilderParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.cosine_threshold) {
            return Err(Error::InvalidParameter(format!(
                "cosine threshold {} outside [0, 1]",
                self.cosine_threshold
            )));
        }
        if self.neighbor_k == 0 {
            return Err(Error::InvalidParameter(
                "neighbor count must be at least 1".into(),
            ));
        }
        if self.max_expansion_words == 0 {
            return Err(Error::InvalidParameter(
                "expansion cap must be at least 1".into(),
            ));
        }
        if self.min_stem_length == 0 {
            return Err(Error::InvalidParameter(
                "minimum stem length must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrieMethod {
    SameStem,
    SemanticRelatedness,
}

impl fmt::Display for TrieMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrieMethod::SameStem => "same_stem",
            TrieMethod::SemanticRelatedness => "semantic_relatedness",
        })
    }
}

impl FromStr for TrieMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same_stem" | "same-stem" => Ok(TrieMethod::SameStem),
            "semantic_relatedness" | "semantic" => Ok(TrieMethod::SemanticRelatedness),
            other => Err(Error::InvalidParameter(format!(
                "unknown trie method {other:?}"
            ))),
        }
    }
}

fn prefix_chars(word: &[char], len: usize) -> String {
    word[..len].iter().collect()
}

/// Finds the stem of `word` from the embedding store. Words without a vector
/// are their own stem; prefixes without a vector are never valid.
pub fn detect_stem(word: &str, store: &EmbeddingStore, params: &BuilderParams) -> Result<String> {
    if word.is_empty() {
        return Err(Error::EmptyWord);
    }
    if !store.contains(word) {
        return Ok(word.to_string());
    }
    let chars: Vec<char> = word.chars().collect();
    let min_len = params.min_stem_length.max(1);
    let threshold = params.cosine_threshold;

    match params.stem_algorithm {
        StemAlgorithm::Walk => {
            let mut anchor = word.to_string();
            for len in (min_len..chars.len()).rev() {
                let prefix = prefix_chars(&chars, len);
                if let Some(cos) = store.try_cosine(&anchor, &prefix) {
                    if cos > threshold {
                        anchor = prefix;
                    }
                }
            }
            Ok(anchor)
        }
        StemAlgorithm::Shortest => {
            for len in min_len..chars.len() {
                let prefix = prefix_chars(&chars, len);
                if store
                    .try_cosine(word, &prefix)
                    .is_some_and(|c| c > threshold)
                {
                    return Ok(prefix);
                }
            }
            Ok(word.to_string())
        }
    }
}

struct StemCache<'a> {
    store: &'a EmbeddingStore,
    params: &'a BuilderParams,
    stems: HashMap<String, String>,
}

impl<'a> StemCache<'a> {
    fn new(store: &'a EmbeddingStore, params: &'a BuilderParams) -> Self {
        StemCache {
            store,
            params,
            stems: HashMap::new(),
        }
    }

    fn stem(&mut self, word: &str) -> Result<&str> {
        if !self.stems.contains_key(word) {
            let s = detect_stem(word, self.store, self.params)?;
            self.stems.insert(word.to_string(), s);
        }
        Ok(&self.stems[word])
    }
}

/// Grows the trie of words sharing `seed`'s stem by breadth-first expansion
/// over nearest-neighbor lists. Stops at `max_expansion_words` words.
pub fn build_same_stem_trie(
    seed: &str,
    store: &EmbeddingStore,
    params: &BuilderParams,
) -> Result<Trie> {
    let mut cache = StemCache::new(store, params);
    build_same_stem_trie_cached(seed, store, params, &mut cache)
}

fn build_same_stem_trie_cached(
    seed: &str,
    store: &EmbeddingStore,
    params: &BuilderParams,
    cache: &mut StemCache<'_>,
) -> Result<Trie> {
    let mut trie = Trie::new();
    trie.insert(seed)?;
    if !store.contains(seed) {
        return Ok(trie);
    }
    let stem = cache.stem(seed)?.to_string();

    let mut queue = VecDeque::new();
    let mut queried = HashSet::new();
    if stem != seed && store.contains(&stem) {
        queue.push_back(stem.clone());
    }
    if params.expansion == ExpansionQuery::EachInsertedWord || queue.is_empty() {
        queue.push_back(seed.to_string());
    }

    while let Some(query) = queue.pop_front() {
        if !queried.insert(query.clone()) {
            continue;
        }
        for neighbor in store.nearest_neighbors(&query, params.neighbor_k)? {
            if trie.word_count() >= params.max_expansion_words {
                return Ok(trie);
            }
            let candidate = neighbor.word;
            if trie.contains_word(&candidate) || !candidate.starts_with(stem.as_str()) {
                continue;
            }
            if cache.stem(&candidate)? != stem {
                continue;
            }
            trie.insert(&candidate)?;
            if params.expansion == ExpansionQuery::EachInsertedWord {
                queue.push_back(candidate);
            }
        }
    }
    Ok(trie)
}

/// The seed plus its `neighbor_k` nearest neighbors.
pub fn build_semantic_trie(
    seed: &str,
    store: &EmbeddingStore,
    params: &BuilderParams,
) -> Result<Trie> {
    let mut trie = Trie::new();
    trie.insert(seed)?;
    if !store.contains(seed) {
        return Ok(trie);
    }
    for neighbor in store.nearest_neighbors(seed, params.neighbor_k)? {
        trie.insert(&neighbor.word)?;
    }
    Ok(trie)
}

/// An ordered collection of `(seed, trie)` pairs built with one method.
#[derive(Debug, Clone, PartialEq)]
pub struct TrieSet {
    pub method: TrieMethod,
    pub tries: Vec<(String, Trie)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrieSetSummary {
    pub tries: usize,
    /// Distinct word types over all tries.
    pub word_types: usize,
    /// Sum of trie sizes (a word in several tries counts once per trie).
    pub trie_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrieSetManifest {
    pub method: TrieMethod,
    pub params: BuilderParams,
    pub summary: TrieSetSummary,
    pub version: String,
}

/// Builds one trie per seed, in seed order. Seeds without a vector become
/// singleton tries.
pub fn build_corpus<S: AsRef<str> + Sync>(
    seeds: &[S],
    store: &EmbeddingStore,
    params: &BuilderParams,
    method: TrieMethod,
) -> Result<TrieSet> {
    params.validate()?;
    if seeds.is_empty() {
        return Err(Error::EmptyInput("no seed words".into()));
    }
    let built: Vec<Option<(String, Trie)>> = seeds
        .par_iter()
        .map_init(
            || StemCache::new(store, params),
            |cache, seed| {
                let seed = seed.as_ref();
                if !store.contains(seed) {
                    log::warn!("seed {seed:?} has no vector; using a singleton trie");
                }
                let trie = match method {
                    TrieMethod::SameStem => build_same_stem_trie_cached(seed, store, params, cache),
                    TrieMethod::SemanticRelatedness => build_semantic_trie(seed, store, params),
                };
                match trie {
                    Ok(t) => Some((seed.to_string(), t)),
                    Err(e) => {
                        log::warn!("skipping seed {seed:?}: {e}");
                        None
                    }
                }
            },
        )
        .collect();
    let tries: Vec<_> = built.into_iter().flatten().collect();
    if tries.is_empty() {
        return Err(Error::EmptyInput("no trie could be built".into()));
    }
    Ok(TrieSet { method, tries })
}

impl TrieSet {
    pub fn len(&self) -> usize {
        self.tries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tries.is_empty()
    }

    pub fn trie(&self, index: usize) -> &Trie {
        &self.tries[index].1
    }

    pub fn summary(&self) -> TrieSetSummary {
        let mut types = HashSet::new();
        let mut entries = 0;
        for (_, trie) in &self.tries {
            let words = trie.words();
            entries += words.len();
            types.extend(words);
        }
        TrieSetSummary {
            tries: self.tries.len(),
            word_types: types.len(),
            trie_entries: entries,
        }
    }

    /// Every distinct word over all tries, sorted.
    pub fn word_types(&self) -> Vec<String> {
        let set: BTreeSet<String> = self.tries.iter().flat_map(|(_, t)| t.words()).collect();
        set.into_iter().collect()
    }

    /// Maps each word to the indices of the tries containing it, in set order.
    pub fn residences(&self) -> HashMap<String, Vec<usize>> {
        let mut map: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, (_, trie)) in self.tries.iter().enumerate() {
            for w in trie.words() {
                map.entry(w).or_default().push(i);
            }
        }
        map
    }

    /// Record lines `seed<TAB>word1,word2,...` with sorted members.
    pub fn to_records(&self) -> String {
        let mut s = String::new();
        for (seed, trie) in &self.tries {
            s.push_str(seed);
            s.push('\t');
            s.push_str(&trie.words().join(","));
            s.push('\n');
        }
        s
    }

    pub fn from_records<R: BufRead>(
        reader: R,
        source_name: &str,
        method: TrieMethod,
    ) -> Result<Self> {
        let mut tries = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source_name, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (seed, members) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, i + 1, "expected `seed<TAB>members`"))?;
            let trie = Trie::from_words(members.split(',').filter(|w| !w.is_empty()))
                .map_err(|e| Error::parse(source_name, i + 1, e.to_string()))?;
            if trie.is_empty() {
                return Err(Error::parse(source_name, i + 1, "empty trie"));
            }
            tries.push((seed.to_string(), trie));
        }
        if tries.is_empty() {
            return Err(Error::EmptyInput(format!("{source_name}: no tries")));
        }
        Ok(TrieSet { method, tries })
    }

    pub fn manifest(&self, params: &BuilderParams) -> TrieSetManifest {
        TrieSetManifest {
            method: self.method,
            params: params.clone(),
            summary: self.summary(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Writes the records file and `<records>.manifest.json` next to it.
    pub fn save(&self, records_path: &Path, params: &BuilderParams) -> Result<()> {
        for (_, trie) in &self.tries {
            if let Some(w) = trie.words().into_iter().find(|w| w.contains(',')) {
                return Err(Error::InvalidParameter(format!(
                    "word {w:?} contains a comma and cannot be serialized"
                )));
            }
        }
        fs::write(records_path, self.to_records()).map_err(|e| Error::io(records_path, e))?;
        let manifest_path = manifest_path(records_path);
        let json = serde_json::to_string_pretty(&self.manifest(params))
            .map_err(|e| Error::Corruption(e.to_string()))?;
        fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))
    }

    /// Loads a records file; the method comes from its manifest.
    pub fn load(records_path: &Path) -> Result<(Self, TrieSetManifest)> {
        let manifest_path = manifest_path(records_path);
        let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
        let manifest: TrieSetManifest = serde_json::from_str(&text).map_err(|e| {
            Error::parse(manifest_path.display().to_string(), e.line(), e.to_string())
        })?;
        let file = fs::File::open(records_path).map_err(|e| Error::io(records_path, e))?;
        let set = TrieSet::from_records(
            BufReader::new(file),
            &records_path.display().to_string(),
            manifest.method,
        )?;
        Ok((set, manifest))
    }
}

pub fn manifest_path(records_path: &Path) -> std::path::PathBuf {
    let mut name = records_path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    records_path.with_file_name(name)
}
