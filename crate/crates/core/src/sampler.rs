//! Gibbs sampling of recursive binary segmentations.
//!
//! Each step removes a word's morphemes from the lexicon, samples a binary
//! split (or no split) of the word from the normalized posterior, and then
//! recurses on the left part until the unsplit candidate is drawn or the
//! left part is too short to split again. All candidates of one word are
//! scored against the same lexicon snapshot.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::builder::TrieSet;
use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::model::{ln_boundary_prior, ln_crp_prob, BoundaryContext, Lexicon, ModelParams};
use crate::trie::Trie;
use crate::wordlist::WordList;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    /// Every word once per sweep, in a fresh seeded permutation.
    Permutation,
    /// As many uniform draws with replacement as there are words.
    UniformDraws,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub iterations: usize,
    /// A part is only split when the left side keeps at least this many
    /// characters.
    pub min_stem_length: usize,
    pub rng_seed: u64,
    pub order: SweepOrder,
    pub max_suffix_length: Option<usize>,
    /// Keep a copy of the highest log-posterior state seen.
    pub track_best: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            iterations: 50,
            min_stem_length: 4,
            rng_seed: 0,
            order: SweepOrder::Permutation,
            max_suffix_length: None,
            track_best: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidParameter(
                "iterations must be at least 1".into(),
            ));
        }
        if self.min_stem_length == 0 {
            return Err(Error::InvalidParameter(
                "minimum stem length must be at least 1".into(),
            ));
        }
        if self.max_suffix_length == Some(0) {
            return Err(Error::InvalidParameter(
                "maximum suffix length must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Current analysis of every training word and the lexicon they induce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusState {
    pub segmentations: BTreeMap<String, Vec<String>>,
    pub lexicon: Lexicon,
}

impl CorpusState {
    /// Every word as a single morpheme.
    pub fn unsegmented<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let segmentations: BTreeMap<String, Vec<String>> = words
            .into_iter()
            .map(|w| (w.as_ref().to_string(), vec![w.as_ref().to_string()]))
            .collect();
        let lexicon = Lexicon::from_morphemes(segmentations.values().flatten());
        CorpusState {
            segmentations,
            lexicon,
        }
    }

    /// Lexicon recounted from the stored segmentations.
    pub fn rebuild_lexicon(&self) -> Lexicon {
        Lexicon::from_morphemes(self.segmentations.values().flatten())
    }

    /// Checks that every segmentation spells its word and that the live
    /// lexicon equals a recount.
    pub fn check(&self) -> Result<()> {
        for (w, seg) in &self.segmentations {
            if seg.iter().any(String::is_empty) || seg.concat() != *w {
                return Err(Error::Corruption(format!(
                    "segmentation {seg:?} does not spell {w:?}"
                )));
            }
        }
        if self.rebuild_lexicon() != self.lexicon {
            return Err(Error::Corruption("lexicon differs from a recount".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepStats {
    pub sweep: usize,
    pub log_posterior: f64,
    pub lexicon_size: usize,
}

/// One option for a part: keep it whole (`split == None`) or split it after
/// `split` characters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub split: Option<usize>,
    pub ln_score: f64,
}

/// Branches leaving the node reached by the first `split_pos` characters of
/// `word` in `trie`.
pub fn branch_count_for_split(word: &str, split_pos: usize, trie: &Trie) -> Result<usize> {
    let len = word.chars().count();
    if split_pos == 0 || split_pos >= len {
        return Err(Error::InvalidParameter(format!(
            "split position {split_pos} outside 1..{len} for {word:?}"
        )));
    }
    let prefix: String = word.chars().take(split_pos).collect();
    trie.branch_count(&prefix)
        .map_err(|_| Error::Corruption(format!("prefix {prefix:?} of {word:?} is not on its trie")))
}

fn byte_offset(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map_or(s.len(), |(i, _)| i)
}

/// Normalizes log scores into probabilities (log-sum-exp).
pub fn normalize(ln_scores: &[f64]) -> Vec<f64> {
    let max = ln_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return vec![1.0 / ln_scores.len() as f64; ln_scores.len()];
    }
    let weights: Vec<f64> = ln_scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / sum).collect()
}

/// Draws an index from a normalized distribution.
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the cumulative sum
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Scores the candidates for one part of a word. Shared by the sampler and
/// anything that needs the exact step distribution.
pub struct SplitScorer<'a> {
    pub store: &'a EmbeddingStore,
    pub wordlist: &'a WordList,
    pub params: &'a ModelParams,
    pub min_stem_length: usize,
    pub max_suffix_length: Option<usize>,
}

impl SplitScorer<'_> {
    /// Unsplit candidate first, then splits by increasing left length.
    pub fn candidates(&self, part: &str, trie: &Trie, lex: &Lexicon) -> Result<Vec<Candidate>> {
        let n = part.chars().count();
        let mut out = vec![Candidate {
            split: None,
            ln_score: ln_crp_prob(part, lex, self.params),
        }];
        for left_len in self.min_stem_length.max(1)..n {
            if self.max_suffix_length.is_some_and(|max| n - left_len > max) {
                continue;
            }
            let at = byte_offset(part, left_len);
            let (left, right) = part.split_at(at);
            let branches = branch_count_for_split(part, left_len, trie)?;
            let ctx = BoundaryContext {
                prefix_form: left,
                extended_form: part,
                branch_count: branches,
            };
            let ln_score = ln_crp_prob(left, lex, self.params)
                + ln_crp_prob(right, lex, self.params)
                + ln_boundary_prior(&ctx, self.store, self.wordlist, self.params)?;
            out.push(Candidate {
                split: Some(left_len),
                ln_score,
            });
        }
        Ok(out)
    }

    /// Normalized distribution over [`candidates`](Self::candidates).
    pub fn distribution(
        &self,
        part: &str,
        trie: &Trie,
        lex: &Lexicon,
    ) -> Result<Vec<(Option<usize>, f64)>> {
        let cands = self.candidates(part, trie, lex)?;
        let scores: Vec<f64> = cands.iter().map(|c| c.ln_score).collect();
        Ok(cands
            .iter()
            .map(|c| c.split)
            .zip(normalize(&scores))
            .collect())
    }

    /// Samples a full segmentation of `word` by left recursion.
    pub fn draw<R: Rng + ?Sized>(
        &self,
        word: &str,
        trie: &Trie,
        lex: &Lexicon,
        rng: &mut R,
    ) -> Result<Vec<String>> {
        let mut suffixes = Vec::new();
        let mut part = word;
        loop {
            let cands = self.candidates(part, trie, lex)?;
            if cands.len() == 1 {
                break;
            }
            let scores: Vec<f64> = cands.iter().map(|c| c.ln_score).collect();
            let probs = normalize(&scores);
            match cands[sample_index(&probs, rng)].split {
                None => break,
                Some(left_len) => {
                    let (left, right) = part.split_at(byte_offset(part, left_len));
                    suffixes.push(right.to_string());
                    part = left;
                }
            }
        }
        let mut seg = Vec::with_capacity(suffixes.len() + 1);
        seg.push(part.to_string());
        seg.extend(suffixes.into_iter().rev());
        Ok(seg)
    }

    /// Sum of log boundary priors over the boundaries of `seg`.
    pub fn ln_boundaries(&self, seg: &[String], trie: &Trie) -> Result<f64> {
        let word: String = seg.concat();
        let mut total = 0.0;
        let mut prefix_bytes = 0;
        let mut prefix_chars = 0;
        for pair in seg.windows(2) {
            prefix_bytes += pair[0].len();
            prefix_chars += pair[0].chars().count();
            let extended_bytes = prefix_bytes + pair[1].len();
            let ctx = BoundaryContext {
                prefix_form: &word[..prefix_bytes],
                extended_form: &word[..extended_bytes],
                branch_count: branch_count_for_split(&word, prefix_chars, trie)?,
            };
            total += ln_boundary_prior(&ctx, self.store, self.wordlist, self.params)?;
        }
        Ok(total)
    }
}

/// Result of a training run.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    pub params: ModelParams,
    pub state: CorpusState,
    /// Distinct segmentations per word: the committed one first, then the
    /// ones drawn under each additional trie the word belongs to.
    pub learned: BTreeMap<String, Vec<Vec<String>>>,
    pub trace: Vec<SweepStats>,
    pub best: Option<(f64, CorpusState)>,
}

fn make_scorer<'s>(
    store: &'s EmbeddingStore,
    wordlist: &'s WordList,
    params: &'s ModelParams,
    config: &SamplerConfig,
) -> SplitScorer<'s> {
    SplitScorer {
        store,
        wordlist,
        params,
        min_stem_length: config.min_stem_length,
        max_suffix_length: config.max_suffix_length,
    }
}

pub struct Sampler<'a> {
    tries: &'a TrieSet,
    store: &'a EmbeddingStore,
    wordlist: &'a WordList,
    params: ModelParams,
    config: SamplerConfig,
    rng: ChaCha8Rng,
    words: Vec<String>,
    residences: HashMap<String, Vec<usize>>,
    state: CorpusState,
    sweeps_done: usize,
    best: Option<(f64, CorpusState)>,
}

impl<'a> Sampler<'a> {
    /// Starts from the all-unsegmented state over every word in `tries`.
    pub fn new(
        tries: &'a TrieSet,
        store: &'a EmbeddingStore,
        wordlist: &'a WordList,
        params: ModelParams,
        config: SamplerConfig,
    ) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        if tries.is_empty() {
            return Err(Error::EmptyInput("no tries to train on".into()));
        }
        if wordlist.total() == 0 {
            return Err(Error::EmptyInput("word list is empty".into()));
        }
        let words = tries.word_types();
        let residences = tries.residences();
        let state = CorpusState::unsegmented(&words);
        Ok(Sampler {
            tries,
            store,
            wordlist,
            params,
            rng: ChaCha8Rng::seed_from_u64(config.rng_seed),
            config,
            words,
            residences,
            state,
            sweeps_done: 0,
            best: None,
        })
    }

    pub fn state(&self) -> &CorpusState {
        &self.state
    }

    /// Training words, sorted.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Index of the trie that supplies branch counts for `word`.
    pub fn home_trie(&self, word: &str) -> Result<usize> {
        self.residences
            .get(word)
            .and_then(|r| r.first().copied())
            .ok_or_else(|| Error::UnknownWord(word.to_string()))
    }

    /// Resamples the segmentation of one word against the rest of the corpus.
    pub fn resample_word(&mut self, word: &str) -> Result<()> {
        let trie_idx = self.home_trie(word)?;
        let old = self
            .state
            .segmentations
            .get(word)
            .cloned()
            .ok_or_else(|| Error::UnknownWord(word.to_string()))?;
        for m in &old {
            self.state.lexicon.remove(m)?;
        }
        let scorer = make_scorer(self.store, self.wordlist, &self.params, &self.config);
        let new = scorer.draw(
            word,
            self.tries.trie(trie_idx),
            &self.state.lexicon,
            &mut self.rng,
        )?;
        for m in &new {
            self.state.lexicon.add(m);
        }
        self.state.segmentations.insert(word.to_string(), new);
        Ok(())
    }

    /// One pass over the corpus.
    pub fn sweep(&mut self) -> Result<SweepStats> {
        let n = self.words.len();
        let order: Vec<usize> = match self.config.order {
            SweepOrder::Permutation => {
                let mut idx: Vec<usize> = (0..n).collect();
                idx.shuffle(&mut self.rng);
                idx
            }
            SweepOrder::UniformDraws => (0..n).map(|_| self.rng.gen_range(0..n)).collect(),
        };
        for i in order {
            let word = self.words[i].clone();
            self.resample_word(&word)?;
        }
        self.sweeps_done += 1;
        let stats = SweepStats {
            sweep: self.sweeps_done,
            log_posterior: self.log_posterior()?,
            lexicon_size: self.state.lexicon.len(),
        };
        if self.config.track_best
            && self
                .best
                .as_ref()
                .is_none_or(|(lp, _)| stats.log_posterior > *lp)
        {
            self.best = Some((stats.log_posterior, self.state.clone()));
        }
        Ok(stats)
    }

    /// CRP joint of all morpheme tokens plus every boundary's log prior.
    pub fn log_posterior(&self) -> Result<f64> {
        let scorer = make_scorer(self.store, self.wordlist, &self.params, &self.config);
        let mut lp = self.state.lexicon.ln_joint(&self.params);
        for (word, seg) in &self.state.segmentations {
            if seg.len() > 1 {
                lp += scorer.ln_boundaries(seg, self.tries.trie(self.home_trie(word)?))?;
            }
        }
        Ok(lp)
    }

    /// Draws, without committing, one segmentation per additional trie
    /// residence of every word.
    pub fn learned_segmentations(&mut self) -> Result<BTreeMap<String, Vec<Vec<String>>>> {
        let scorer = make_scorer(self.store, self.wordlist, &self.params, &self.config);
        let mut out = BTreeMap::new();
        for word in &self.words {
            let committed = self.state.segmentations[word].clone();
            let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
            seen.insert(committed.clone());
            let mut list = vec![committed.clone()];
            let residences = &self.residences[word];
            if residences.len() > 1 {
                for m in &committed {
                    self.state.lexicon.remove(m)?;
                }
                for &t in &residences[1..] {
                    let seg = scorer.draw(
                        word,
                        self.tries.trie(t),
                        &self.state.lexicon,
                        &mut self.rng,
                    )?;
                    if seen.insert(seg.clone()) {
                        list.push(seg);
                    }
                }
                for m in &committed {
                    self.state.lexicon.add(m);
                }
            }
            out.insert(word.clone(), list);
        }
        Ok(out)
    }

    /// Runs `config.iterations` sweeps, calling `on_sweep` after each.
    pub fn run<F>(mut self, mut on_sweep: F) -> Result<TrainedModel>
    where
        F: FnMut(&SweepStats, &CorpusState) -> Result<()>,
    {
        let mut trace = Vec::with_capacity(self.config.iterations);
        for _ in 0..self.config.iterations {
            let stats = self.sweep()?;
            log::debug!(
                "sweep {} log_posterior {:.4} lexicon {}",
                stats.sweep,
                stats.log_posterior,
                stats.lexicon_size
            );
            on_sweep(&stats, &self.state)?;
            trace.push(stats);
        }
        self.state.check()?;
        let learned = self.learned_segmentations()?;
        Ok(TrainedModel {
            params: self.params.clone(),
            state: self.state,
            learned,
            trace,
            best: self.best,
        })
    }
}

/// `word<TAB>m1 m2 ...` lines sorted by word.
pub fn render_segmentations(segs: &BTreeMap<String, Vec<String>>) -> String {
    let mut s = String::new();
    for (w, seg) in segs {
        s.push_str(&format!("{w}\t{}\n", seg.join(" ")));
    }
    s
}

/// `word<TAB>a1, a2, ...` where each alternative is space-joined morphemes.
pub fn render_learned(learned: &BTreeMap<String, Vec<Vec<String>>>) -> String {
    let mut s = String::new();
    for (w, alts) in learned {
        let alts: Vec<String> = alts.iter().map(|a| a.join(" ")).collect();
        s.push_str(&format!("{w}\t{}\n", alts.join(", ")));
    }
    s
}

/// `sweep<TAB>log_posterior<TAB>lexicon_size` lines.
pub fn render_trace(trace: &[SweepStats]) -> String {
    let mut s = String::new();
    for t in trace {
        s.push_str(&format!(
            "{}\t{:.6}\t{}\n",
            t.sweep, t.log_posterior, t.lexicon_size
        ));
    }
    s
}
