//! Maximum-likelihood segmentation under a trained lexicon.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ln_crp_with_alpha, Lexicon, ModelParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub morphemes: Vec<String>,
    /// Log likelihood under the decoding lexicon.
    pub score: f64,
}

impl Segmentation {
    pub fn joined(&self) -> String {
        self.morphemes.join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Choose among the segmentations recorded during training.
    LearnedOnly,
    /// Search every segmentation of the word.
    AllSplits,
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::LearnedOnly => "learned",
            Strategy::AllSplits => "all",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "learned" | "learned_only" => Ok(Strategy::LearnedOnly),
            "all" | "all_splits" => Ok(Strategy::AllSplits),
            other => Err(Error::InvalidParameter(format!(
                "unknown strategy {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeConfig {
    pub strategy: Strategy,
    /// Morphemes seen fewer times than this are dropped before decoding.
    pub min_morpheme_freq: u64,
    pub max_morphemes: Option<usize>,
    /// Decode with `alpha = 0` (relative frequencies only).
    pub pure_ml: bool,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            strategy: Strategy::AllSplits,
            min_morpheme_freq: 5,
            max_morphemes: None,
            pure_ml: false,
        }
    }
}

/// Drops entries with count below `min_morpheme_freq`; the total is recounted.
pub fn filter_lexicon(lex: &Lexicon, cfg: &DecodeConfig) -> Lexicon {
    Lexicon::from_counts(lex.iter().filter(|&(_, c)| c >= cfg.min_morpheme_freq))
}

fn decode_alpha(params: &ModelParams, cfg: &DecodeConfig) -> f64 {
    if cfg.pure_ml {
        0.0
    } else {
        params.alpha
    }
}

/// Log likelihood of an explicit segmentation, summed left to right.
pub fn score_segmentation<S: AsRef<str>>(
    morphemes: &[S],
    lex: &Lexicon,
    params: &ModelParams,
    cfg: &DecodeConfig,
) -> f64 {
    let alpha = decode_alpha(params, cfg);
    morphemes.iter().fold(0.0, |acc, m| {
        acc + ln_crp_with_alpha(m.as_ref(), lex, alpha, params.gamma)
    })
}

type Cell = (f64, Vec<usize>);

/// Lengths compared left to right, longer first morpheme preferred.
fn prefer_lengths(a: &[usize], b: &[usize]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Exact best segmentation over all `2^(n-1)` splits by dynamic programming
/// over (prefix length, morpheme count). Ties go to fewer morphemes, then to
/// the longest leftmost morpheme.
pub fn segment_all_splits(
    word: &str,
    lex: &Lexicon,
    params: &ModelParams,
    cfg: &DecodeConfig,
) -> Segmentation {
    let chars: Vec<usize> = word
        .char_indices()
        .map(|(i, _)| i)
        .chain(std::iter::once(word.len()))
        .collect();
    let n = chars.len() - 1;
    if n == 0 {
        return Segmentation {
            morphemes: vec![String::new()],
            score: f64::NEG_INFINITY,
        };
    }
    let alpha = decode_alpha(params, cfg);
    let max_t = cfg.max_morphemes.unwrap_or(n).clamp(1, n);
    let piece =
        |i: usize, j: usize| ln_crp_with_alpha(&word[chars[i]..chars[j]], lex, alpha, params.gamma);

    // best[j][t]: (score, lengths) of the best split of chars[..j] into t parts
    let mut best: Vec<Vec<Option<Cell>>> = vec![vec![None; max_t + 1]; n + 1];
    best[0][0] = Some((0.0, Vec::new()));
    for j in 1..=n {
        for t in 1..=max_t.min(j) {
            let mut cell: Option<Cell> = None;
            for (i, row) in best.iter().enumerate().take(j).skip(t - 1) {
                let Some((prev, lens)) = &row[t - 1] else {
                    continue;
                };
                let score = prev + piece(i, j);
                let better = match &cell {
                    None => true,
                    Some((s, l)) => match score.total_cmp(s) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => {
                            let mut cand = lens.clone();
                            cand.push(j - i);
                            prefer_lengths(&cand, l) == Ordering::Less
                        }
                    },
                };
                if better {
                    let mut l = lens.clone();
                    l.push(j - i);
                    cell = Some((score, l));
                }
            }
            best[j][t] = cell;
        }
    }

    let mut winner: Option<&(f64, Vec<usize>)> = None;
    for cell in best[n].iter().skip(1).flatten() {
        winner = match winner {
            None => Some(cell),
            // fewer morphemes win exact ties because t ascends
            Some(w) if cell.0.total_cmp(&w.0) == Ordering::Greater => Some(cell),
            keep => keep,
        };
    }
    let (score, lens) = winner
        .cloned()
        .expect("the unsplit word is always a candidate");
    let mut morphemes = Vec::with_capacity(lens.len());
    let mut pos = 0;
    for l in lens {
        morphemes.push(word[chars[pos]..chars[pos + l]].to_string());
        pos += l;
    }
    Segmentation { morphemes, score }
}

/// Best of the segmentations learned for `word` during training; words
/// without learned segmentations fall back to [`segment_all_splits`].
pub fn segment_learned_only(
    word: &str,
    learned: &BTreeMap<String, Vec<Vec<String>>>,
    lex: &Lexicon,
    params: &ModelParams,
    cfg: &DecodeConfig,
) -> Segmentation {
    let Some(alts) = learned.get(word).filter(|a| !a.is_empty()) else {
        return segment_all_splits(word, lex, params, cfg);
    };
    let mut best: Option<Segmentation> = None;
    for alt in alts {
        if alt.concat() != word {
            continue;
        }
        let score = score_segmentation(alt, lex, params, cfg);
        let replace = match &best {
            None => true,
            Some(b) => match score.total_cmp(&b.score) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    let la: Vec<usize> = alt.iter().map(|m| m.chars().count()).collect();
                    let lb: Vec<usize> = b.morphemes.iter().map(|m| m.chars().count()).collect();
                    prefer_lengths(&la, &lb) == Ordering::Less
                }
            },
        };
        if replace {
            best = Some(Segmentation {
                morphemes: alt.clone(),
                score,
            });
        }
    }
    best.unwrap_or_else(|| segment_all_splits(word, lex, params, cfg))
}

/// A decoding session: the filtered lexicon plus what each strategy needs.
#[derive(Debug, Clone)]
pub struct Segmenter {
    pub params: ModelParams,
    pub config: DecodeConfig,
    lexicon: Lexicon,
    learned: BTreeMap<String, Vec<Vec<String>>>,
}

impl Segmenter {
    pub fn new(
        lexicon: &Lexicon,
        learned: BTreeMap<String, Vec<Vec<String>>>,
        params: ModelParams,
        config: DecodeConfig,
    ) -> Self {
        Segmenter {
            lexicon: filter_lexicon(lexicon, &config),
            learned,
            params,
            config,
        }
    }

    /// The lexicon after the rarity filter.
    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }

    pub fn segment(&self, word: &str) -> Segmentation {
        match self.config.strategy {
            Strategy::AllSplits => {
                segment_all_splits(word, &self.lexicon, &self.params, &self.config)
            }
            Strategy::LearnedOnly => segment_learned_only(
                word,
                &self.learned,
                &self.lexicon,
                &self.params,
                &self.config,
            ),
        }
    }

    /// Order-preserving batch decode.
    pub fn segment_batch<S: AsRef<str> + Sync>(&self, words: &[S]) -> Vec<Segmentation> {
        use rayon::prelude::*;
        words.par_iter().map(|w| self.segment(w.as_ref())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(alpha: f64) -> ModelParams {
        ModelParams::new(alpha, 26)
    }

    fn cfg(strategy: Strategy) -> DecodeConfig {
        DecodeConfig {
            strategy,
            min_morpheme_freq: 0,
            max_morphemes: None,
            pure_ml: false,
        }
    }

    #[test]
    fn filter_examples() {
        let lex = Lexicon::from_counts([("a", 4u64), ("b", 5)]);
        let c = DecodeConfig {
            min_morpheme_freq: 5,
            ..DecodeConfig::default()
        };
        let f = filter_lexicon(&lex, &c);
        assert_eq!(f.count("a"), 0);
        assert_eq!(f.total(), 5);
        assert_eq!(filter_lexicon(&lex, &cfg(Strategy::AllSplits)), lex);
        let all_rare = DecodeConfig {
            min_morpheme_freq: 100,
            ..DecodeConfig::default()
        };
        let empty = filter_lexicon(&lex, &all_rare);
        assert!(empty.is_empty());
        let seg = segment_all_splits("walked", &empty, &params(1.0), &all_rare);
        assert_eq!(seg.morphemes, ["walked"]);
    }

    #[test]
    fn empty_lexicon_keeps_word_whole() {
        let seg = segment_all_splits(
            "walked",
            &Lexicon::new(),
            &params(1.0),
            &cfg(Strategy::AllSplits),
        );
        assert_eq!(seg.morphemes, ["walked"]);
        let seg = segment_all_splits(
            "a",
            &Lexicon::new(),
            &params(1.0),
            &cfg(Strategy::AllSplits),
        );
        assert_eq!(seg.morphemes, ["a"]);
    }

    #[test]
    fn max_morphemes_caps_output() {
        let lex = Lexicon::from_counts([("a", 10u64), ("b", 10), ("c", 10)]);
        let mut c = cfg(Strategy::AllSplits);
        assert_eq!(
            segment_all_splits("abc", &lex, &params(0.01), &c).morphemes,
            ["a", "b", "c"]
        );
        c.max_morphemes = Some(2);
        assert_eq!(
            segment_all_splits("abc", &lex, &params(0.01), &c)
                .morphemes
                .len(),
            2
        );
    }

    #[test]
    fn tie_prefers_longer_first_morpheme() {
        // "ab"+"c" and "a"+"bc" score identically
        let lex = Lexicon::from_counts([("ab", 5u64), ("c", 5), ("a", 5), ("bc", 5)]);
        let c = DecodeConfig {
            pure_ml: true,
            ..cfg(Strategy::AllSplits)
        };
        let seg = segment_all_splits("abc", &lex, &params(1.0), &c);
        assert_eq!(seg.morphemes, ["ab", "c"]);
    }

    #[test]
    fn pure_ml_unseen_falls_back_whole() {
        let c = DecodeConfig {
            pure_ml: true,
            ..cfg(Strategy::AllSplits)
        };
        let seg = segment_all_splits(
            "xyz",
            &Lexicon::from_counts([("q", 1u64)]),
            &params(1.0),
            &c,
        );
        assert_eq!(seg.morphemes, ["xyz"]);
        assert_eq!(seg.score, f64::NEG_INFINITY);
    }

    #[test]
    fn learned_only_picks_best_and_falls_back() {
        let lex = Lexicon::from_counts([("lise", 10u64), ("ler", 8), ("de", 9), ("liseler", 1)]);
        let mut learned = BTreeMap::new();
        learned.insert(
            "liselerde".to_string(),
            vec![
                vec!["liseler".to_string(), "de".to_string()],
                vec!["lise".to_string(), "ler".to_string(), "de".to_string()],
            ],
        );
        let p = params(1.0);
        let c = cfg(Strategy::LearnedOnly);
        let seg = segment_learned_only("liselerde", &learned, &lex, &p, &c);
        let a = score_segmentation(&["liseler", "de"], &lex, &p, &c);
        let b = score_segmentation(&["lise", "ler", "de"], &lex, &p, &c);
        let expect: &[&str] = if a > b {
            &["liseler", "de"]
        } else {
            &["lise", "ler", "de"]
        };
        assert_eq!(seg.morphemes, expect);

        let unseen = segment_learned_only("lisede", &learned, &lex, &p, &c);
        assert_eq!(unseen, segment_all_splits("lisede", &lex, &p, &c));
    }

    #[test]
    fn batch_preserves_order() {
        let lex = Lexicon::from_counts([("walk", 10u64), ("ed", 10)]);
        let s = Segmenter::new(&lex, BTreeMap::new(), params(1.0), cfg(Strategy::AllSplits));
        let empty: [&str; 0] = [];
        assert!(s.segment_batch(&empty).is_empty());
        let words = ["walked", "ed", "walk"];
        let batch = s.segment_batch(&words);
        let single: Vec<_> = words.iter().map(|w| s.segment(w)).collect();
        assert_eq!(batch, single);
    }

    #[test]
    fn strategy_names() {
        assert_eq!(
            "learned".parse::<Strategy>().unwrap(),
            Strategy::LearnedOnly
        );
        assert_eq!("all".parse::<Strategy>().unwrap(), Strategy::AllSplits);
        assert!("viterbi".parse::<Strategy>().is_err());
    }
}
