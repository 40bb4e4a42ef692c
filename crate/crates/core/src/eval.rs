//! Pair-based precision/recall in the style of the Morpho Challenge
//! evaluation.
//!
//! For precision, every pair of evaluated words that share a predicted
//! morpheme is checked against the gold analyses; each word's points are
//! averaged over its pairs and the per-word averages are averaged over words
//! that have at least one pair. Recall swaps the roles of prediction and
//! gold. Exact enumeration, no pair sampling.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// Word → alternative analyses, each a sequence of morpheme labels.
pub type Analyses = BTreeMap<String, Vec<Vec<String>>>;

/// Parses `word<TAB>analysis1, analysis2, ...` lines (morphemes separated by
/// spaces). Repeated words merge their alternatives.
pub fn parse_analyses<R: BufRead>(reader: R, source_name: &str) -> Result<Analyses> {
    let mut out: Analyses = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(source_name, e))?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (word, rest) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(source_name, lineno, "expected `word<TAB>analyses`"))?;
        let word = word.trim();
        if word.is_empty() {
            return Err(Error::parse(source_name, lineno, "empty word"));
        }
        let entry = out.entry(word.to_string()).or_default();
        for alt in rest.split(',') {
            let morphs: Vec<String> = alt.split_whitespace().map(str::to_string).collect();
            if morphs.is_empty() {
                return Err(Error::parse(source_name, lineno, "empty analysis"));
            }
            if !entry.contains(&morphs) {
                entry.push(morphs);
            }
        }
    }
    Ok(out)
}

/// Loads a gold standard; an empty file is an error.
pub fn load_gold(path: impl AsRef<Path>) -> Result<Analyses> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let gold = parse_analyses(BufReader::new(file), &path.display().to_string())?;
    if gold.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{}: gold standard has no entries",
            path.display()
        )));
    }
    Ok(gold)
}

/// Loads predictions in the same format as the gold standard.
pub fn load_predictions(path: impl AsRef<Path>) -> Result<Analyses> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_analyses(BufReader::new(file), &path.display().to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordDiagnostic {
    pub word: String,
    pub precision_pairs: usize,
    pub precision_points: f64,
    pub recall_pairs: usize,
    pub recall_points: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub words_evaluated: usize,
    /// No predicted pair existed, so precision was reported as 0.
    pub precision_undefined: bool,
    /// No gold pair existed, so recall was reported as 0.
    pub recall_undefined: bool,
    pub per_word: Vec<WordDiagnostic>,
}

struct Side {
    // morpheme sets per alternative
    alts: Vec<Vec<BTreeSet<String>>>,
}

impl Side {
    fn build(words: &[&String], analyses: &Analyses) -> Self {
        Side {
            alts: words
                .iter()
                .map(|w| {
                    analyses[*w]
                        .iter()
                        .map(|a| a.iter().cloned().collect::<BTreeSet<_>>())
                        .collect()
                })
                .collect(),
        }
    }

    fn shares(&self, a: usize, b: usize) -> bool {
        self.alts[a]
            .iter()
            .any(|x| self.alts[b].iter().any(|y| !x.is_disjoint(y)))
    }
}

/// Per-word (pairs, points) where pairs come from `from` and are checked in `check`.
fn one_direction(from: &Side, check: &Side, n: usize) -> Vec<(usize, f64)> {
    (0..n)
        .map(|a| {
            let mut pairs = 0;
            let mut correct = 0;
            for b in 0..n {
                if a != b && from.shares(a, b) {
                    pairs += 1;
                    if check.shares(a, b) {
                        correct += 1;
                    }
                }
            }
            let points = if pairs == 0 {
                0.0
            } else {
                correct as f64 / pairs as f64
            };
            (pairs, points)
        })
        .collect()
}

fn mean_over_paired(scores: &[(usize, f64)]) -> (f64, bool) {
    let paired: Vec<f64> = scores
        .iter()
        .filter(|(p, _)| *p > 0)
        .map(|&(_, s)| s)
        .collect();
    if paired.is_empty() {
        (0.0, true)
    } else {
        (paired.iter().sum::<f64>() / paired.len() as f64, false)
    }
}

/// Evaluates `pred` against `gold` over the words present in both.
pub fn evaluate(pred: &Analyses, gold: &Analyses) -> Result<EvalReport> {
    let words: Vec<&String> = pred.keys().filter(|w| gold.contains_key(*w)).collect();
    if words.is_empty() {
        return Err(Error::EmptyInput(
            "predictions and gold share no words".into(),
        ));
    }
    let n = words.len();
    let p_side = Side::build(&words, pred);
    let g_side = Side::build(&words, gold);

    let prec = one_direction(&p_side, &g_side, n);
    let rec = one_direction(&g_side, &p_side, n);
    let (precision, precision_undefined) = mean_over_paired(&prec);
    let (recall, recall_undefined) = mean_over_paired(&rec);
    let f_measure = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };

    let per_word = words
        .iter()
        .zip(prec.iter().zip(&rec))
        .map(|(w, (&(pp, ps), &(rp, rs)))| WordDiagnostic {
            word: (*w).clone(),
            precision_pairs: pp,
            precision_points: ps,
            recall_pairs: rp,
            recall_points: rs,
        })
        .collect();

    Ok(EvalReport {
        precision,
        recall,
        f_measure,
        words_evaluated: n,
        precision_undefined,
        recall_undefined,
        per_word,
    })
}

impl EvalReport {
    /// Aligned table with percentages to two decimals.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("{:<12}{:>10}\n", "metric", "value (%)"));
        for (name, v) in [
            ("precision", self.precision),
            ("recall", self.recall),
            ("f-measure", self.f_measure),
        ] {
            s.push_str(&format!("{:<12}{:>10.2}\n", name, v * 100.0));
        }
        s.push_str(&format!("{:<12}{:>10}\n", "words", self.words_evaluated));
        if self.precision_undefined {
            s.push_str("note: no predicted pairs; precision reported as 0\n");
        }
        if self.recall_undefined {
            s.push_str("note: no gold pairs; recall reported as 0\n");
        }
        s
    }

    /// `metric=value` lines.
    pub fn render_kv(&self) -> String {
        format!(
            "precision={:.2}\nrecall={:.2}\nf_measure={:.2}\nwords={}\nprecision_undefined={}\nrecall_undefined={}\n",
            self.precision * 100.0,
            self.recall * 100.0,
            self.f_measure * 100.0,
            self.words_evaluated,
            self.precision_undefined,
            self.recall_undefined
        )
    }
}
