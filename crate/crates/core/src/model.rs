//! Morpheme lexicon under a Chinese-restaurant-process view of a Dirichlet
//! process with a geometric base measure, and the three-factor boundary prior
//! (trie branching, embedding similarity, word-list presence).
//!
//! Everything is computed in log space. The linear-space functions are thin
//! `exp` wrappers kept for readability at call sites and in tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingStore;
use crate::error::{Error, Result};
use crate::wordlist::WordList;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// DP concentration.
    pub alpha: f64,
    /// Geometric base-measure parameter; `1 / alphabet_size` by default.
    pub gamma: f64,
    /// Poisson rate for trie branching.
    pub lambda: f64,
    pub alphabet_size: usize,
    pub semantic_floor: f64,
    pub presence_floor: f64,
}

impl ModelParams {
    /// Parameters with `gamma = 1 / alphabet_size`, `lambda = 4` and the
    /// default floors.
    pub fn new(alpha: f64, alphabet_size: usize) -> Self {
        ModelParams {
            alpha,
            gamma: 1.0 / alphabet_size.max(1) as f64,
            lambda: 4.0,
            alphabet_size,
            semantic_floor: 1e-4,
            presence_floor: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            ));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad(format!("gamma must lie in (0, 1), got {}", self.gamma));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be positive, got {}", self.lambda));
        }
        if self.alphabet_size == 0 {
            return bad("alphabet size must be positive".into());
        }
        for (name, v) in [
            ("semantic", self.semantic_floor),
            ("presence", self.presence_floor),
        ] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} floor must lie in (0, 1], got {v}"));
            }
        }
        Ok(())
    }
}

/// Number of distinct characters over `words`.
pub fn alphabet_size<'a, I: IntoIterator<Item = &'a str>>(words: I) -> usize {
    words
        .into_iter()
        .flat_map(str::chars)
        .collect::<BTreeSet<char>>()
        .len()
}

fn ln_base(len: usize, gamma: f64) -> f64 {
    (len as f64 + 1.0) * gamma.ln()
}

/// `H(m) = gamma^(|m| + 1)`, with `|m|` counted in characters. Not a proper
/// distribution over all strings; callers renormalize over finite sets.
pub fn base_prob(morpheme: &str, params: &ModelParams) -> Result<f64> {
    ln_base_prob(morpheme, params).map(f64::exp)
}

pub fn ln_base_prob(morpheme: &str, params: &ModelParams) -> Result<f64> {
    if morpheme.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(ln_base(morpheme.chars().count(), params.gamma))
}

/// Morpheme type counts (customers per dish) and the total token count.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    counts: BTreeMap<String, u64>,
    total: u64,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    pub fn from_morphemes<I, S>(morphemes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::new();
        for m in morphemes {
            lex.add(m.as_ref());
        }
        lex
    }

    /// Builds from explicit counts; zero counts are dropped.
    pub fn from_counts<I, S>(counts: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut lex = Lexicon::new();
        for (m, c) in counts {
            if c > 0 {
                *lex.counts.entry(m.as_ref().to_string()).or_insert(0) += c;
                lex.total += c;
            }
        }
        lex
    }

    pub fn add(&mut self, morpheme: &str) {
        match self.counts.get_mut(morpheme) {
            Some(c) => *c += 1,
            None => {
                self.counts.insert(morpheme.to_string(), 1);
            }
        }
        self.total += 1;
    }

    /// Removing an absent morpheme means the caller's bookkeeping is corrupt.
    pub fn remove(&mut self, morpheme: &str) -> Result<()> {
        match self.counts.get_mut(morpheme) {
            Some(c) => {
                *c -= 1;
                if *c == 0 {
                    self.counts.remove(morpheme);
                }
                self.total -= 1;
                Ok(())
            }
            None => Err(Error::Corruption(format!(
                "removing morpheme {morpheme:?} that is not in the lexicon"
            ))),
        }
    }

    pub fn count(&self, morpheme: &str) -> u64 {
        self.counts.get(morpheme).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of morpheme types.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// `(morpheme, count)` in morpheme order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(m, &c)| (m.as_str(), c))
    }

    /// Joint log probability of the lexicon's token multiset under the CRP
    /// (sequential predictive product; exchangeable, so order-free).
    pub fn ln_joint(&self, params: &ModelParams) -> f64 {
        let alpha = params.alpha;
        let mut lp = 0.0;
        for (m, &n) in &self.counts {
            let a_h = alpha * ln_base(m.chars().count(), params.gamma).exp();
            for j in 0..n {
                lp += (j as f64 + a_h).ln();
            }
        }
        for i in 0..self.total {
            lp -= (i as f64 + alpha).ln();
        }
        lp
    }
}

/// `(n_m + alpha * H(m)) / (N + alpha)`.
pub fn crp_prob(morpheme: &str, lex: &Lexicon, params: &ModelParams) -> f64 {
    ln_crp_prob(morpheme, lex, params).exp()
}

pub fn ln_crp_prob(morpheme: &str, lex: &Lexicon, params: &ModelParams) -> f64 {
    ln_crp_with_alpha(morpheme, lex, params.alpha, params.gamma)
}

/// CRP predictive with an explicit concentration. `alpha = 0` gives the pure
/// relative-frequency estimate (`-inf` for unseen morphemes).
pub fn ln_crp_with_alpha(morpheme: &str, lex: &Lexicon, alpha: f64, gamma: f64) -> f64 {
    let n = lex.count(morpheme) as f64;
    let numer = n + alpha * ln_base(morpheme.chars().count(), gamma).exp();
    let denom = lex.total() as f64 + alpha;
    if numer <= 0.0 || denom <= 0.0 {
        return f64::NEG_INFINITY;
    }
    numer.ln() - denom.ln()
}

/// Poisson pmf `lambda^k e^-lambda / k!`.
pub fn poisson_branch_prob(k: usize, params: &ModelParams) -> f64 {
    ln_poisson(k, params.lambda).exp()
}

pub fn ln_poisson(k: usize, lambda: f64) -> f64 {
    let ln_fact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
    k as f64 * lambda.ln() - lambda - ln_fact
}

/// The word-form pair separated by a candidate boundary and the branching at
/// the trie node where the split falls.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryContext<'a> {
    /// Word form up to the boundary.
    pub prefix_form: &'a str,
    /// The prefix form extended by the morpheme after the boundary.
    pub extended_form: &'a str,
    pub branch_count: usize,
}

impl<'a> BoundaryContext<'a> {
    pub fn new(prefix_form: &'a str, extended_form: &'a str, branch_count: usize) -> Result<Self> {
        if prefix_form.is_empty()
            || prefix_form.len() >= extended_form.len()
            || !extended_form.starts_with(prefix_form)
        {
            return Err(Error::InvalidParameter(format!(
                "{prefix_form:?} is not a proper nonempty prefix of {extended_form:?}"
            )));
        }
        Ok(BoundaryContext {
            prefix_form,
            extended_form,
            branch_count,
        })
    }
}

/// Cosine of the two forms' vectors clamped to `[semantic_floor, 1]`; the
/// floor when either form has no vector.
pub fn semantic_prior(
    ctx: &BoundaryContext<'_>,
    store: &EmbeddingStore,
    params: &ModelParams,
) -> f64 {
    match store.try_cosine(ctx.prefix_form, ctx.extended_form) {
        Some(c) => c.clamp(params.semantic_floor, 1.0),
        None => params.semantic_floor,
    }
}

/// Relative frequency of `prefix_form` in the word list, or the presence
/// floor when absent.
pub fn presence_prior(prefix_form: &str, wordlist: &WordList, params: &ModelParams) -> Result<f64> {
    if wordlist.total() == 0 {
        return Err(Error::EmptyInput(
            "word list has zero total frequency".into(),
        ));
    }
    let f = wordlist.frequency(prefix_form);
    if f == 0 {
        Ok(params.presence_floor)
    } else {
        Ok(f as f64 / wordlist.total() as f64)
    }
}

pub fn boundary_prior(
    ctx: &BoundaryContext<'_>,
    store: &EmbeddingStore,
    wordlist: &WordList,
    params: &ModelParams,
) -> Result<f64> {
    ln_boundary_prior(ctx, store, wordlist, params).map(f64::exp)
}

pub fn ln_boundary_prior(
    ctx: &BoundaryContext<'_>,
    store: &EmbeddingStore,
    wordlist: &WordList,
    params: &ModelParams,
) -> Result<f64> {
    let presence = presence_prior(ctx.prefix_form, wordlist, params)?;
    Ok(ln_poisson(ctx.branch_count, params.lambda)
        + semantic_prior(ctx, store, params).ln()
        + presence.ln())
}

/// Unigram likelihood of a segmentation, every morpheme scored against the
/// same lexicon snapshot.
pub fn word_likelihood<S: AsRef<str>>(morphemes: &[S], lex: &Lexicon, params: &ModelParams) -> f64 {
    ln_word_likelihood(morphemes, lex, params).exp()
}

pub fn ln_word_likelihood<S: AsRef<str>>(
    morphemes: &[S],
    lex: &Lexicon,
    params: &ModelParams,
) -> f64 {
    morphemes
        .iter()
        .map(|m| ln_crp_prob(m.as_ref(), lex, params))
        .sum()
}

/// A trained lexicon together with the parameters it was trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct LexiconFile {
    pub params: ModelParams,
    pub lexicon: Lexicon,
    /// Free-form `key=value` training metadata.
    pub metadata: BTreeMap<String, String>,
}

const LEXICON_MAGIC: &str = "# morphtrie lexicon v1";

impl LexiconFile {
    /// Header of `# key=value` lines, then `count<TAB>morpheme` sorted by
    /// morpheme.
    pub fn render(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        s.push_str(LEXICON_MAGIC);
        s.push('\n');
        for (k, v) in [
            ("alpha", p.alpha.to_string()),
            ("gamma", p.gamma.to_string()),
            ("lambda", p.lambda.to_string()),
            ("alphabet_size", p.alphabet_size.to_string()),
            ("semantic_floor", p.semantic_floor.to_string()),
            ("presence_floor", p.presence_floor.to_string()),
        ] {
            s.push_str(&format!("# {k}={v}\n"));
        }
        for (k, v) in &self.metadata {
            s.push_str(&format!("# meta.{k}={v}\n"));
        }
        for (m, c) in self.lexicon.iter() {
            s.push_str(&format!("{c}\t{m}\n"));
        }
        s
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.render()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(std::io::BufReader::new(file), &path.display().to_string())
    }

    pub fn read<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut header: BTreeMap<String, String> = BTreeMap::new();
        let mut metadata = BTreeMap::new();
        let mut counts = Vec::new();
        let mut saw_magic = false;
        for (i, line) in reader.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::io(source_name, e))?;
            if line.trim().is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if line == LEXICON_MAGIC {
                    saw_magic = true;
                    continue;
                }
                let (k, v) = rest.trim().split_once('=').ok_or_else(|| {
                    Error::parse(source_name, lineno, "header lines are `# key=value`")
                })?;
                match k.strip_prefix("meta.") {
                    Some(mk) => metadata.insert(mk.to_string(), v.to_string()),
                    None => header.insert(k.to_string(), v.to_string()),
                };
                continue;
            }
            let (c, m) = line.split_once('\t').ok_or_else(|| {
                Error::parse(source_name, lineno, "expected `count<TAB>morpheme`")
            })?;
            let c: u64 = c
                .parse()
                .map_err(|_| Error::parse(source_name, lineno, format!("bad count {c:?}")))?;
            if m.is_empty() || c == 0 {
                return Err(Error::parse(
                    source_name,
                    lineno,
                    "empty morpheme or zero count",
                ));
            }
            counts.push((m.to_string(), c));
        }
        if !saw_magic {
            return Err(Error::parse(source_name, 1, "not a lexicon file"));
        }
        let num = |key: &str| -> Result<f64> {
            header
                .get(key)
                .ok_or_else(|| Error::parse(source_name, 1, format!("missing header key {key}")))?
                .parse::<f64>()
                .map_err(|_| Error::parse(source_name, 1, format!("bad value for {key}")))
        };
        let params = ModelParams {
            alpha: num("alpha")?,
            gamma: num("gamma")?,
            lambda: num("lambda")?,
            alphabet_size: num("alphabet_size")? as usize,
            semantic_floor: num("semantic_floor")?,
            presence_floor: num("presence_floor")?,
        };
        params.validate()?;
        Ok(LexiconFile {
            params,
            lexicon: Lexicon::from_counts(counts),
            metadata,
        })
    }
}
