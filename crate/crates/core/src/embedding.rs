//! Word vectors in the word2vec text format, with cosine similarity and
//! exact (linear scan) nearest-neighbor queries.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// A neighbor returned by [`EmbeddingStore::nearest_neighbors`].
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    pub word: String,
    pub similarity: f64,
}

/// Immutable store of word vectors. Norms are cached at load time.
#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    norms: Vec<f64>,
    dimension: usize,
}

impl EmbeddingStore {
    /// Loads a word2vec text file (`-binary 0` output).
    pub fn load(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(
            BufReader::new(file),
            &path.display().to_string(),
            expected_dim,
        )
    }

    /// Parses the word2vec text format from any reader. `source_name` is used
    /// in error messages.
    pub fn read<R: BufRead>(
        reader: R,
        source_name: &str,
        expected_dim: Option<usize>,
    ) -> Result<Self> {
        let mut lines = reader.lines();
        let header = match lines.next() {
            Some(line) => line.map_err(|e| Error::io(source_name, e))?,
            None => return Err(Error::parse(source_name, 1, "missing header line")),
        };
        let mut fields = header.split_ascii_whitespace();
        let (count, dimension) = match (fields.next(), fields.next(), fields.next()) {
            (Some(c), Some(d), None) => {
                let c: usize = c.parse().map_err(|_| {
                    Error::parse(source_name, 1, format!("bad vocabulary count {c:?}"))
                })?;
                let d: usize = d
                    .parse()
                    .map_err(|_| Error::parse(source_name, 1, format!("bad dimension {d:?}")))?;
                (c, d)
            }
            _ => {
                return Err(Error::parse(
                    source_name,
                    1,
                    "header must be `<vocab_count> <dimension>`",
                ))
            }
        };
        if dimension == 0 {
            return Err(Error::parse(source_name, 1, "dimension must be positive"));
        }
        if let Some(expected) = expected_dim {
            if expected != dimension {
                return Err(Error::parse(
                    source_name,
                    1,
                    format!("dimension {dimension} does not match expected {expected}"),
                ));
            }
        }

        let mut store = EmbeddingStore::with_capacity(dimension, count);
        let mut row = Vec::with_capacity(dimension);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line.map_err(|e| Error::io(source_name, e))?;
            let mut fields = line.split_ascii_whitespace();
            let word = match fields.next() {
                Some(w) => w,
                // blank trailing lines are tolerated
                None => continue,
            };
            row.clear();
            for tok in fields {
                let v: f32 = tok.parse().map_err(|_| {
                    Error::parse(
                        source_name,
                        lineno,
                        format!("non-numeric component {tok:?}"),
                    )
                })?;
                row.push(v);
            }
            store
                .push(word, &row)
                .map_err(|msg| Error::parse(source_name, lineno, msg))?;
        }
        if store.len() != count {
            return Err(Error::parse(
                source_name,
                1,
                format!(
                    "header declares {count} words but {} were read",
                    store.len()
                ),
            ));
        }
        Ok(store)
    }

    /// Builds a store from in-memory rows. Rows are validated like file rows.
    pub fn from_rows<S, I>(dimension: usize, rows: I) -> Result<Self>
    where
        S: AsRef<str>,
        I: IntoIterator<Item = (S, Vec<f32>)>,
    {
        if dimension == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut store = EmbeddingStore::with_capacity(dimension, 0);
        for (i, (word, vector)) in rows.into_iter().enumerate() {
            store
                .push(word.as_ref(), &vector)
                .map_err(|msg| Error::parse("<rows>", i + 1, msg))?;
        }
        Ok(store)
    }

    fn with_capacity(dimension: usize, count: usize) -> Self {
        EmbeddingStore {
            words: Vec::with_capacity(count),
            index: HashMap::with_capacity(count),
            data: Vec::with_capacity(count.saturating_mul(dimension)),
            norms: Vec::with_capacity(count),
            dimension,
        }
    }

    fn push(&mut self, word: &str, vector: &[f32]) -> std::result::Result<(), String> {
        if vector.len() != self.dimension {
            return Err(format!(
                "word {word:?} has {} components, expected {}",
                vector.len(),
                self.dimension
            ));
        }
        if self.index.contains_key(word) {
            return Err(format!("duplicate word {word:?}"));
        }
        let norm = vector
            .iter()
            .map(|&v| f64::from(v) * f64::from(v))
            .sum::<f64>()
            .sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(format!("word {word:?} has a zero or non-finite norm"));
        }
        self.index.insert(word.to_string(), self.words.len());
        self.words.push(word.to_string());
        self.data.extend_from_slice(vector);
        self.norms.push(norm);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Words in file order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn vector(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&i| self.row(i))
    }

    fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dimension..(i + 1) * self.dimension]
    }

    fn lookup(&self, word: &str) -> Result<usize> {
        self.index
            .get(word)
            .copied()
            .ok_or_else(|| Error::UnknownWord(word.to_string()))
    }

    fn cosine_idx(&self, a: usize, b: usize) -> f64 {
        let dot: f64 = self
            .row(a)
            .iter()
            .zip(self.row(b))
            .map(|(&x, &y)| f64::from(x) * f64::from(y))
            .sum();
        (dot / (self.norms[a] * self.norms[b])).clamp(-1.0, 1.0)
    }

    /// Cosine similarity of two stored words.
    pub fn cosine(&self, a: &str, b: &str) -> Result<f64> {
        let ia = self.lookup(a)?;
        let ib = self.lookup(b)?;
        Ok(self.cosine_idx(ia, ib))
    }

    /// Like [`cosine`](Self::cosine) but `None` for out-of-vocabulary words.
    pub fn try_cosine(&self, a: &str, b: &str) -> Option<f64> {
        let ia = *self.index.get(a)?;
        let ib = *self.index.get(b)?;
        Some(self.cosine_idx(ia, ib))
    }

    /// The `k` most similar words to `word`, excluding `word` itself, sorted
    /// by descending similarity with ties broken by ascending word order.
    /// Fewer than `k` are returned when the vocabulary is smaller.
    pub fn nearest_neighbors(&self, word: &str, k: usize) -> Result<Vec<Neighbor>> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        let query = self.lookup(word)?;
        let mut scored: Vec<(f64, usize)> = (0..self.words.len())
            .filter(|&i| i != query)
            .map(|i| (self.cosine_idx(query, i), i))
            .collect();

        let cmp = |a: &(f64, usize), b: &(f64, usize)| -> Ordering {
            b.0.total_cmp(&a.0)
                .then_with(|| self.words[a.1].cmp(&self.words[b.1]))
        };
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_unstable_by(cmp);

        Ok(scored
            .into_iter()
            .map(|(similarity, i)| Neighbor {
                word: self.words[i].clone(),
                similarity,
            })
            .collect())
    }
}
