//! Word frequency lists. Lines are `frequency<TAB>word` (Morpho Challenge
//! convention) or a bare `word`, which counts as frequency 1.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct WordList {
    order: Vec<String>,
    freqs: HashMap<String, u64>,
    total: u64,
}

impl WordList {
    pub fn new() -> Self {
        WordList::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), &path.display().to_string())
    }

    pub fn read<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut wl = WordList::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::io(source_name, e))?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() {
                continue;
            }
            let (freq, word) = match line.split_once('\t') {
                Some((f, w)) => {
                    let f: u64 = f.trim().parse().map_err(|_| {
                        Error::parse(source_name, i + 1, format!("bad frequency {f:?}"))
                    })?;
                    (f, w.trim())
                }
                None => (1, line.trim()),
            };
            if word.is_empty() || word.contains(char::is_whitespace) {
                return Err(Error::parse(
                    source_name,
                    i + 1,
                    format!("bad word {word:?}"),
                ));
            }
            wl.add(word, freq);
        }
        Ok(wl)
    }

    pub fn from_pairs<I, S>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (S, u64)>,
        S: AsRef<str>,
    {
        let mut wl = WordList::new();
        for (w, f) in pairs {
            wl.add(w.as_ref(), f);
        }
        wl
    }

    /// Adds `freq` occurrences of `word`; repeated words accumulate.
    pub fn add(&mut self, word: &str, freq: u64) {
        match self.freqs.get_mut(word) {
            Some(f) => *f += freq,
            None => {
                self.order.push(word.to_string());
                self.freqs.insert(word.to_string(), freq);
            }
        }
        self.total += freq;
    }

    pub fn frequency(&self, word: &str) -> u64 {
        self.freqs.get(word).copied().unwrap_or(0)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.freqs.contains_key(word)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Distinct words in first-seen order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    /// Renders as `frequency<TAB>word` lines in first-seen order.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for w in &self.order {
            s.push_str(&format!("{}\t{}\n", self.freqs[w], w));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_line_forms() {
        let wl = WordList::read("5\twalk\nwalked\n\n2\twalk\n".as_bytes(), "t").unwrap();
        assert_eq!(wl.len(), 2);
        assert_eq!(wl.frequency("walk"), 7);
        assert_eq!(wl.frequency("walked"), 1);
        assert_eq!(wl.total(), 8);
        assert_eq!(wl.words().collect::<Vec<_>>(), ["walk", "walked"]);
    }

    #[test]
    fn bad_frequency_reports_line() {
        let err = WordList::read("1\ta\nx\tb\n".as_bytes(), "t").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
