//! Character-level prefix tree. Branch counts (the number of distinct
//! continuations at a node) drive the letter-successor-variety prior.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Node {
    children: BTreeMap<char, usize>,
    is_word_end: bool,
    pass_count: u64,
}

/// Prefix tree over Unicode scalar values. Nodes live in an arena; index 0 is
/// the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trie {
    nodes: Vec<Node>,
    word_count: usize,
}

impl Default for Trie {
    fn default() -> Self {
        Trie::new()
    }
}

impl Trie {
    pub fn new() -> Self {
        Trie {
            nodes: vec![Node::default()],
            word_count: 0,
        }
    }

    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut trie = Trie::new();
        for w in words {
            trie.insert(w.as_ref())?;
        }
        Ok(trie)
    }

    /// Inserts `word`. Returns `false` if it was already present, in which
    /// case nothing changes.
    pub fn insert(&mut self, word: &str) -> Result<bool> {
        if word.is_empty() {
            return Err(Error::EmptyWord);
        }
        if self.contains_word(word) {
            return Ok(false);
        }
        let mut cur = 0;
        self.nodes[cur].pass_count += 1;
        for c in word.chars() {
            cur = match self.nodes[cur].children.get(&c) {
                Some(&next) => next,
                None => {
                    let next = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[cur].children.insert(c, next);
                    next
                }
            };
            self.nodes[cur].pass_count += 1;
        }
        self.nodes[cur].is_word_end = true;
        self.word_count += 1;
        Ok(true)
    }

    fn find(&self, prefix: &str) -> Option<usize> {
        let mut cur = 0;
        for c in prefix.chars() {
            cur = *self.nodes[cur].children.get(&c)?;
        }
        Some(cur)
    }

    /// Number of distinct characters that continue `prefix`. The end-of-word
    /// flag is not a branch.
    pub fn branch_count(&self, prefix: &str) -> Result<usize> {
        self.find(prefix)
            .map(|n| self.nodes[n].children.len())
            .ok_or_else(|| Error::NoSuchNode(prefix.to_string()))
    }

    /// Number of inserted words whose path passes through the node for `prefix`.
    pub fn pass_count(&self, prefix: &str) -> Result<u64> {
        self.find(prefix)
            .map(|n| self.nodes[n].pass_count)
            .ok_or_else(|| Error::NoSuchNode(prefix.to_string()))
    }

    pub fn contains_prefix(&self, prefix: &str) -> bool {
        self.find(prefix).is_some()
    }

    pub fn contains_word(&self, word: &str) -> bool {
        self.find(word).is_some_and(|n| self.nodes[n].is_word_end)
    }

    pub fn word_count(&self) -> usize {
        self.word_count
    }

    pub fn is_empty(&self) -> bool {
        self.word_count == 0
    }

    /// All inserted words in lexicographic (code point) order.
    pub fn words(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.word_count);
        self.walk(|prefix, node| {
            if node.is_word_end {
                out.push(prefix.to_string());
            }
        });
        out
    }

    /// `(prefix, branch_count)` for every node, root (empty prefix) first,
    /// in lexicographic prefix order.
    pub fn branch_table(&self) -> Vec<(String, usize)> {
        let mut out = Vec::with_capacity(self.nodes.len());
        self.walk(|prefix, node| out.push((prefix.to_string(), node.children.len())));
        out
    }

    /// Debug dump: one `prefix<TAB>branch_count` line per node.
    pub fn dump_branch_counts(&self) -> String {
        let mut s = String::new();
        for (prefix, count) in self.branch_table() {
            s.push_str(&prefix);
            s.push('\t');
            s.push_str(&count.to_string());
            s.push('\n');
        }
        s
    }

    /// Serialized form: one word per line.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for w in self.words() {
            s.push_str(&w);
            s.push('\n');
        }
        s
    }

    // pre-order, children in character order
    fn walk<F: FnMut(&str, &Node)>(&self, mut visit: F) {
        let mut stack = vec![(0usize, String::new())];
        while let Some((node, prefix)) = stack.pop() {
            visit(&prefix, &self.nodes[node]);
            for (&c, &child) in self.nodes[node].children.iter().rev() {
                let mut next = prefix.clone();
                next.push(c);
                stack.push((child, next));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn walk_family_branches() {
        let t = Trie::from_words(["walks", "walked", "walking"]).unwrap();
        assert_eq!(t.branch_count("walk").unwrap(), 3);
        assert_eq!(t.branch_count("wal").unwrap(), 1);
        assert_eq!(t.branch_count("walks").unwrap(), 0);
        assert_eq!(t.pass_count("walk").unwrap(), 3);
        assert!(matches!(t.branch_count("talk"), Err(Error::NoSuchNode(_))));
    }

    #[test]
    fn chain_and_word_end() {
        let t = Trie::from_words(["re", "read", "reads"]).unwrap();
        assert!(t.contains_word("re"));
        assert!(!t.contains_word("rea"));
        assert_eq!(t.branch_count("re").unwrap(), 1);
        assert_eq!(t.branch_count("read").unwrap(), 1);
        let single = Trie::from_words(["abc"]).unwrap();
        assert_eq!(single.branch_count("ab").unwrap(), 1);
    }

    #[test]
    fn duplicate_insert_is_noop() {
        let mut t = Trie::new();
        assert!(t.insert("walk").unwrap());
        let before = t.clone();
        assert!(!t.insert("walk").unwrap());
        assert_eq!(t, before);
        assert_eq!(t.word_count(), 1);
        assert!(matches!(t.insert(""), Err(Error::EmptyWord)));
    }

    #[test]
    fn words_sorted_and_membership() {
        assert!(Trie::new().words().is_empty());
        let t = Trie::from_words(["b", "a"]).unwrap();
        assert_eq!(t.words(), ["a", "b"]);
        let t = Trie::from_words(["walked"]).unwrap();
        assert!(t.contains_prefix("walk"));
        assert!(!t.contains_word("walk"));
        assert!(t.contains_prefix(""));
    }

    #[test]
    fn unicode_letters_are_single_edges() {
        let t = Trie::from_words(["yapış", "yapıp", "yaptık"]).unwrap();
        assert_eq!(t.branch_count("yap").unwrap(), 2);
        assert_eq!(t.branch_count("yapı").unwrap(), 2);
        assert_eq!(t.words(), ["yaptık", "yapıp", "yapış"]);
    }

    #[test]
    fn branch_table_lists_every_node() {
        let t = Trie::from_words(["ab", "ac"]).unwrap();
        assert_eq!(
            t.branch_table(),
            vec![
                ("".into(), 1),
                ("a".into(), 2),
                ("ab".into(), 0),
                ("ac".into(), 0)
            ]
        );
        assert_eq!(t.dump_branch_counts(), "\t1\na\t2\nab\t0\nac\t0\n");
    }
}
