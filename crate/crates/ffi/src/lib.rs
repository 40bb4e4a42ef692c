//! C ABI over the morphtrie library.
//!
//! Every fallible function returns an [`MtStatus`] and writes its result
//! through an out-pointer. On failure, [`mt_last_error_message`] describes
//! the error on the calling thread. Handles are opaque and must be released
//! with the matching `*_free` function; strings returned by the library are
//! released with [`mt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use morphtrie::cli::load_segmenter;
use morphtrie::eval::{load_gold, load_predictions};
use morphtrie::{
    evaluate, DecodeConfig, EmbeddingStore, Error, ErrorKind, Segmenter, Strategy, Trie,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Data = 4,
    UnknownWord = 5,
    NoSuchNode = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MtStrategy {
    LearnedOnly = 0,
    AllSplits = 1,
}

/// Pair precision, recall and F-measure in [0, 1].
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MtEvalResult {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    pub words_evaluated: usize,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
}

pub struct MtEmbeddings(EmbeddingStore);

pub struct MtTrie(Trie);

pub struct MtSegmenter(Segmenter);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(MtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match (&e, e.kind()) {
            (Error::UnknownWord(_), _) => MtStatus::UnknownWord,
            (Error::NoSuchNode(_), _) => MtStatus::NoSuchNode,
            (_, ErrorKind::Config) => MtStatus::Config,
            (_, ErrorKind::Data) => MtStatus::Data,
            (_, ErrorKind::Internal) => MtStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> MtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MtStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside morphtrie");
            MtStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(MtStatus::NullPointer, format!("{what} is NULL")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be NULL or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    non_null(p, what)?;
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(MtStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn mt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn mt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------- embeddings

/// Loads word2vec text-format vectors.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mt_embeddings_load(
    path: *const c_char,
    out: *mut *mut MtEmbeddings,
) -> MtStatus {
    guard(|| {
        non_null(out, "out")?;
        let path = str_arg(path, "path")?;
        let store = EmbeddingStore::load(path, None)?;
        *out = Box::into_raw(Box::new(MtEmbeddings(store)));
        Ok(())
    })
}

/// Number of words in the store; 0 for NULL.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mt_embeddings_len(h: *const MtEmbeddings) -> usize {
    h.as_ref().map_or(0, |h| h.0.len())
}

/// Cosine similarity of two words.
///
/// # Safety
/// `h` must be a live handle, `a` and `b` NUL-terminated strings, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mt_embeddings_cosine(
    h: *const MtEmbeddings,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> MtStatus {
    guard(|| {
        non_null(h, "embeddings")?;
        non_null(out, "out")?;
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        *out = (*h).0.cosine(a, b)?;
        Ok(())
    })
}

/// # Safety
/// `h` must be NULL or a handle from [`mt_embeddings_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mt_embeddings_free(h: *mut MtEmbeddings) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

// ---------------------------------------------------------------- trie

#[no_mangle]
pub extern "C" fn mt_trie_new() -> *mut MtTrie {
    Box::into_raw(Box::new(MtTrie(Trie::new())))
}

/// Inserts a word; `inserted` (may be NULL) receives false for duplicates.
///
/// # Safety
/// `t` must be a live handle and `word` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mt_trie_insert(
    t: *mut MtTrie,
    word: *const c_char,
    inserted: *mut bool,
) -> MtStatus {
    guard(|| {
        non_null(t, "trie")?;
        let word = str_arg(word, "word")?;
        let added = (*t).0.insert(word)?;
        if !inserted.is_null() {
            *inserted = added;
        }
        Ok(())
    })
}

/// Branches leaving the node for `prefix`.
///
/// # Safety
/// `t` must be a live handle, `prefix` a NUL-terminated string, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn mt_trie_branch_count(
    t: *const MtTrie,
    prefix: *const c_char,
    out: *mut usize,
) -> MtStatus {
    guard(|| {
        non_null(t, "trie")?;
        non_null(out, "out")?;
        let prefix = str_arg(prefix, "prefix")?;
        *out = (*t).0.branch_count(prefix)?;
        Ok(())
    })
}

/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mt_trie_word_count(t: *const MtTrie) -> usize {
    t.as_ref().map_or(0, |t| t.0.word_count())
}

/// # Safety
/// `t` must be NULL or a handle from [`mt_trie_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mt_trie_free(t: *mut MtTrie) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

// ---------------------------------------------------------------- segmenter

/// Loads a trained model directory.
///
/// # Safety
/// `model_dir` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mt_segmenter_load(
    model_dir: *const c_char,
    strategy: MtStrategy,
    min_morph_freq: u64,
    out: *mut *mut MtSegmenter,
) -> MtStatus {
    guard(|| {
        non_null(out, "out")?;
        let dir = str_arg(model_dir, "model_dir")?;
        let config = DecodeConfig {
            strategy: match strategy {
                MtStrategy::LearnedOnly => Strategy::LearnedOnly,
                MtStrategy::AllSplits => Strategy::AllSplits,
            },
            min_morpheme_freq: min_morph_freq,
            ..DecodeConfig::default()
        };
        let segmenter = load_segmenter(Path::new(dir), &config)?;
        *out = Box::into_raw(Box::new(MtSegmenter(segmenter)));
        Ok(())
    })
}

/// Segments `word`. `out_text` receives the morphemes separated by single
/// spaces (free with [`mt_string_free`]); `out_score` (may be NULL) receives
/// the log score.
///
/// # Safety
/// `s` must be a live handle, `word` a NUL-terminated string, `out_text` valid.
#[no_mangle]
pub unsafe extern "C" fn mt_segmenter_segment(
    s: *const MtSegmenter,
    word: *const c_char,
    out_text: *mut *mut c_char,
    out_score: *mut f64,
) -> MtStatus {
    guard(|| {
        non_null(s, "segmenter")?;
        non_null(out_text, "out_text")?;
        let word = str_arg(word, "word")?;
        if word.is_empty() {
            return Err(Error::EmptyWord.into());
        }
        let seg = (*s).0.segment(word);
        let text =
            CString::new(seg.joined()).map_err(|e| Failure(MtStatus::Internal, e.to_string()))?;
        *out_text = text.into_raw();
        if !out_score.is_null() {
            *out_score = seg.score;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from [`mt_segmenter_load`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mt_segmenter_free(s: *mut MtSegmenter) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

// ---------------------------------------------------------------- evaluation

/// Evaluates a predictions file against a gold standard file.
///
/// # Safety
/// Both paths must be NUL-terminated strings and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mt_evaluate_files(
    predictions: *const c_char,
    gold: *const c_char,
    out: *mut MtEvalResult,
) -> MtStatus {
    guard(|| {
        non_null(out, "out")?;
        let pred = load_predictions(str_arg(predictions, "predictions")?)?;
        let gold = load_gold(str_arg(gold, "gold")?)?;
        let r = evaluate(&pred, &gold)?;
        *out = MtEvalResult {
            precision: r.precision,
            recall: r.recall,
            f_measure: r.f_measure,
            words_evaluated: r.words_evaluated,
            precision_undefined: r.precision_undefined,
            recall_undefined: r.recall_undefined,
        };
        Ok(())
    })
}
