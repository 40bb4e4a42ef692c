#ifndef MORPHTRIE_H
#define MORPHTRIE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MtStatus {
  MT_STATUS_OK = 0,
  MT_STATUS_NULL_POINTER = 1,
  MT_STATUS_INVALID_UTF8 = 2,
  MT_STATUS_CONFIG = 3,
  MT_STATUS_DATA = 4,
  MT_STATUS_UNKNOWN_WORD = 5,
  MT_STATUS_NO_SUCH_NODE = 6,
  MT_STATUS_INTERNAL = 7,
  MT_STATUS_PANIC = 8,
} MtStatus;

typedef enum MtStrategy {
  MT_STRATEGY_LEARNED_ONLY = 0,
  MT_STRATEGY_ALL_SPLITS = 1,
} MtStrategy;

typedef struct MtEmbeddings MtEmbeddings;

typedef struct MtSegmenter MtSegmenter;

typedef struct MtTrie MtTrie;

/**
 * Pair precision, recall and F-measure in [0, 1].
 */
typedef struct MtEvalResult {
  double precision;
  double recall;
  double f_measure;
  size_t words_evaluated;
  bool precision_undefined;
  bool recall_undefined;
} MtEvalResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *mt_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *mt_version(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void mt_string_free(char *s);

/**
 * Loads word2vec text-format vectors.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MtStatus mt_embeddings_load(const char *path, struct MtEmbeddings **out);

/**
 * Number of words in the store; 0 for NULL.
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t mt_embeddings_len(const struct MtEmbeddings *h);

/**
 * Cosine similarity of two words.
 *
 * # Safety
 * `h` must be a live handle, `a` and `b` NUL-terminated strings, `out` valid.
 */
enum MtStatus mt_embeddings_cosine(const struct MtEmbeddings *h,
                                   const char *a,
                                   const char *b,
                                   double *out);

/**
 * # Safety
 * `h` must be NULL or a handle from [`mt_embeddings_load`] not yet freed.
 */
void mt_embeddings_free(struct MtEmbeddings *h);

struct MtTrie *mt_trie_new(void);

/**
 * Inserts a word; `inserted` (may be NULL) receives false for duplicates.
 *
 * # Safety
 * `t` must be a live handle and `word` a NUL-terminated string.
 */
enum MtStatus mt_trie_insert(struct MtTrie *t, const char *word, bool *inserted);

/**
 * Branches leaving the node for `prefix`.
 *
 * # Safety
 * `t` must be a live handle, `prefix` a NUL-terminated string, `out` valid.
 */
enum MtStatus mt_trie_branch_count(const struct MtTrie *t, const char *prefix, size_t *out);

/**
 * # Safety
 * `t` must be NULL or a live handle.
 */
size_t mt_trie_word_count(const struct MtTrie *t);

/**
 * # Safety
 * `t` must be NULL or a handle from [`mt_trie_new`] not yet freed.
 */
void mt_trie_free(struct MtTrie *t);

/**
 * Loads a trained model directory.
 *
 * # Safety
 * `model_dir` must be a NUL-terminated string and `out` a valid pointer.
 */
enum MtStatus mt_segmenter_load(const char *model_dir,
                                enum MtStrategy strategy,
                                uint64_t min_morph_freq,
                                struct MtSegmenter **out);

/**
 * Segments `word`. `out_text` receives the morphemes separated by single
 * spaces (free with [`mt_string_free`]); `out_score` (may be NULL) receives
 * the log score.
 *
 * # Safety
 * `s` must be a live handle, `word` a NUL-terminated string, `out_text` valid.
 */
enum MtStatus mt_segmenter_segment(const struct MtSegmenter *s,
                                   const char *word,
                                   char **out_text,
                                   double *out_score);

/**
 * # Safety
 * `s` must be NULL or a handle from [`mt_segmenter_load`] not yet freed.
 */
void mt_segmenter_free(struct MtSegmenter *s);

/**
 * Evaluates a predictions file against a gold standard file.
 *
 * # Safety
 * Both paths must be NUL-terminated strings and `out` a valid pointer.
 */
enum MtStatus mt_evaluate_files(const char *predictions,
                                const char *gold,
                                struct MtEvalResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MORPHTRIE_H */
