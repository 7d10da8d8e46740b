/* Copyright 2026 The umtx Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of libumtx.
 *
 * Every call returns a umtx_status; on failure umtx_last_error() holds the
 * message for the calling thread. Strings handed out by the library are
 * released with umtx_string_free. File operations return their metrics as
 * "key=value" lines through an optional char** (NULL to ignore).
 */

#ifndef UMTX_UMTX_H_
#define UMTX_UMTX_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define UMTX_API __declspec(dllexport)
#else
#define UMTX_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum umtx_status {
  UMTX_OK = 0,
  UMTX_E_INVALID_ARGUMENT = 1,
  UMTX_E_IO = 2,
  UMTX_E_FORMAT = 3,
  UMTX_E_RUNTIME = 4,
  UMTX_E_INTERNAL = 5
} umtx_status;

UMTX_API const char* umtx_version(void);
UMTX_API const char* umtx_last_error(void);
UMTX_API const char* umtx_status_name(umtx_status s);
UMTX_API void umtx_string_free(char* s);

/* Diagnostics go to stderr unless a callback is installed. */
typedef void (*umtx_log_fn)(const char* message, void* user);
UMTX_API void umtx_set_log_callback(umtx_log_fn fn, void* user);
UMTX_API void umtx_set_verbose(int verbose);

/* ---- language models */

typedef struct umtx_lm umtx_lm;
UMTX_API umtx_status umtx_lm_load(const char* arpa_path, umtx_lm** out);
/* log10 probability of a space-separated sentence, </s> included. */
UMTX_API umtx_status umtx_lm_score(const umtx_lm* lm, const char* sentence, double* log10_prob);
UMTX_API umtx_status umtx_lm_order(const umtx_lm* lm, int* order);
UMTX_API void umtx_lm_free(umtx_lm* lm);

/* ---- phrase tables */

typedef struct umtx_ptable umtx_ptable;
UMTX_API umtx_status umtx_ptable_load(const char* path, umtx_ptable** out);
UMTX_API umtx_status umtx_ptable_pairs(const umtx_ptable* t, size_t* pairs);
UMTX_API void umtx_ptable_free(umtx_ptable* t);

/* ---- decoding */

typedef struct umtx_decode_options {
  int beam_size;         /* 100 */
  int distortion_limit;  /* 6; 0 monotone, negative unlimited */
  int nbest;             /* 1 */
  int table_limit;       /* 20 */
  double unknown_prob;   /* 1e-7 */
  int workers;           /* 1 */
} umtx_decode_options;
UMTX_API void umtx_decode_options_init(umtx_decode_options* o);

typedef struct umtx_decoder umtx_decoder;
/* The decoder keeps references to table and lm; free it first. weights_path
 * may be NULL for the default weights. */
UMTX_API umtx_status umtx_decoder_create(const umtx_ptable* table, const umtx_lm* lm, const char* weights_path,
                                         const umtx_decode_options* options, umtx_decoder** out);
UMTX_API umtx_status umtx_decoder_translate(const umtx_decoder* d, const char* sentence, char** translation);
/* Moses-style "i ||| text ||| features ||| score" lines. */
UMTX_API umtx_status umtx_decoder_nbest(const umtx_decoder* d, const char* sentence, char** nbest);
UMTX_API void umtx_decoder_free(umtx_decoder* d);

/* ---- file operations */

typedef struct umtx_generate_options {
  const char* out_dir;
  uint64_t cipher_seed; /* 7 */
  uint64_t seed;        /* 1 */
  size_t vocab_size;    /* 400 */
  size_t successors;    /* 6 */
  size_t names;         /* 40 */
  size_t numbers;       /* 20 */
  double comma_rate;    /* 0.04 */
  size_t min_len;       /* 4 */
  size_t max_len;       /* 14 */
  double reorder_rate;  /* 0 */
  size_t mono_size;     /* 20000 */
  size_t dev_size;      /* 300 */
  size_t test_size;     /* 300 */
} umtx_generate_options;
UMTX_API void umtx_generate_options_init(umtx_generate_options* o);
UMTX_API umtx_status umtx_generate(const umtx_generate_options* o, char** metrics);

typedef struct umtx_preprocess_options {
  const char* input;
  const char* output;
  const char* truecase_model;  /* read, or written when train_truecaser */
  int train_truecaser;         /* 0 */
  int truecase;                /* 1 */
  int length_filter;           /* 1 */
  size_t min_len;              /* 3 */
  size_t max_len;              /* 80 */
  const char* langid_model;    /* optional */
  const char* keep_lang;       /* optional */
  int workers;                 /* 1 */
} umtx_preprocess_options;
UMTX_API void umtx_preprocess_options_init(umtx_preprocess_options* o);
UMTX_API umtx_status umtx_preprocess(const umtx_preprocess_options* o, char** metrics);

/* Character n-gram language identifier from labelled tokenized corpora. */
UMTX_API umtx_status umtx_langid_train(const char* const* labels, const char* const* corpus_paths, size_t n,
                                       int order, const char* output);

typedef struct umtx_embed_options {
  const char* corpus;
  const char* output;
  int window;         /* 5 */
  int dim;            /* 300 */
  int negatives;      /* 10 */
  int epochs;         /* 5 */
  double lr;          /* 0.025 */
  double min_lr;      /* 1e-4 */
  size_t unigrams;    /* 200000 */
  size_t bigrams;     /* 400000 */
  size_t trigrams;    /* 400000 */
  uint64_t seed;      /* 1 */
  int workers;        /* 1; more than one is not bit-reproducible */
} umtx_embed_options;
UMTX_API void umtx_embed_options_init(umtx_embed_options* o);
UMTX_API umtx_status umtx_embed(const umtx_embed_options* o, char** metrics);

typedef struct umtx_map_options {
  const char* src_vec;
  const char* tgt_vec;
  const char* out_src;
  const char* out_tgt;
  const char* dict_out;      /* optional */
  const char* seed_method;   /* "identical" | "numerals" | "frequency" | "file" */
  const char* seed_file;     /* with "file" */
  size_t seed_size;          /* 0 */
  const char* retrieval;     /* "csls" | "nn" */
  int csls_k;                /* 10 */
  int max_iters;             /* 50 */
  double tol;                /* 1e-6 */
  int workers;               /* 1 */
} umtx_map_options;
UMTX_API void umtx_map_options_init(umtx_map_options* o);
UMTX_API umtx_status umtx_map(const umtx_map_options* o, char** metrics);

typedef struct umtx_table_options {
  /* Induction from mapped embeddings... */
  const char* src_vec;
  const char* tgt_vec;
  size_t k;                /* 100 */
  double temperature;      /* 0.1 */
  int softmax_full_vocab;  /* 0 */
  /* ...or extraction from an aligned bitext. */
  const char* bitext;
  const char* alignment;
  int max_phrase_len;      /* 3 */
  const char* output;
  int workers;             /* 1 */
} umtx_table_options;
UMTX_API void umtx_table_options_init(umtx_table_options* o);
UMTX_API umtx_status umtx_table(const umtx_table_options* o, char** metrics);

UMTX_API umtx_status umtx_lm_train(const char* corpus, const char* output, int order, char** metrics);

typedef struct umtx_align_options {
  const char* bitext;
  const char* output;
  int iterations;              /* 5 */
  double lambda;               /* 4 */
  double p0;                   /* 0.08 */
  const char* symmetrization;  /* "grow-diag-final-and" */
  int workers;                 /* 1 */
} umtx_align_options;
UMTX_API void umtx_align_options_init(umtx_align_options* o);
UMTX_API umtx_status umtx_align(const umtx_align_options* o, char** metrics);

typedef struct umtx_translate_options {
  const char* table;
  const char* lm;
  const char* weights;       /* optional */
  const char* input;
  const char* output;
  const char* nbest_output;  /* optional */
  umtx_decode_options decode;
} umtx_translate_options;
UMTX_API void umtx_translate_options_init(umtx_translate_options* o);
UMTX_API umtx_status umtx_translate_file(const umtx_translate_options* o, char** metrics);

typedef struct umtx_tune_options {
  const char* table;
  const char* lm;
  const char* initial_weights;  /* optional */
  const char* dev_src;
  const char* dev_ref;
  const char* output;
  const char* trace_output;     /* optional */
  int rounds;                   /* 10 */
  int nbest;                    /* 100 */
  int restarts;                 /* 20 */
  double min_improvement;       /* 0.01 */
  uint64_t seed;                /* 1 */
  int cased;                    /* 0 */
  size_t max_sentences;         /* 0: all */
  umtx_decode_options decode;
} umtx_tune_options;
UMTX_API void umtx_tune_options_init(umtx_tune_options* o);
UMTX_API umtx_status umtx_tune(const umtx_tune_options* o, char** metrics);

typedef struct umtx_backtranslate_options {
  const char* current_table;
  const char* current_lm;
  const char* current_weights;  /* optional */
  int current_distortion_limit; /* 0 */
  const char* mono;
  size_t subset;                /* 0: all */
  uint64_t seed;                /* 1 */
  const char* reverse_lm;
  const char* tune_src;         /* optional */
  const char* tune_ref;
  size_t tune_max_sentences;    /* 0 */
  const char* dev_src;          /* optional */
  const char* dev_ref;
  const char* out_synthetic;
  const char* out_table;
  const char* out_weights;
  int iterations;               /* 5, aligner */
  const char* symmetrization;   /* "grow-diag-final-and" */
  int max_phrase_len;           /* 3 */
  int rounds;                   /* 10 */
  int nbest;                    /* 100 */
  int restarts;                 /* 20 */
  double min_improvement;       /* 0.01 */
  int cased;                    /* 0 */
  umtx_decode_options decode;   /* reverse system; distortion 6 */
} umtx_backtranslate_options;
UMTX_API void umtx_backtranslate_options_init(umtx_backtranslate_options* o);
UMTX_API umtx_status umtx_backtranslate(const umtx_backtranslate_options* o, char** metrics);

typedef struct umtx_fix_options {
  const char* input;   /* "src ||| tgt" lines; the synthetic side is tgt */
  const char* output;
  int strip_untranslated;
  const char* profile;  /* "czech" or literal letters */
  const char* unk;      /* "unk" */
  int reorder;
  int reorder_window;   /* 5 */
  uint64_t seed;        /* 1 */
  int ner;
  const char* spans;      /* optional */
  const char* gazetteer;  /* optional */
  const char* policy;     /* optional */
  const char* alignment;  /* optional */
  int lev_threshold;      /* 3 */
  int full_deletion;      /* 0 */
  const char* log_output; /* optional */
  int quotes;
} umtx_fix_options;
UMTX_API void umtx_fix_options_init(umtx_fix_options* o);
UMTX_API umtx_status umtx_fix(const umtx_fix_options* o, char** metrics);

/* Report as "key=value" lines. */
UMTX_API umtx_status umtx_bleu(const char* hyp_path, const char* ref_path, int cased, char** report);

/* ---- pipeline */

typedef struct umtx_config umtx_config;
UMTX_API umtx_status umtx_config_new(umtx_config** out);
UMTX_API umtx_status umtx_config_load(const char* path, umtx_config** out);
UMTX_API umtx_status umtx_config_set(umtx_config* c, const char* key, const char* value);
UMTX_API umtx_status umtx_config_get(const umtx_config* c, const char* key, char** value);
UMTX_API umtx_status umtx_config_text(const umtx_config* c, char** text);
UMTX_API void umtx_config_free(umtx_config* c);

typedef struct umtx_pipeline_options {
  const char* workspace;  /* NULL: $UMTX_WORKSPACE or "." */
  int resume;             /* 1 */
  const char* stop_after; /* optional stage name */
  size_t max_new_chunks;  /* 0 */
} umtx_pipeline_options;
UMTX_API void umtx_pipeline_options_init(umtx_pipeline_options* o);

typedef struct umtx_pipeline_summary {
  size_t stages_ran;
  size_t stages_reused;
  int complete;
} umtx_pipeline_summary;
UMTX_API umtx_status umtx_pipeline_run(const umtx_config* c, const umtx_pipeline_options* o,
                                       umtx_pipeline_summary* summary);

#ifdef __cplusplus
}
#endif

#endif /* UMTX_UMTX_H_ */
