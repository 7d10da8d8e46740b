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

/* Plain C client of libumtx. */

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "umtx/umtx.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

static void write_text(const char* path, const char* text) {
  FILE* f = fopen(path, "wb");
  if (!f) {
    fprintf(stderr, "cannot write %s\n", path);
    exit(2);
  }
  fputs(text, f);
  fclose(f);
}

static int log_calls = 0;
static void on_log(const char* message, void* user) {
  (void)message;
  (void)user;
  ++log_calls;
}

int main(int argc, char** argv) {
  char corpus[1024], arpa[1024], hyp[1024], ref[1024];
  const char* dir = argc > 1 ? argv[1] : ".";
  umtx_config* cfg = NULL;
  umtx_lm* lm = NULL;
  char* text = NULL;
  double lp = 0.0;
  int order = 0;

  EXPECT(strlen(umtx_version()) > 0);
  EXPECT(strcmp(umtx_status_name(UMTX_OK), "ok") == 0);

  /* Configuration */
  EXPECT(umtx_config_new(&cfg) == UMTX_OK);
  EXPECT(umtx_config_set(cfg, "embed.dim", "32") == UMTX_OK);
  EXPECT(umtx_config_get(cfg, "embed.dim", &text) == UMTX_OK);
  EXPECT(text && strcmp(text, "32") == 0);
  umtx_string_free(text);
  EXPECT(umtx_config_set(cfg, "embed.nope", "1") == UMTX_E_INVALID_ARGUMENT);
  EXPECT(strstr(umtx_last_error(), "embed.nope") != NULL);
  EXPECT(umtx_config_set(cfg, "embed.dim", "wide") == UMTX_E_INVALID_ARGUMENT);
  EXPECT(umtx_config_text(cfg, &text) == UMTX_OK);
  EXPECT(text && strncmp(text, "#umtx-config v1", 15) == 0);
  umtx_string_free(text);
  umtx_config_free(cfg);

  /* Null arguments are reported, not dereferenced. */
  EXPECT(umtx_config_new(NULL) == UMTX_E_INVALID_ARGUMENT);
  EXPECT(umtx_lm_load(NULL, &lm) == UMTX_E_INVALID_ARGUMENT);
  EXPECT(umtx_lm_load("/nonexistent/model.arpa", &lm) == UMTX_E_IO);

  /* Language model round trip */
  snprintf(corpus, sizeof corpus, "%s/capi_corpus.txt", dir);
  snprintf(arpa, sizeof arpa, "%s/capi_model.arpa", dir);
  write_text(corpus, "a b c\na b\nb c a\nc a b\n");
  text = NULL;
  EXPECT(umtx_lm_train(corpus, arpa, 3, &text) == UMTX_OK);
  EXPECT(text != NULL);
  umtx_string_free(text);
  EXPECT(umtx_lm_load(arpa, &lm) == UMTX_OK);
  EXPECT(umtx_lm_order(lm, &order) == UMTX_OK && order == 3);
  EXPECT(umtx_lm_score(lm, "a b", &lp) == UMTX_OK);
  EXPECT(lp < 0.0 && isfinite(lp));
  umtx_lm_free(lm);

  /* BLEU */
  snprintf(hyp, sizeof hyp, "%s/capi_hyp.txt", dir);
  snprintf(ref, sizeof ref, "%s/capi_ref.txt", dir);
  write_text(hyp, "the cat sat on the mat\n");
  write_text(ref, "the cat sat on the mat\n");
  EXPECT(umtx_bleu(hyp, ref, 1, &text) == UMTX_OK);
  EXPECT(text && strncmp(text, "bleu=100\n", 9) == 0);
  umtx_string_free(text);
  write_text(ref, "the cat sat\nextra line\n");
  EXPECT(umtx_bleu(hyp, ref, 1, &text) == UMTX_E_INVALID_ARGUMENT);

  /* Log callback */
  umtx_set_log_callback(on_log, NULL);
  umtx_set_log_callback(NULL, NULL);
  EXPECT(log_calls == 0);

  remove(corpus);
  remove(arpa);
  remove(hyp);
  remove(ref);
  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
