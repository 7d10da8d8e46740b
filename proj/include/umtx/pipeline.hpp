// Copyright 2026 The umtx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// End-to-end training pipeline over a workspace directory.
//
// Language A is the source side (data.mono_src), B the target side. Stage
// order: generate (cipher fixture only), preprocess, embed, map, table, lm,
// initial systems, back-translation iterations, select, translate, the
// three synthfix variants, eval.

#ifndef UMTX_PIPELINE_HPP_
#define UMTX_PIPELINE_HPP_

#include <string>
#include <vector>

#include "umtx/config.hpp"
#include "umtx/manifest.hpp"

namespace umtx {

struct PipelineOptions {
  std::string workspace;
  bool resume = true;        // reuse stages whose hash and digests match
  std::string stop_after;    // stage name; empty runs everything
  std::size_t max_new_chunks = 0;  // translate stage; 0: no limit
};

struct PipelineResult {
  PipelineManifest manifest;
  std::size_t ran = 0;
  std::size_t reused = 0;
  bool complete = false;
  std::vector<std::string> stage_names;  // stages of this run, in order
};

inline constexpr char kManifestFile[] = "manifest.txt";

PipelineResult RunPipeline(const PipelineConfig& config, const PipelineOptions& options);

// Workspace from the UMTX_WORKSPACE environment variable, or ".".
std::string DefaultWorkspace();

}  // namespace umtx

#endif  // UMTX_PIPELINE_HPP_
