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

#ifndef UMTX_COMMON_HPP_
#define UMTX_COMMON_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace umtx {

// Error kinds map one-to-one onto the status codes of the C API.
enum class ErrorKind { kInvalidArgument = 1, kIo = 2, kFormat = 3, kRuntime = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string& what);

// Tokens of one sentence. Tokens are non-empty and contain no whitespace.
using Tokens = std::vector<std::string>;

// ---------------------------------------------------------------------------
// UTF-8 helpers. Invalid bytes decode to U+FFFD.

std::vector<char32_t> DecodeUtf8(std::string_view s);
std::string EncodeUtf8(std::u32string_view cps);
void AppendUtf8(char32_t cp, std::string* out);

bool IsUnicodeSpace(char32_t cp);
bool IsUnicodePunct(char32_t cp);
char32_t ToLowerCp(char32_t cp);
char32_t ToUpperCp(char32_t cp);
bool IsUpperCp(char32_t cp);
// Latin letter with its diacritic removed ("í" -> "i"); other code points unchanged.
char32_t StripDiacriticCp(char32_t cp);

std::string ToLower(std::string_view s);
bool StartsWithUpper(std::string_view s);

// ---------------------------------------------------------------------------
// String utilities.

std::vector<std::string> SplitWhitespace(std::string_view s);
std::vector<std::string> Split(std::string_view s, std::string_view delim);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);
std::string_view Trim(std::string_view s);
bool ParseDouble(std::string_view s, double* out);
bool ParseInt(std::string_view s, long long* out);

// Shortest decimal text that reads back to exactly the same double.
std::string FormatDouble(double v);

// ---------------------------------------------------------------------------
// Deterministic random numbers. Distributions are implemented here rather than
// through <random> distributions, whose output is library-specific.

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t NextU64();
  // Uniform in [0, 1).
  double Uniform();
  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n);
  double Gaussian();

  template <typename T>
  void Shuffle(std::vector<T>* v) {
    for (std::size_t i = v->size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(Below(i));
      std::swap((*v)[i - 1], (*v)[j]);
    }
  }

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// FNV-1a 64-bit digest, rendered as 16 hex digits.

class Digest {
 public:
  void Update(std::string_view bytes);
  std::string Hex() const;

 private:
  std::uint64_t h_ = 1469598103934665603ULL;
};

std::string DigestString(std::string_view bytes);
std::string DigestFile(const std::string& path);

// ---------------------------------------------------------------------------
// File helpers.

std::vector<std::string> ReadLines(const std::string& path);
void WriteLines(const std::string& path, const std::vector<std::string>& lines);
std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view content);
bool FileExists(const std::string& path);

// ---------------------------------------------------------------------------
// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries never
// depend on the worker count, so per-chunk results merged in chunk order are
// identical for any number of workers.
void ParallelChunks(std::size_t n, std::size_t chunk, int workers,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Diagnostic sink for warnings; defaults to stderr.
void SetLogSink(std::function<void(const std::string&)> sink);
void LogWarning(const std::string& msg);
void LogInfo(const std::string& msg);
void SetVerbose(bool verbose);

}  // namespace umtx

#endif  // UMTX_COMMON_HPP_
