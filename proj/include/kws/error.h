// kws/error.h

// Copyright 2026  kwsearch contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef KWS_ERROR_H_
#define KWS_ERROR_H_

#include <stdexcept>
#include <string>

namespace kws {

// Bad run configuration (unknown key, missing required key, invalid value).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or inconsistent input data (unreadable file, malformed record,
// mismatched dataset pieces). The CLI maps this to exit code 3.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally invalid binary container: wrong magic or version.
struct FormatError : DataError {
  explicit FormatError(const std::string& msg) : DataError(msg) {}
};

// Container with a valid header but a short or inconsistent payload.
struct CorruptionError : DataError {
  explicit CorruptionError(const std::string& msg) : DataError(msg) {}
};

// A symbol outside the model's grapheme vocabulary.
struct VocabularyError : DataError {
  explicit VocabularyError(const std::string& msg) : DataError(msg) {}
};

}  // namespace kws

#endif  // KWS_ERROR_H_
