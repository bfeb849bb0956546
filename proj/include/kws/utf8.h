// kws/utf8.h

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

#ifndef KWS_UTF8_H_
#define KWS_UTF8_H_

#include <string>
#include <vector>

namespace kws {

// A grapheme is one Unicode scalar value throughout the toolkit.
using Grapheme = char32_t;

// Decodes UTF-8 into scalar values. Throws DataError on malformed input.
std::vector<Grapheme> Utf8Decode(const std::string& s);

std::string Utf8Encode(const std::vector<Grapheme>& cps);
std::string Utf8Encode(Grapheme cp);

}  // namespace kws

#endif  // KWS_UTF8_H_
