// kws/io_util.h

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

#ifndef KWS_IO_UTIL_H_
#define KWS_IO_UTIL_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kws {

std::vector<std::string> SplitOn(const std::string& line, char sep);
std::vector<std::string> SplitWhitespace(const std::string& line);
std::string Trim(const std::string& s);

// Strict numeric parsing; throws DataError naming `what` on garbage.
int64_t ParseInt(const std::string& s, const std::string& what);
double ParseDouble(const std::string& s, const std::string& what);

// Reads all lines, dropping a trailing '\r' (tolerates CRLF input).
std::vector<std::string> ReadLines(const std::string& path);

void WriteFileAtomic(const std::string& path, const std::string& content);

// Little-endian binary primitives used by the feature and checkpoint
// containers. All fixed-width fields in those formats go through these.
void PutU32(std::ostream& os, uint32_t v);
void PutU64(std::ostream& os, uint64_t v);
void PutF32(std::ostream& os, float v);
uint32_t GetU32(std::istream& is, const std::string& what);
uint64_t GetU64(std::istream& is, const std::string& what);
float GetF32(std::istream& is, const std::string& what);
void PutF32Array(std::ostream& os, const float* data, size_t n);
void GetF32Array(std::istream& is, float* data, size_t n, const std::string& what);

// Fixed-point decimal formatting (hit files, reports).
std::string FormatFixed(double v, int decimals);

}  // namespace kws

#endif  // KWS_IO_UTIL_H_
