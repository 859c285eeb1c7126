// Copyright 2026 The f2sketch Authors
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

#pragma once

#include <filesystem>
#include <string>

#include "f2sketch/streamgen.hpp"

namespace f2sketch {

// Binary stream file: u64 element count, then that many u64 ids, all
// little-endian.
void write_stream_binary(const std::filesystem::path& path, const Stream& stream);
/// Throws std::runtime_error on I/O failure, truncation or trailing bytes.
Stream read_stream_binary(const std::filesystem::path& path);

// Text stream file: one decimal id per line.
void write_stream_text(const std::filesystem::path& path, const Stream& stream);
Stream read_stream_text(const std::filesystem::path& path);

/// JSON sidecar describing a multi-level layout; see docs/formats.md.
std::string layout_to_json(const MultiLevelLayout& layout);
MultiLevelLayout layout_from_json(const std::string& text);

}  // namespace f2sketch
