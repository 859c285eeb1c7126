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

#include "f2sketch/stream_io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace f2sketch {
namespace {

void put_le(std::ofstream& out, std::uint64_t value) {
  char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(bytes, 8);
}

bool get_le(std::ifstream& in, std::uint64_t& value) {
  unsigned char bytes[8];
  if (!in.read(reinterpret_cast<char*>(bytes), 8)) return false;
  value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[i];
  return true;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_stream_binary(const std::filesystem::path& path, const Stream& stream) {
  auto out = open_out(path, std::ios::binary);
  put_le(out, stream.size());
  for (ElementId x : stream) put_le(out, x);
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

Stream read_stream_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t count = 0;
  if (!get_le(in, count)) throw std::runtime_error(path.string() + ": missing length prefix");
  const auto file_size = std::filesystem::file_size(path);
  if (file_size != 8 + 8 * count) {
    throw std::runtime_error(path.string() + ": length prefix " + std::to_string(count) +
                             " disagrees with file size " + std::to_string(file_size));
  }
  Stream stream(count);
  for (auto& x : stream) {
    if (!get_le(in, x)) throw std::runtime_error(path.string() + ": truncated");
  }
  return stream;
}

void write_stream_text(const std::filesystem::path& path, const Stream& stream) {
  auto out = open_out(path, std::ios::out);
  for (ElementId x : stream) out << x << '\n';
  if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

Stream read_stream_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Stream stream;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    ElementId x = 0;
    const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), x);
    if (ec != std::errc() || ptr != line.data() + line.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_number) + ": not an element id");
    }
    stream.push_back(x);
  }
  return stream;
}

std::string layout_to_json(const MultiLevelLayout& layout) {
  nlohmann::ordered_json doc;
  doc["schema"] = "f2sketch.multilevel_layout";
  doc["version"] = 1;
  doc["n"] = layout.n;
  doc["epsilon"] = layout.epsilon;
  doc["levels"] = nlohmann::ordered_json::array();
  for (const auto& lv : layout.levels) {
    nlohmann::ordered_json level;
    level["level"] = lv.level;
    level["t"] = lv.t;
    level["bucket_count"] = lv.bucket_count;
    level["bucket_length"] = lv.bucket_length;
    level["super_width"] = lv.super_width;
    level["supers_per_active"] = lv.supers_per_active;
    level["active_buckets"] = nlohmann::ordered_json::array();
    for (const auto& b : lv.active) {
      level["active_buckets"].push_back({{"index", b.index}, {"begin", b.begin}, {"end", b.end}});
    }
    doc["levels"].push_back(std::move(level));
  }
  if (layout.planted) {
    const auto& p = *layout.planted;
    doc["planted"] = {{"level", p.level},
                      {"label", std::string(to_string(p.instance.label))},
                      {"t", p.instance.t},
                      {"d", p.instance.d},
                      {"k", p.instance.k},
                      {"exam_base", p.instance.exam},
                      {"suffix_begin", p.suffix_begin},
                      {"suffix_length", p.suffix_length}};
  } else {
    doc["planted"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

MultiLevelLayout layout_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (doc.at("schema") != "f2sketch.multilevel_layout" || doc.at("version") != 1) {
    throw std::runtime_error("not a version 1 multilevel layout document");
  }
  MultiLevelLayout layout;
  layout.n = doc.at("n").get<std::uint64_t>();
  layout.epsilon = doc.at("epsilon").get<double>();
  for (const auto& level : doc.at("levels")) {
    LevelLayout lv;
    lv.level = level.at("level").get<unsigned>();
    lv.t = level.at("t").get<std::uint64_t>();
    lv.bucket_count = level.at("bucket_count").get<std::uint64_t>();
    lv.bucket_length = level.at("bucket_length").get<std::uint64_t>();
    lv.super_width = level.at("super_width").get<std::uint64_t>();
    lv.supers_per_active = level.at("supers_per_active").get<std::uint64_t>();
    for (const auto& b : level.at("active_buckets")) {
      lv.active.push_back({b.at("index").get<std::uint64_t>(), b.at("begin").get<std::uint64_t>(),
                           b.at("end").get<std::uint64_t>()});
    }
    layout.levels.push_back(std::move(lv));
  }
  // The planted instance's sets are not part of the sidecar; only its summary is restored.
  if (const auto& p = doc.at("planted"); !p.is_null()) {
    PlantedInstance planted;
    planted.level = p.at("level").get<unsigned>();
    planted.suffix_begin = p.at("suffix_begin").get<std::uint64_t>();
    planted.suffix_length = p.at("suffix_length").get<std::uint64_t>();
    auto& inst = planted.instance;
    inst.n = layout.n / 4;
    inst.t = p.at("t").get<std::uint64_t>();
    inst.d = p.at("d").get<std::uint64_t>();
    inst.k = p.at("k").get<std::uint64_t>();
    inst.epsilon = layout.epsilon;
    inst.label = parse_label(p.at("label").get<std::string>());
    inst.exam = p.at("exam_base").get<ElementId>();
    layout.planted = std::move(planted);
  }
  return layout;
}

}  // namespace f2sketch
