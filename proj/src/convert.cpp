// Copyright 2026 The DGE Authors
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

#include "dge/convert.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dge/error.hpp"

namespace dge {

namespace {

namespace fs = std::filesystem;

std::ifstream open_raw(const fs::path& p) {
  require(fs::exists(p), ErrorKind::kIo, "missing raw file: " + p.string());
  std::ifstream in(p, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open: " + p.string());
  return in;
}

std::vector<std::string> split_on(const std::string& line, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(line.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + sep.size();
  }
  return out;
}

// RFC 4180-style fields: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  return out;
}

std::string clean_tag(std::string s, bool lower) {
  for (char& c : s) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
    if (lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(' ');
  return s.substr(b, e - b + 1);
}

void for_each_line(std::istream& in, bool skip_header,
                   const std::function<void(const std::string&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (skip_header && line_no == 1)) continue;
    fn(line, line_no);
  }
}

[[noreturn]] void bad_line(const fs::path& p, std::size_t line_no) {
  fail(ErrorKind::kParse, p.string() + ":" + std::to_string(line_no) + ": malformed record");
}

}  // namespace

KnowledgeGraph convert_movielens(const std::string& raw_dir) {
  const fs::path dir(raw_dir);
  KnowledgeGraph kg;
  const fs::path ratings = dir / "ratings.dat";
  auto in = open_raw(ratings);
  std::unordered_set<std::string> rated;
  for_each_line(in, false, [&](const std::string& line, std::size_t n) {
    const auto f = split_on(line, "::");
    if (f.size() < 3) bad_line(ratings, n);
    kg.add(Relation::kInteract, "u" + f[0], "m" + f[1]);
    rated.insert(f[1]);
  });

  auto add_tag = [&](const std::string& movie, const std::string& raw_tag) {
    if (!rated.count(movie)) return;
    const auto tag = clean_tag(raw_tag, true);
    if (!tag.empty()) kg.add(Relation::kTaggedWith, "m" + movie, tag);
  };
  if (fs::exists(dir / "tags.dat")) {
    const fs::path tags = dir / "tags.dat";
    auto tin = open_raw(tags);
    for_each_line(tin, false, [&](const std::string& line, std::size_t n) {
      const auto f = split_on(line, "::");
      if (f.size() < 3) bad_line(tags, n);
      add_tag(f[1], f[2]);
    });
  } else if (fs::exists(dir / "tags.csv")) {
    const fs::path tags = dir / "tags.csv";
    auto tin = open_raw(tags);
    for_each_line(tin, true, [&](const std::string& line, std::size_t n) {
      const auto f = split_csv(line);
      if (f.size() < 3) bad_line(tags, n);
      add_tag(f[1], f[2]);
    });
  } else {
    fail(ErrorKind::kIo, "missing raw file: " + (dir / "tags.dat").string() + " (or tags.csv)");
  }
  return kg;
}

KnowledgeGraph convert_lastfm(const std::string& raw_dir) {
  const fs::path dir(raw_dir);
  KnowledgeGraph kg;
  const fs::path listens = dir / "user_artists.dat";
  auto in = open_raw(listens);
  for_each_line(in, true, [&](const std::string& line, std::size_t n) {
    const auto f = split_on(line, "\t");
    if (f.size() < 2) bad_line(listens, n);
    kg.add(Relation::kInteract, "u" + f[0], "a" + f[1]);
  });

  std::unordered_map<std::string, std::string> tag_names;
  if (fs::exists(dir / "tags.dat")) {
    const fs::path tags = dir / "tags.dat";
    auto tin = open_raw(tags);
    for_each_line(tin, true, [&](const std::string& line, std::size_t n) {
      const auto f = split_on(line, "\t");
      if (f.size() < 2) bad_line(tags, n);
      auto name = clean_tag(f[1], false);
      tag_names.emplace(f[0], name.empty() ? "t" + f[0] : name);
    });
  }
  const fs::path tagged = dir / "user_taggedartists.dat";
  auto tin = open_raw(tagged);
  for_each_line(tin, true, [&](const std::string& line, std::size_t n) {
    const auto f = split_on(line, "\t");
    if (f.size() < 3) bad_line(tagged, n);
    auto it = tag_names.find(f[2]);
    kg.add(Relation::kTaggedWith, "a" + f[1], it == tag_names.end() ? "t" + f[2] : it->second);
  });
  return kg;
}

KnowledgeGraph convert_steam(const std::string& raw_dir) {
  const fs::path dir(raw_dir);
  KnowledgeGraph kg;
  const fs::path items = dir / "user_items.tsv";
  auto in = open_raw(items);
  for_each_line(in, false, [&](const std::string& line, std::size_t n) {
    if (line.front() == '#') return;
    const auto f = split_on(line, "\t");
    if (f.size() < 2) bad_line(items, n);
    kg.add(Relation::kInteract, "u" + f[0], "g" + f[1]);
  });
  const fs::path tags = dir / "item_tags.tsv";
  auto tin = open_raw(tags);
  for_each_line(tin, false, [&](const std::string& line, std::size_t n) {
    if (line.front() == '#') return;
    const auto f = split_on(line, "\t");
    if (f.size() < 2) bad_line(tags, n);
    const auto tag = clean_tag(f[1], false);
    if (!tag.empty()) kg.add(Relation::kTaggedWith, "g" + f[0], tag);
  });
  return kg;
}

KnowledgeGraph convert_dataset(const std::string& dataset, const std::string& raw_dir) {
  if (dataset == "movielens") return convert_movielens(raw_dir);
  if (dataset == "lastfm") return convert_lastfm(raw_dir);
  if (dataset == "steam") return convert_steam(raw_dir);
  fail(ErrorKind::kInvalidArgument,
       "unknown dataset '" + dataset + "' (expected movielens, lastfm or steam)");
}

}  // namespace dge
