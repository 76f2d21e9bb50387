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

#include "dge/kg.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "dge/error.hpp"

namespace dge {

EntityId EntityIndex::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  const auto id = static_cast<EntityId>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::int64_t EntityIndex::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  return it == ids_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

std::string_view relation_token(Relation r) {
  return r == Relation::kInteract ? "interact" : "tagged_with";
}

bool KnowledgeGraph::add(Relation rel, std::string_view head, std::string_view tail) {
  if (rel == Relation::kInteract) {
    const EntityId u = users_.intern(head);
    const EntityId o = objects_.intern(tail);
    return add_ids(rel, u, o);
  }
  const EntityId o = objects_.intern(head);
  const EntityId t = tags_.intern(tail);
  return add_ids(rel, o, t);
}

bool KnowledgeGraph::add_ids(Relation rel, EntityId head, EntityId tail) {
  const bool interact = rel == Relation::kInteract;
  const std::size_t head_n = interact ? users_.size() : objects_.size();
  const std::size_t tail_n = interact ? objects_.size() : tags_.size();
  require(head < head_n && tail < tail_n, ErrorKind::kInvalidArgument,
          "KnowledgeGraph::add_ids: id out of range");
  auto& seen = interact ? interact_seen_ : tagged_seen_;
  auto& pairs = interact ? interact_ : tagged_;
  if (!seen.insert(key(head, tail)).second) {
    ++duplicates_;
    return false;
  }
  order_.emplace_back(rel, pairs.size());
  pairs.emplace_back(head, tail);
  return true;
}

void KnowledgeGraph::write(std::ostream& out) const {
  for (const auto& [rel, idx] : order_) {
    if (rel == Relation::kInteract) {
      const auto& [u, o] = interact_[idx];
      out << users_.name(u) << '\t' << relation_token(rel) << '\t' << objects_.name(o) << '\n';
    } else {
      const auto& [o, t] = tagged_[idx];
      out << objects_.name(o) << '\t' << relation_token(rel) << '\t' << tags_.name(t) << '\n';
    }
  }
}

void KnowledgeGraph::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open for writing: " + path);
  write(out);
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed: " + path);
}

KnowledgeGraph read_triples(std::istream& in, const std::string& source) {
  KnowledgeGraph kg;
  std::string line;
  std::size_t line_no = 0;
  std::size_t triples = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) +
                                  ": expected 'head<TAB>relation<TAB>tail'");
    }
    std::string_view view(line);
    const auto head = view.substr(0, t1);
    const auto rel = view.substr(t1 + 1, t2 - t1 - 1);
    const auto tail = view.substr(t2 + 1);
    if (head.empty() || tail.empty()) {
      fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) + ": empty entity name");
    }
    Relation r;
    if (rel == "interact") {
      r = Relation::kInteract;
    } else if (rel == "tagged_with") {
      r = Relation::kTaggedWith;
    } else {
      fail(ErrorKind::kParse, source + ":" + std::to_string(line_no) + ": unknown relation '" +
                                  std::string(rel) + "'");
    }
    kg.add(r, head, tail);
    ++triples;
  }
  require(triples > 0, ErrorKind::kData, source + ": no triples");
  return kg;
}

KnowledgeGraph load_triples(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open: " + path);
  return read_triples(in, path);
}

KgStats compute_stats(const KnowledgeGraph& kg) {
  KgStats s;
  s.users = kg.num_users();
  s.objects = kg.num_objects();
  s.tags = kg.num_tags();
  s.interact_edges = kg.interact_pairs().size();
  s.tagged_edges = kg.tagged_pairs().size();
  const double uo = static_cast<double>(s.users) * static_cast<double>(s.objects);
  const double ot = static_cast<double>(s.objects) * static_cast<double>(s.tags);
  s.interact_density = uo > 0 ? static_cast<double>(s.interact_edges) / uo : 0.0;
  s.tagged_density = ot > 0 ? static_cast<double>(s.tagged_edges) / ot : 0.0;
  s.duplicates = kg.duplicates();
  return s;
}

std::vector<std::vector<EntityId>> tag_sets(std::size_t num_objects,
                                            const std::vector<IdPair>& tagged) {
  std::vector<std::vector<EntityId>> sets(num_objects);
  for (const auto& [o, t] : tagged) sets.at(o).push_back(t);
  for (auto& s : sets) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }
  return sets;
}

std::vector<std::vector<EntityId>> tag_sets(const KnowledgeGraph& kg) {
  return tag_sets(kg.num_objects(), kg.tagged_pairs());
}

}  // namespace dge
