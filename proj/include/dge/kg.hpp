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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace dge {

using EntityId = std::uint32_t;

/// Name <-> dense id bijection for one entity class. Ids follow first
/// appearance.
class EntityIndex {
 public:
  EntityId intern(std::string_view name);
  /// Returns the id or -1 if the name is unknown.
  std::int64_t find(std::string_view name) const;
  const std::string& name(EntityId id) const { return names_.at(id); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }

  friend bool operator==(const EntityIndex& a, const EntityIndex& b) {
    return a.names_ == b.names_;
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, EntityId> ids_;
};

enum class Relation : std::uint8_t { kInteract, kTaggedWith };

std::string_view relation_token(Relation r);

/// (first, second) is (user, object) for Interact and (object, tag) for
/// TaggedWith.
using IdPair = std::pair<EntityId, EntityId>;

struct KgStats {
  std::size_t users = 0;
  std::size_t objects = 0;
  std::size_t tags = 0;
  std::size_t interact_edges = 0;
  std::size_t tagged_edges = 0;
  double interact_density = 0.0;
  double tagged_density = 0.0;
  std::size_t duplicates = 0;
};

class KnowledgeGraph {
 public:
  /// Adds a triple by names. Returns false if the pair was already present
  /// (the duplicate counter is bumped instead).
  bool add(Relation rel, std::string_view head, std::string_view tail);

  /// Adds a pair by ids; entities must already exist.
  bool add_ids(Relation rel, EntityId head, EntityId tail);

  EntityIndex& users() noexcept { return users_; }
  EntityIndex& objects() noexcept { return objects_; }
  EntityIndex& tags() noexcept { return tags_; }
  const EntityIndex& users() const noexcept { return users_; }
  const EntityIndex& objects() const noexcept { return objects_; }
  const EntityIndex& tags() const noexcept { return tags_; }

  std::size_t num_users() const noexcept { return users_.size(); }
  std::size_t num_objects() const noexcept { return objects_.size(); }
  std::size_t num_tags() const noexcept { return tags_.size(); }

  const std::vector<IdPair>& interact_pairs() const noexcept { return interact_; }
  const std::vector<IdPair>& tagged_pairs() const noexcept { return tagged_; }
  std::size_t duplicates() const noexcept { return duplicates_; }

  /// Writes every distinct triple in ingestion order; reloading reproduces
  /// identical ids and pair lists.
  void write(std::ostream& out) const;
  void save(const std::string& path) const;

  friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
    return a.users_ == b.users_ && a.objects_ == b.objects_ && a.tags_ == b.tags_ &&
           a.interact_ == b.interact_ && a.tagged_ == b.tagged_ && a.order_ == b.order_;
  }

 private:
  static std::uint64_t key(EntityId a, EntityId b) {
    return (static_cast<std::uint64_t>(a) << 32) | b;
  }

  EntityIndex users_;
  EntityIndex objects_;
  EntityIndex tags_;
  std::vector<IdPair> interact_;
  std::vector<IdPair> tagged_;
  // Ingestion order across both relations: (relation, index into its list).
  std::vector<std::pair<Relation, std::size_t>> order_;
  std::unordered_set<std::uint64_t> interact_seen_;
  std::unordered_set<std::uint64_t> tagged_seen_;
  std::size_t duplicates_ = 0;
};

/// Parses `head <TAB> relation <TAB> tail` lines; `#` lines and blank lines
/// are skipped. Throws kParse with the offending line number.
KnowledgeGraph read_triples(std::istream& in, const std::string& source = "<stream>");
KnowledgeGraph load_triples(const std::string& path);

KgStats compute_stats(const KnowledgeGraph& kg);

/// Sorted tag ids per object over the given (object, tag) pairs; every one
/// of `num_objects` objects gets an entry, possibly empty.
std::vector<std::vector<EntityId>> tag_sets(std::size_t num_objects,
                                            const std::vector<IdPair>& tagged);
std::vector<std::vector<EntityId>> tag_sets(const KnowledgeGraph& kg);

}  // namespace dge
