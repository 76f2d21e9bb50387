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
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "dge/kg.hpp"
#include "dge/linalg.hpp"

namespace dge {

enum class GraphSide { kObject, kTag };

std::string_view side_name(GraphSide side);

/// Symmetric co-occurrence counts over one entity class. counts(i, j) is
/// the number of distinct middle entities linked to both i and j; the
/// diagonal is always empty.
struct CooccurrenceCounts {
  GraphSide side = GraphSide::kObject;
  std::size_t n = 0;
  SparseMatrix counts;
  std::vector<double> marginals;  // row sums of counts
  double total = 0.0;             // sum of all entries (both orientations)
};

/// How the SPPMI corpus size is taken from the counts.
enum class CorpusTotal {
  kSymmetric,  // D = sum over ordered pairs (i, j), i.e. both orientations
  kDirected,   // D = sum over unordered pairs, i.e. half the symmetric total
};

struct SppmiGraph {
  GraphSide side = GraphSide::kObject;
  double shift = 1.0;
  SparseMatrix weights;
};

struct NormalizedAdjacency {
  SparseMatrix matrix;
};

/// Counts over (middle, endpoint) pairs: entities i, j co-occur once per
/// distinct middle entity linked to both.
CooccurrenceCounts cooccurrence(GraphSide side, std::size_t num_endpoints,
                                std::size_t num_middle,
                                const std::vector<std::pair<EntityId, EntityId>>& middle_endpoint);

/// Objects sharing users (paths object <- user -> object).
CooccurrenceCounts object_cooccurrence(const KnowledgeGraph& kg);
/// Tags sharing objects (paths tag <- object -> tag), over the given
/// (object, tag) pairs so callers can restrict to a training split.
CooccurrenceCounts tag_cooccurrence(std::size_t num_objects, std::size_t num_tags,
                                    const std::vector<IdPair>& tagged);
CooccurrenceCounts tag_cooccurrence(const KnowledgeGraph& kg);

/// weight(i,j) = max(log(#(i,j) * D / (#(i) * #(j))) - log(shift), 0).
/// Entries whose weight is zero are dropped. Throws if shift <= 0.
SppmiGraph sppmi(const CooccurrenceCounts& counts, double shift,
                 CorpusTotal total = CorpusTotal::kSymmetric);

/// D^{-1/2} (A + I) D^{-1/2} with D the row sums of A + I.
NormalizedAdjacency normalize(const SppmiGraph& g);
NormalizedAdjacency normalize(const SparseMatrix& a);

/// Fraction of the n*n cells that carry a link.
double graph_density(const SparseMatrix& a);

// Coordinate text snapshot: one `i j weight` line per stored entry, and a
// JSON sidecar with side, k, n, nnz and density.
void write_graph(std::ostream& out, const SparseMatrix& m);
SparseMatrix read_graph(std::istream& in, std::size_t n);
void save_graph(const std::string& dir, const SppmiGraph& g);

}  // namespace dge
