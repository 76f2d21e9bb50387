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

#include "dge/dualgraph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dge/error.hpp"

namespace dge {

std::string_view side_name(GraphSide side) {
  return side == GraphSide::kObject ? "object" : "tag";
}

CooccurrenceCounts cooccurrence(GraphSide side, std::size_t num_endpoints,
                                std::size_t num_middle,
                                const std::vector<std::pair<EntityId, EntityId>>& middle_endpoint) {
  // Bipartite adjacency in both directions.
  std::vector<std::vector<EntityId>> by_middle(num_middle);
  std::vector<std::vector<EntityId>> by_endpoint(num_endpoints);
  for (const auto& [m, e] : middle_endpoint) {
    require(m < num_middle && e < num_endpoints, ErrorKind::kInvalidArgument,
            "cooccurrence: id out of range");
    by_middle[m].push_back(e);
    by_endpoint[e].push_back(m);
  }
  for (auto& v : by_middle) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  for (auto& v : by_endpoint) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }

  std::vector<Triplet> entries;
  std::vector<double> acc(num_endpoints, 0.0);
  std::vector<EntityId> touched;
  for (std::size_t i = 0; i < num_endpoints; ++i) {
    touched.clear();
    for (EntityId m : by_endpoint[i]) {
      for (EntityId j : by_middle[m]) {
        if (j == i) continue;
        if (acc[j] == 0.0) touched.push_back(j);
        acc[j] += 1.0;
      }
    }
    std::sort(touched.begin(), touched.end());
    for (EntityId j : touched) {
      entries.push_back({i, j, acc[j]});
      acc[j] = 0.0;
    }
  }

  CooccurrenceCounts c;
  c.side = side;
  c.n = num_endpoints;
  c.counts = SparseMatrix::from_triplets(num_endpoints, num_endpoints, std::move(entries));
  c.marginals.assign(num_endpoints, 0.0);
  for (std::size_t i = 0; i < num_endpoints; ++i) {
    for (double v : c.counts.row_values(i)) c.marginals[i] += v;
    c.total += c.marginals[i];
  }
  return c;
}

CooccurrenceCounts object_cooccurrence(const KnowledgeGraph& kg) {
  return cooccurrence(GraphSide::kObject, kg.num_objects(), kg.num_users(), kg.interact_pairs());
}

CooccurrenceCounts tag_cooccurrence(std::size_t num_objects, std::size_t num_tags,
                                    const std::vector<IdPair>& tagged) {
  return cooccurrence(GraphSide::kTag, num_tags, num_objects, tagged);
}

CooccurrenceCounts tag_cooccurrence(const KnowledgeGraph& kg) {
  return tag_cooccurrence(kg.num_objects(), kg.num_tags(), kg.tagged_pairs());
}

SppmiGraph sppmi(const CooccurrenceCounts& counts, double shift, CorpusTotal total) {
  require(shift > 0.0 && std::isfinite(shift), ErrorKind::kInvalidArgument,
          "sppmi: shift k must be positive");
  const double d = total == CorpusTotal::kSymmetric ? counts.total : counts.total / 2.0;
  const double log_shift = std::log(shift);
  std::vector<Triplet> entries;
  for (const auto& t : counts.counts.to_triplets()) {
    const double pmi = std::log(t.value * d / (counts.marginals[t.row] * counts.marginals[t.col]));
    const double w = pmi - log_shift;
    if (w > 0.0) entries.push_back({t.row, t.col, w});
  }
  SppmiGraph g;
  g.side = counts.side;
  g.shift = shift;
  g.weights = SparseMatrix::from_triplets(counts.n, counts.n, std::move(entries));
  return g;
}

NormalizedAdjacency normalize(const SparseMatrix& a) {
  require(a.rows() == a.cols(), ErrorKind::kInvalidArgument, "normalize: matrix is not square");
  const std::size_t n = a.rows();
  std::vector<Triplet> entries = a.to_triplets();
  for (std::size_t i = 0; i < n; ++i) entries.push_back({i, i, 1.0});
  SparseMatrix with_loops = SparseMatrix::from_triplets(n, n, std::move(entries), true);

  std::vector<double> inv_sqrt_deg(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double deg = 0.0;
    for (double v : with_loops.row_values(i)) deg += v;
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  std::vector<Triplet> scaled = with_loops.to_triplets();
  for (auto& t : scaled) t.value *= inv_sqrt_deg[t.row] * inv_sqrt_deg[t.col];
  return {SparseMatrix::from_triplets(n, n, std::move(scaled), true)};
}

NormalizedAdjacency normalize(const SppmiGraph& g) { return normalize(g.weights); }

double graph_density(const SparseMatrix& a) {
  const double cells = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  return cells > 0 ? static_cast<double>(a.nnz()) / cells : 0.0;
}

void write_graph(std::ostream& out, const SparseMatrix& m) {
  char buf[64];
  for (const auto& t : m.to_triplets()) {
    std::snprintf(buf, sizeof(buf), "%.17g", t.value);
    out << t.row << ' ' << t.col << ' ' << buf << '\n';
  }
}

SparseMatrix read_graph(std::istream& in, std::size_t n) {
  std::vector<Triplet> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Triplet t{};
    if (!(ls >> t.row >> t.col >> t.value)) {
      fail(ErrorKind::kParse, "graph line " + std::to_string(line_no) + ": expected 'i j weight'");
    }
    entries.push_back(t);
  }
  return SparseMatrix::from_triplets(n, n, std::move(entries));
}

void save_graph(const std::string& dir, const SppmiGraph& g) {
  std::filesystem::create_directories(dir);
  const std::string stem = std::string(dir) + "/" + std::string(side_name(g.side)) + "_graph";
  {
    std::ofstream out(stem + ".coo", std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::kIo, "cannot open for writing: " + stem + ".coo");
    write_graph(out, g.weights);
  }
  nlohmann::ordered_json meta;
  meta["side"] = side_name(g.side);
  meta["k"] = g.shift;
  meta["n"] = g.weights.rows();
  meta["nnz"] = g.weights.nnz();
  meta["density"] = graph_density(g.weights);
  std::ofstream out(stem + ".json", std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open for writing: " + stem + ".json");
  out << meta.dump(2) << '\n';
}

}  // namespace dge
