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

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "dge/checkpoint.hpp"
#include "dge/error.hpp"
#include "dge/eval.hpp"
#include "test_util.hpp"

namespace dge {
namespace {

Checkpoint trained_checkpoint() {
  SyntheticSpec spec;
  spec.clusters = 2;
  spec.objects_per_cluster = 6;
  spec.tags_per_cluster = 4;
  const auto d = generate_synthetic(spec);
  TrainConfig c;
  c.epochs = 3;
  c.object_hidden = c.tag_hidden = 5;
  c.output_dim = 3;
  Checkpoint ck;
  ck.model = train(d.kg, d.split.train, c);
  ck.object_names = d.kg.objects().names();
  ck.tag_names = d.kg.tags().names();
  return ck;
}

TEST(Checkpoint, SaveLoadIsBitExact) {
  const auto ck = trained_checkpoint();
  const auto dir = testing::temp_dir("ckpt");
  save_checkpoint(dir, ck);
  const auto back = load_checkpoint(dir);
  EXPECT_EQ(back.model.params, ck.model.params);
  EXPECT_EQ(back.model.z_object, ck.model.z_object);
  EXPECT_EQ(back.model.z_tag, ck.model.z_tag);
  EXPECT_EQ(back.model.loss_trace, ck.model.loss_trace);
  EXPECT_EQ(back.model.train_pairs, ck.model.train_pairs);
  EXPECT_EQ(back.model.steps, ck.model.steps);
  EXPECT_EQ(back.model.epochs_completed, 3u);
  EXPECT_EQ(to_json(back.model.config), to_json(ck.model.config));
  EXPECT_EQ(back.object_names, ck.object_names);
  EXPECT_EQ(back.tag_names, ck.tag_names);
}

TEST(Checkpoint, MissingDirectoryIsIoError) {
  try {
    load_checkpoint("/nonexistent/ckpt");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
}

TEST(Checkpoint, EmbeddingTsvReloadsBitIdentical) {
  const auto ck = trained_checkpoint();
  std::stringstream ss;
  write_embeddings_tsv(ss, ck.model.z_object, ck.object_names);
  std::string line;
  std::size_t r = 0;
  while (std::getline(ss, line)) {
    std::istringstream ls(line);
    std::string name;
    std::getline(ls, name, '\t');
    EXPECT_EQ(name, ck.object_names[r]);
    std::string field;
    std::size_t c = 0;
    while (std::getline(ls, field, '\t')) {
      EXPECT_EQ(std::strtod(field.c_str(), nullptr), ck.model.z_object(r, c));
      ++c;
    }
    EXPECT_EQ(c, ck.model.z_object.cols());
    ++r;
  }
  EXPECT_EQ(r, ck.model.z_object.rows());
  EXPECT_THROW(write_embeddings_tsv(ss, ck.model.z_object, {}), Error);
}

TEST(Checkpoint, LossCsvHasOneRowPerEpoch) {
  std::ostringstream os;
  write_loss_csv(os, {0.5, 0.25});
  EXPECT_EQ(os.str(), "epoch,mean_loss\n1,0.5\n2,0.25\n");
}

}  // namespace
}  // namespace dge
