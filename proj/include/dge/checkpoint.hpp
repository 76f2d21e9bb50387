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

#include <iosfwd>
#include <string>
#include <vector>

#include "dge/trainer.hpp"

namespace dge {

/// A trained model plus the entity names needed to use it standalone.
struct Checkpoint {
  TrainedModel model;
  std::vector<std::string> object_names;
  std::vector<std::string> tag_names;
};

// Checkpoint directory layout:
//   header.json        dims, encoder kinds, config, seed, epoch
//   W_O0.bin ... W_T1.bin, Z_O.bin, Z_T.bin   matrix snapshots
//   loss.csv           epoch,mean_loss
//   objects.txt, tags.txt   one name per line, in id order
//   train_pairs.tsv    object_id <TAB> tag_id
void save_checkpoint(const std::string& dir, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& dir);

void write_loss_csv(std::ostream& out, const std::vector<double>& trace);

/// `name <TAB> v1 ... vd` per row.
void write_embeddings_tsv(std::ostream& out, const DenseMatrix& z,
                          const std::vector<std::string>& names);

}  // namespace dge
