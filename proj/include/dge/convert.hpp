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

#include <string>

#include "dge/kg.hpp"

namespace dge {

// Raw dataset adapters. Each reads a directory of the dataset's original
// files and returns the user/object/tag graph; any rating or listen count
// counts as one interaction.
//
// movielens: ratings.dat (UserID::MovieID::Rating::Timestamp) plus either
//   tags.dat (UserID::MovieID::Tag::Timestamp) or tags.csv
//   (userId,movieId,tag,timestamp). Tags on movies without ratings are
//   dropped; tag text is trimmed and lower-cased.
// lastfm: hetrec2011 user_artists.dat, user_taggedartists.dat and (optional)
//   tags.dat for readable tag names.
// steam: user_items.tsv (user<TAB>item) and item_tags.tsv (item<TAB>tag).
KnowledgeGraph convert_movielens(const std::string& raw_dir);
KnowledgeGraph convert_lastfm(const std::string& raw_dir);
KnowledgeGraph convert_steam(const std::string& raw_dir);

/// Dispatches on "movielens", "lastfm" or "steam".
KnowledgeGraph convert_dataset(const std::string& dataset, const std::string& raw_dir);

}  // namespace dge
