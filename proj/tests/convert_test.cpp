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

#include <fstream>
#include <sstream>

#include "dge/convert.hpp"
#include "dge/error.hpp"
#include "test_util.hpp"

namespace dge {
namespace {

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

std::string serialize(const KnowledgeGraph& kg) {
  std::ostringstream os;
  kg.write(os);
  return os.str();
}

TEST(ConvertMovielens, DatFormat) {
  const auto dir = testing::temp_dir("ml");
  write_file(dir + "/ratings.dat", "1::10::5::0\n1::11::3::0\n2::10::4::0\n");
  write_file(dir + "/tags.dat", "1::10::Funny::0\n2::10::funny ::0\n1::99::unrated::0\n2::11::Dark::0\n");
  const auto kg = convert_movielens(dir);
  EXPECT_EQ(kg.num_users(), 2u);
  EXPECT_EQ(kg.num_objects(), 2u);
  // lower-cased and trimmed, so both users' tags collapse; movie 99 has no ratings
  EXPECT_EQ(kg.tagged_pairs().size(), 2u);
  EXPECT_EQ(kg.tags().find("funny"), 0);
  EXPECT_EQ(kg.tags().find("unrated"), -1);
  EXPECT_EQ(serialize(convert_movielens(dir)), serialize(kg));
}

TEST(ConvertMovielens, CsvTagsWithQuotes) {
  const auto dir = testing::temp_dir("mlcsv");
  write_file(dir + "/ratings.dat", "1::10::5::0\n");
  write_file(dir + "/tags.csv", "userId,movieId,tag,timestamp\n1,10,\"dark, gritty\",0\n");
  const auto kg = convert_movielens(dir);
  EXPECT_EQ(kg.tags().name(0), "dark, gritty");
}

TEST(ConvertMovielens, MissingAndMalformed) {
  const auto dir = testing::temp_dir("mlbad");
  try {
    convert_movielens(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kIo);
  }
  write_file(dir + "/ratings.dat", "1::10\n");
  write_file(dir + "/tags.dat", "");
  try {
    convert_movielens(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
  }
}

TEST(ConvertLastfm, TagNamesResolved) {
  const auto dir = testing::temp_dir("lfm");
  write_file(dir + "/user_artists.dat", "userID\tartistID\tweight\n2\t51\t13883\n2\t52\t11690\n");
  write_file(dir + "/tags.dat", "tagID\ttagValue\n1\tmetal\n");
  write_file(dir + "/user_taggedartists.dat",
             "userID\tartistID\ttagID\tday\tmonth\tyear\n2\t51\t1\t1\t4\t2009\n2\t52\t7\t1\t4\t2009\n");
  const auto kg = convert_lastfm(dir);
  EXPECT_EQ(kg.num_objects(), 2u);
  EXPECT_EQ(kg.tags().names(), (std::vector<std::string>{"metal", "t7"}));
  EXPECT_EQ(serialize(convert_lastfm(dir)), serialize(kg));
}

TEST(ConvertSteam, TsvPairs) {
  const auto dir = testing::temp_dir("steam");
  write_file(dir + "/user_items.tsv", "# user\titem\n76561\t10\n76561\t20\n");
  write_file(dir + "/item_tags.tsv", "10\tAction\n20\tIndie\n20\tAction\n");
  const auto kg = convert_dataset("steam", dir);
  EXPECT_EQ(kg.num_users(), 1u);
  EXPECT_EQ(kg.tagged_pairs().size(), 3u);
  EXPECT_EQ(kg.tags().size(), 2u);
  EXPECT_THROW(convert_dataset("imdb", dir), Error);
}

}  // namespace
}  // namespace dge
