#include <gtest/gtest.h>

#include <algorithm>
#include <unordered_set>
#include <vector>

#include "amcci/parallel.hpp"
#include "amcci/seed.hpp"

using namespace amcci;

TEST(Seed, Pure) {
  EXPECT_EQ(derive_seed(7, "rep", 3), derive_seed(7, "rep", 3));
  EXPECT_EQ(derive_seed(7, std::string_view("rep"), 3u), derive_seed(7, "rep", 3));
  EXPECT_EQ(derive_seed(0), mix64(0));
}

TEST(Seed, LabelsMatter) {
  EXPECT_NE(derive_seed(7, "rep", 3), derive_seed(7, "rep", 4));
  EXPECT_NE(derive_seed(7, "rep", 3), derive_seed(8, "rep", 3));
  EXPECT_NE(derive_seed(7, "rep", 3), derive_seed(7, "truth", 3));
  EXPECT_NE(derive_seed(7, "a", "b"), derive_seed(7, "b", "a"));
}

TEST(Seed, NoCollisionsOverManyPairs) {
  std::vector<std::uint64_t> seen;
  seen.reserve(1000000);
  for (std::uint64_t base = 0; base < 1000; ++base) {
    for (std::uint64_t i = 0; i < 1000; ++i) seen.push_back(derive_seed(base, "rep", i));
  }
  std::sort(seen.begin(), seen.end());
  EXPECT_EQ(std::adjacent_find(seen.begin(), seen.end()), seen.end());
}

TEST(Seed, Mix64IsInjectiveOnSample) {
  std::unordered_set<std::uint64_t> s;
  for (std::uint64_t i = 0; i < 100000; ++i) s.insert(mix64(i));
  EXPECT_EQ(s.size(), 100000u);
}

TEST(Seed, LabelHashKnownValue) {
  // FNV-1a 64-bit of the empty string is the offset basis.
  EXPECT_EQ(label_hash(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(label_hash("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Parallel, ForCoversEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}
