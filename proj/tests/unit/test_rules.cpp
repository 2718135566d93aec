/*
 * Copyright 2026 The tkgr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <sstream>

#include "error.hpp"
#include "fixtures.hpp"
#include "rules.hpp"

namespace tkgr::rules {
namespace {

using market::Direction;
using testing::d;
using testing::GraphSpec;

Rule rule(Body body, Direction dir, std::size_t support, std::size_t hits) {
  return {std::move(body), dir, support, hits,
          static_cast<double>(hits) / static_cast<double>(support)};
}

std::vector<kg::Snapshot> snapshots(const kg::Graph& g, std::vector<Date> dates) {
  std::vector<kg::Snapshot> out;
  for (Date x : dates) out.emplace_back(g, x);
  return out;
}

TEST(EnumerateBodies, SingleEdge) {
  const auto g = GraphSpec{}
                     .company("A", "AAA")
                     .company("Z")
                     .edge("A", "INVESTED_IN", "Z", "2022-01-01")
                     .build();
  const auto snaps = snapshots(g, {d("2022-02-01")});
  const std::vector<kg::NodeId> stocks{g.require("A")};
  const auto bodies = enumerate_bodies(snaps, stocks, {});
  ASSERT_EQ(bodies.size(), 1u);
  const auto& [body, instances] = *bodies.begin();
  EXPECT_EQ(body, Body{"INVESTED_IN"});
  ASSERT_EQ(instances.size(), 1u);
  EXPECT_EQ(instances[0].stock, g.require("A"));
  EXPECT_EQ(instances[0].date, d("2022-02-01"));
}

TEST(EnumerateBodies, ChainStopsAtArticle) {
  const auto g = GraphSpec{}
                     .company("A", "AAA")
                     .company("Z")
                     .text("N", "2022-01-01")
                     .company("W")
                     .edge("A", "INVESTED_IN", "Z", "2022-01-01")
                     .edge("Z", "EXTRACTED_FROM", "N", "2022-01-01")
                     .edge("N", "MENTIONS", "W", "2022-01-01")
                     .build();
  const auto snaps = snapshots(g, {d("2022-02-01")});
  const std::vector<kg::NodeId> stocks{g.require("A")};
  const auto bodies = enumerate_bodies(snaps, stocks, {});
  std::vector<Body> keys;
  for (const auto& [b, _] : bodies) keys.push_back(b);
  EXPECT_EQ(keys, (std::vector<Body>{{"INVESTED_IN"}, {"INVESTED_IN", "EXTRACTED_FROM"}}));
}

TEST(EnumerateBodies, ExpiredEdgeContributesNoInstance) {
  const auto g = GraphSpec{}
                     .company("A", "AAA")
                     .company("B")
                     .company("C")
                     .edge("A", "PARTNERED", "B", "2022-01-01")
                     .edge("B", "SELLS", "C", "2022-01-01", "2022-01-01")
                     .build();
  const auto snaps = snapshots(g, {d("2022-01-01"), d("2022-01-02")});
  const std::vector<kg::NodeId> stocks{g.require("A")};
  const auto bodies = enumerate_bodies(snaps, stocks, {});
  EXPECT_EQ(bodies.at(Body{"PARTNERED"}).size(), 2u);
  const auto& two = bodies.at(Body{"PARTNERED", "SELLS"});
  ASSERT_EQ(two.size(), 1u);
  EXPECT_EQ(two[0].date, d("2022-01-01"));
}

TEST(Mine, ConfidenceAndSupportThresholds) {
  const auto g = GraphSpec{}
                     .company("A", "AAA")
                     .company("Z")
                     .company("B", "BBB")
                     .company("Y")
                     .edge("A", "INVESTED_IN", "Z", "2022-01-01")
                     .edge("B", "SUED", "Y", "2022-01-01")
                     .build();
  std::vector<Date> dates;
  std::vector<market::Label> labels;
  for (int i = 0; i < 10; ++i) {
    const Date x = d("2022-02-01") + i;
    dates.push_back(x);
    labels.push_back({"AAA", x, 1, 0.0, i < 7 ? Direction::kUp : Direction::kDown});
    if (i < 3) labels.push_back({"BBB", x, 1, 0.0, Direction::kDown});
  }
  const auto snaps = snapshots(g, dates);
  const std::vector<kg::NodeId> stocks{g.require("A"), g.require("B")};
  const auto bank = mine(snaps, stocks, market::LabelTable(labels, 0), {});
  ASSERT_EQ(bank.size(), 1u);
  const Rule& r = bank.rules()[0];
  EXPECT_EQ(r.body, Body{"INVESTED_IN"});
  EXPECT_EQ(r.direction, Direction::kUp);
  EXPECT_EQ(r.support, 10u);
  EXPECT_EQ(r.hits, 7u);
  EXPECT_DOUBLE_EQ(r.confidence, 0.7);
}

TEST(Mine, EmptyLabels) {
  const auto g = GraphSpec{}.company("A", "AAA").build();
  const auto snaps = snapshots(g, {d("2022-01-01")});
  const std::vector<kg::NodeId> stocks{0};
  try {
    mine(snaps, stocks, market::LabelTable(), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyLabelTable);
  }
}

TEST(Mine, UnaryBodiesSwitch) {
  const auto g = GraphSpec{}
                     .company("A", "AAA")
                     .company("Z")
                     .company("Q")
                     .edge("A", "INVESTED_IN", "Z", "2022-01-01")
                     .edge("Z", "SELLS", "Q", "2022-01-01")
                     .build();
  std::vector<Date> dates;
  std::vector<market::Label> labels;
  for (int i = 0; i < 6; ++i) {
    dates.push_back(d("2022-02-01") + i);
    labels.push_back({"AAA", dates.back(), 1, 0.0, Direction::kUp});
  }
  const auto snaps = snapshots(g, dates);
  const std::vector<kg::NodeId> stocks{g.require("A")};
  MiningConfig cfg;
  // With unary bodies the one-hop rule subsumes the two-hop one.
  auto bank = mine(snaps, stocks, market::LabelTable(labels, 0), cfg);
  ASSERT_EQ(bank.size(), 1u);
  EXPECT_EQ(bank.rules()[0].body.size(), 1u);
  cfg.unary_bodies = false;
  bank = mine(snaps, stocks, market::LabelTable(labels, 0), cfg);
  ASSERT_EQ(bank.size(), 1u);
  EXPECT_EQ(bank.rules()[0].body, (Body{"INVESTED_IN", "SELLS"}));
}

TEST(Prune, SubsumptionExamples) {
  const MiningConfig cfg;
  auto out = prune({rule({"A"}, Direction::kUp, 10, 8), rule({"A", "B"}, Direction::kUp, 10, 7)},
                   cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].body, Body{"A"});

  out = prune({rule({"A"}, Direction::kUp, 20, 13), rule({"A", "B"}, Direction::kUp, 10, 9)},
              cfg);
  EXPECT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].body, (Body{"A", "B"}));

  out = prune({rule({"A"}, Direction::kUp, 10, 8), rule({"A", "B"}, Direction::kDown, 10, 7)},
              cfg);
  EXPECT_EQ(out.size(), 2u);

  // Equal confidence: the longer rule adds nothing.
  out = prune({rule({"A"}, Direction::kUp, 10, 7), rule({"A", "B", "C"}, Direction::kUp, 20, 14)},
              cfg);
  EXPECT_EQ(out.size(), 1u);
}

TEST(RuleBank, CanonicalOrderAndLookups) {
  const RuleBank bank({rule({"A", "B"}, Direction::kUp, 10, 7),
                       rule({"A"}, Direction::kDown, 10, 9),
                       rule({"C", "D", "E"}, Direction::kUp, 10, 7),
                       rule({"A", "B"}, Direction::kDown, 20, 14)});
  ASSERT_EQ(bank.size(), 4u);
  EXPECT_EQ(bank.rules()[0].body, Body{"A"});
  EXPECT_EQ(bank.rules()[1].support, 20u);
  EXPECT_EQ(bank.rules()[2].body, (Body{"A", "B"}));
  EXPECT_EQ(bank.rules()[3].body, (Body{"C", "D", "E"}));

  EXPECT_EQ(bank.prefix_matches({}).size(), 4u);
  const Body ab{"A", "B"};
  EXPECT_EQ(bank.prefix_matches(ab).size(), 2u);
  EXPECT_EQ(bank.exact_matches(ab).size(), 2u);
  const Body a{"A"};
  EXPECT_EQ(bank.prefix_matches(a).size(), 3u);
  EXPECT_EQ(bank.shortest_extension(a), 1u);
  const Body c{"C"};
  EXPECT_EQ(bank.shortest_extension(c), 3u);
  const Body long_prefix{"A", "B", "C", "D", "E"};
  EXPECT_TRUE(bank.prefix_matches(long_prefix).empty());
  EXPECT_FALSE(bank.is_prefix(long_prefix));
  EXPECT_FALSE(bank.shortest_extension(long_prefix));
}

TEST(RuleBank, RejectsDuplicates) {
  EXPECT_THROW(RuleBank({rule({"A"}, Direction::kUp, 10, 7), rule({"A"}, Direction::kUp, 12, 9)}),
               Error);
  EXPECT_THROW(RuleBank({rule({"A"}, Direction::kUp, 3, 7)}), Error);
  EXPECT_THROW(RuleBank({rule({"A", "B", "C", "D", "E"}, Direction::kUp, 10, 7)}), Error);
}

TEST(BankIo, RoundTrips) {
  std::stringstream empty;
  save_bank(empty, RuleBank{});
  EXPECT_EQ(load_bank(empty), RuleBank{});

  const RuleBank bank({rule({"A", "B"}, Direction::kUp, 10, 7),
                       rule({"A"}, Direction::kDown, 3, 2)});
  std::stringstream first;
  const nlohmann::ordered_json meta{{"config_hash", "abc"}, {"seed", 1}};
  save_bank(first, bank, &meta);
  const std::string text = first.str();
  const auto back = load_bank(first);
  EXPECT_EQ(back, bank);
  std::stringstream second;
  save_bank(second, back, &meta);
  EXPECT_EQ(second.str(), text);
}

TEST(BankIo, MalformedLineNumber) {
  std::stringstream in(
      R"({"body":["A"],"direction":"UP","support":10,"hits":7,"confidence":0.7})"
      "\n"
      R"({"body":["A"],"direction":"SIDEWAYS","support":10,"hits":7,"confidence":0.7})"
      "\n");
  try {
    load_bank(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace tkgr::rules
