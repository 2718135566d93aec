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

#include <random>
#include <sstream>

#include "error.hpp"
#include "fixtures.hpp"
#include "graph.hpp"
#include "graph_io.hpp"
#include "oracles.hpp"

namespace tkgr::kg {
namespace {

using testing::d;
using testing::GraphSpec;

TEST(GraphBuild, EmptyGraph) {
  const Graph g = Graph::build({}, {});
  EXPECT_EQ(g.entity_count(), 0u);
  EXPECT_EQ(g.triple_count(), 0u);
  EXPECT_TRUE(g.stocks().empty());
  EXPECT_FALSE(g.find("A"));
}

TEST(GraphBuild, MinimalCompanyAndArticle) {
  const Graph g = GraphSpec{}
                      .company("A")
                      .text("N", "2022-03-01")
                      .edge("A", "EXTRACTED_FROM", "N", "2022-03-01")
                      .build();
  EXPECT_EQ(g.triple_count(), 1u);
  const auto a = g.require("A");
  ASSERT_EQ(g.out_edges(a).size(), 1u);
  EXPECT_EQ(g.triple(g.out_edges(a)[0]).tail, "N");
}

TEST(GraphBuild, DanglingEndpoint) {
  try {
    GraphSpec{}.company("A").edge("A", "ACQUIRED", "X", "2022-01-01").build();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDanglingEndpoint);
    EXPECT_STREQ(e.what(), "X");
  }
}

TEST(GraphBuild, DuplicateUidAndInvariants) {
  try {
    GraphSpec{}.company("A").company("A").build();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateUid);
  }
  auto expect_violation = [](const GraphSpec& s) {
    try {
      s.build();
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvariantViolation);
    }
  };
  expect_violation(GraphSpec{}.company("A").company("B").edge(
      "A", "ACQUIRED", "B", "2022-02-01", "2022-01-01"));
  expect_violation(GraphSpec{}.company("A").edge("A", "ACQUIRED", "A", "2022-01-01"));
  expect_violation(GraphSpec{}.company("A").company("B").edge("A", "bad", "B",
                                                              "2022-01-01"));
  GraphSpec no_date;
  no_date.entities.push_back({"N", EntityKind::kTextSource, "n", std::nullopt,
                              std::nullopt, {}});
  expect_violation(no_date);
}

TEST(Snapshot, IntervalVisibility) {
  const Graph g = GraphSpec{}
                      .company("A")
                      .company("B")
                      .company("C")
                      .edge("A", "PARTNERED", "B", "2022-01-01")
                      .edge("A", "ACQUIRED", "C", "2022-01-01", "2022-02-01")
                      .build();
  const Snapshot s(g, d("2022-06-01"));
  EXPECT_TRUE(s.edge_visible(*g.find_triple(g.triple(0))));
  const auto a = g.require("A");
  const auto nb = s.neighbors(a, Direction::kOut);
  ASSERT_EQ(nb.size(), 1u);
  EXPECT_EQ(g.relation_name(nb[0].relation), "PARTNERED");
  // Closed interval includes both ends.
  const Snapshot end(g, d("2022-02-01"));
  EXPECT_EQ(end.neighbors(a, Direction::kOut).size(), 2u);
  const Snapshot before(g, d("2021-12-31"));
  EXPECT_TRUE(before.neighbors(a, Direction::kOut).empty());
}

TEST(Snapshot, FutureArticleHidesNodeAndEdges) {
  const Graph g = GraphSpec{}
                      .company("A")
                      .text("N", "2022-07-01")
                      .edge("A", "EXTRACTED_FROM", "N", "2022-01-01")
                      .build();
  const Snapshot s(g, d("2022-06-01"));
  EXPECT_FALSE(s.node_visible(g.require("N")));
  EXPECT_TRUE(s.neighbors("A", Direction::kBoth).empty());
  EXPECT_EQ(s.degree("A"), 0u);
  EXPECT_EQ(s.without_time_filter().neighbors("A", Direction::kBoth).size(), 1u);
}

TEST(Snapshot, NeighborOrdering) {
  const Graph g = GraphSpec{}
                      .company("H")
                      .company("Z")
                      .company("B")
                      .company("Y")
                      .edge("H", "SELLS", "B", "2022-01-01")
                      .edge("H", "ACQUIRED", "Z", "2022-01-02")
                      .edge("H", "ACQUIRED", "B", "2022-01-03")
                      .edge("Y", "PARTNERED", "H", "2022-01-01")
                      .build();
  const Snapshot s(g, d("2022-06-01"));
  std::vector<std::string> got;
  for (const auto& n : s.neighbors("H", Direction::kOut)) {
    got.push_back(std::string(g.relation_name(n.relation)) + ":" + g.entity(n.node).uid);
  }
  EXPECT_EQ(got, (std::vector<std::string>{"ACQUIRED:B", "ACQUIRED:Z", "SELLS:B"}));
  EXPECT_EQ(s.degree("H"), 4u);
  EXPECT_EQ(s.neighbors("H", Direction::kIn).size(), 1u);
  EXPECT_THROW(s.neighbors("Q", Direction::kOut), Error);
  EXPECT_EQ(s.degree("Y"), 1u);
}

TEST(Snapshot, DegreeOfExpiredOnlyEdgeIsZero) {
  const Graph g = GraphSpec{}
                      .company("A")
                      .company("B")
                      .edge("A", "ACQUIRED", "B", "2022-01-01", "2022-01-05")
                      .build();
  EXPECT_EQ(Snapshot(g, d("2022-03-01")).degree("A"), 0u);
  EXPECT_EQ(Snapshot(g, d("2022-01-03")).degree("A"), 1u);
}

TEST(Snapshot, Deletions) {
  const Graph g = GraphSpec{}
                      .company("A")
                      .company("B")
                      .company("C")
                      .company("D")
                      .text("N", "2022-01-01")
                      .edge("A", "PARTNERED", "B", "2022-01-01")
                      .edge("B", "PARTNERED", "C", "2022-01-01")
                      .edge("D", "PARTNERED", "B", "2022-01-01")
                      .edge("B", "EXTRACTED_FROM", "N", "2022-01-01")
                      .build();
  const Snapshot s(g, d("2022-02-01"));
  const auto identity = s.apply_deletions({}, {});
  for (TripleId t = 0; t < g.triple_count(); ++t) {
    EXPECT_EQ(identity.edge_visible(t), s.edge_visible(t));
  }

  const auto ef = *g.find_triple({"B", "EXTRACTED_FROM", "N", d("2022-01-01"), {}});
  const std::vector<TripleId> drop_ef{ef};
  const auto no_ef = s.apply_deletions(drop_ef, {});
  EXPECT_FALSE(no_ef.edge_visible(ef));
  EXPECT_EQ(no_ef.degree("N"), 0u);
  EXPECT_TRUE(s.edge_visible(ef));  // original untouched

  const std::vector<NodeId> drop_b{g.require("B")};
  const auto no_b = s.apply_deletions({}, drop_b);
  for (const char* n : {"A", "C", "D", "N"}) {
    EXPECT_EQ(no_b.degree(n), s.degree(n) - 1) << n;
  }
  EXPECT_FALSE(no_b.node_visible(g.require("B")));

  const std::vector<TripleId> bad{99};
  EXPECT_THROW(s.apply_deletions(bad, {}), Error);
}

TEST(Snapshot, VisibilityMatchesRawDefinition) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 50; ++round) {
    const auto raw = oracle::random_graph(rng, {});
    const Graph g = Graph::build(raw.entities, raw.triples);
    for (int off = -3; off <= 5; ++off) {
      const Date as_of = Date::from_ymd(2023, 3, 1) + off;
      const Snapshot s(g, as_of);
      for (TripleId t = 0; t < g.triple_count(); ++t) {
        EXPECT_EQ(s.edge_visible(t), oracle::triple_visible(raw, g.triple(t), as_of));
      }
      for (const auto& e : raw.entities) {
        std::size_t degree = 0;
        for (const auto& t : raw.triples) {
          if ((t.head == e.uid || t.tail == e.uid) &&
              oracle::triple_visible(raw, t, as_of)) {
            ++degree;
          }
        }
        EXPECT_EQ(s.degree(e.uid), degree);
      }
    }
  }
}

TEST(GraphIo, RoundTripAndReport) {
  GraphSpec spec;
  spec.company("A", "AAA").text("N", "2022-03-01", "Deal").node("E", EntityKind::kEvent);
  spec.edge("A", "EXTRACTED_FROM", "N", "2022-03-01")
      .edge("E", "IN_SECTOR", "A", "2022-01-01", "2022-12-31");
  std::stringstream ents, edges;
  write_entities_jsonl(ents, spec.entities);
  write_edges_jsonl(edges, spec.triples);
  const auto in = read_graph_streams(ents, edges);
  EXPECT_EQ(in.entities, spec.entities);
  EXPECT_EQ(in.triples, spec.triples);
  EXPECT_TRUE(in.report.rejected.empty());
  EXPECT_EQ(in.report.unregistered_relations, std::vector<std::string>{"IN_SECTOR"});
}

TEST(GraphIo, BadLinesAreRejectedWithLineNumbers) {
  std::stringstream ents(
      R"({"uid":"A","kind":"Company","name":"a"})"
      "\n"
      R"({"uid":"N","kind":"TextSource","name":"n"})"
      "\n"
      "not json\n"
      R"({"uid":"A","kind":"Company","name":"dup"})"
      "\n");
  std::stringstream edges(
      R"({"head":"A","relation":"ACQUIRED","tail":"Q","valid_from":"2022-01-01"})"
      "\n"
      R"({"head":"A","relation":"acq","tail":"A","valid_from":"2022-01-01"})"
      "\n");
  const auto in = read_graph_streams(ents, edges);
  EXPECT_EQ(in.entities.size(), 1u);
  EXPECT_TRUE(in.triples.empty());
  ASSERT_EQ(in.report.rejected.size(), 5u);
  EXPECT_EQ(in.report.rejected[0].line, 2u);
  EXPECT_EQ(in.report.rejected[1].line, 3u);
  EXPECT_EQ(in.report.rejected[2].line, 4u);
  EXPECT_EQ(in.report.rejected[3].file, "edges");
  EXPECT_NO_THROW(Graph::build(in.entities, in.triples));
}

TEST(GraphIo, MissingFileIsIoError) {
  try {
    read_graph_files("/nonexistent/e.jsonl", "/nonexistent/x.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
  }
}

}  // namespace
}  // namespace tkgr::kg
