// Copyright 2026 The scpir Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "scpir/audit.hpp"

namespace scpir {
namespace {

AuditConfig single_group(std::size_t n, std::size_t k, Engine engine) {
  AuditConfig c;
  c.databases = n;
  c.messages = k;
  c.t = Rational(static_cast<std::int64_t>(n));
  c.kind = PlacementKind::kPartition;
  c.engine = engine;
  return c;
}

// Direct oracle for one full-storage group: every permutation tuple and start,
// each database's view rendered as its sorted wire lines.
Rational oracle_tv(std::size_t n, std::size_t k, Engine engine, Mutation mutation) {
  const auto m = static_cast<std::size_t>(subpacketization(n, k, engine));
  std::vector<std::vector<std::map<std::string, std::int64_t>>> dist(
      n, std::vector<std::map<std::string, std::int64_t>>(k));
  std::int64_t total = 0;
  std::vector<std::size_t> base(m);
  for (std::size_t i = 0; i < m; ++i) base[i] = i;
  std::vector<std::vector<std::size_t>> perms;
  do perms.push_back(base);
  while (std::next_permutation(base.begin(), base.end()));
  std::vector<std::size_t> pick(k, 0);
  GroupContext ctx;
  for (std::size_t d = 0; d < n; ++d) ctx.databases.push_back(d);
  const auto starts = engine == Engine::kB ? n : 1;
  for (;;) {
    for (std::size_t s = 0; s < starts; ++s) {
      EngineRandomness rnd;
      for (const auto p : pick) rnd.permutations.push_back(perms[p]);
      rnd.start = s;
      ++total;
      for (std::size_t theta = 0; theta < k; ++theta) {
        const auto plan = plan_group(engine, ctx, k, theta, rnd, mutation);
        std::vector<std::vector<std::string>> lines(n);
        for (const auto& q : plan.queries) lines[q.target].push_back(format_query(q.target, q));
        for (std::size_t d = 0; d < n; ++d) {
          std::sort(lines[d].begin(), lines[d].end());
          std::string view;
          for (const auto& l : lines[d]) view += l + ";";
          ++dist[d][theta][view];
        }
      }
    }
    std::size_t i = 0;
    while (i < k && ++pick[i] == perms.size()) pick[i++] = 0;
    if (i == k) break;
  }
  Rational worst(0);
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) {
        std::map<std::string, std::int64_t> diff = dist[d][a];
        for (const auto& [key, v] : dist[d][b]) diff[key] -= v;
        std::int64_t sum = 0;
        for (const auto& [_, v] : diff) sum += v < 0 ? -v : v;
        worst = std::max(worst, Rational(sum, 2 * total));
      }
    }
  }
  return worst;
}

TEST(ExhaustiveAuditTest, EngineBTwoDatabases) {
  const auto v = audit_exhaustive(single_group(2, 2, Engine::kB));
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.max_tv_exact, Rational(0));
  EXPECT_EQ(v.outcomes, 8u);
  EXPECT_EQ(oracle_tv(2, 2, Engine::kB, Mutation::kNone), Rational(0));
}

TEST(ExhaustiveAuditTest, EngineBThreeDatabases) {
  const auto v = audit_exhaustive(single_group(3, 2, Engine::kB));
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.max_tv_exact, Rational(0));
  EXPECT_EQ(v.outcomes, 108u);
  EXPECT_EQ(v.per_database.size(), 3u);
}

TEST(ExhaustiveAuditTest, EngineATwoDatabases) {
  const auto v = audit_exhaustive(single_group(2, 2, Engine::kA));
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(oracle_tv(2, 2, Engine::kA, Mutation::kNone), Rational(0));
}

TEST(ExhaustiveAuditTest, EngineBThreeMessages) {
  EXPECT_TRUE(audit_exhaustive(single_group(2, 3, Engine::kB)).passed);
}

TEST(ExhaustiveAuditTest, DesiredOnlyLeaksEverything) {
  auto c = single_group(2, 2, Engine::kB);
  c.mutation = Mutation::kDesiredOnly;
  const auto v = audit_exhaustive(c);
  EXPECT_FALSE(v.passed);
  EXPECT_EQ(v.max_tv_exact, Rational(1));
}

TEST(ExhaustiveAuditTest, MutantsFailAndMatchTheOracle) {
  for (const auto mutation : {Mutation::kNoPermutation, Mutation::kAsymmetricTypes,
                              Mutation::kDesiredOnly, Mutation::kSkipUndesiredSums}) {
    for (const auto engine : {Engine::kA, Engine::kB}) {
      const std::size_t k = mutation == Mutation::kSkipUndesiredSums ? 3 : 2;
      if (engine == Engine::kA && k == 3) continue;
      auto c = single_group(2, k, engine);
      c.mutation = mutation;
      const auto v = audit_exhaustive(c);
      EXPECT_FALSE(v.passed) << to_string(mutation) << " " << to_string(engine);
      EXPECT_EQ(v.max_tv_exact, oracle_tv(2, k, engine, mutation)) << to_string(mutation);
    }
  }
}

TEST(ExhaustiveAuditTest, AcrossGroupsOfACyclicPlacement) {
  AuditConfig c;
  c.databases = 3;
  c.messages = 2;
  c.t = Rational(2);
  c.kind = PlacementKind::kCyclic;
  c.engine = Engine::kB;
  const auto v = audit_exhaustive(c);
  EXPECT_TRUE(v.passed);
  c.mutation = Mutation::kNoPermutation;
  EXPECT_FALSE(audit_exhaustive(c).passed);
}

TEST(ExhaustiveAuditTest, SingleMessageIsTriviallyPrivate) {
  const auto v = audit_exhaustive(single_group(3, 1, Engine::kA));
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.max_tv_exact, Rational(0));
}

TEST(ExhaustiveAuditTest, RefusesOverBudget) {
  auto c = single_group(4, 3, Engine::kA);
  try {
    audit_exhaustive(c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExceeded);
  }
  c = single_group(2, 2, Engine::kB);
  c.budget = 4;
  EXPECT_THROW(audit_exhaustive(c), Error);
}

TEST(StatisticalAuditTest, EngineAFourDatabases) {
  AuditConfig c;
  c.databases = 4;
  c.messages = 3;
  c.t = Rational(2);
  c.kind = PlacementKind::kPartition;
  c.engine = Engine::kA;
  c.trials = 2000;
  c.workers = 2;
  const auto v = audit_statistical(c);
  EXPECT_TRUE(v.passed) << v.max_tv_estimate;
  EXPECT_LT(v.max_tv_estimate, 0.05);
  EXPECT_EQ(v.trials, 2000u);
}

TEST(StatisticalAuditTest, SingleMessageIsZero) {
  AuditConfig c;
  c.databases = 3;
  c.messages = 1;
  c.t = Rational(2);
  c.kind = PlacementKind::kCyclic;
  c.trials = 1000;
  const auto v = audit_statistical(c);
  EXPECT_TRUE(v.passed);
  EXPECT_EQ(v.max_tv_estimate, 0.0);
}

TEST(StatisticalAuditTest, MutantsAreSeparated) {
  for (const auto mutation : {Mutation::kNoPermutation, Mutation::kAsymmetricTypes,
                              Mutation::kDesiredOnly, Mutation::kSkipUndesiredSums}) {
    AuditConfig c;
    c.databases = 5;
    c.messages = 3;
    c.t = Rational(3);
    c.kind = PlacementKind::kCyclic;
    c.engine = Engine::kB;
    c.mutation = mutation;
    c.trials = 1000;
    const auto v = audit_statistical(c);
    EXPECT_FALSE(v.passed) << to_string(mutation) << " " << v.max_tv_estimate;
  }
}

TEST(StatisticalAuditTest, IndependentOfWorkerCount) {
  AuditConfig c;
  c.databases = 5;
  c.messages = 2;
  c.t = Rational(3);
  c.kind = PlacementKind::kCyclic;
  c.trials = 1000;
  c.workers = 1;
  const auto one = audit_statistical(c);
  c.workers = 3;
  const auto three = audit_statistical(c);
  EXPECT_EQ(one.max_tv_estimate, three.max_tv_estimate);
  for (std::size_t d = 0; d < 5; ++d) {
    EXPECT_EQ(one.per_database[d].tv_estimate, three.per_database[d].tv_estimate);
  }
}

// More samples pull the estimate toward the exact value of zero.
TEST(StatisticalAuditTest, ConvergesTowardExhaustive) {
  auto c = single_group(3, 2, Engine::kB);
  c.trials = 1000;
  const auto coarse = audit_statistical(c).max_tv_estimate;
  c.trials = 16000;
  const auto fine = audit_statistical(c).max_tv_estimate;
  EXPECT_EQ(audit_exhaustive(c).max_tv_exact, Rational(0));
  EXPECT_LT(fine, coarse);
}

}  // namespace
}  // namespace scpir
