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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "scpir/audit.hpp"
#include "scpir/session.hpp"

namespace {

using namespace scpir;

struct Outcome {
  bool passed = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok && passed) detail = what;
    passed = passed && ok;
  }
};

// Rates of the sessions from criteria 1-4, re-checked by criterion 9.
struct RateRecord {
  std::vector<Rational> alpha;
  Rational rate;
  std::vector<Rational> group_rates;
};
std::vector<RateRecord> g_sessions;

SessionTranscript session(const PlacementSpec& p, std::size_t k, Engine engine, std::size_t theta,
                          std::uint64_t seed) {
  const auto length = min_message_length_general(p, k, engine);
  const auto lib = build_library(k, static_cast<std::size_t>(length), seed);
  auto tx = run_session(lib, p, engine, theta, seed);
  g_sessions.push_back({p.alpha, tx.rate(), tx.group_rates()});
  return tx;
}

std::map<std::size_t, std::map<std::size_t, int>> shapes(const SessionTranscript& tx) {
  std::map<std::size_t, std::map<std::size_t, int>> out;
  for (const auto& plan : tx.plans) {
    for (const auto& q : plan.queries) ++out[plan.database_of(q)][q.addends.size()];
  }
  return out;
}

Outcome partition_example() {
  Outcome o;
  for (std::size_t theta = 0; theta < 3; ++theta) {
    const auto tx = session(partition_placement(4, 2), 3, Engine::kA, theta, 1 + theta);
    o.check(tx.length == 16, "L=" + std::to_string(tx.length));
    o.check(tx.downloads == 28, "D=" + std::to_string(tx.downloads));
    o.check(tx.rate() == Rational(4, 7), "rate=" + to_string(tx.rate()));
    const auto s = shapes(tx);
    o.check(s.size() == 4, "not every database was queried");
    for (const auto& [db, sizes] : s) {
      o.check(sizes == std::map<std::size_t, int>{{1, 3}, {2, 3}, {3, 1}},
              "database " + std::to_string(db + 1) + " query shape differs");
    }
  }
  o.detail = o.passed ? "L=16 D=28 rate=4/7, 3+3+1 queries per database" : o.detail;
  return o;
}

Outcome cyclic_example() {
  Outcome o;
  for (std::size_t theta = 0; theta < 2; ++theta) {
    const auto tx = session(cyclic_placement(5, 3), 2, Engine::kB, theta, 11 + theta);
    o.check(tx.length == 15, "L=" + std::to_string(tx.length));
    o.check(tx.downloads == 20, "D=" + std::to_string(tx.downloads));
    o.check(tx.rate() == Rational(3, 4), "rate=" + to_string(tx.rate()));
    const auto s = shapes(tx);
    o.check(s.size() == 5, "not every database was queried");
    for (const auto& [db, sizes] : s) {
      int total = 0;
      for (const auto& [_, c] : sizes) total += c;
      o.check(total == 4, "database " + std::to_string(db + 1) + " answered " + std::to_string(total));
    }
  }
  o.detail = o.passed ? "L=15 D=20 rate=3/4, 4 queries per database" : o.detail;
  return o;
}

Outcome capacity_grid() {
  Outcome o;
  int sessions = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t t = 1; t <= n; ++t) {
      for (std::size_t k = 1; k <= 4; ++k) {
        const auto expected = capacity_integer_t(static_cast<std::int64_t>(t), k);
        Rational closed(0);
        for (std::size_t i = 0; i < k; ++i) closed += Rational(1, ipow(static_cast<std::int64_t>(t), static_cast<std::int64_t>(i)));
        o.check(expected == 1 / closed, "closed form mismatch");
        std::vector<std::pair<PlacementSpec, Engine>> cases{{cyclic_placement(n, t), Engine::kB}};
        if (n % t == 0) cases.emplace_back(partition_placement(n, t), Engine::kA);
        for (const auto& [p, engine] : cases) {
          const auto tx = session(p, k, engine, (n * t + k) % k, n * 1000 + t * 10 + k);
          ++sessions;
          o.check(tx.rate() == expected, "N=" + std::to_string(n) + " t=" + std::to_string(t) +
                                             " K=" + std::to_string(k) + " " + std::string(to_string(p.kind)) +
                                             " rate " + to_string(tx.rate()));
        }
      }
    }
  }
  if (o.passed) o.detail = std::to_string(sessions) + " sessions at capacity";
  return o;
}

Outcome non_integer_t() {
  Outcome o;
  int sessions = 0;
  for (std::size_t n = 2; n <= 6; ++n) {
    for (std::size_t k = 2; k <= 3; ++k) {
      for (const auto& t : {Rational(3, 2), Rational(5, 2), Rational(7, 2)}) {
        if (t > static_cast<std::int64_t>(n)) continue;
        const auto p = mixed_placement(n, t);
        Rational lo(0);
        Rational hi(0);
        for (std::size_t f = 0; f < p.group_count(); ++f) {
          const auto size = static_cast<std::int64_t>(p.groups[f].size());
          if (size == floor(t)) lo += p.alpha[f];
          else if (size == ceil(t)) hi += p.alpha[f];
          else o.check(false, "group size outside {floor t, ceil t}");
        }
        o.check(lo == Rational(ceil(t)) - t && hi == t - Rational(floor(t)),
                "condition sums " + to_string(lo) + ", " + to_string(hi));
        for (std::size_t theta = 0; theta < k; ++theta) {
          const auto tx = session(p, k, Engine::kB, theta, n * 100 + k * 10 + theta);
          ++sessions;
          o.check(tx.rate() == capacity_general_t(t, k, n),
                  "N=" + std::to_string(n) + " t=" + to_string(t) + " rate " + to_string(tx.rate()));
        }
      }
    }
  }
  if (o.passed) o.detail = std::to_string(sessions) + " mixed sessions at the interpolated capacity";
  return o;
}

Outcome message_length() {
  Outcome o;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::size_t t = 1; t <= n; ++t) {
      for (std::size_t k = 1; k <= 4; ++k) {
        const auto ours = min_message_length(n, t, k);
        o.check(ours == static_cast<std::int64_t>(n) * ipow(static_cast<std::int64_t>(t), static_cast<std::int64_t>(k - 1)),
                "closed form");
        o.check(min_message_length_general(cyclic_placement(n, t), k, Engine::kB) == ours, "cyclic+B");
        if (n % t == 0) {
          o.check(min_message_length_general(partition_placement(n, t), k, Engine::kA) == ours, "partition+A");
        }
        o.check(ours <= baseline_message_length(n, t, k), "exceeds baseline");
      }
    }
  }
  const Rational r1(min_message_length(4, 2, 3), baseline_message_length(4, 2, 3));
  const Rational r2(min_message_length(5, 3, 2), baseline_message_length(5, 3, 2));
  o.check(r1 == Rational(16, 48) && r2 == Rational(15, 90), "ratios " + to_string(r1) + ", " + to_string(r2));
  if (o.passed) o.detail = "N t^(K-1) everywhere; ratios 16/48 and 15/90";
  return o;
}

Outcome decode_property() {
  Outcome o;
  SplitMix64 rng(20261017);
  std::size_t bit_errors = 0;
  int sessions = 0;
  while (sessions < 1000) {
    const auto n = static_cast<std::size_t>(1 + rng.below(6));
    const auto k = static_cast<std::size_t>(1 + rng.below(3));
    const auto den = static_cast<std::int64_t>(1 + rng.below(2));
    const auto num = static_cast<std::int64_t>(den + rng.below(static_cast<std::uint64_t>(den) * n - den + 1));
    const Rational t(num, den);
    const auto p = default_placement(n, t);
    const auto engine = rng.below(2) == 0 ? Engine::kB : resolve_engine(Engine::kAuto, p.kind);
    const auto base = min_message_length_general(p, k, engine);
    if (base > 4000) continue;
    const auto length = static_cast<std::size_t>(base * static_cast<std::int64_t>(1 + rng.below(2)));
    const auto seed = rng.next();
    const auto lib = build_library(k, length, seed);
    const auto theta = static_cast<std::size_t>(rng.below(k));
    try {
      const auto tx = run_session(lib, p, engine, theta, seed);
      for (std::size_t i = 0; i < length; ++i) bit_errors += tx.decoded.get(i) != lib.message(theta).get(i);
    } catch (const Error& e) {
      o.check(false, e.what());
      bit_errors += length;
    }
    ++sessions;
  }
  o.check(bit_errors == 0, std::to_string(bit_errors) + " bit errors");
  if (o.passed) o.detail = "1000 sessions, 0 bit errors";
  return o;
}

AuditConfig group_audit(std::size_t n, std::size_t k) {
  AuditConfig c;
  c.databases = n;
  c.messages = k;
  c.t = Rational(static_cast<std::int64_t>(n));
  c.kind = PlacementKind::kPartition;
  c.engine = Engine::kB;
  return c;
}

Outcome exhaustive_privacy() {
  Outcome o;
  std::string summary;
  for (const std::size_t n : {2, 3}) {
    const auto v = audit_exhaustive(group_audit(n, 2));
    o.check(v.passed && v.max_tv_exact == Rational(0),
            "n=" + std::to_string(n) + " TV " + to_string(v.max_tv_exact));
    summary += "n=" + std::to_string(n) + " TV=0 over " + std::to_string(v.outcomes) + " outcomes; ";
    for (const auto m : {Mutation::kNoPermutation, Mutation::kAsymmetricTypes, Mutation::kDesiredOnly}) {
      auto c = group_audit(n, 2);
      c.mutation = m;
      const auto mv = audit_exhaustive(c);
      o.check(!mv.passed, std::string(to_string(m)) + " mutant passed at n=" + std::to_string(n));
      if (n == 2) summary += std::string(to_string(m)) + " TV=" + to_string(mv.max_tv_exact) + "; ";
    }
  }
  if (o.passed) o.detail = summary.substr(0, summary.size() - 2);
  return o;
}

Outcome statistical_privacy() {
  Outcome o;
  const auto workers = std::max(1u, std::thread::hardware_concurrency());
  AuditConfig a;
  a.databases = 4;
  a.messages = 3;
  a.t = Rational(2);
  a.kind = PlacementKind::kPartition;
  a.engine = Engine::kA;
  a.trials = 10000;
  a.workers = workers;
  AuditConfig b;
  b.databases = 5;
  b.messages = 2;
  b.t = Rational(3);
  b.kind = PlacementKind::kCyclic;
  b.engine = Engine::kB;
  b.trials = 10000;
  b.workers = workers;
  const auto va = audit_statistical(a);
  const auto vb = audit_statistical(b);
  o.check(va.max_tv_estimate <= 0.05, "engine A TV " + std::to_string(va.max_tv_estimate));
  o.check(vb.max_tv_estimate <= 0.05, "engine B TV " + std::to_string(vb.max_tv_estimate));
  if (o.passed) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "engine A TV=%.4f, engine B TV=%.4f (1e4 trials per theta)",
                  va.max_tv_estimate, vb.max_tv_estimate);
    o.detail = buf;
  }
  return o;
}

Outcome composition_identity() {
  Outcome o;
  for (const auto& r : g_sessions) {
    o.check(r.rate == composed_rate(r.alpha, r.group_rates),
            "rate " + to_string(r.rate) + " differs from the composed rate");
  }
  o.check(!g_sessions.empty(), "no sessions recorded");
  if (o.passed) o.detail = std::to_string(g_sessions.size()) + " sessions satisfy L/D = composed rate";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "partition example", 1, partition_example},
      {2, "cyclic example", 1, cyclic_example},
      {3, "capacity grid", 60, capacity_grid},
      {4, "non-integer t", 0, non_integer_t},
      {5, "message length", 0, message_length},
      {6, "decode correctness", 0, decode_property},
      {7, "exhaustive privacy", 0, exhaustive_privacy},
      {8, "statistical privacy", 300, statistical_privacy},
      {9, "rate composition identity", 0, composition_identity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto begin = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - begin;
    if (c.budget_s > 0 && elapsed.count() > c.budget_s) {
      o.passed = false;
      o.detail += " (took " + std::to_string(elapsed.count()) + " s, budget " + std::to_string(c.budget_s) + " s)";
    }
    std::printf("criterion %d %s: %s - %s [%.2f s]\n", c.id, c.name, o.passed ? "PASS" : "FAIL",
                o.detail.c_str(), elapsed.count());
    std::fflush(stdout);
    failures += o.passed ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
