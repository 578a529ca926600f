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

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "scpir/engines.hpp"
#include "scpir/error.hpp"
#include "scpir/model.hpp"
#include "scpir/placement.hpp"
#include "scpir/random.hpp"
#include "scpir/rational.hpp"
#include "scpir/session.hpp"

namespace scpir {

enum class AuditMode { kExhaustive, kStatistical };

constexpr std::string_view to_string(AuditMode m) {
  return m == AuditMode::kExhaustive ? "exhaustive" : "statistical";
}

struct AuditConfig {
  std::size_t databases = 1;
  std::size_t messages = 1;
  Rational t{1};
  PlacementKind kind = PlacementKind::kPartition;
  Engine engine = Engine::kAuto;
  Mutation mutation = Mutation::kNone;
  // The audit treats engine B's starting database as part of the user's
  // randomness unless told to use the deterministic anchor rotation.
  StartPolicy start = StartPolicy::kUniform;
  std::optional<std::int64_t> length;  // default: smallest admissible L
  std::uint64_t budget = 2'000'000;    // exhaustive: outcomes per chunk
  std::size_t trials = 10'000;         // statistical: sessions per theta
  double threshold = 0.05;
  std::uint64_t seed = 1;
  std::size_t workers = 1;
};

struct DatabaseVerdict {
  std::size_t database = 0;
  Rational tv_exact{0};
  double tv_estimate = 0.0;
  std::size_t theta_a = 0;  // the pair realising the maximum
  std::size_t theta_b = 0;
};

struct PrivacyVerdict {
  AuditMode mode = AuditMode::kExhaustive;
  bool passed = false;
  Rational max_tv_exact{0};     // exhaustive mode
  double max_tv_estimate = 0.0;  // statistical mode
  std::size_t trials = 0;
  double threshold = 0.0;
  std::uint64_t outcomes = 0;  // exhaustive: randomness outcomes enumerated
  std::vector<DatabaseVerdict> per_database;
};

namespace detail {

using ViewKey = std::vector<std::uint32_t>;
using Distribution = std::map<ViewKey, std::uint64_t>;

inline PlacementSpec audit_placement(const AuditConfig& c) {
  return make_placement(c.kind, c.databases, c.t);
}

inline std::int64_t audit_length(const AuditConfig& c, const PlacementSpec& p) {
  return c.length ? *c.length : min_message_length_general(p, c.messages, c.engine);
}

// What one database of the group observes from a plan: its queries as an
// unordered multiset, each query the sorted list of (k, f, j) addends.
inline std::vector<ViewKey> group_views(const GroupQueryPlan& plan) {
  std::vector<std::vector<ViewKey>> per(plan.group_size());
  for (const auto& q : plan.queries) {
    ViewKey key;
    key.push_back(static_cast<std::uint32_t>(q.addends.size()));
    for (const auto& a : q.addends) {
      key.push_back(static_cast<std::uint32_t>(a.message));
      key.push_back(static_cast<std::uint32_t>(a.submessage));
      key.push_back(static_cast<std::uint32_t>(a.bit));
    }
    per[q.target].push_back(std::move(key));
  }
  std::vector<ViewKey> out;
  for (auto& queries : per) {
    std::sort(queries.begin(), queries.end());
    ViewKey view;
    for (const auto& q : queries) view.insert(view.end(), q.begin(), q.end());
    out.push_back(std::move(view));
  }
  return out;
}

inline std::uint64_t factorial_power(std::size_t m, std::size_t k, std::uint64_t cap) {
  std::uint64_t out = 1;
  for (std::size_t rep = 0; rep < k; ++rep) {
    for (std::size_t i = 2; i <= m; ++i) {
      if (out > cap / i) return cap + 1;
      out *= i;
    }
  }
  return out;
}

// Exact view distributions of every database of one chunk, for every theta:
// dist[position][theta].
struct Factor {
  std::vector<std::size_t> databases;
  std::uint64_t outcomes = 0;
  std::vector<std::vector<Distribution>> dist;
};

inline Factor enumerate_chunk(const SessionChunk& chunk, std::size_t messages, Engine engine,
                              const AuditConfig& c) {
  const auto n = chunk.context.databases.size();
  const auto starts = engine == Engine::kB && c.start == StartPolicy::kUniform ? n : 1;
  const auto perms = factorial_power(chunk.length, messages, c.budget);
  if (perms > c.budget || perms * starts > c.budget) {
    fail(ErrorCode::kBudgetExceeded,
         "chunk randomness space exceeds the budget of " + std::to_string(c.budget) +
             " outcomes; use statistical mode");
  }
  Factor factor;
  factor.databases = chunk.context.databases;
  factor.outcomes = perms * starts;
  factor.dist.assign(n, std::vector<Distribution>(messages));

  auto rnd = EngineRandomness::identity(messages, chunk.length);
  for (;;) {
    for (std::size_t s = 0; s < starts; ++s) {
      rnd.start = starts == 1 ? (n - 1 + chunk.chunk) % n : s;
      for (std::size_t theta = 0; theta < messages; ++theta) {
        const auto plan = plan_group(engine, chunk.context, messages, theta, rnd, c.mutation);
        const auto views = group_views(plan);
        for (std::size_t pos = 0; pos < n; ++pos) ++factor.dist[pos][theta][views[pos]];
      }
    }
    // Odometer over the K permutations.
    std::size_t k = 0;
    while (k < messages &&
           !std::next_permutation(rnd.permutations[k].begin(), rnd.permutations[k].end())) {
      ++k;
    }
    if (k == messages) break;
  }
  return factor;
}

// Product of independent factor distributions, as counts over the product of
// their outcome spaces.
inline Distribution product(const std::vector<const Distribution*>& parts, std::uint64_t budget) {
  Distribution acc{{ViewKey{}, 1}};
  for (const auto* part : parts) {
    require(acc.size() * part->size() <= budget, ErrorCode::kBudgetExceeded,
            "joint view support exceeds the budget; use statistical mode");
    Distribution next;
    for (const auto& [ka, ca] : acc) {
      for (const auto& [kb, cb] : *part) {
        ViewKey key = ka;
        key.push_back(0xffffffffU);
        key.insert(key.end(), kb.begin(), kb.end());
        next[std::move(key)] += ca * cb;
      }
    }
    acc = std::move(next);
  }
  return acc;
}

inline Rational total_variation(const Distribution& a, const Distribution& b,
                                std::uint64_t total) {
  std::uint64_t diff = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      diff += ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      diff += ib->second;
      ++ib;
    } else {
      diff += ia->second > ib->second ? ia->second - ib->second : ib->second - ia->second;
      ++ia;
      ++ib;
    }
  }
  return Rational(static_cast<std::int64_t>(diff), checked_mul(2, static_cast<std::int64_t>(total)));
}

}  // namespace detail

// Exact check that every database's query distribution is the same for all
// desired messages. Chunks use independent randomness, so a database's view
// is the product of its per-chunk views; identical factors cancel out of the
// distance and only the differing ones are multiplied out.
inline PrivacyVerdict audit_exhaustive(const AuditConfig& c) {
  const auto placement = detail::audit_placement(c);
  const auto engine = resolve_engine(c.engine, placement.kind);
  const auto length = detail::audit_length(c, placement);
  std::vector<detail::Factor> factors;
  PrivacyVerdict verdict;
  verdict.mode = AuditMode::kExhaustive;
  for (const auto& chunk : session_chunks(placement, c.messages, static_cast<std::size_t>(length), engine)) {
    factors.push_back(detail::enumerate_chunk(chunk, c.messages, engine, c));
    verdict.outcomes += factors.back().outcomes;
  }

  for (std::size_t n = 0; n < placement.databases; ++n) {
    DatabaseVerdict dv;
    dv.database = n;
    for (std::size_t a = 0; a < c.messages; ++a) {
      for (std::size_t b = a + 1; b < c.messages; ++b) {
        std::vector<const detail::Distribution*> pa;
        std::vector<const detail::Distribution*> pb;
        std::uint64_t total = 1;
        for (const auto& f : factors) {
          const auto it = std::find(f.databases.begin(), f.databases.end(), n);
          if (it == f.databases.end()) continue;
          const auto pos = static_cast<std::size_t>(it - f.databases.begin());
          if (f.dist[pos][a] == f.dist[pos][b]) continue;
          require(total <= (std::uint64_t{1} << 61) / f.outcomes, ErrorCode::kBudgetExceeded,
                  "joint outcome space too large for exact arithmetic");
          total *= f.outcomes;
          pa.push_back(&f.dist[pos][a]);
          pb.push_back(&f.dist[pos][b]);
        }
        if (pa.empty()) continue;
        const auto tv = detail::total_variation(detail::product(pa, c.budget),
                                                detail::product(pb, c.budget), total);
        if (tv > dv.tv_exact) {
          dv.tv_exact = tv;
          dv.theta_a = a;
          dv.theta_b = b;
        }
      }
    }
    verdict.max_tv_exact = std::max(verdict.max_tv_exact, dv.tv_exact);
    verdict.per_database.push_back(dv);
  }
  verdict.passed = verdict.max_tv_exact == 0;
  return verdict;
}

namespace detail {

// Features a database can compute from its own queries: the message subset
// each query touches, and each addend's (k, f, j) tagged with that subset.
using Feature = std::array<std::uint64_t, 4>;
using Histogram = std::map<Feature, std::uint64_t>;

inline void accumulate(const std::vector<GroupQueryPlan>& plans, std::size_t theta,
                       std::vector<std::vector<Histogram>>& hist) {
  for (const auto& plan : plans) {
    for (const auto& q : plan.queries) {
      auto& h = hist[plan.database_of(q)][theta];
      std::uint64_t mask = 0;
      for (const auto& a : q.addends) mask |= std::uint64_t{1} << a.message;
      ++h[{0, mask, 0, 0}];
      for (const auto& a : q.addends) {
        ++h[{1, mask, a.message, (std::uint64_t{a.submessage} << 32) | a.bit}];
      }
    }
  }
}

inline double histogram_tv(const Histogram& a, const Histogram& b) {
  double ta = 0;
  double tb = 0;
  for (const auto& [_, v] : a) ta += static_cast<double>(v);
  for (const auto& [_, v] : b) tb += static_cast<double>(v);
  if (ta == 0 && tb == 0) return 0.0;
  if (ta == 0 || tb == 0) return 1.0;
  double diff = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      diff += static_cast<double>(ia->second) / ta;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      diff += static_cast<double>(ib->second) / tb;
      ++ib;
    } else {
      diff += std::fabs(static_cast<double>(ia->second) / ta - static_cast<double>(ib->second) / tb);
      ++ia;
      ++ib;
    }
  }
  return diff / 2;
}

}  // namespace detail

// Monte-Carlo surrogate for scales where enumeration is infeasible: sample
// sessions per theta with independent seeds and compare per-database feature
// histograms. Workers own contiguous trial ranges; their histograms are
// summed in worker order, so the result does not depend on the worker count.
inline PrivacyVerdict audit_statistical(const AuditConfig& c) {
  require(c.trials >= 1, ErrorCode::kInvalidParameter, "trials must be >= 1");
  const auto placement = detail::audit_placement(c);
  const auto engine = resolve_engine(c.engine, placement.kind);
  const auto length = static_cast<std::size_t>(detail::audit_length(c, placement));
  const PlannerOptions options{c.mutation, c.start};
  const auto workers = std::max<std::size_t>(1, std::min(c.workers, c.trials));

  using Hist = std::vector<std::vector<detail::Histogram>>;
  std::vector<Hist> partial(workers, Hist(placement.databases,
                                          std::vector<detail::Histogram>(c.messages)));
  auto work = [&](std::size_t w) {
    const auto begin = c.trials * w / workers;
    const auto end = c.trials * (w + 1) / workers;
    for (std::size_t trial = begin; trial < end; ++trial) {
      for (std::size_t theta = 0; theta < c.messages; ++theta) {
        const auto seed = derive_seed(c.seed, {0x57a7, trial, theta});
        detail::accumulate(plan_session(placement, c.messages, length, engine, theta, seed, options),
                           theta, partial[w]);
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  auto& merged = partial.front();
  for (std::size_t w = 1; w < workers; ++w) {
    for (std::size_t n = 0; n < placement.databases; ++n) {
      for (std::size_t theta = 0; theta < c.messages; ++theta) {
        for (const auto& [key, v] : partial[w][n][theta]) merged[n][theta][key] += v;
      }
    }
  }

  PrivacyVerdict verdict;
  verdict.mode = AuditMode::kStatistical;
  verdict.trials = c.trials;
  verdict.threshold = c.threshold;
  for (std::size_t n = 0; n < placement.databases; ++n) {
    DatabaseVerdict dv;
    dv.database = n;
    for (std::size_t a = 0; a < c.messages; ++a) {
      for (std::size_t b = a + 1; b < c.messages; ++b) {
        const auto tv = detail::histogram_tv(merged[n][a], merged[n][b]);
        if (tv > dv.tv_estimate) {
          dv.tv_estimate = tv;
          dv.theta_a = a;
          dv.theta_b = b;
        }
      }
    }
    verdict.max_tv_estimate = std::max(verdict.max_tv_estimate, dv.tv_estimate);
    verdict.per_database.push_back(dv);
  }
  verdict.passed = verdict.max_tv_estimate <= c.threshold;
  return verdict;
}

}  // namespace scpir
