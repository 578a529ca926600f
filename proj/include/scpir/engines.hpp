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
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "scpir/bit_vector.hpp"
#include "scpir/error.hpp"
#include "scpir/model.hpp"
#include "scpir/placement.hpp"
#include "scpir/random.hpp"

namespace scpir {

// One XOR-sum request sent to a single database of a group. `target` is the
// database's position inside the group; addends are kept sorted.
struct Query {
  std::size_t target = 0;
  std::vector<BitAddress> addends;

  friend bool operator==(const Query&, const Query&) = default;
};

// The databases of one group together with the slice of the sub-message the
// plan retrieves: bits [offset, offset + length) of W_{k,submessage}.
struct GroupContext {
  std::vector<std::size_t> databases;
  std::size_t submessage = 0;
  std::size_t offset = 0;
};

// Planner faults used only to check that the privacy audit catches them.
enum class Mutation {
  kNone,
  kNoPermutation,      // identity index permutations
  kAsymmetricTypes,    // undesired singletons dropped from the first round
  kDesiredOnly,        // request nothing but desired bits
  kSkipUndesiredSums,  // no fresh undesired sums beyond the first round
};

constexpr std::string_view to_string(Mutation m) {
  switch (m) {
    case Mutation::kNone: return "none";
    case Mutation::kNoPermutation: return "no-permutation";
    case Mutation::kAsymmetricTypes: return "asymmetric-types";
    case Mutation::kDesiredOnly: return "desired-only";
    case Mutation::kSkipUndesiredSums: return "skip-undesired-sums";
  }
  return "none";
}

// Per-message uniform permutations of the chunk's bit indices plus the
// position of the first database to be queried (engine B only).
struct EngineRandomness {
  std::vector<std::vector<std::size_t>> permutations;
  std::size_t start = 0;

  std::size_t length() const { return permutations.empty() ? 0 : permutations.front().size(); }

  static EngineRandomness sample(std::size_t messages, std::size_t length,
                                 SplitMix64& rng) {
    EngineRandomness rnd;
    rnd.permutations.reserve(messages);
    for (std::size_t k = 0; k < messages; ++k) {
      rnd.permutations.push_back(random_permutation(length, rng));
    }
    return rnd;
  }

  static EngineRandomness identity(std::size_t messages, std::size_t length,
                                   std::size_t start = 0) {
    EngineRandomness rnd;
    std::vector<std::size_t> id(length);
    std::iota(id.begin(), id.end(), std::size_t{0});
    rnd.permutations.assign(messages, id);
    rnd.start = start;
    return rnd;
  }
};

struct GroupQueryPlan {
  Engine engine = Engine::kA;
  GroupContext context;
  std::size_t length = 0;  // desired bits retrieved by this plan
  std::size_t messages = 0;
  std::size_t desired = 0;
  std::size_t start = 0;
  std::vector<Query> queries;
  // For each query containing a desired bit plus undesired addends: the index
  // of the earlier query, answered by another database, whose answer cancels
  // those undesired addends.
  std::vector<std::optional<std::size_t>> side_info_links;

  std::size_t group_size() const noexcept { return context.databases.size(); }
  std::size_t download_cost() const noexcept { return queries.size(); }
  std::size_t database_of(const Query& q) const { return context.databases.at(q.target); }
};

// Downloads needed for one plan: (n^K - 1)/(n - 1) for engine B, n times that
// for engine A; a lone database costs K either way.
inline std::int64_t group_download_cost(std::size_t group_size, std::size_t messages,
                                        Engine engine) {
  require(group_size >= 1 && messages >= 1, ErrorCode::kInvalidParameter,
          "group size and K must be >= 1");
  require(engine != Engine::kAuto, ErrorCode::kInvalidParameter, "engine must be resolved");
  const auto n = static_cast<std::int64_t>(group_size);
  std::int64_t geometric = 0;
  for (std::size_t i = 0; i < messages; ++i) {
    geometric = checked_add(geometric, ipow(n, static_cast<std::int64_t>(i)));
  }
  return engine == Engine::kA ? checked_mul(n, geometric) : geometric;
}

namespace detail {

// Number of r-sums of each message subset that database `d` answers, for
// r = 1..K (index r - 1). Engine A issues (n-1)^(r-1) at every database.
// Engine B starts with singletons at one database only; afterwards each
// database must consume exactly the undesired (r-1)-sums the other databases
// produced, which forces x_d(r) = (n-1)^(r-2) - x_d(r-1).
inline std::vector<std::vector<std::int64_t>> round_counts(std::size_t group_size,
                                                           std::size_t messages, Engine engine,
                                                           std::size_t start) {
  const auto n = static_cast<std::int64_t>(group_size);
  std::vector<std::vector<std::int64_t>> x(group_size, std::vector<std::int64_t>(messages, 0));
  for (std::size_t d = 0; d < group_size; ++d) {
    for (std::size_t r = 1; r <= messages; ++r) {
      if (engine == Engine::kA) {
        x[d][r - 1] = ipow(n - 1, static_cast<std::int64_t>(r - 1));
      } else if (r == 1) {
        x[d][0] = d == start ? 1 : 0;
      } else {
        x[d][r - 1] = ipow(n - 1, static_cast<std::int64_t>(r - 2)) - x[d][r - 2];
      }
    }
  }
  return x;
}

// Subsets of {0..K-1} of the given size as bit masks, lexicographic in their
// sorted element lists.
inline std::vector<std::uint64_t> subsets_of_size(std::size_t messages, std::size_t size) {
  std::vector<std::uint64_t> out;
  std::vector<std::size_t> pick(size);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  if (size == 0 || size > messages) return out;
  for (;;) {
    std::uint64_t mask = 0;
    for (const auto p : pick) mask |= std::uint64_t{1} << p;
    out.push_back(mask);
    std::size_t i = size;
    while (i > 0 && pick[i - 1] == messages - size + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < size; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

struct Draft {
  std::size_t round;
  std::size_t target;
  std::vector<BitAddress> addends;
  std::optional<std::size_t> link;  // draft id
};

inline GroupQueryPlan plan_rounds(const GroupContext& ctx, std::size_t messages,
                                  std::size_t desired, const EngineRandomness& rnd,
                                  Engine engine, Mutation mutation) {
  const auto n = ctx.databases.size();
  require(n >= 1, ErrorCode::kInvalidParameter, "empty database group");
  require(messages >= 1 && messages <= 63, ErrorCode::kInvalidParameter, "K must lie in [1, 63]");
  require(desired < messages, ErrorCode::kInvalidParameter, "desired message out of range");
  require(rnd.permutations.size() == messages, ErrorCode::kInvalidParameter,
          "randomness must hold one permutation per message");
  const auto length = rnd.length();
  const auto need = static_cast<std::size_t>(subpacketization(n, messages, engine));
  require(length == need, ErrorCode::kSubpacketization,
          "engine " + std::string(to_string(engine)) + " on " + std::to_string(n) +
              " databases with K=" + std::to_string(messages) + " needs " + std::to_string(need) +
              " bits per sub-message, got " + std::to_string(length));
  for (const auto& p : rnd.permutations) {
    require(p.size() == length, ErrorCode::kInvalidParameter, "permutation lengths differ");
  }
  const auto start = engine == Engine::kB ? rnd.start : 0;
  require(start < n, ErrorCode::kInvalidParameter, "start database outside the group");

  std::vector<std::size_t> next(messages, 0);
  auto fresh = [&](std::size_t k) {
    require(next[k] < length, ErrorCode::kInternal, "planner ran out of fresh bits");
    const auto logical = next[k]++;
    const auto physical =
        mutation == Mutation::kNoPermutation ? logical : rnd.permutations[k][logical];
    return BitAddress{k, ctx.submessage, ctx.offset + physical};
  };

  std::vector<Draft> drafts;
  auto emit = [&](std::size_t round, std::size_t target, std::vector<BitAddress> addends,
                  std::optional<std::size_t> link) {
    std::sort(addends.begin(), addends.end());
    drafts.push_back({round, target, std::move(addends), link});
    return drafts.size() - 1;
  };

  if (mutation == Mutation::kDesiredOnly) {
    for (std::size_t i = 0; i < length; ++i) emit(1, (start + i) % n, {fresh(desired)}, {});
  } else {
    const auto x = round_counts(n, messages, engine, start);
    const auto theta_bit = std::uint64_t{1} << desired;
    // Undesired sums of the previous round, keyed by message subset.
    std::map<std::uint64_t, std::vector<std::size_t>> pool;

    for (std::size_t i = 0; i < n; ++i) {
      const auto d = (start + i) % n;
      for (std::int64_t c = 0; c < x[d][0]; ++c) {
        for (std::size_t k = 0; k < messages; ++k) {
          if (k != desired && mutation == Mutation::kAsymmetricTypes) continue;
          const auto id = emit(1, d, {fresh(k)}, {});
          if (k != desired) pool[std::uint64_t{1} << k].push_back(id);
        }
      }
    }

    for (std::size_t r = 2; r <= messages; ++r) {
      std::map<std::uint64_t, std::vector<std::size_t>> next_pool;
      for (const auto mask : subsets_of_size(messages, r)) {
        if (mask & theta_bit) {
          const auto it = pool.find(mask & ~theta_bit);
          if (it == pool.end()) continue;
          // Each undesired (r-1)-sum is reused once at every other database.
          for (const auto side : it->second) {
            const auto origin = drafts[side].target;
            for (std::size_t hop = 1; hop < n; ++hop) {
              auto addends = drafts[side].addends;
              addends.push_back(fresh(desired));
              emit(r, (origin + hop) % n, std::move(addends), side);
            }
          }
        } else {
          if (mutation == Mutation::kSkipUndesiredSums) continue;
          for (std::size_t i = 0; i < n; ++i) {
            const auto d = (start + i) % n;
            for (std::int64_t c = 0; c < x[d][r - 1]; ++c) {
              std::vector<BitAddress> addends;
              for (std::size_t k = 0; k < messages; ++k) {
                if (mask & (std::uint64_t{1} << k)) addends.push_back(fresh(k));
              }
              next_pool[mask].push_back(emit(r, d, std::move(addends), {}));
            }
          }
        }
      }
      pool = std::move(next_pool);
    }
    if (mutation == Mutation::kNone) {
      require(next[desired] == length, ErrorCode::kInternal,
              "planner retrieved " + std::to_string(next[desired]) + " of " +
                  std::to_string(length) + " desired bits");
    }
  }

  // Present queries round by round, grouped by database inside a round.
  std::vector<std::size_t> order(drafts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (drafts[a].round != drafts[b].round) return drafts[a].round < drafts[b].round;
    return drafts[a].target < drafts[b].target;
  });
  std::vector<std::size_t> position(drafts.size());
  for (std::size_t i = 0; i < order.size(); ++i) position[order[i]] = i;

  GroupQueryPlan plan;
  plan.engine = engine;
  plan.context = ctx;
  plan.length = length;
  plan.messages = messages;
  plan.desired = desired;
  plan.start = start;
  plan.queries.reserve(drafts.size());
  plan.side_info_links.reserve(drafts.size());
  for (const auto id : order) {
    plan.queries.push_back({drafts[id].target, std::move(drafts[id].addends)});
    plan.side_info_links.push_back(drafts[id].link ? std::optional(position[*drafts[id].link])
                                                   : std::nullopt);
  }
  return plan;
}

}  // namespace detail

// Capacity-achieving plan with sub-packetization n^K: every database answers
// (n-1)^(r-1) r-sums per message subset in round r.
inline GroupQueryPlan plan_engine_a(const GroupContext& ctx, std::size_t messages,
                                    std::size_t desired, const EngineRandomness& rnd,
                                    Mutation mutation = Mutation::kNone) {
  return detail::plan_rounds(ctx, messages, desired, rnd, Engine::kA, mutation);
}

// Capacity-achieving plan with sub-packetization n^(K-1). The database at
// position rnd.start answers the singletons; the group as a whole answers
// (n-1)^(r-1) r-sums per message subset.
inline GroupQueryPlan plan_engine_b(const GroupContext& ctx, std::size_t messages,
                                    std::size_t desired, const EngineRandomness& rnd,
                                    Mutation mutation = Mutation::kNone) {
  return detail::plan_rounds(ctx, messages, desired, rnd, Engine::kB, mutation);
}

inline GroupQueryPlan plan_group(Engine engine, const GroupContext& ctx, std::size_t messages,
                                 std::size_t desired, const EngineRandomness& rnd,
                                 Mutation mutation = Mutation::kNone) {
  require(engine != Engine::kAuto, ErrorCode::kInvalidParameter, "engine must be resolved");
  return detail::plan_rounds(ctx, messages, desired, rnd, engine, mutation);
}

inline bool answer_query(const DatabaseStore& store, const Query& q) {
  require(!q.addends.empty(), ErrorCode::kInvalidParameter, "empty query");
  bool out = false;
  for (const auto& a : q.addends) out ^= store.bit(a);
  return out;
}

// Recovers bits [offset, offset + length) of W_{desired, submessage}, in
// message order, from one answer bit per query.
inline BitVector decode_group(const GroupQueryPlan& plan, std::span<const std::uint8_t> answers) {
  require(answers.size() == plan.queries.size(), ErrorCode::kDecodeFailure,
          "got " + std::to_string(answers.size()) + " answers for " +
              std::to_string(plan.queries.size()) + " queries");
  BitVector out(plan.length);
  std::vector<bool> known(plan.length, false);
  for (std::size_t i = 0; i < plan.queries.size(); ++i) {
    const auto& addends = plan.queries[i].addends;
    std::optional<BitAddress> wanted;
    std::vector<BitAddress> rest;
    for (const auto& a : addends) {
      if (a.message == plan.desired) {
        require(!wanted, ErrorCode::kDecodeFailure,
                "query " + std::to_string(i) + " mixes two desired bits");
        wanted = a;
      } else {
        rest.push_back(a);
      }
    }
    if (!wanted) continue;
    bool value = answers[i] != 0;
    if (!rest.empty()) {
      const auto link = plan.side_info_links.at(i);
      require(link.has_value() && *link < plan.queries.size() &&
                  plan.queries[*link].addends == rest,
              ErrorCode::kDecodeFailure,
              "query " + std::to_string(i) + " has no side information cancelling its undesired addends");
      require(plan.queries[*link].target != plan.queries[i].target, ErrorCode::kDecodeFailure,
              "side information comes from the same database");
      value ^= answers[*link] != 0;
    }
    require(wanted->submessage == plan.context.submessage && wanted->bit >= plan.context.offset &&
                wanted->bit < plan.context.offset + plan.length,
            ErrorCode::kDecodeFailure, "desired addend outside the planned slice");
    const auto pos = wanted->bit - plan.context.offset;
    require(!known[pos], ErrorCode::kDecodeFailure, "desired bit requested twice");
    known[pos] = true;
    out.set(pos, value);
  }
  const auto missing = std::count(known.begin(), known.end(), false);
  require(missing == 0, ErrorCode::kDecodeFailure,
          std::to_string(missing) + " desired bits were never requested");
  return out;
}

inline std::string format_address(const BitAddress& a) {
  return std::to_string(a.message + 1) + ":" + std::to_string(a.submessage + 1) + ":" +
         std::to_string(a.bit + 1);
}

// Transcript line: `db=<n> sum=<k:f:j>[+<k:f:j>...]`, one-based.
inline std::string format_query(std::size_t database, const Query& q) {
  std::string out = "db=" + std::to_string(database + 1) + " sum=";
  auto addends = q.addends;
  std::sort(addends.begin(), addends.end());
  for (std::size_t i = 0; i < addends.size(); ++i) {
    if (i > 0) out += '+';
    out += format_address(addends[i]);
  }
  return out;
}

struct ParsedQuery {
  std::size_t database = 0;
  std::vector<BitAddress> addends;
};

inline ParsedQuery parse_query_line(std::string_view line) {
  auto bad = [&]() { fail(ErrorCode::kInvalidParameter, "malformed query line '" + std::string(line) + "'"); };
  if (line.substr(0, 3) != "db=") bad();
  const auto space = line.find(" sum=");
  if (space == std::string_view::npos) bad();
  auto number = [&](std::string_view s) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v == 0) bad();
    return v - 1;
  };
  ParsedQuery out;
  out.database = number(line.substr(3, space - 3));
  auto rest = line.substr(space + 5);
  while (!rest.empty()) {
    const auto plus = rest.find('+');
    const auto token = rest.substr(0, plus);
    const auto c1 = token.find(':');
    const auto c2 = token.find(':', c1 == std::string_view::npos ? c1 : c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos) bad();
    out.addends.push_back({number(token.substr(0, c1)), number(token.substr(c1 + 1, c2 - c1 - 1)),
                           number(token.substr(c2 + 1))});
    if (plus == std::string_view::npos) break;
    rest = rest.substr(plus + 1);
    if (rest.empty()) bad();
  }
  if (out.addends.empty()) bad();
  return out;
}

}  // namespace scpir
