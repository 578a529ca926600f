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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scpir/bit_vector.hpp"
#include "scpir/engines.hpp"
#include "scpir/error.hpp"
#include "scpir/model.hpp"
#include "scpir/placement.hpp"
#include "scpir/random.hpp"
#include "scpir/rational.hpp"

namespace scpir {

// 1 + 1/x + ... + 1/x^(K-1): the inverse of the full-storage capacity on x
// databases.
inline Rational inverse_full_storage_rate(std::int64_t databases, std::size_t messages) {
  require(databases >= 1 && messages >= 1, ErrorCode::kInvalidParameter,
          "need x >= 1 and K >= 1");
  Rational sum(0);
  Rational term(1);
  for (std::size_t i = 0; i < messages; ++i) {
    sum += term;
    term /= databases;
  }
  return sum;
}

inline Rational capacity_integer_t(std::int64_t t, std::size_t messages) {
  return 1 / inverse_full_storage_rate(t, messages);
}

// Integer t gives the closed form; otherwise 1/R is the linear interpolation
// between the neighbouring integer points.
inline Rational capacity_general_t(const Rational& t, std::size_t messages) {
  require(t >= 1, ErrorCode::kInvalidParameter, "t=" + to_string(t) + " is below 1");
  if (is_integer(t)) return capacity_integer_t(t.numerator(), messages);
  const auto lo = floor(t);
  const auto hi = ceil(t);
  const Rational inverse = (Rational(hi) - t) * inverse_full_storage_rate(lo, messages) +
                           (t - Rational(lo)) * inverse_full_storage_rate(hi, messages);
  return 1 / inverse;
}

inline Rational capacity_general_t(const Rational& t, std::size_t messages,
                                   std::size_t databases) {
  require(t <= static_cast<std::int64_t>(databases), ErrorCode::kInvalidParameter,
          "t=" + to_string(t) + " exceeds N=" + std::to_string(databases));
  return capacity_general_t(t, messages);
}

// R = (alpha_1/R_1 + ... + alpha_F/R_F)^-1.
inline Rational composed_rate(std::span<const Rational> alpha, std::span<const Rational> rates) {
  require(alpha.size() == rates.size() && !alpha.empty(), ErrorCode::kInvalidParameter,
          "alpha and rates must be non-empty and of equal length");
  Rational inverse(0);
  Rational weight(0);
  for (std::size_t f = 0; f < alpha.size(); ++f) {
    require(rates[f] > 0, ErrorCode::kInvalidParameter, "group rate must be positive");
    require(rates[f] <= 1, ErrorCode::kInvalidParameter, "group rate exceeds 1");
    inverse += alpha[f] / rates[f];
    weight += alpha[f];
  }
  require(weight == 1, ErrorCode::kInvalidParameter, "alpha sums to " + to_string(weight));
  return 1 / inverse;
}

inline std::int64_t min_message_length(std::size_t databases, std::size_t t,
                                       std::size_t messages) {
  require(t >= 1 && t <= databases && messages >= 1, ErrorCode::kInvalidParameter,
          "need t in [1, N] and K >= 1");
  return checked_mul(static_cast<std::int64_t>(databases),
                     ipow(static_cast<std::int64_t>(t), static_cast<std::int64_t>(messages - 1)));
}

inline std::int64_t baseline_message_length(std::size_t databases, std::size_t t,
                                            std::size_t messages) {
  require(t >= 1 && t <= databases && messages >= 1, ErrorCode::kInvalidParameter,
          "need t in [1, N] and K >= 1");
  return checked_mul(binomial(static_cast<std::int64_t>(databases), static_cast<std::int64_t>(t)),
                     ipow(static_cast<std::int64_t>(t), static_cast<std::int64_t>(messages)));
}

// Smallest L with alpha_f * L a positive multiple of every group's
// sub-packetization m_f. Writing alpha_f = p/q in lowest terms, L must be a
// multiple of q * m_f / gcd(m_f, p).
inline std::int64_t min_message_length_general(const PlacementSpec& placement,
                                               std::size_t messages, Engine engine) {
  require(messages >= 1, ErrorCode::kInvalidParameter, "K must be >= 1");
  require(!placement.alpha.empty() && placement.alpha.size() == placement.groups.size(),
          ErrorCode::kInvalidParameter, "malformed placement");
  const auto resolved = resolve_engine(engine, placement.kind);
  std::int64_t length = 1;
  for (std::size_t f = 0; f < placement.alpha.size(); ++f) {
    const auto& a = placement.alpha[f];
    require(a > 0 && !placement.groups[f].empty(), ErrorCode::kInvalidParameter,
            "malformed placement");
    const auto m = subpacketization(placement.groups[f].size(), messages, resolved);
    const auto step = checked_mul(a.denominator(), m / std::gcd(m, a.numerator()));
    length = checked_lcm(length, step);
  }
  return length;
}

enum class StartPolicy { kAnchor, kUniform };

constexpr std::string_view to_string(StartPolicy p) {
  return p == StartPolicy::kAnchor ? "anchor" : "uniform";
}

struct PlannerOptions {
  Mutation mutation = Mutation::kNone;
  StartPolicy start = StartPolicy::kAnchor;
};

// One retrieval unit: group f, chunk c covers bits [c*m_f, (c+1)*m_f) of
// every W_{k,f}, where m_f is the engine's sub-packetization on |N_f|.
struct SessionChunk {
  std::size_t group = 0;
  std::size_t chunk = 0;
  GroupContext context;
  std::size_t length = 0;
};

inline std::vector<SessionChunk> session_chunks(const PlacementSpec& placement,
                                                std::size_t messages, std::size_t length,
                                                Engine engine) {
  const auto resolved = resolve_engine(engine, placement.kind);
  const auto sizes = submessage_lengths(placement.alpha, length);
  std::vector<SessionChunk> out;
  for (std::size_t f = 0; f < sizes.size(); ++f) {
    const auto m = static_cast<std::size_t>(
        subpacketization(placement.groups.at(f).size(), messages, resolved));
    require(sizes[f] % m == 0, ErrorCode::kSubpacketization,
            "group " + std::to_string(f + 1) + " holds " + std::to_string(sizes[f]) +
                " bits per message, not a multiple of " + std::to_string(m));
    for (std::size_t c = 0; c < sizes[f] / m; ++c) {
      out.push_back({f, c, GroupContext{placement.groups[f], f, c * m}, m});
    }
  }
  return out;
}

// Per-chunk randomness from stream (seed, group, chunk). With the
// anchor policy, group f starts at its window's last database (database f
// for cyclic windows), rotating by one per additional chunk.
inline EngineRandomness chunk_randomness(const SessionChunk& chunk, std::size_t messages,
                                         std::uint64_t seed, StartPolicy policy) {
  SplitMix64 rng(derive_seed(seed, {0x9a7e, chunk.group, chunk.chunk}));
  auto rnd = EngineRandomness::sample(messages, chunk.length, rng);
  const auto n = chunk.context.databases.size();
  rnd.start = policy == StartPolicy::kUniform ? static_cast<std::size_t>(rng.below(n))
                                              : (n - 1 + chunk.chunk) % n;
  return rnd;
}

// All query plans of one private retrieval of message `desired`; needs no
// message content.
inline std::vector<GroupQueryPlan> plan_session(const PlacementSpec& placement,
                                                std::size_t messages, std::size_t length,
                                                Engine engine, std::size_t desired,
                                                std::uint64_t seed,
                                                const PlannerOptions& options = {}) {
  require(desired < messages, ErrorCode::kInvalidParameter, "theta out of range");
  const auto resolved = resolve_engine(engine, placement.kind);
  std::vector<GroupQueryPlan> plans;
  for (const auto& chunk : session_chunks(placement, messages, length, resolved)) {
    const auto rnd = chunk_randomness(chunk, messages, seed, options.start);
    plans.push_back(
        plan_group(resolved, chunk.context, messages, desired, rnd, options.mutation));
  }
  return plans;
}

struct SessionTranscript {
  std::size_t desired = 0;
  PlacementSpec placement;
  Engine engine = Engine::kA;
  std::size_t messages = 0;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::vector<GroupQueryPlan> plans;
  std::vector<std::vector<std::uint8_t>> answers;
  std::int64_t downloads = 0;
  BitVector decoded;

  Rational rate() const {
    return Rational(static_cast<std::int64_t>(length), downloads);
  }

  // Downloads spent on group f, summed over its chunks.
  std::vector<std::int64_t> group_downloads() const {
    std::vector<std::int64_t> out(placement.group_count(), 0);
    for (const auto& p : plans) {
      out.at(p.context.submessage) += static_cast<std::int64_t>(p.download_cost());
    }
    return out;
  }

  // R_f = alpha_f L / D_f.
  std::vector<Rational> group_rates() const {
    const auto d = group_downloads();
    std::vector<Rational> out;
    for (std::size_t f = 0; f < d.size(); ++f) {
      out.push_back(placement.alpha[f] * static_cast<std::int64_t>(length) / d[f]);
    }
    return out;
  }
};

inline SessionTranscript run_session(const Library& library, const PlacementSpec& placement,
                                     Engine engine, std::size_t desired, std::uint64_t seed,
                                     const PlannerOptions& options = {}) {
  const auto messages = library.message_count();
  const auto length = library.message_length();
  require(desired < messages, ErrorCode::kInvalidParameter,
          "theta=" + std::to_string(desired + 1) + " outside [1, K]");
  const auto resolved = resolve_engine(engine, placement.kind);
  const Rational mu = placement.t / static_cast<std::int64_t>(std::max<std::size_t>(placement.databases, 1));
  const auto report = validate_placement(placement, mu, messages, length, resolved);
  if (!report.runnable()) {
    fail(ErrorCode::kInvalidPlacement,
         report.violations.empty() ? "placement rejected"
                                   : report.violations.front().rule + ": " +
                                         report.violations.front().detail);
  }

  std::vector<DatabaseStore> stores;
  stores.reserve(placement.databases);
  for (std::size_t n = 0; n < placement.databases; ++n) stores.emplace_back(library, placement, n);

  SessionTranscript tx;
  tx.desired = desired;
  tx.placement = placement;
  tx.engine = resolved;
  tx.messages = messages;
  tx.length = length;
  tx.seed = seed;
  tx.plans = plan_session(placement, messages, length, resolved, desired, seed, options);

  const auto sizes = submessage_lengths(placement.alpha, length);
  std::vector<BitVector> parts;
  for (const auto s : sizes) parts.emplace_back(s);
  for (const auto& plan : tx.plans) {
    std::vector<std::uint8_t> answers;
    answers.reserve(plan.queries.size());
    for (const auto& q : plan.queries) {
      answers.push_back(answer_query(stores[plan.database_of(q)], q) ? 1 : 0);
    }
    const auto chunk = decode_group(plan, answers);
    auto& part = parts[plan.context.submessage];
    for (std::size_t i = 0; i < chunk.size(); ++i) part.set(plan.context.offset + i, chunk.get(i));
    tx.downloads += static_cast<std::int64_t>(answers.size());
    tx.answers.push_back(std::move(answers));
  }
  for (auto& p : parts) tx.decoded.append(p);
  if (tx.decoded != library.message(desired)) {
    fail(ErrorCode::kInternal, "decoded message differs from W_theta");
  }
  return tx;
}

struct RateReport {
  Rational measured_rate{0};
  Rational capacity{0};
  bool achieves_capacity = false;
  std::int64_t message_length_used = 0;
  std::optional<std::int64_t> baseline_length;
  std::int64_t downloads = 0;
};

inline RateReport make_rate_report(const SessionTranscript& tx) {
  RateReport r;
  r.measured_rate = tx.rate();
  r.capacity = capacity_general_t(tx.placement.t, tx.messages);
  r.achieves_capacity = r.measured_rate == r.capacity;
  r.message_length_used = static_cast<std::int64_t>(tx.length);
  r.downloads = tx.downloads;
  if (is_integer(tx.placement.t)) {
    r.baseline_length = baseline_message_length(
        tx.placement.databases, static_cast<std::size_t>(tx.placement.t.numerator()), tx.messages);
  }
  return r;
}

}  // namespace scpir
