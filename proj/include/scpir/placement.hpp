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
#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scpir/error.hpp"
#include "scpir/model.hpp"
#include "scpir/rational.hpp"

namespace scpir {

// Which full-storage scheme runs inside each database group. Engine A needs
// n^K bits per sub-message, engine B needs n^(K-1).
enum class Engine { kA, kB, kAuto };

constexpr std::string_view to_string(Engine e) {
  switch (e) {
    case Engine::kA: return "a";
    case Engine::kB: return "b";
    case Engine::kAuto: return "auto";
  }
  return "auto";
}

inline Engine parse_engine(std::string_view text) {
  if (text == "a" || text == "A") return Engine::kA;
  if (text == "b" || text == "B") return Engine::kB;
  if (text == "auto") return Engine::kAuto;
  fail(ErrorCode::kInvalidParameter, "unknown engine '" + std::string(text) + "'");
}

// auto: engine A on disjoint partitions, engine B on overlapping windows.
constexpr Engine resolve_engine(Engine requested, PlacementKind kind) {
  if (requested != Engine::kAuto) return requested;
  return kind == PlacementKind::kPartition ? Engine::kA : Engine::kB;
}

inline std::int64_t subpacketization(std::size_t group_size, std::size_t messages,
                                     Engine engine) {
  require(engine != Engine::kAuto, ErrorCode::kInvalidParameter,
          "engine must be resolved before asking for its sub-packetization");
  const auto exponent = engine == Engine::kA ? messages : messages - 1;
  return ipow(static_cast<std::int64_t>(group_size), static_cast<std::int64_t>(exponent));
}

// The `size` consecutive databases ending at `anchor`, wrapping modulo N.
// One-based this is [-(size-1):0] (+)_N anchor.
inline std::vector<std::size_t> cyclic_window(std::size_t databases, std::size_t size,
                                              std::size_t anchor) {
  std::vector<std::size_t> out;
  out.reserve(size);
  for (std::size_t i = 0; i < size; ++i) {
    out.push_back((anchor + databases - (size - 1) + i) % databases);
  }
  return out;
}

// N/t disjoint blocks of t consecutive databases, each holding a 1/F share.
inline PlacementSpec partition_placement(std::size_t databases, std::size_t t) {
  require(databases >= 1, ErrorCode::kInvalidParameter, "N must be >= 1");
  require(t >= 1 && t <= databases, ErrorCode::kInvalidParameter,
          "t must lie in [1, N]");
  require(databases % t == 0, ErrorCode::kNotDivisible,
          "N=" + std::to_string(databases) + " is not divisible by t=" + std::to_string(t) +
              "; use cyclic or mixed placement");
  PlacementSpec spec;
  spec.databases = databases;
  spec.t = Rational(static_cast<std::int64_t>(t));
  spec.kind = PlacementKind::kPartition;
  const auto blocks = databases / t;
  for (std::size_t f = 0; f < blocks; ++f) {
    spec.alpha.emplace_back(1, static_cast<std::int64_t>(blocks));
    std::vector<std::size_t> group(t);
    for (std::size_t i = 0; i < t; ++i) group[i] = f * t + i;
    spec.groups.push_back(std::move(group));
  }
  return spec;
}

// F = N groups of weight 1/N; group f lives on the t-window ending at f, so
// database n stores groups n, n+1, ..., n+t-1 (mod N).
inline PlacementSpec cyclic_placement(std::size_t databases, std::size_t t) {
  require(databases >= 1, ErrorCode::kInvalidParameter, "N must be >= 1");
  require(t >= 1 && t <= databases, ErrorCode::kInvalidParameter,
          "t must lie in [1, N]");
  PlacementSpec spec;
  spec.databases = databases;
  spec.t = Rational(static_cast<std::int64_t>(t));
  spec.kind = PlacementKind::kCyclic;
  for (std::size_t f = 0; f < databases; ++f) {
    spec.alpha.emplace_back(1, static_cast<std::int64_t>(databases));
    spec.groups.push_back(cyclic_window(databases, t, f));
  }
  return spec;
}

// Non-integer t: every anchor f carries a floor(t)-window with weight
// (ceil(t) - t)/N and a ceil(t)-window with weight (t - floor(t))/N. The
// floor-size groups come first (anchors 1..N), then the ceil-size groups.
inline PlacementSpec mixed_placement(std::size_t databases, const Rational& t) {
  require(databases >= 1, ErrorCode::kInvalidParameter, "N must be >= 1");
  require(t >= 1 && t <= static_cast<std::int64_t>(databases), ErrorCode::kInvalidParameter,
          "t=" + to_string(t) + " outside [1, N]");
  require(!is_integer(t), ErrorCode::kInvalidParameter,
          "integer t belongs to partition or cyclic placement");
  const auto lo = floor(t);
  const auto hi = ceil(t);
  const auto n = static_cast<std::int64_t>(databases);
  PlacementSpec spec;
  spec.databases = databases;
  spec.t = t;
  spec.kind = PlacementKind::kMixed;
  for (const auto& [size, weight] : {std::pair{lo, (Rational(hi) - t) / n},
                                    std::pair{hi, (t - Rational(lo)) / n}}) {
    for (std::size_t f = 0; f < databases; ++f) {
      spec.alpha.push_back(weight);
      spec.groups.push_back(cyclic_window(databases, static_cast<std::size_t>(size), f));
    }
  }
  return spec;
}

// The canonical placement for (N, t): partition when t is an integer dividing
// N, cyclic for other integers, mixed otherwise.
inline PlacementSpec default_placement(std::size_t databases, const Rational& t) {
  if (!is_integer(t)) return mixed_placement(databases, t);
  require(t >= 1 && t <= static_cast<std::int64_t>(databases), ErrorCode::kInvalidParameter,
          "t=" + to_string(t) + " outside [1, N]");
  const auto ti = static_cast<std::size_t>(t.numerator());
  return databases % ti == 0 ? partition_placement(databases, ti)
                             : cyclic_placement(databases, ti);
}

inline PlacementSpec make_placement(PlacementKind kind, std::size_t databases,
                                    const Rational& t) {
  switch (kind) {
    case PlacementKind::kPartition:
      require(is_integer(t), ErrorCode::kInvalidParameter, "partition needs integer t");
      return partition_placement(databases, static_cast<std::size_t>(t.numerator()));
    case PlacementKind::kCyclic:
      require(is_integer(t), ErrorCode::kInvalidParameter, "cyclic needs integer t");
      return cyclic_placement(databases, static_cast<std::size_t>(t.numerator()));
    case PlacementKind::kMixed:
      return mixed_placement(databases, t);
    case PlacementKind::kCustom:
      break;
  }
  fail(ErrorCode::kInvalidParameter, "custom placements are loaded, not constructed");
}

struct Violation {
  std::string rule;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  bool valid = true;
  bool capacity_sufficient = false;
  std::vector<Violation> violations;
  std::vector<Rational> per_database_load;

  bool has(std::string_view rule) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.rule == rule; });
  }

  // Valid and the message length fits every group's sub-packetization, i.e.
  // a session can actually be executed on it.
  bool runnable() const {
    return valid && !has("message-length") && !has("subpacketization");
  }
};

// Sufficient capacity conditions on the group sizes and weights for the given
// replication factor t.
inline bool capacity_condition_holds(const PlacementSpec& spec, const Rational& t) {
  if (spec.groups.empty() || t < 1) return false;
  if (is_integer(t)) {
    return std::all_of(spec.groups.begin(), spec.groups.end(), [&](const auto& g) {
      return static_cast<std::int64_t>(g.size()) == t.numerator();
    });
  }
  const auto lo = floor(t);
  const auto hi = ceil(t);
  Rational lo_weight(0);
  Rational hi_weight(0);
  for (std::size_t f = 0; f < spec.groups.size(); ++f) {
    const auto size = static_cast<std::int64_t>(spec.groups[f].size());
    if (size == lo) {
      lo_weight += spec.alpha.at(f);
    } else if (size == hi) {
      hi_weight += spec.alpha.at(f);
    } else {
      return false;
    }
  }
  return lo_weight == Rational(hi) - t && hi_weight == t - Rational(lo);
}

inline ValidationReport validate_placement(const PlacementSpec& spec, const Rational& mu,
                                           std::size_t messages, std::size_t length,
                                           Engine engine = Engine::kAuto) {
  ValidationReport report;
  auto add = [&](std::string rule, std::string detail) {
    report.violations.push_back({std::move(rule), std::move(detail)});
  };

  if (spec.databases == 0) add("structure", "N must be >= 1");
  if (spec.alpha.size() != spec.groups.size()) {
    add("structure", "alpha has " + std::to_string(spec.alpha.size()) + " entries but there are " +
                         std::to_string(spec.groups.size()) + " groups");
  }
  const auto groups = std::min(spec.alpha.size(), spec.groups.size());
  for (std::size_t f = 0; f < groups; ++f) {
    const auto& g = spec.groups[f];
    if (g.empty()) add("group-nonempty", "group " + std::to_string(f + 1) + " is empty");
    if (spec.alpha[f] <= 0) {
      add("structure", "alpha_" + std::to_string(f + 1) + " = " + to_string(spec.alpha[f]) +
                           " is not positive");
    }
    std::set<std::size_t> seen;
    for (const auto n : g) {
      if (n >= spec.databases) {
        add("structure", "group " + std::to_string(f + 1) + " names database " +
                             std::to_string(n + 1) + " beyond N");
      }
      if (!seen.insert(n).second) {
        add("structure", "group " + std::to_string(f + 1) + " lists database " +
                             std::to_string(n + 1) + " twice");
      }
    }
  }

  Rational total(0);
  for (const auto& a : spec.alpha) total += a;
  if (total != 1) add("alpha-sum", "alpha sums to " + to_string(total));

  for (std::size_t n = 0; n < spec.databases; ++n) {
    const auto load = spec.load(n);
    report.per_database_load.push_back(load);
    if (load > mu) {
      add("storage-bound", "database " + std::to_string(n + 1) + " load " + to_string(load) +
                               " exceeds mu=" + to_string(mu));
    }
  }

  const auto resolved = resolve_engine(engine, spec.kind);
  for (std::size_t f = 0; f < groups; ++f) {
    if (spec.alpha[f] <= 0) continue;
    const Rational bits = spec.alpha[f] * static_cast<std::int64_t>(length);
    if (!is_integer(bits) || bits.numerator() < 1) {
      add("message-length", "alpha_" + std::to_string(f + 1) + " * L = " + to_string(bits) +
                                " is not a positive integer");
      continue;
    }
    if (spec.groups[f].empty() || messages == 0) continue;
    const auto need = subpacketization(spec.groups[f].size(), messages, resolved);
    if (bits.numerator() % need != 0) {
      add("subpacketization", "group " + std::to_string(f + 1) + " holds " +
                                  std::to_string(bits.numerator()) + " bits per message; engine " +
                                  std::string(to_string(resolved)) + " needs a multiple of " +
                                  std::to_string(need));
    }
  }

  report.valid = !report.has("alpha-sum") && !report.has("storage-bound") &&
                 !report.has("group-nonempty") && !report.has("structure");
  report.capacity_sufficient =
      report.valid && capacity_condition_holds(spec, mu * static_cast<std::int64_t>(spec.databases));
  return report;
}

}  // namespace scpir
