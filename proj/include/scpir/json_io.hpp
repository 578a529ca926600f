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
#include <string>
#include <vector>

#include "json.hpp"

#include "scpir/audit.hpp"
#include "scpir/engines.hpp"
#include "scpir/error.hpp"
#include "scpir/model.hpp"
#include "scpir/placement.hpp"
#include "scpir/rational.hpp"
#include "scpir/session.hpp"

namespace scpir {

using json = nlohmann::ordered_json;

// {N, F, t:"p/q", alpha:["p/q",...], groups:[[n,...],...], kind}; database
// labels are one-based.
inline json to_json(const PlacementSpec& p) {
  json alpha = json::array();
  for (const auto& a : p.alpha) alpha.push_back(to_string(a));
  json groups = json::array();
  for (const auto& g : p.groups) {
    json members = json::array();
    for (const auto n : g) members.push_back(n + 1);
    groups.push_back(std::move(members));
  }
  return json{{"N", p.databases}, {"F", p.group_count()}, {"t", to_string(p.t)},
              {"alpha", std::move(alpha)}, {"groups", std::move(groups)},
              {"kind", std::string(to_string(p.kind))}};
}

inline PlacementSpec placement_from_json(const json& j) {
  try {
    PlacementSpec p;
    p.databases = j.at("N").get<std::size_t>();
    p.t = parse_rational(j.at("t").get<std::string>());
    for (const auto& a : j.at("alpha")) p.alpha.push_back(parse_rational(a.get<std::string>()));
    for (const auto& g : j.at("groups")) {
      std::vector<std::size_t> members;
      for (const auto& n : g) {
        const auto label = n.get<std::size_t>();
        require(label >= 1, ErrorCode::kInvalidParameter, "database labels are one-based");
        members.push_back(label - 1);
      }
      p.groups.push_back(std::move(members));
    }
    if (j.contains("F")) {
      require(j.at("F").get<std::size_t>() == p.alpha.size(), ErrorCode::kInvalidParameter,
              "F disagrees with the number of alpha entries");
    }
    p.kind = j.contains("kind") ? parse_placement_kind(j.at("kind").get<std::string>())
                                : PlacementKind::kCustom;
    return p;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidParameter, std::string("bad placement JSON: ") + e.what());
  }
}

inline json to_json(const ValidationReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back({{"rule", v.rule}, {"detail", v.detail}});
  json load = json::array();
  for (const auto& l : r.per_database_load) load.push_back(to_string(l));
  return json{{"valid", r.valid},
              {"runnable", r.runnable()},
              {"capacity_sufficient", r.capacity_sufficient},
              {"violations", std::move(violations)},
              {"per_database_load", std::move(load)}};
}

inline json to_json(const SessionTranscript& tx) {
  json groups = json::array();
  for (std::size_t i = 0; i < tx.plans.size(); ++i) {
    const auto& plan = tx.plans[i];
    json lines = json::array();
    for (const auto& q : plan.queries) lines.push_back(format_query(plan.database_of(q), q));
    json members = json::array();
    for (const auto n : plan.context.databases) members.push_back(n + 1);
    json answers = json::array();
    for (const auto a : tx.answers.at(i)) answers.push_back(static_cast<int>(a));
    groups.push_back({{"group", plan.context.submessage + 1},
                      {"offset", plan.context.offset},
                      {"databases", std::move(members)},
                      {"start", plan.context.databases.at(plan.start) + 1},
                      {"queries", std::move(lines)},
                      {"answers", std::move(answers)}});
  }
  return json{{"theta", tx.desired + 1},
              {"K", tx.messages},
              {"L", tx.length},
              {"engine", std::string(to_string(tx.engine))},
              {"seed", tx.seed},
              {"placement", to_json(tx.placement)},
              {"groups", std::move(groups)},
              {"D", tx.downloads},
              {"rate", to_string(tx.rate())},
              {"decoded", tx.decoded.to_string()}};
}

inline json to_json(const RateReport& r) {
  json out{{"measured_rate", to_string(r.measured_rate)},
           {"measured_rate_float", to_double(r.measured_rate)},
           {"capacity", to_string(r.capacity)},
           {"capacity_float", to_double(r.capacity)},
           {"achieves_capacity", r.achieves_capacity},
           {"L", r.message_length_used},
           {"D", r.downloads}};
  out["baseline_length"] = r.baseline_length ? json(*r.baseline_length) : json(nullptr);
  return out;
}

// {mode, passed, max_tv:"p/q"|float, trials, per_database:[...]}.
inline json to_json(const PrivacyVerdict& v) {
  const bool exact = v.mode == AuditMode::kExhaustive;
  json per = json::array();
  for (const auto& d : v.per_database) {
    json entry{{"database", d.database + 1}};
    entry["max_tv"] = exact ? json(to_string(d.tv_exact)) : json(d.tv_estimate);
    if (exact ? d.tv_exact > 0 : d.tv_estimate > 0) {
      entry["worst_pair"] = json::array({d.theta_a + 1, d.theta_b + 1});
    }
    per.push_back(std::move(entry));
  }
  json out{{"mode", std::string(to_string(v.mode))}, {"passed", v.passed}};
  out["max_tv"] = exact ? json(to_string(v.max_tv_exact)) : json(v.max_tv_estimate);
  out["trials"] = v.trials;
  if (exact) {
    out["outcomes"] = v.outcomes;
  } else {
    out["threshold"] = v.threshold;
  }
  out["per_database"] = std::move(per);
  return out;
}

}  // namespace scpir
