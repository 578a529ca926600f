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
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "scpir/audit.hpp"
#include "scpir/error.hpp"
#include "scpir/json_io.hpp"
#include "scpir/model.hpp"
#include "scpir/placement.hpp"
#include "scpir/rational.hpp"
#include "scpir/session.hpp"

namespace scpir {

struct ExperimentConfig {
  std::size_t databases = 0;
  std::size_t messages = 0;
  std::optional<Rational> mu;
  std::optional<Rational> t;
  std::optional<PlacementKind> kind;  // default: partition / cyclic / mixed by t
  Engine engine = Engine::kAuto;
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::optional<std::size_t> theta;  // zero-based; empty means uniform per trial
  std::optional<std::int64_t> length;
  std::size_t workers = 1;
  std::string out;
  std::string transcript_out;
  std::string library_in;
  std::string library_out;

  // t = mu * N; exactly one of the two must be given.
  Rational replication() const {
    require(mu.has_value() != t.has_value(), ErrorCode::kInvalidParameter,
            "give exactly one of mu and t");
    return t ? *t : *mu * static_cast<std::int64_t>(databases);
  }

  void check() const {
    require(databases >= 1, ErrorCode::kInvalidParameter, "N must be >= 1");
    require(messages >= 1, ErrorCode::kInvalidParameter, "K must be >= 1");
    require(trials >= 1, ErrorCode::kInvalidParameter, "trials must be >= 1");
    const auto tr = replication();
    require(tr >= 1 && tr <= static_cast<std::int64_t>(databases), ErrorCode::kInvalidParameter,
            "t=" + to_string(tr) + " outside [1, N] (mu outside [1/N, 1])");
    require(!theta || *theta < messages, ErrorCode::kInvalidParameter, "theta outside [1, K]");
  }

  PlacementSpec placement() const {
    const auto tr = replication();
    return kind ? make_placement(*kind, databases, tr) : default_placement(databases, tr);
  }
};

// JSON config mirroring the flags; theta is one-based or "uniform".
inline ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    c.databases = j.at("N").get<std::size_t>();
    c.messages = j.at("K").get<std::size_t>();
    if (j.contains("mu")) c.mu = parse_rational(j.at("mu").get<std::string>());
    if (j.contains("t")) c.t = parse_rational(j.at("t").get<std::string>());
    if (j.contains("placement")) c.kind = parse_placement_kind(j.at("placement").get<std::string>());
    if (j.contains("engine")) c.engine = parse_engine(j.at("engine").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::size_t>();
    if (j.contains("theta")) {
      const auto& th = j.at("theta");
      if (th.is_string()) {
        require(th.get<std::string>() == "uniform", ErrorCode::kInvalidParameter,
                "theta must be an index or \"uniform\"");
      } else {
        const auto v = th.get<std::size_t>();
        require(v >= 1, ErrorCode::kInvalidParameter, "theta is one-based");
        c.theta = v - 1;
      }
    }
    if (j.contains("L")) c.length = j.at("L").get<std::int64_t>();
    if (j.contains("workers")) c.workers = j.at("workers").get<std::size_t>();
    if (j.contains("out")) c.out = j.at("out").get<std::string>();
    if (j.contains("transcript")) c.transcript_out = j.at("transcript").get<std::string>();
    if (j.contains("library")) c.library_in = j.at("library").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidParameter, std::string("bad config JSON: ") + e.what());
  }
}

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

struct RunOutcome {
  RateReport report;
  ValidationReport validation;
  std::size_t decode_failures = 0;
  json report_json;
  json first_transcript;
  int exit_code = kExitOk;
};

// Executes `trials` sessions. Each trial's seed (and theta, when uniform) is
// derived from the root seed and the trial index, so the outcome is the same
// for any worker count.
inline RunOutcome cmd_run(const ExperimentConfig& config, const std::optional<Library>& preloaded = {}) {
  config.check();
  const auto placement = config.placement();
  const auto engine = resolve_engine(config.engine, placement.kind);
  const auto t = config.replication();
  const Rational mu = t / static_cast<std::int64_t>(config.databases);
  const auto length = config.length ? *config.length
                                    : min_message_length_general(placement, config.messages, engine);
  require(length >= 1, ErrorCode::kInvalidParameter, "L must be >= 1");

  RunOutcome outcome;
  outcome.validation = validate_placement(placement, mu, config.messages,
                                          static_cast<std::size_t>(length), engine);
  require(outcome.validation.runnable(), ErrorCode::kInvalidPlacement,
          outcome.validation.violations.empty()
              ? "placement rejected"
              : outcome.validation.violations.front().detail);

  const auto library = preloaded ? *preloaded
                                 : build_library(config.messages, static_cast<std::size_t>(length),
                                                 config.seed);
  require(library.message_count() == config.messages &&
              library.message_length() == static_cast<std::size_t>(length),
          ErrorCode::kInvalidParameter, "library shape does not match K and L");

  struct TrialResult {
    bool ok = false;
    std::int64_t downloads = 0;
    std::optional<SessionTranscript> transcript;
  };
  std::vector<TrialResult> results(config.trials);
  auto trial = [&](std::size_t i) {
    const auto theta = config.theta ? *config.theta
                                    : static_cast<std::size_t>(
                                          SplitMix64(derive_seed(config.seed, {0x7e7a, i})).below(config.messages));
    try {
      auto tx = run_session(library, placement, engine, theta, derive_seed(config.seed, {0x5e55, i}));
      results[i].ok = true;
      results[i].downloads = tx.downloads;
      if (i == 0) results[i].transcript = std::move(tx);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInternal && e.code() != ErrorCode::kDecodeFailure) throw;
    }
  };
  const auto workers = std::max<std::size_t>(1, std::min(config.workers, config.trials));
  if (workers == 1) {
    for (std::size_t i = 0; i < config.trials; ++i) trial(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = config.trials * w / workers; i < config.trials * (w + 1) / workers; ++i) trial(i);
      });
    }
  }

  std::int64_t total_downloads = 0;
  for (const auto& r : results) {
    if (!r.ok) ++outcome.decode_failures;
    total_downloads += r.downloads;
  }
  const auto successes = static_cast<std::int64_t>(config.trials - outcome.decode_failures);
  auto& report = outcome.report;
  report.capacity = capacity_general_t(t, config.messages);
  report.message_length_used = length;
  report.downloads = successes > 0 ? total_downloads / successes : 0;
  report.measured_rate = total_downloads > 0 ? Rational(checked_mul(length, successes), total_downloads)
                                             : Rational(0);
  report.achieves_capacity = report.measured_rate == report.capacity;
  if (is_integer(t)) {
    report.baseline_length = baseline_message_length(
        config.databases, static_cast<std::size_t>(t.numerator()), config.messages);
  }

  const bool rate_ok = !outcome.validation.capacity_sufficient || report.achieves_capacity;
  outcome.exit_code = outcome.decode_failures == 0 && rate_ok ? kExitOk : kExitFailure;

  auto& j = outcome.report_json;
  j["N"] = config.databases;
  j["K"] = config.messages;
  j["t"] = to_string(t);
  j["mu"] = to_string(mu);
  j["placement"] = std::string(to_string(placement.kind));
  j["engine"] = std::string(to_string(engine));
  j["seed"] = config.seed;
  j["trials"] = config.trials;
  j["theta"] = config.theta ? json(*config.theta + 1) : json("uniform");
  j["capacity_sufficient"] = outcome.validation.capacity_sufficient;
  j["decode_failures"] = outcome.decode_failures;
  j["report"] = to_json(report);
  j["passed"] = outcome.exit_code == kExitOk;
  if (results.front().transcript) outcome.first_transcript = to_json(*results.front().transcript);
  return outcome;
}

// "1,3/2,2" lists the points; "lo:hi:step" enumerates lo, lo+step, ... <= hi.
inline std::vector<Rational> parse_t_grid(std::string_view text) {
  std::vector<Rational> out;
  if (text.find(':') != std::string_view::npos) {
    const auto c1 = text.find(':');
    const auto c2 = text.find(':', c1 + 1);
    require(c2 != std::string_view::npos, ErrorCode::kInvalidParameter, "range is lo:hi:step");
    const auto lo = parse_rational(text.substr(0, c1));
    const auto hi = parse_rational(text.substr(c1 + 1, c2 - c1 - 1));
    const auto step = parse_rational(text.substr(c2 + 1));
    require(step > 0, ErrorCode::kInvalidParameter, "range step must be positive");
    for (auto v = lo; v <= hi; v += step) out.push_back(v);
    return out;
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (!item.empty()) out.push_back(parse_rational(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  require(!out.empty(), ErrorCode::kInvalidParameter, "empty t grid");
  return out;
}

struct SweepRow {
  Rational t{1};
  std::size_t messages = 0;
  std::size_t databases = 0;
  Rational rate{0};
  Rational capacity{0};
  std::int64_t length = 0;
  std::optional<std::int64_t> baseline;
  std::int64_t downloads = 0;

  std::optional<Rational> length_ratio() const {
    if (!baseline) return std::nullopt;
    return Rational(length, *baseline);
  }
};

// One session per t on the canonical placement, at the smallest admissible L.
inline std::vector<SweepRow> cmd_sweep(std::size_t databases, std::size_t messages,
                                       const std::vector<Rational>& grid,
                                       Engine engine = Engine::kAuto, std::uint64_t seed = 1) {
  require(databases >= 1 && messages >= 1, ErrorCode::kInvalidParameter, "need N, K >= 1");
  std::vector<SweepRow> rows;
  for (const auto& t : grid) {
    require(t >= 1 && t <= static_cast<std::int64_t>(databases), ErrorCode::kInvalidParameter,
            "t=" + to_string(t) + " outside [1, N]");
    const auto placement = default_placement(databases, t);
    const auto resolved = resolve_engine(engine, placement.kind);
    const auto length = min_message_length_general(placement, messages, resolved);
    const auto library = build_library(messages, static_cast<std::size_t>(length), seed);
    const auto tx = run_session(library, placement, resolved, 0, seed);
    SweepRow row;
    row.t = t;
    row.messages = messages;
    row.databases = databases;
    row.rate = tx.rate();
    row.capacity = capacity_general_t(t, messages);
    row.length = length;
    if (is_integer(t)) {
      row.baseline = baseline_message_length(databases, static_cast<std::size_t>(t.numerator()), messages);
    }
    row.downloads = tx.downloads;
    rows.push_back(row);
  }
  return rows;
}

// Exact columns first; the trailing float columns are for plotting only.
inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "t_num,t_den,K,N,rate_p,rate_q,capacity_p,capacity_q,L,L_baseline,D,"
         "length_ratio,rate_float,capacity_float\n";
  for (const auto& r : rows) {
    out << r.t.numerator() << ',' << r.t.denominator() << ',' << r.messages << ',' << r.databases
        << ',' << r.rate.numerator() << ',' << r.rate.denominator() << ','
        << r.capacity.numerator() << ',' << r.capacity.denominator() << ',' << r.length << ',';
    if (r.baseline) out << *r.baseline;
    out << ',' << r.downloads << ',';
    if (const auto ratio = r.length_ratio()) out << to_string(*ratio);
    char buf[64];
    std::snprintf(buf, sizeof buf, ",%.9f,%.9f\n", to_double(r.rate), to_double(r.capacity));
    out << buf;
  }
  return out.str();
}

inline PrivacyVerdict cmd_audit(const AuditConfig& config, AuditMode mode) {
  require(config.databases >= 1 && config.messages >= 1, ErrorCode::kInvalidParameter,
          "need N, K >= 1");
  return mode == AuditMode::kExhaustive ? audit_exhaustive(config) : audit_statistical(config);
}

}  // namespace scpir
