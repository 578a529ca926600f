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

// Command-line driver: run sessions, sweep t, audit privacy, inspect
// placements and evaluate the capacity formulas.
//
// Exit codes: 0 success, 1 assertion or audit failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "scpir/harness.hpp"
#include "scpir/json_io.hpp"
#include "scpir/scpir.hpp"

namespace {

using scpir::json;

struct CommonFlags {
  std::size_t n = 0;
  std::size_t k = 0;
  std::string mu;
  std::string t;
  std::string placement;
  std::string engine = "auto";
  std::uint64_t seed = 1;
  std::size_t trials = 1;
  std::string theta = "1";
  std::string out;
  std::string format = "json";
  std::size_t workers = 1;
  std::int64_t length = 0;
  std::string config;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--n", f.n, "number of databases N");
  app->add_option("--k", f.k, "number of messages K");
  app->add_option("--mu", f.mu, "storage fraction mu as p/q");
  app->add_option("--t", f.t, "replication factor t = mu*N as p/q");
  app->add_option("--placement", f.placement, "partition|cyclic|mixed (default by t)");
  app->add_option("--engine", f.engine, "a|b|auto");
  app->add_option("--seed", f.seed, "root seed");
  app->add_option("--trials", f.trials, "number of trials");
  app->add_option("--theta", f.theta, "desired message (one-based) or 'uniform'");
  app->add_option("--out", f.out, "output file (default stdout)");
  app->add_option("--format", f.format, "csv|json");
  app->add_option("--workers", f.workers, "worker threads");
  app->add_option("--l", f.length, "message length L (default: smallest admissible)");
  app->add_option("--config", f.config, "JSON config file mirroring the flags");
}

scpir::ExperimentConfig to_config(const CommonFlags& f) {
  scpir::ExperimentConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    scpir::require(static_cast<bool>(in), scpir::ErrorCode::kIo, "cannot open " + f.config);
    try {
      c = scpir::config_from_json(json::parse(in));
    } catch (const json::exception& e) {
      scpir::fail(scpir::ErrorCode::kInvalidParameter, std::string("config parse: ") + e.what());
    }
  }
  if (f.n) c.databases = f.n;
  if (f.k) c.messages = f.k;
  if (!f.mu.empty()) c.mu = scpir::parse_rational(f.mu);
  if (!f.t.empty()) c.t = scpir::parse_rational(f.t);
  if (!f.placement.empty()) c.kind = scpir::parse_placement_kind(f.placement);
  if (f.engine != "auto" || f.config.empty()) c.engine = scpir::parse_engine(f.engine);
  if (f.seed != 1 || f.config.empty()) c.seed = f.seed;
  if (f.trials != 1 || f.config.empty()) c.trials = f.trials;
  if (f.workers != 1 || f.config.empty()) c.workers = f.workers;
  if (f.length > 0) c.length = f.length;
  if (f.theta == "uniform") {
    c.theta.reset();
  } else if (f.theta != "1" || f.config.empty()) {
    const auto v = std::stoul(f.theta);
    scpir::require(v >= 1, scpir::ErrorCode::kInvalidParameter, "theta is one-based");
    c.theta = v - 1;
  }
  if (!f.out.empty()) c.out = f.out;
  return c;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  scpir::require(static_cast<bool>(out), scpir::ErrorCode::kIo, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Storage-constrained private information retrieval toolkit"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  std::string transcript_path;
  std::string library_in;
  std::string library_out;
  auto* run = app.add_subcommand("run", "execute private retrievals and report the rate");
  add_common(run, run_flags);
  run->add_option("--transcript", transcript_path, "write the first trial's transcript JSON");
  run->add_option("--library", library_in, "load the library from a binary file");
  run->add_option("--save-library", library_out, "write the generated library");

  CommonFlags sweep_flags;
  sweep_flags.format = "csv";
  std::string grid = "1:1:1";
  auto* sweep = app.add_subcommand("sweep", "capacity and measured rate over a t grid (CSV)");
  add_common(sweep, sweep_flags);
  sweep->add_option("--grid", grid, "t values 'a,b/c,...' or 'lo:hi:step'");

  CommonFlags audit_flags;
  std::string mode = "statistical";
  double threshold = 0.05;
  std::uint64_t budget = 2'000'000;
  std::string start = "uniform";
  bool no_permutation = false;
  bool break_symmetry = false;
  bool desired_only = false;
  bool skip_sums = false;
  auto* audit = app.add_subcommand("audit", "check that queries do not reveal the desired message");
  add_common(audit, audit_flags);
  audit->add_option("--mode", mode, "exhaustive|statistical");
  audit->add_option("--threshold", threshold, "statistical pass threshold on TV distance");
  audit->add_option("--budget", budget, "exhaustive: max randomness outcomes per chunk");
  audit->add_option("--start", start, "engine B start database: uniform|anchor");
  audit->add_flag("--no-permutation", no_permutation, "mutant: identity permutations");
  audit->add_flag("--break-symmetry", break_symmetry, "mutant: asymmetric query types");
  audit->add_flag("--desired-only", desired_only, "mutant: request only desired bits");
  audit->add_flag("--skip-sums", skip_sums, "mutant: omit undesired sums after round one");

  CommonFlags placement_flags;
  std::string placement_file;
  auto* placement = app.add_subcommand("placement", "print and validate a placement");
  add_common(placement, placement_flags);
  placement->add_option("--file", placement_file, "validate a placement JSON file instead");

  CommonFlags capacity_flags;
  auto* capacity = app.add_subcommand("capacity", "evaluate capacity and message-length formulas");
  add_common(capacity, capacity_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? scpir::kExitOk : scpir::kExitUsage;
  }

  try {
    if (*run) {
      auto config = to_config(run_flags);
      if (!transcript_path.empty()) config.transcript_out = transcript_path;
      if (!library_in.empty()) config.library_in = library_in;
      std::optional<scpir::Library> library;
      if (!config.library_in.empty()) {
        std::ifstream in(config.library_in, std::ios::binary);
        scpir::require(static_cast<bool>(in), scpir::ErrorCode::kIo, "cannot open " + config.library_in);
        library = scpir::read_library(in);
        if (!config.length) config.length = static_cast<std::int64_t>(library->message_length());
        if (!config.messages) config.messages = library->message_count();
      }
      const auto outcome = scpir::cmd_run(config, library);
      if (!library_out.empty()) {
        std::ofstream out(library_out, std::ios::binary);
        scpir::write_library(out, library ? *library
                                          : scpir::build_library(config.messages,
                                                                 static_cast<std::size_t>(outcome.report.message_length_used),
                                                                 config.seed));
      }
      if (!config.transcript_out.empty()) emit(config.transcript_out, outcome.first_transcript.dump(2) + "\n");
      emit(config.out, outcome.report_json.dump(2) + "\n");
      return outcome.exit_code;
    }

    if (*sweep) {
      const auto config = to_config(sweep_flags);
      scpir::require(config.databases >= 1 && config.messages >= 1, scpir::ErrorCode::kInvalidParameter,
                     "sweep needs --n and --k");
      const auto rows = scpir::cmd_sweep(config.databases, config.messages, scpir::parse_t_grid(grid),
                                         config.engine, config.seed);
      if (sweep_flags.format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
          arr.push_back({{"t", scpir::to_string(r.t)},
                         {"K", r.messages},
                         {"N", r.databases},
                         {"rate", scpir::to_string(r.rate)},
                         {"capacity", scpir::to_string(r.capacity)},
                         {"L", r.length},
                         {"L_baseline", r.baseline ? json(*r.baseline) : json(nullptr)},
                         {"D", r.downloads}});
        }
        emit(config.out, arr.dump(2) + "\n");
      } else {
        emit(config.out, scpir::sweep_csv(rows));
      }
      bool all_equal = true;
      for (const auto& r : rows) all_equal = all_equal && r.rate == r.capacity;
      return all_equal ? scpir::kExitOk : scpir::kExitFailure;
    }

    if (*audit) {
      const auto config = to_config(audit_flags);
      config.check();
      scpir::AuditConfig ac;
      ac.databases = config.databases;
      ac.messages = config.messages;
      ac.t = config.replication();
      ac.kind = config.kind ? *config.kind : scpir::default_placement(config.databases, ac.t).kind;
      ac.engine = config.engine;
      ac.length = config.length;
      ac.seed = config.seed;
      ac.trials = audit_flags.trials == 1 && audit_flags.config.empty() ? 10'000 : config.trials;
      ac.workers = config.workers;
      ac.threshold = threshold;
      ac.budget = budget;
      scpir::require(start == "uniform" || start == "anchor", scpir::ErrorCode::kInvalidParameter,
                     "--start is uniform or anchor");
      ac.start = start == "anchor" ? scpir::StartPolicy::kAnchor : scpir::StartPolicy::kUniform;
      const int mutants = int{no_permutation} + int{break_symmetry} + int{desired_only} + int{skip_sums};
      scpir::require(mutants <= 1, scpir::ErrorCode::kInvalidParameter, "choose at most one mutant");
      if (no_permutation) ac.mutation = scpir::Mutation::kNoPermutation;
      if (break_symmetry) ac.mutation = scpir::Mutation::kAsymmetricTypes;
      if (desired_only) ac.mutation = scpir::Mutation::kDesiredOnly;
      if (skip_sums) ac.mutation = scpir::Mutation::kSkipUndesiredSums;
      scpir::require(mode == "exhaustive" || mode == "statistical", scpir::ErrorCode::kInvalidParameter,
                     "--mode is exhaustive or statistical");
      const auto verdict = scpir::cmd_audit(
          ac, mode == "exhaustive" ? scpir::AuditMode::kExhaustive : scpir::AuditMode::kStatistical);
      emit(config.out, scpir::to_json(verdict).dump(2) + "\n");
      return verdict.passed ? scpir::kExitOk : scpir::kExitFailure;
    }

    if (*placement) {
      scpir::PlacementSpec spec;
      auto config = to_config(placement_flags);
      if (!placement_file.empty()) {
        std::ifstream in(placement_file);
        scpir::require(static_cast<bool>(in), scpir::ErrorCode::kIo, "cannot open " + placement_file);
        try {
          spec = scpir::placement_from_json(json::parse(in));
        } catch (const json::exception& e) {
          scpir::fail(scpir::ErrorCode::kInvalidParameter, std::string("placement parse: ") + e.what());
        }
        if (!config.databases) config.databases = spec.databases;
        if (!config.mu && !config.t) config.t = spec.t;
      } else {
        if (!config.messages) config.messages = 1;
        config.check();
        spec = config.placement();
      }
      const auto t = config.replication();
      const auto mu = t / static_cast<std::int64_t>(spec.databases);
      const auto messages = config.messages ? config.messages : 1;
      const auto engine = scpir::resolve_engine(config.engine, spec.kind);
      const auto length = config.length ? *config.length
                                        : scpir::min_message_length_general(spec, messages, engine);
      const auto report = scpir::validate_placement(spec, mu, messages, static_cast<std::size_t>(length), engine);
      json out{{"placement", scpir::to_json(spec)},
               {"mu", scpir::to_string(mu)},
               {"K", messages},
               {"L", length},
               {"engine", std::string(scpir::to_string(engine))},
               {"validation", scpir::to_json(report)}};
      emit(config.out, out.dump(2) + "\n");
      return report.valid ? scpir::kExitOk : scpir::kExitFailure;
    }

    if (*capacity) {
      const auto config = to_config(capacity_flags);
      scpir::require(config.messages >= 1, scpir::ErrorCode::kInvalidParameter, "capacity needs --k");
      scpir::require(config.mu.has_value() != config.t.has_value(), scpir::ErrorCode::kInvalidParameter,
                     "give exactly one of --mu and --t");
      scpir::require(config.t || config.databases >= 1, scpir::ErrorCode::kInvalidParameter,
                     "--mu needs --n");
      const auto t = config.replication();
      json out{{"t", scpir::to_string(t)},
               {"K", config.messages},
               {"capacity", scpir::to_string(config.databases
                                                 ? scpir::capacity_general_t(t, config.messages, config.databases)
                                                 : scpir::capacity_general_t(t, config.messages))}};
      if (config.databases >= 1 && scpir::is_integer(t)) {
        const auto ti = static_cast<std::size_t>(t.numerator());
        out["N"] = config.databases;
        out["L_min"] = scpir::min_message_length(config.databases, ti, config.messages);
        out["L_baseline"] = scpir::baseline_message_length(config.databases, ti, config.messages);
      }
      emit(config.out, out.dump(2) + "\n");
      return scpir::kExitOk;
    }
  } catch (const scpir::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
      case scpir::ErrorCode::kInternal:
      case scpir::ErrorCode::kDecodeFailure:
        return scpir::kExitFailure;
      default:
        return scpir::kExitUsage;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return scpir::kExitUsage;
  }
  return scpir::kExitUsage;
}
