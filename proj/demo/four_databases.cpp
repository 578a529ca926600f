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

// Prints the query table of a four-database, three-message retrieval with
// half storage per database, one column per database.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "scpir/scpir.hpp"

int main() {
  const auto placement = scpir::partition_placement(4, 2);
  const auto library = scpir::build_library(3, 16, 7);
  const auto tx = scpir::run_session(library, placement, scpir::Engine::kA, 0, 2026);

  const char names[] = {'a', 'b', 'c'};
  std::map<std::size_t, std::vector<std::string>> columns;
  for (const auto& plan : tx.plans) {
    for (const auto& q : plan.queries) {
      std::string cell;
      for (const auto& a : q.addends) {
        if (!cell.empty()) cell += "+";
        cell += names[a.message] + std::to_string(a.submessage + 1) + "^" + std::to_string(a.bit + 1);
      }
      columns[plan.database_of(q)].push_back(cell);
    }
  }
  for (const auto& [db, cells] : columns) {
    std::cout << "DB" << db + 1 << ":";
    for (const auto& c : cells) std::cout << "  " << c;
    std::cout << "\n";
  }
  const auto report = scpir::make_rate_report(tx);
  std::cout << "L=" << tx.length << " D=" << tx.downloads
            << " rate=" << scpir::to_string(report.measured_rate)
            << " capacity=" << scpir::to_string(report.capacity) << "\n";
  return report.achieves_capacity ? 0 : 1;
}
