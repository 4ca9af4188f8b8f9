// Copyright 2026 the vdc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Regenerates the shipped scenario JSON files from the builtin generators.
// Run after changing any builtin (path, speeds, gains) so scenarios/ stays
// in sync; the harness tests compare the files against the generators.

#include <filesystem>
#include <iostream>
#include <string>

#include "vdc/scenario.hpp"

int main(int argc, char** argv) {
  const std::filesystem::path dir = argc > 1 ? argv[1] : "scenarios";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    std::cerr << "cannot create " << dir << ": " << ec.message() << '\n';
    return 1;
  }

  const vdc::Scenario all[] = {vdc::make_double_lane_change(),
                               vdc::make_general_track(), vdc::make_straight()};
  for (const vdc::Scenario& sc : all) {
    const std::filesystem::path file = dir / (sc.name + ".json");
    try {
      sc.validate();
      vdc::save_scenario(sc, file.string());
    } catch (const std::exception& e) {
      std::cerr << "failed writing " << file << ": " << e.what() << '\n';
      return 1;
    }
    std::cout << "wrote " << file.string() << '\n';
  }
  return 0;
}
