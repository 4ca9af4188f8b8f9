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

#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vdc {

/// One control-rate sample of the closed-loop trace.
struct TraceRow {
  double t = 0.0;
  double v_ref = 0.0;
  double v = 0.0;
  double throttle = 0.0;
  double brake = 0.0;
  double delta_f = 0.0;
  double y_ref = 0.0;
  double y = 0.0;
  double psi_ref = 0.0;
  double psi = 0.0;
  double cf_hat = 0.0;
  double cr_hat = 0.0;
  double wind_speed = 0.0;
  double wind_heading = 0.0;
  double mpc_cost = 0.0;
  double mpc_slack = 0.0;
  double solve_ms = 0.0;

  std::array<double, 17> values() const {
    return {t,   v_ref,  v,      throttle, brake,        delta_f,      y_ref,
            y,   psi_ref, psi,   cf_hat,   cr_hat,       wind_speed,
            wind_heading, mpc_cost, mpc_slack, solve_ms};
  }

  static TraceRow from_values(const std::array<double, 17>& c) {
    TraceRow r;
    r.t = c[0]; r.v_ref = c[1]; r.v = c[2]; r.throttle = c[3]; r.brake = c[4];
    r.delta_f = c[5]; r.y_ref = c[6]; r.y = c[7]; r.psi_ref = c[8]; r.psi = c[9];
    r.cf_hat = c[10]; r.cr_hat = c[11]; r.wind_speed = c[12];
    r.wind_heading = c[13]; r.mpc_cost = c[14]; r.mpc_slack = c[15];
    r.solve_ms = c[16];
    return r;
  }
};

inline const char* trace_csv_header() {
  return "t,v_ref,v,throttle,brake,delta_f,y_ref,y,psi_ref,psi,cf_hat,cr_hat,"
         "wind_speed,wind_heading,mpc_cost,mpc_slack,solve_ms";
}

/// Shortest round-trip-exact decimal representation of a double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void export_csv(const std::vector<TraceRow>& rows, std::ostream& os) {
  os << trace_csv_header() << '\n';
  for (const auto& row : rows) {
    const auto v = row.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) os << ',';
      os << format_double(v[i]);
    }
    os << '\n';
  }
}

inline void export_csv(const std::vector<TraceRow>& rows, const std::string& path) {
  std::ofstream f(path, std::ios::binary);  // LF line endings on all platforms
  if (!f) throw std::runtime_error("export_csv: cannot open " + path);
  export_csv(rows, f);
  f.flush();
  if (!f) throw std::runtime_error("export_csv: write failed for " + path);
}

inline std::vector<TraceRow> parse_trace_csv(std::istream& is) {
  std::vector<TraceRow> rows;
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("parse_trace_csv: empty input");
  if (line != trace_csv_header())
    throw std::runtime_error("parse_trace_csv: unexpected header");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::array<double, 17> c{};
    std::size_t pos = 0;
    for (int i = 0; i < 17; ++i) {
      const std::size_t next = line.find(',', pos);
      const bool last = i == 16;
      if ((last && next != std::string::npos) || (!last && next == std::string::npos))
        throw std::runtime_error("parse_trace_csv: expected 17 columns");
      const std::string field =
          line.substr(pos, last ? std::string::npos : next - pos);
      c[i] = std::stod(field);
      pos = next + 1;
    }
    rows.push_back(TraceRow::from_values(c));
  }
  return rows;
}

inline std::vector<TraceRow> parse_trace_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("parse_trace_csv: cannot open " + path);
  return parse_trace_csv(f);
}

}  // namespace vdc
