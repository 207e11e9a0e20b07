#pragma once

// Run-configuration parsing and deterministic result files (JSON schema 1,
// CSV with 17 significant digits, rows in basis_index site order).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "perqwalk/coin.hpp"
#include "perqwalk/evolution.hpp"
#include "perqwalk/lattice.hpp"

namespace perqwalk {

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Value grammar: <re>[<sign><im>i], e.g. "0.5", "-0.5+0.5i", "0-1i".
inline Complex parse_complex(const std::string& text) {
  const char* s = text.c_str();
  char* end = nullptr;
  double re = std::strtod(s, &end);
  if (end == s) throw parse_error("bad complex literal: " + text);
  if (*end == '\0') return Complex(re, 0.0);
  if (*end != '+' && *end != '-')
    throw parse_error("bad complex literal: " + text);
  const char* imstart = end;
  double im = std::strtod(imstart, &end);
  if (end == imstart || *end != 'i' || *(end + 1) != '\0')
    throw parse_error("bad complex literal: " + text);
  return Complex(re, im);
}

// Initial-state grammar: "s,t:L=<re>[+<im>i],D=...,U=...,R=..." with omitted
// directions zero. Unnormalized states are rejected, not renormalized.
inline std::pair<Site, Vector4> parse_initial_state(const std::string& text,
                                                    const LatticeSpec& spec) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw parse_error("initial state must look like \"s,t:L=...,...\"");
  auto comma = text.find(',');
  if (comma == std::string::npos || comma > colon)
    throw parse_error("bad initial position in: " + text);
  Site site;
  try {
    site.s = std::stoi(text.substr(0, comma));
    site.t = std::stoi(text.substr(comma + 1, colon - comma - 1));
  } catch (const std::exception&) {
    throw parse_error("bad initial position in: " + text);
  }
  if (!spec.valid_site(site))
    throw parse_error("initial position outside the lattice");

  Vector4 amps = Vector4::Zero();
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq != 1 || item.empty())
      throw parse_error("bad coin amplitude entry: " + item);
    int c;
    switch (item[0]) {
      case 'L': c = 0; break;
      case 'D': c = 1; break;
      case 'U': c = 2; break;
      case 'R': c = 3; break;
      default: throw parse_error("unknown direction in: " + item);
    }
    amps(c) = parse_complex(item.substr(2));
  }
  if (std::abs(amps.norm() - 1.0) > 1e-9)
    throw parse_error("initial coin state is not normalized (norm = " +
                      fmt17(amps.norm()) + ")");
  return {site, amps};
}

inline Vector product_initial_state(Site site, const Vector4& coin_amps,
                                    const LatticeSpec& spec) {
  Vector psi = Vector::Zero(spec.dim());
  for (int c = 0; c < 4; ++c)
    psi(basis_index(site, static_cast<Direction>(c), spec)) = coin_amps(c);
  return psi;
}

// Custom coin file: JSON 4x4 array of [re, im] pairs in (L,D,U,R) order.
inline CoinOperator load_coin_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open coin file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("coin file is not valid JSON: " + std::string(e.what()));
  }
  if (!j.is_array() || j.size() != 4)
    throw parse_error("coin file must hold a 4x4 array");
  Matrix4 m;
  for (int r = 0; r < 4; ++r) {
    if (!j[r].is_array() || j[r].size() != 4)
      throw parse_error("coin file must hold a 4x4 array");
    for (int c = 0; c < 4; ++c) {
      const auto& cell = j[r][c];
      if (!cell.is_array() || cell.size() != 2)
        throw parse_error("coin entries must be [re, im] pairs");
      m(r, c) = Complex(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return make_custom_coin(m);
}

inline nlohmann::json distribution_to_json(const PositionDistribution& dist) {
  nlohmann::json rows = nlohmann::json::array();
  for (int s = 0; s < dist.M; ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (int t = 0; t < dist.N; ++t) row.push_back(dist.at(s, t));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_distribution_json(std::ostream& out,
                                    const PositionDistribution& dist,
                                    const nlohmann::json& meta) {
  nlohmann::json j;
  j["schema"] = 1;
  j["meta"] = meta;
  j["distribution"] = distribution_to_json(dist);
  if (!dist.stderr_.empty()) {
    PositionDistribution err;
    err.M = dist.M;
    err.N = dist.N;
    err.prob = dist.stderr_;
    j["stderr"] = distribution_to_json(err);
  }
  out << j.dump(2) << "\n";
}

inline void write_distribution_csv(std::ostream& out,
                                   const PositionDistribution& dist) {
  const bool with_err = !dist.stderr_.empty();
  out << (with_err ? "s,t,P,stderr\n" : "s,t,P\n");
  for (int s = 0; s < dist.M; ++s)
    for (int t = 0; t < dist.N; ++t) {
      out << s << "," << t << "," << fmt17(dist.at(s, t));
      if (with_err) out << "," << fmt17(dist.stderr_[s * dist.N + t]);
      out << "\n";
    }
}

// Strict reader: schema must be 1 and unknown top-level fields are rejected.
inline nlohmann::json read_distribution_json(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw parse_error("result file is not valid JSON: " +
                      std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("schema") || j["schema"] != 1)
    throw parse_error("unsupported result schema");
  for (const auto& [key, _] : j.items())
    if (key != "schema" && key != "meta" && key != "distribution" &&
        key != "stderr")
      throw parse_error("unknown field in result file: " + key);
  if (!j.contains("distribution"))
    throw parse_error("result file has no distribution");
  return j;
}

inline PositionDistribution distribution_from_json(const nlohmann::json& j) {
  const auto& rows = j.at("distribution");
  PositionDistribution dist;
  dist.M = static_cast<int>(rows.size());
  dist.N = dist.M > 0 ? static_cast<int>(rows[0].size()) : 0;
  for (const auto& row : rows)
    for (const auto& v : row) dist.prob.push_back(v.get<double>());
  return dist;
}

}  // namespace perqwalk
