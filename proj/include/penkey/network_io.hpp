// JSON network documents.
//
//   {
//     "n_vertices": 3,
//     "seekers": [1, 2, 3],
//     "names": ["Alice", "Bob", "Carol"],          (optional)
//     "edges": [
//       {"u": 1, "v": 2, "state": {"type": "bell"}},
//       {"u": 2, "v": 3, "state": {"type": "pure", "schmidt": [0.9, 0.1]},
//        "multiplicity": 2},
//       {"u": 1, "v": 3, "state": {"type": "dense_pure", "dims": [2, 2],
//                                  "amplitudes": [0.6, 0, 0, [0, 0.8]]}},
//       {"u": 3, "v": 4, "state": {"type": "dense_mixed", "dims": [2, 2],
//                                  "matrix": [[...], ...]}},
//       {"u": 4, "v": 5, "state": {"type": "weight_override", "weight": 0.3}}
//     ]
//   }
//
// Complex entries are a number (real) or a [re, im] pair. Unknown fields
// are rejected.

#pragma once

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"

#include "penkey/network.hpp"

namespace penkey {

namespace detail {

using Json = nlohmann::ordered_json;

[[noreturn]] inline void schema_error(const std::string& locus,
                                      const std::string& what) {
  throw InputError(locus + ": " + what);
}

inline void check_fields(const Json& obj, const std::string& locus,
                         std::initializer_list<const char*> allowed,
                         std::initializer_list<const char*> required) {
  if (!obj.is_object()) schema_error(locus, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) schema_error(locus, "unknown field '" + key + "'");
  }
  for (const char* r : required) {
    if (!obj.contains(r)) schema_error(locus, std::string("missing field '") + r + "'");
  }
}

inline int get_int(const Json& j, const std::string& locus) {
  if (!j.is_number_integer()) schema_error(locus, "expected an integer");
  return j.get<int>();
}

inline double get_real(const Json& j, const std::string& locus) {
  if (!j.is_number()) schema_error(locus, "expected a number");
  return j.get<double>();
}

inline Complex get_complex(const Json& j, const std::string& locus) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  schema_error(locus, "expected a number or a [re, im] pair");
}

inline Json put_complex(Complex z) { return Json::array({z.real(), z.imag()}); }

inline std::pair<std::size_t, std::size_t> get_dims(const Json& j,
                                                    const std::string& locus) {
  if (!j.is_array() || j.size() != 2) schema_error(locus, "expected [dim_a, dim_b]");
  const int a = get_int(j[0], locus + "[0]");
  const int b = get_int(j[1], locus + "[1]");
  if (a < 1 || b < 1) schema_error(locus, "dimensions must be positive");
  return {static_cast<std::size_t>(a), static_cast<std::size_t>(b)};
}

inline EdgeState parse_state(const Json& j, const std::string& locus) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    schema_error(locus, "expected an object with a string 'type'");
  }
  const std::string type = j["type"].get<std::string>();
  try {
    if (type == "bell") {
      check_fields(j, locus, {"type"}, {});
      return state::Bell{};
    }
    if (type == "pure") {
      check_fields(j, locus, {"type", "schmidt"}, {"schmidt"});
      if (!j["schmidt"].is_array()) schema_error(locus + ".schmidt", "expected an array");
      state::Pure p;
      for (std::size_t i = 0; i < j["schmidt"].size(); ++i) {
        p.schmidt.push_back(
            get_real(j["schmidt"][i], locus + ".schmidt[" + std::to_string(i) + "]"));
      }
      return p;
    }
    if (type == "dense_pure") {
      check_fields(j, locus, {"type", "dims", "amplitudes"}, {"dims", "amplitudes"});
      const auto [da, db] = get_dims(j["dims"], locus + ".dims");
      const Json& amps = j["amplitudes"];
      if (!amps.is_array()) schema_error(locus + ".amplitudes", "expected an array");
      CVector v(static_cast<Eigen::Index>(amps.size()));
      for (std::size_t i = 0; i < amps.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) =
            get_complex(amps[i], locus + ".amplitudes[" + std::to_string(i) + "]");
      }
      return state::DensePure{PureBipartiteState(da, db, std::move(v))};
    }
    if (type == "dense_mixed") {
      check_fields(j, locus, {"type", "dims", "matrix"}, {"dims", "matrix"});
      const auto [da, db] = get_dims(j["dims"], locus + ".dims");
      const Json& rows = j["matrix"];
      const std::size_t d = da * db;
      if (!rows.is_array() || rows.size() != d) {
        schema_error(locus + ".matrix", "expected " + std::to_string(d) + " rows");
      }
      CMatrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
      for (std::size_t r = 0; r < d; ++r) {
        const std::string row_locus = locus + ".matrix[" + std::to_string(r) + "]";
        if (!rows[r].is_array() || rows[r].size() != d) {
          schema_error(row_locus, "expected " + std::to_string(d) + " entries");
        }
        for (std::size_t c = 0; c < d; ++c) {
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
              get_complex(rows[r][c], row_locus + "[" + std::to_string(c) + "]");
        }
      }
      return state::DenseMixed{da, db, DensityMatrix(std::move(m))};
    }
    if (type == "weight_override") {
      check_fields(j, locus, {"type", "weight"}, {"weight"});
      return state::WeightOverride{get_real(j["weight"], locus + ".weight")};
    }
  } catch (const InputError& e) {
    const std::string what = e.what();
    if (what.rfind(locus, 0) == 0) throw;
    schema_error(locus, what);
  }
  schema_error(locus + ".type", "unknown state type '" + type + "'");
}

inline Json state_to_json(const EdgeState& s) {
  Json j;
  j["type"] = state_tag(s);
  if (const auto* p = std::get_if<state::Pure>(&s)) {
    j["schmidt"] = p->schmidt;
  } else if (const auto* d = std::get_if<state::DensePure>(&s)) {
    j["dims"] = {d->state.dim_a(), d->state.dim_b()};
    Json amps = Json::array();
    for (Eigen::Index i = 0; i < d->state.amplitudes().size(); ++i)
      amps.push_back(put_complex(d->state.amplitudes()(i)));
    j["amplitudes"] = std::move(amps);
  } else if (const auto* m = std::get_if<state::DenseMixed>(&s)) {
    j["dims"] = {m->dim_a, m->dim_b};
    Json rows = Json::array();
    const CMatrix& mat = m->rho.matrix();
    for (Eigen::Index r = 0; r < mat.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < mat.cols(); ++c) row.push_back(put_complex(mat(r, c)));
      rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
  } else if (const auto* w = std::get_if<state::WeightOverride>(&s)) {
    j["weight"] = w->weight;
  }
  return j;
}

}  // namespace detail

inline PenNetwork network_from_json(const nlohmann::ordered_json& doc) {
  using detail::check_fields;
  check_fields(doc, "network", {"n_vertices", "seekers", "edges", "names"},
               {"n_vertices", "seekers", "edges"});
  const int n = detail::get_int(doc["n_vertices"], "n_vertices");

  if (!doc["seekers"].is_array()) detail::schema_error("seekers", "expected an array");
  std::vector<Vertex> seekers;
  for (std::size_t i = 0; i < doc["seekers"].size(); ++i) {
    seekers.push_back(detail::get_int(doc["seekers"][i], "seekers[" + std::to_string(i) + "]"));
  }

  std::vector<std::string> names;
  if (doc.contains("names")) {
    const auto& js = doc["names"];
    if (!js.is_array()) detail::schema_error("names", "expected an array of strings");
    for (std::size_t i = 0; i < js.size(); ++i) {
      if (!js[i].is_string()) {
        detail::schema_error("names[" + std::to_string(i) + "]", "expected a string");
      }
      names.push_back(js[i].get<std::string>());
    }
  }

  if (!doc["edges"].is_array()) detail::schema_error("edges", "expected an array");
  std::vector<EdgeSpec> edges;
  for (std::size_t i = 0; i < doc["edges"].size(); ++i) {
    const std::string locus = "edges[" + std::to_string(i) + "]";
    const auto& je = doc["edges"][i];
    check_fields(je, locus, {"u", "v", "state", "multiplicity"}, {"u", "v", "state"});
    EdgeSpec spec{detail::get_int(je["u"], locus + ".u"),
                  detail::get_int(je["v"], locus + ".v"),
                  detail::parse_state(je["state"], locus + ".state"), 1};
    if (je.contains("multiplicity")) {
      spec.multiplicity = detail::get_int(je["multiplicity"], locus + ".multiplicity");
    }
    edges.push_back(std::move(spec));
  }
  return PenNetwork(n, std::move(edges), std::move(seekers), std::move(names));
}

inline PenNetwork load_network(const std::string& document) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("parse error: ") + e.what());
  }
  return network_from_json(doc);
}

inline PenNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_network(buf.str());
}

inline nlohmann::ordered_json network_to_json(const PenNetwork& net) {
  nlohmann::ordered_json doc;
  doc["n_vertices"] = net.n_vertices();
  doc["seekers"] = net.seekers();
  if (!net.names().empty()) doc["names"] = net.names();
  doc["edges"] = nlohmann::ordered_json::array();
  for (const EdgeSpec& e : net.edges()) {
    nlohmann::ordered_json je;
    je["u"] = e.u;
    je["v"] = e.v;
    je["state"] = detail::state_to_json(e.state);
    if (e.multiplicity != 1) je["multiplicity"] = e.multiplicity;
    doc["edges"].push_back(std::move(je));
  }
  return doc;
}

inline std::string serialize_network(const PenNetwork& net) {
  return network_to_json(net).dump(2);
}

}  // namespace penkey
