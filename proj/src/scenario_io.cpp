#include "qmerl/scenario_io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "qmerl/scenarios.hpp"

namespace qmerl {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ScenarioParseError(field.empty() ? "/" : field, message);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing required field");
  return *it;
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::size_t as_index(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(path, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::vector<std::size_t> as_index_list(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of non-negative integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_index(v[i], path + "/" + std::to_string(i)));
  return out;
}

Complex as_complex(const json& v, const std::string& path) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  fail(path, "expected a number or a [re, im] pair");
}

json complex_to_json(Complex c) { return json::array({c.real(), c.imag()}); }

Register parse_register(const json& v, const std::string& path) {
  const auto dims = as_index_list(v, path);
  if (dims.empty()) fail(path, "register needs at least one site");
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] < 2) fail(path + "/" + std::to_string(i), "site dimension must be >= 2");
  }
  return Register(dims);
}

ComplexMatrix parse_explicit_matrix(const json& rows, const std::string& path) {
  if (!rows.is_array() || rows.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t n = rows.size();
  ComplexMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    if (!rows[r].is_array() || rows[r].size() != n) fail(rp, "row must have " + std::to_string(n) + " entries");
    for (std::size_t c = 0; c < n; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          as_complex(rows[r][c], rp + "/" + std::to_string(c));
    }
  }
  return m;
}

ComplexMatrix parse_matrix_ref(const json& v, const std::string& path) {
  ComplexMatrix m;
  if (v.is_string()) {
    try {
      m = named_matrix(v.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail(path, e.what());
    }
  } else if (v.is_object() && v.contains("matrix")) {
    m = parse_explicit_matrix(v["matrix"], path + "/matrix");
  } else {
    fail(path, "expected a matrix name or {\"matrix\": [...]}");
  }
  if (!is_hermitian(m)) fail(path, "matrix is not Hermitian");
  return m;
}

json matrix_to_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return json{{"matrix", std::move(rows)}};
}

const json& params_of(const json& def, const std::string& path) {
  static const json empty = json::object();
  const auto it = def.find("params");
  if (it == def.end()) return empty;
  if (!it->is_object()) fail(path + "/params", "expected an object");
  return *it;
}

QuantumState parse_state(const json& def, const std::string& path, const Register* doc_reg);

QuantumState build_from_builder(const json& def, const std::string& path,
                                const Register* doc_reg) {
  const json& b = def["builder"];
  if (!b.is_string()) fail(path + "/builder", "expected a builder name");
  const std::string builder = b.get<std::string>();
  const std::string pp = path + "/params";
  const json& params = params_of(def, path);
  auto reg_param = [&]() -> Register {
    if (params.contains("dims")) return parse_register(params["dims"], pp + "/dims");
    if (doc_reg == nullptr) fail(pp + "/dims", "required inside composite blocks");
    return *doc_reg;
  };
  try {
    if (builder == "ghz") {
      const std::size_t n = as_index(require(params, "n", pp), pp + "/n");
      const std::size_t d = params.contains("d") ? as_index(params["d"], pp + "/d") : 2;
      if (n < 2) fail(pp + "/n", "ghz needs n >= 2");
      if (d < 2) fail(pp + "/d", "ghz needs d >= 2");
      return ghz(n, d);
    }
    if (builder == "w") {
      const std::size_t n = as_index(require(params, "n", pp), pp + "/n");
      if (n < 2) fail(pp + "/n", "w needs n >= 2");
      return w_state(n);
    }
    if (builder == "basis") {
      return basis_state(reg_param(), as_index_list(require(params, "levels", pp), pp + "/levels"));
    }
    if (builder == "haar") {
      const json& seed = require(params, "seed", pp);
      if (!seed.is_number_unsigned()) fail(pp + "/seed", "expected a non-negative integer");
      return haar_random_pure(reg_param(), seed.get<std::uint64_t>());
    }
    if (builder == "oam_ghz") {
      OamGhzParams p;
      p.mu = as_real(require(params, "mu", pp), pp + "/mu");
      if (params.contains("basisMap")) {
        const json& m = params["basisMap"];
        if (m == "positional") {
          p.basis_map = oam_positional_map();
        } else if (m == "value-ordered") {
          p.basis_map = oam_value_ordered_map();
        } else {
          fail(pp + "/basisMap", "expected \"positional\" or \"value-ordered\"");
        }
      }
      return oam_ghz(p);
    }
    if (builder == "composite") {
      const json& blocks = require(params, "blocks", pp);
      if (!blocks.is_array() || blocks.empty()) fail(pp + "/blocks", "expected a non-empty array");
      std::vector<QuantumState> states;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        states.push_back(parse_state(blocks[i], pp + "/blocks/" + std::to_string(i), nullptr));
      }
      return separable_composite(states);
    }
  } catch (const std::invalid_argument& e) {
    fail(pp, e.what());
  }
  fail(path + "/builder", "unknown builder \"" + builder + "\"");
}

QuantumState parse_state(const json& def, const std::string& path, const Register* doc_reg) {
  if (!def.is_object()) fail(path, "expected an object");
  if (def.contains("builder")) return build_from_builder(def, path, doc_reg);

  if (!def.contains("dims") && doc_reg == nullptr) {
    fail(path + "/dims", "required inside composite blocks");
  }
  const Register reg = def.contains("dims") ? parse_register(def["dims"], path + "/dims") : *doc_reg;
  if (def.contains("amplitudes")) {
    const json& amps = def["amplitudes"];
    const std::string ap = path + "/amplitudes";
    if (!amps.is_array()) fail(ap, "expected an array");
    if (amps.size() != reg.total_dim()) {
      fail(ap, "has " + std::to_string(amps.size()) + " entries but register " + reg.to_string() +
                   " needs " + std::to_string(reg.total_dim()));
    }
    ComplexVector v(static_cast<Eigen::Index>(amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = as_complex(amps[i], ap + "/" + std::to_string(i));
    }
    const bool normalize = def.value("normalize", false);
    try {
      return normalize ? QuantumState::normalized(reg, std::move(v))
                       : QuantumState::pure(reg, std::move(v));
    } catch (const std::invalid_argument& e) {
      fail(ap, e.what());
    }
  }
  if (def.contains("density")) {
    const std::string dp = path + "/density";
    ComplexMatrix rho = parse_explicit_matrix(def["density"], dp);
    if (static_cast<std::size_t>(rho.rows()) != reg.total_dim()) {
      fail(dp, "must be " + std::to_string(reg.total_dim()) + "x" + std::to_string(reg.total_dim()));
    }
    try {
      return QuantumState::mixed(reg, std::move(rho));
    } catch (const std::invalid_argument& e) {
      fail(dp, e.what());
    }
  }
  fail(path, "state needs one of \"builder\", \"amplitudes\", \"density\"");
}

}  // namespace

ComplexMatrix named_matrix(const std::string& name) {
  if (name == "sigma_x") return sigma_x();
  if (name == "sigma_y") return sigma_y();
  if (name == "sigma_z") return sigma_z();
  if (name == "pauli_sum") return sigma_x() + sigma_y() + sigma_z();
  if (name == "J_x") return spin1_x();
  if (name == "J_y") return spin1_y();
  if (name == "J_z") return spin1_z();
  if (name == "spin1_sum") return spin1_x() + spin1_y() + spin1_z();
  throw std::invalid_argument("unknown matrix name \"" + name + "\"");
}

json parse_scenario_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // the parser reports "at line L, column C"
    const std::string what = e.what();
    const auto pos = what.find("line ");
    const auto end = what.find(':', pos);
    fail(pos == std::string::npos ? "syntax" : what.substr(pos, end - pos), what);
  }
}

json read_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("file", "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

MerlScenario build_scenario(const json& doc) {
  if (!doc.is_object()) fail("/", "scenario document must be an object");
  const json& version = require(doc, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kScenarioFormatVersion) {
    fail("/version", "unsupported version (expected " + std::to_string(kScenarioFormatVersion) + ")");
  }
  const Register reg = parse_register(require(doc, "register", ""), "/register");
  QuantumState state = parse_state(require(doc, "state", ""), "/state", &reg);
  if (!(state.reg() == reg)) {
    fail("/state", "state register " + state.reg().to_string() + " does not match /register " +
                       reg.to_string());
  }

  const std::size_t measured = as_index(require(doc, "measuredSite", ""), "/measuredSite");
  if (measured >= reg.site_count()) fail("/measuredSite", "out of range for " + reg.to_string());
  const auto order = as_index_list(require(doc, "controlOrder", ""), "/controlOrder");
  if (order.empty()) fail("/controlOrder", "need at least one control site");
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] >= reg.site_count()) {
      fail("/controlOrder/" + std::to_string(i), "out of range for " + reg.to_string());
    }
  }

  const json& observables = require(doc, "observables", "");
  if (!observables.is_array() || observables.empty()) {
    fail("/observables", "expected a non-empty array");
  }
  std::vector<ObservablePair> pairs;
  for (std::size_t k = 0; k < observables.size(); ++k) {
    const std::string op = "/observables/" + std::to_string(k);
    const json& entry = observables[k];
    ObservablePair pair;
    pair.q = parse_matrix_ref(require(entry, "q", op), op + "/q");
    const json o = entry.value("o", json("same"));
    if (o == "same") {
      pair.o = pair.q;
    } else if (o.is_object() && o.contains("perSite")) {
      pair.o = pair.q;
      const json& per = o["perSite"];
      const std::string pp = op + "/o/perSite";
      if (!per.is_array()) fail(pp, "expected an array of {site, matrix}");
      for (std::size_t i = 0; i < per.size(); ++i) {
        const std::string ip = pp + "/" + std::to_string(i);
        const std::size_t site = as_index(require(per[i], "site", ip), ip + "/site");
        pair.o_per_site[site] = parse_matrix_ref(require(per[i], "operator", ip), ip + "/operator");
      }
    } else {
      pair.o = parse_matrix_ref(o, op + "/o");
    }
    pairs.push_back(std::move(pair));
  }

  std::optional<double> l_tra;
  if (doc.contains("lTra")) {
    const json& l = doc["lTra"];
    if (l.is_number()) {
      l_tra = l.get<double>();
    } else if (l != "sum") {
      fail("/lTra", "expected \"sum\" or a number");
    }
  }

  MerlTolerances tol;
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) fail("/tolerances", "expected an object");
    if (t.contains("split")) {
      tol.split = as_real(t["split"], "/tolerances/split");
      if (!(*tol.split > 0.0)) fail("/tolerances/split", "must be positive");
    }
    if (t.contains("prune")) {
      tol.prune = as_real(t["prune"], "/tolerances/prune");
      if (!(tol.prune >= 0.0)) fail("/tolerances/prune", "must be non-negative");
    }
  }

  MerlScenario scenario{std::move(state), measured, order, std::move(pairs), l_tra, tol};
  try {
    scenario.validate();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    fail(what.rfind("pair ", 0) == 0 ? "/observables" : "/controlOrder", what);
  }
  return scenario;
}

json scenario_to_json(const MerlScenario& scenario) {
  const Register& reg = scenario.state.reg();
  json state;
  if (scenario.state.is_pure()) {
    json amps = json::array();
    for (const Complex& a : scenario.state.amplitudes()) amps.push_back(complex_to_json(a));
    state["amplitudes"] = std::move(amps);
  } else {
    state["density"] = matrix_to_json(scenario.state.density())["matrix"];
  }
  json observables = json::array();
  for (const auto& pair : scenario.pairs) {
    json entry{{"q", matrix_to_json(pair.q)}};
    if (pair.o_per_site.empty() && pair.o == pair.q) {
      entry["o"] = "same";
    } else if (pair.o_per_site.empty()) {
      entry["o"] = matrix_to_json(pair.o);
    } else {
      json per = json::array();
      for (std::size_t site : scenario.control_order) {
        per.push_back({{"site", site}, {"operator", matrix_to_json(pair.control_matrix(site))}});
      }
      entry["o"] = json{{"perSite", std::move(per)}};
    }
    observables.push_back(std::move(entry));
  }
  json doc{{"version", kScenarioFormatVersion},
           {"register", reg.dims()},
           {"state", std::move(state)},
           {"measuredSite", scenario.measured_site},
           {"controlOrder", scenario.control_order},
           {"observables", std::move(observables)}};
  doc["lTra"] = scenario.explicit_l_tra ? json(*scenario.explicit_l_tra) : json("sum");
  json tol{{"prune", scenario.tolerances.prune}};
  if (scenario.tolerances.split) tol["split"] = *scenario.tolerances.split;
  doc["tolerances"] = std::move(tol);
  return doc;
}

std::string format_real(double value) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << value;
  return os.str();
}

json spectrum_to_json(const MerlSpectrum& spectrum) {
  json out{{"controlOrder", spectrum.control_order},
           {"lines", spectrum.lines},
           {"splits", spectrum.splits},
           {"splitCount", spectrum.split_count},
           {"splitTolerance", spectrum.split_tol},
           {"prunedMass", spectrum.pruned_mass},
           {"notes", spectrum.notes}};
  if (spectrum.verdict) {
    out["verdict"] = {{"particleCount", spectrum.verdict->particle_count},
                      {"admissible", spectrum.verdict->labels()},
                      {"genuinelyEntangled", spectrum.verdict->genuinely_entangled()},
                      {"note", spectrum.verdict->note}};
  } else {
    out["verdict"] = nullptr;
  }
  return out;
}

std::string spectrum_csv_header(std::size_t control_count) {
  std::ostringstream os;
  for (std::size_t m = 0; m <= control_count; ++m) os << 'L' << m << ',';
  for (std::size_t m = 1; m <= control_count; ++m) os << "split" << m << ',';
  os << "splitCount,prunedMass,verdict";
  return os.str();
}

std::string spectrum_csv_row(const MerlSpectrum& spectrum) {
  std::ostringstream os;
  for (double l : spectrum.lines) os << format_real(l) << ',';
  for (bool s : spectrum.splits) os << (s ? 1 : 0) << ',';
  os << spectrum.split_count << ',' << format_real(spectrum.pruned_mass) << ',';
  if (spectrum.verdict) {
    const auto labels = spectrum.verdict->labels();
    for (std::size_t i = 0; i < labels.size(); ++i) os << (i ? ";" : "") << labels[i];
  } else {
    os << "unclassified";
  }
  return os.str();
}

}  // namespace qmerl
