#include "mubcert/io.hpp"

#include <fstream>
#include <sstream>

#include "mubcert/error.hpp"

namespace mubcert {

nlohmann::json to_json(const Measurement& m) {
  nlohmann::json effects = nlohmann::json::array();
  for (const auto& e : m.effects) {
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index r = 0; r < e.rows(); ++r)
      for (Eigen::Index c = 0; c < e.cols(); ++c) entries.push_back({e(r, c).real(), e(r, c).imag()});
    effects.push_back(std::move(entries));
  }
  return {{"dim", m.dim}, {"effects", std::move(effects)}};
}

Measurement measurement_from_json(const nlohmann::json& j) {
  try {
    Measurement m;
    m.dim = j.at("dim").get<int>();
    if (m.dim < 1) throw Error(ErrorKind::ParseError, "measurement dim must be positive");
    const auto n = static_cast<std::size_t>(m.dim) * m.dim;
    for (const auto& entries : j.at("effects")) {
      if (entries.size() != n) throw Error(ErrorKind::ParseError, "effect must hold dim*dim entries");
      CMatrix e(m.dim, m.dim);
      for (std::size_t k = 0; k < n; ++k) {
        const auto& z = entries[k];
        if (!z.is_array() || z.size() != 2) throw Error(ErrorKind::ParseError, "entries are [re, im] pairs");
        e(k / m.dim, k % m.dim) = Complex(z[0].get<double>(), z[1].get<double>());
      }
      m.effects.push_back(std::move(e));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("measurement JSON: ") + e.what());
  }
}

nlohmann::json to_json(const MubPair& pair) {
  return {{"construction", to_string(pair.construction)},
          {"dim", pair.dim()},
          {"first", to_json(pair.first)},
          {"second", to_json(pair.second)}};
}

MubPair mub_pair_from_json(const nlohmann::json& j) {
  try {
    MubPair pair{measurement_from_json(j.at("first")), measurement_from_json(j.at("second")),
                 construction_from_string(j.value("construction", std::string("custom")))};
    if (pair.first.dim != pair.second.dim) throw Error(ErrorKind::DimensionMismatch, "pair dimensions differ");
    return pair;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("MUB pair JSON: ") + e.what());
  }
}

nlohmann::json mub_metrics(const MubPair& pair) {
  nlohmann::json out = {{"overlap_entropy", overlap_entropy(pair)},
                        {"norm_sum_first", norm_sum(pair.first)},
                        {"norm_sum_second", norm_sum(pair.second)},
                        {"s_max", s_max(pair)},
                        {"valid_povm", validate_povm(pair.first.effects) && validate_povm(pair.second.effects)}};
  try {
    out["unbiased"] = is_mutually_unbiased(pair);
  } catch (const Error&) {
    out["unbiased"] = false;
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << content;
  if (!out) throw Error(ErrorKind::InvalidArgument, "write failed for '" + path + "'");
}

}  // namespace mubcert
