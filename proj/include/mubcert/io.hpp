#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "mubcert/mub.hpp"

namespace mubcert {

/// {"dim": d, "effects": [[[re, im], ...], ...]}, each effect a row-major
/// list of d*d complex entries. Doubles round-trip exactly.
nlohmann::json to_json(const Measurement& m);
Measurement measurement_from_json(const nlohmann::json& j);

/// {"construction": ..., "dim": d, "first": Measurement, "second": Measurement}
nlohmann::json to_json(const MubPair& pair);
MubPair mub_pair_from_json(const nlohmann::json& j);

/// H_S, N(A), N(B), s_max and the unbiasedness check for a pair.
nlohmann::json mub_metrics(const MubPair& pair);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace mubcert
