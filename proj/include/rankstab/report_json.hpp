#pragma once

#include <nlohmann/json.hpp>

#include "rankstab/dense_region.hpp"
#include "rankstab/engine.hpp"
#include "rankstab/synthetic.hpp"

namespace rankstab {

// Reports are serialized with a fixed key order (alphabetical) and every
// real rounded to six significant digits, so identical runs produce
// byte-identical output.
double round_sig(double x, int digits = 6);

nlohmann::json json_real(double x);
nlohmann::json json_vector(const Vector& v);
nlohmann::json json_boundary(const Boundary& b);

nlohmann::json to_json(const EngineConfig& c);
nlohmann::json to_json(const StabilityReport& r);
nlohmann::json to_json(const DenseRegionReport& r);
nlohmann::json truth_to_json(const std::map<std::string, TupleTruth>& truth);

std::string dump_report(const nlohmann::json& j);  // 2-space indent, trailing newline

}  // namespace rankstab
