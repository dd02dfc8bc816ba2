#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxlab/asymptotics.hpp"
#include "maxlab/interval_set.hpp"
#include "maxlab/maximal.hpp"
#include "maxlab/piecewise_linear.hpp"
#include "maxlab/report.hpp"

namespace maxlab::io {

using Json = nlohmann::ordered_json;

// {"segments": [[a, b, ya, yb], ...]}; throws std::invalid_argument on bad input.
[[nodiscard]] PiecewiseLinear function_from_json(const Json& j);
[[nodiscard]] Json to_json(const PiecewiseLinear& f);

// {"intervals": [[lo, hi], ...]}, sorted and non-overlapping.
[[nodiscard]] IntervalSet intervals_from_json(const Json& j);
[[nodiscard]] Json to_json(const IntervalSet& e);

// Missing keys keep their defaults; unknown keys are rejected.
[[nodiscard]] MaximalConfig config_from_json(const Json& j);
[[nodiscard]] Json to_json(const MaximalConfig& cfg);

[[nodiscard]] Json to_json(const CheckReport& r);
[[nodiscard]] Json to_json(const GrowthReport& r);
[[nodiscard]] Json to_json(const ApSolution& a);
[[nodiscard]] Json to_json(const SearchResult& s);

// k,norm,root,ratio,err_bound
[[nodiscard]] std::string growth_csv(const GrowthReport& r);
// name,lhs,rhs,slack,pass
[[nodiscard]] std::string summary_csv(const std::vector<CheckReport>& reports);

[[nodiscard]] Json read_json_file(const std::filesystem::path& path);
// Writes through a temporary file in the same directory and renames it in place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace maxlab::io
