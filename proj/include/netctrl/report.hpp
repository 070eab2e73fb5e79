#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "netctrl/analyzer.hpp"
#include "netctrl/sysmodel.hpp"

namespace netctrl {

// Complex scalars serialize as [re, im]; matrices as row-major nested arrays
// of such pairs.
nlohmann::json json_of_complex(const Complex& z);
nlohmann::json json_of_matrix(const CMatrix& m);

nlohmann::json report_to_json(const AnalysisReport& report,
                              const std::optional<MultiRatePattern>& multirate = std::nullopt);

std::string report_to_text(const AnalysisReport& report,
                           const std::optional<MultiRatePattern>& multirate = std::nullopt);

nlohmann::json sampled_to_json(const SampledSystem& ss);
std::string sampled_to_text(const SampledSystem& ss);

}  // namespace netctrl
