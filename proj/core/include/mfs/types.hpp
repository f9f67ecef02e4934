#pragma once

#include <Eigen/Core>

#include <optional>
#include <string>
#include <string_view>

namespace mfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class FidelityLevel { LF = 0, MF = 1, HF = 2 };

std::string_view to_string(FidelityLevel level);
std::optional<FidelityLevel> parse_fidelity(std::string_view text);

}  // namespace mfs
