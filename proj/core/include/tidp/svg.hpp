#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace tidp::svg {

/// Scatter plot with an optional highlighted subset (indices into `points`)
/// drawn larger and in a second color, for Pareto-front call-outs.
std::string scatter(const std::vector<std::pair<double, double>>& points,
                    const std::vector<std::size_t>& highlighted, const std::string& title,
                    const std::string& x_label, const std::string& y_label);

/// Horizontal bar chart; negative values extend left of the zero axis.
std::string horizontal_bars(const std::vector<std::string>& labels,
                            const std::vector<double>& values, const std::string& title);

}  // namespace tidp::svg
