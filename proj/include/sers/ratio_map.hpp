#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sers {

// 2-D grid of values over (x, y). Storage is row-major with x as the slow
// index: cell (ix, iy) lives at ix * y_axis.size() + iy. Invalid cells carry
// NaN and an error message.
struct RatioMap {
    std::string x_name{"omega_c_THz"};
    std::string y_name{"omega_r_THz"};
    std::string value_name{"log10_ratio"};
    std::vector<double> x_axis;
    std::vector<double> y_axis;
    std::vector<double> values;
    std::vector<bool> valid;
    std::vector<bool> converged;  // only meaningful for CSI maps
    std::vector<std::string> errors;

    RatioMap() = default;
    RatioMap(std::vector<double> x, std::vector<double> y);

    std::size_t index(std::size_t ix, std::size_t iy) const { return ix * y_axis.size() + iy; }
    std::size_t size() const { return x_axis.size() * y_axis.size(); }
    std::size_t masked_count() const;
    void set(std::size_t ix, std::size_t iy, double value);
    void mask(std::size_t ix, std::size_t iy, const std::string& error);
};

}  // namespace sers
