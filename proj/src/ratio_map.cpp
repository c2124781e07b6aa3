#include "sers/ratio_map.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace sers {

RatioMap::RatioMap(std::vector<double> x, std::vector<double> y) : x_axis(std::move(x)), y_axis(std::move(y)) {
    const std::size_t n = size();
    values.assign(n, std::numeric_limits<double>::quiet_NaN());
    valid.assign(n, false);
    converged.assign(n, false);
    errors.assign(n, std::string{});
}

std::size_t RatioMap::masked_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), false));
}

void RatioMap::set(std::size_t ix, std::size_t iy, double value) {
    const std::size_t k = index(ix, iy);
    values.at(k) = value;
    valid.at(k) = true;
    errors.at(k).clear();
}

void RatioMap::mask(std::size_t ix, std::size_t iy, const std::string& error) {
    const std::size_t k = index(ix, iy);
    values.at(k) = std::numeric_limits<double>::quiet_NaN();
    valid.at(k) = false;
    errors.at(k) = error;
}

}  // namespace sers
