#include "sflat/flatness/multi_index.hpp"

#include <algorithm>

namespace sflat {

int MultiIndex::max() const { return *std::max_element(v.begin(), v.end()); }
int MultiIndex::min() const { return *std::min_element(v.begin(), v.end()); }

std::string MultiIndex::to_string() const {
    return "(" + std::to_string(v[0]) + "," + std::to_string(v[1]) + "," + std::to_string(v[2]) + ")";
}

}  // namespace sflat
