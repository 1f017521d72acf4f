#pragma once

#include <array>
#include <string>

namespace sflat {

/// Three naturals with componentwise arithmetic and partial order.
struct MultiIndex {
    std::array<int, 3> v{0, 0, 0};

    MultiIndex() = default;
    MultiIndex(int a, int b, int c) : v{a, b, c} {}

    int& operator[](std::size_t i) { return v[i]; }
    int operator[](std::size_t i) const { return v[i]; }
    int sum() const { return v[0] + v[1] + v[2]; }
    int max() const;
    int min() const;

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
        return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
    }
    friend MultiIndex operator-(const MultiIndex& a, const MultiIndex& b) {
        return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
    }
    friend MultiIndex operator+(const MultiIndex& a, int d) { return {a[0] + d, a[1] + d, a[2] + d}; }
    friend MultiIndex operator-(const MultiIndex& a, int d) { return {a[0] - d, a[1] - d, a[2] - d}; }
    friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.v == b.v; }
    friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return !(a == b); }
    /// Componentwise <=.
    bool leq(const MultiIndex& o) const { return v[0] <= o[0] && v[1] <= o[1] && v[2] <= o[2]; }

    std::string to_string() const;
};

}  // namespace sflat
