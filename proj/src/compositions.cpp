#include "polyurn/compositions.hpp"

#include <stdexcept>

namespace polyurn {

namespace {

void emit_rec(int remaining, int slots, DrawVector& prefix, std::vector<DrawVector>& out) {
    if (slots == 1) {
        prefix.push_back(remaining);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int first = remaining; first >= 0; --first) {
        prefix.push_back(first);
        emit_rec(remaining - first, slots - 1, prefix, out);
        prefix.pop_back();
    }
}

} // namespace

std::vector<DrawVector> enumerate_compositions(int d, int m) {
    if (d < 1) throw std::invalid_argument("enumerate_compositions: need d >= 1");
    if (m < 1) throw std::invalid_argument("enumerate_compositions: need m >= 1");
    std::vector<DrawVector> out;
    out.reserve(static_cast<std::size_t>(composition_count(d, m)));
    DrawVector prefix;
    prefix.reserve(static_cast<std::size_t>(d));
    emit_rec(m, d, prefix, out);
    return out;
}

std::int64_t composition_count(int d, int m) {
    return binomial(m + d - 1, d - 1);
}

std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::int64_t result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
    }
    return result;
}

std::int64_t multinomial_coefficient(const DrawVector& v) {
    int remaining = 0;
    for (int c : v) remaining += c;
    std::int64_t result = 1;
    for (int c : v) {
        result *= binomial(remaining, c);
        remaining -= c;
    }
    return result;
}

} // namespace polyurn
