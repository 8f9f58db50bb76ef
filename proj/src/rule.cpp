#include "polyurn/rule.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace polyurn {

namespace {

std::string format_composition(const DrawVector& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) os << ',';
        os << v[i];
    }
    return os.str();
}

} // namespace

ReplacementRule::ReplacementRule(int colours, int draws, std::vector<std::vector<std::int64_t>> rows)
    : colours_(colours), draws_(draws), compositions_(enumerate_compositions(colours, draws)), rows_(std::move(rows)) {
    if (colours_ < 2) throw std::invalid_argument("ReplacementRule: need at least 2 colours");
    if (rows_.size() != compositions_.size()) {
        std::ostringstream os;
        os << "ReplacementRule: expected " << compositions_.size() << " addition vectors, got " << rows_.size();
        throw std::invalid_argument(os.str());
    }
    row_sums_.reserve(rows_.size());
    weights_.reserve(rows_.size());
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].size() != static_cast<std::size_t>(colours_)) {
            throw std::invalid_argument("ReplacementRule: addition vector for composition " +
                                        format_composition(compositions_[i]) + " has wrong length");
        }
        std::int64_t sum = 0;
        for (std::int64_t x : rows_[i]) {
            sum += x;
            max_abs_addition_ = std::max(max_abs_addition_, std::abs(x));
        }
        row_sums_.push_back(sum);
        max_abs_row_sum_ = std::max(max_abs_row_sum_, std::abs(sum));
        weights_.push_back(static_cast<double>(multinomial_coefficient(compositions_[i])));
    }
}

ReplacementRule ReplacementRule::from_entries(int colours, int draws,
                                              const std::map<DrawVector, std::vector<std::int64_t>>& entries) {
    auto comps = enumerate_compositions(colours, draws);
    std::vector<std::vector<std::int64_t>> rows;
    rows.reserve(comps.size());
    for (const auto& v : comps) {
        auto it = entries.find(v);
        if (it == entries.end()) {
            throw std::invalid_argument("ReplacementRule: missing entry for composition " + format_composition(v));
        }
        rows.push_back(it->second);
    }
    if (entries.size() != comps.size()) {
        for (const auto& [v, row] : entries) {
            (void)row;
            if (static_cast<int>(v.size()) != colours)
                throw std::invalid_argument("ReplacementRule: entry composition " + format_composition(v) +
                                            " has wrong length");
            int sum = 0;
            for (int x : v) sum += x;
            if (sum != draws)
                throw std::invalid_argument("ReplacementRule: entry composition " + format_composition(v) +
                                            " does not sum to m");
        }
        throw std::invalid_argument("ReplacementRule: duplicate entries supplied");
    }
    return ReplacementRule(colours, draws, std::move(rows));
}

std::size_t ReplacementRule::index_of(const DrawVector& v) const {
    // Canonical order is lexicographic descending, so binary search with the
    // reversed comparator.
    auto it = std::lower_bound(compositions_.begin(), compositions_.end(), v,
                               [](const DrawVector& a, const DrawVector& b) { return a > b; });
    if (it == compositions_.end() || *it != v) {
        throw std::invalid_argument("ReplacementRule: unknown composition " + format_composition(v));
    }
    return static_cast<std::size_t>(it - compositions_.begin());
}

std::int64_t ReplacementRule::a(int k) const {
    if (colours_ != 2) throw std::invalid_argument("a_k view requires a two-colour rule");
    if (k < 0 || k > draws_) throw std::invalid_argument("a_k index out of range");
    return rows_[static_cast<std::size_t>(k)][0];
}

std::int64_t ReplacementRule::b(int k) const {
    if (colours_ != 2) throw std::invalid_argument("b_k view requires a two-colour rule");
    if (k < 0 || k > draws_) throw std::invalid_argument("b_k index out of range");
    return rows_[static_cast<std::size_t>(k)][1];
}

std::optional<std::int64_t> check_balance(const ReplacementRule& rule) {
    std::int64_t s = rule.row_sum(0);
    for (std::size_t i = 1; i < rule.size(); ++i) {
        if (rule.row_sum(i) != s) return std::nullopt;
    }
    return s;
}

std::optional<std::int64_t> check_diagonal(const ReplacementRule& rule) {
    // R(m e_1) = sigma * m e_1 pins sigma; then verify every row.
    const std::int64_t first = rule.addition(0, 0);
    if (first % rule.draws() != 0) return std::nullopt;
    const std::int64_t sigma = first / rule.draws();
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const auto& v = rule.composition(i);
        for (int c = 0; c < rule.colours(); ++c) {
            if (rule.addition(i, c) != sigma * v[static_cast<std::size_t>(c)]) return std::nullopt;
        }
    }
    return sigma;
}

} // namespace polyurn
