#include "polyurn/urn.hpp"

#include <numeric>
#include <sstream>
#include <stdexcept>

#include "polyurn/errors.hpp"

namespace polyurn {

UrnState make_state(std::vector<std::int64_t> counts) {
    if (counts.empty()) throw std::invalid_argument("UrnState: empty counts");
    std::int64_t total = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw std::invalid_argument("UrnState: negative initial count");
        total += c;
    }
    if (total <= 0) throw std::invalid_argument("UrnState: urn must start non-empty");
    return UrnState{std::move(counts), total, 0};
}

double draw_probability(const UrnState& state, const DrawVector& v, SamplingMode mode) {
    if (v.size() != state.counts.size()) throw std::invalid_argument("draw_probability: dimension mismatch");
    int m = 0;
    for (int c : v) {
        if (c < 0) throw std::invalid_argument("draw_probability: negative draw count");
        m += c;
    }
    if (m < 1) throw std::invalid_argument("draw_probability: empty draw");
    if (state.total <= 0) throw std::invalid_argument("draw_probability: empty urn");

    double p = static_cast<double>(multinomial_coefficient(v));
    if (mode == SamplingMode::WithReplacement) {
        const double inv_total = 1.0 / static_cast<double>(state.total);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double z = static_cast<double>(state.counts[i]) * inv_total;
            for (int j = 0; j < v[i]; ++j) p *= z;
        }
        return p;
    }
    if (state.total < m) {
        throw std::invalid_argument("draw_probability: without-replacement draw needs at least m balls in the urn");
    }
    // prod_i (U_i)_(v_i) / (T)_m, one numerator factor paired with one
    // denominator factor at a time.
    std::int64_t t_factor = state.total;
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (int j = 0; j < v[i]; ++j) {
            p *= static_cast<double>(state.counts[i] - j) / static_cast<double>(t_factor--);
        }
    }
    return p < 0.0 ? 0.0 : p;
}

void draw_distribution(const UrnState& state, const ReplacementRule& rule, SamplingMode mode,
                       std::span<double> out) {
    const int d = rule.colours();
    const int m = rule.draws();
    if (state.counts.size() != static_cast<std::size_t>(d))
        throw std::invalid_argument("draw_distribution: dimension mismatch");
    if (out.size() != rule.size()) throw std::invalid_argument("draw_distribution: output span size mismatch");
    if (state.total <= 0) throw std::invalid_argument("draw_distribution: empty urn");

    if (mode == SamplingMode::WithReplacement) {
        const double inv_total = 1.0 / static_cast<double>(state.total);
        for (std::size_t idx = 0; idx < rule.size(); ++idx) {
            const DrawVector& v = rule.composition(idx);
            double p = rule.weight(idx);
            for (int i = 0; i < d; ++i) {
                const int vi = v[static_cast<std::size_t>(i)];
                if (vi == 0) continue;
                const double z = static_cast<double>(state.counts[static_cast<std::size_t>(i)]) * inv_total;
                for (int j = 0; j < vi; ++j) p *= z;
            }
            out[idx] = p;
        }
        return;
    }

    if (state.total < m)
        throw std::invalid_argument("draw_distribution: without-replacement draw needs at least m balls in the urn");
    for (std::size_t idx = 0; idx < rule.size(); ++idx) {
        const DrawVector& v = rule.composition(idx);
        double p = rule.weight(idx);
        std::int64_t t_factor = state.total;
        for (int i = 0; i < d; ++i) {
            const int vi = v[static_cast<std::size_t>(i)];
            for (int j = 0; j < vi; ++j) {
                p *= static_cast<double>(state.counts[static_cast<std::size_t>(i)] - j) /
                     static_cast<double>(t_factor--);
            }
        }
        out[idx] = p < 0.0 ? 0.0 : p;
    }
}

std::size_t sample_draw_index(const UrnState& state, const ReplacementRule& rule, SamplingMode mode,
                              double unit) {
    std::vector<double> probs(rule.size());
    draw_distribution(state, rule, mode, probs);
    double sum = 0.0;
    for (double p : probs) sum += p;
    const double target = unit * sum;
    double acc = 0.0;
    std::size_t last_positive = rule.size();
    for (std::size_t idx = 0; idx < probs.size(); ++idx) {
        if (probs[idx] <= 0.0) continue;
        acc += probs[idx];
        last_positive = idx;
        if (acc > target) return idx;
    }
    if (last_positive == rule.size()) throw std::invalid_argument("sample_draw: no composition has positive probability");
    return last_positive;
}

DrawVector sample_draw(const UrnState& state, const ReplacementRule& rule, SamplingMode mode, RngStream& rng) {
    return rule.composition(sample_draw_index(state, rule, mode, rng.next_unit()));
}

void apply_addition(UrnState& state, const ReplacementRule& rule, std::size_t idx) {
    const auto& addition = rule.addition(idx);
    std::int64_t new_total = 0;
    for (std::size_t i = 0; i < addition.size(); ++i) {
        std::int64_t updated;
        if (__builtin_add_overflow(state.counts[i], addition[i], &updated)) {
            throw std::overflow_error("step: colour count overflow");
        }
        if (updated < 0) {
            std::ostringstream os;
            os << "tenability violation: colour " << i + 1 << " would reach " << updated
               << " after drawing composition ";
            const auto& v = rule.composition(idx);
            for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
            throw TenabilityViolation(static_cast<int>(i), updated, os.str());
        }
        state.counts[i] = updated;
        if (__builtin_add_overflow(new_total, updated, &new_total)) {
            throw std::overflow_error("step: urn total overflow");
        }
    }
    state.total = new_total;
    state.step += 1;
}

UrnState step(const UrnState& state, const ReplacementRule& rule, SamplingMode mode, RngStream& rng) {
    const std::size_t idx = sample_draw_index(state, rule, mode, rng.next_unit());
    UrnState next = state;
    apply_addition(next, rule, idx);
    return next;
}

} // namespace polyurn
