#pragma once

// Raw experimental record of a batch of emissions and the correlation
// estimator over it.

#include <cstdint>
#include <stdexcept>

#include "isolato/sampler.hpp"

namespace isolato {

class NoDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Normalization {
    kCoincidenceOnly,  // denominator = observed pairs (post-selection)
    kAllEmissions,     // denominator = every emitted pair
};

struct CountsTable {
    std::uint64_t n_pp = 0;  // first index = station A
    std::uint64_t n_pm = 0;
    std::uint64_t n_mp = 0;
    std::uint64_t n_mm = 0;
    std::uint64_t n_single_a = 0;
    std::uint64_t n_single_b = 0;
    std::uint64_t n_emitted = 0;

    std::uint64_t coincidences() const { return n_pp + n_pm + n_mp + n_mm; }
    std::uint64_t singles() const { return n_single_a + n_single_b; }

    void record(const TrialOutcome& outcome) {
        ++n_emitted;
        switch (outcome.kind) {
        case OutcomeKind::kCoincidence:
            if (outcome.spin_a == Spin::kPlus) {
                outcome.spin_b == Spin::kPlus ? ++n_pp : ++n_pm;
            } else {
                outcome.spin_b == Spin::kPlus ? ++n_mp : ++n_mm;
            }
            break;
        case OutcomeKind::kSingleA: ++n_single_a; break;
        case OutcomeKind::kSingleB: ++n_single_b; break;
        }
    }

    CountsTable& operator+=(const CountsTable& other) {
        n_pp += other.n_pp;
        n_pm += other.n_pm;
        n_mp += other.n_mp;
        n_mm += other.n_mm;
        n_single_a += other.n_single_a;
        n_single_b += other.n_single_b;
        n_emitted += other.n_emitted;
        return *this;
    }

    bool operator==(const CountsTable&) const = default;
};

/// E = (n_pp + n_mm - n_pm - n_mp) / D with D given by the normalization.
inline double correlation(const CountsTable& counts, Normalization normalization) {
    const std::uint64_t denom = normalization == Normalization::kCoincidenceOnly
                                    ? counts.coincidences()
                                    : counts.n_emitted;
    if (denom == 0) {
        throw NoDataError("correlation: empty denominator (no trials in the chosen normalization)");
    }
    const double same = static_cast<double>(counts.n_pp + counts.n_mm);
    const double diff = static_cast<double>(counts.n_pm + counts.n_mp);
    return (same - diff) / static_cast<double>(denom);
}

}  // namespace isolato
