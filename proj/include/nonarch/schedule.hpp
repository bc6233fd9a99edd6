#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonarch/errors.hpp"

namespace nonarch {

/// Geometric probe schedule: points base * ratio^j for j = 0..count-1.
struct ScheduleSpec {
    std::int64_t base = 10;
    std::int64_t ratio = 2;
    int count = 15;
};

enum class Parity { none, even, odd };

inline const char* parity_name(Parity p) {
    switch (p) {
        case Parity::none: return "none";
        case Parity::even: return "even";
        case Parity::odd: return "odd";
    }
    return "?";
}

/// A hyperfinite index: an unbounded strictly increasing probe schedule that
/// stands in for "N infinite". Every sequence-level operation is evaluated at
/// each schedule point.
class InfiniteIndex {
public:
    explicit InfiniteIndex(ScheduleSpec spec = {}, Parity parity = Parity::none,
                           std::string symbol = "N")
        : spec_(spec), parity_(parity), symbol_(std::move(symbol)) {
        if (spec.base < 2 || spec.ratio < 2)
            raise(errc::invalid_argument, "schedule needs base >= 2 and ratio >= 2");
        if (spec.count < 5)
            raise(errc::invalid_argument,
                  "schedule needs at least 5 points to witness the limit behaviour");
        std::int64_t n = spec.base;
        for (int j = 0; j < spec.count; ++j) {
            std::int64_t p = n;
            if (parity == Parity::even && p % 2 != 0) p += 1;
            if (parity == Parity::odd && p % 2 == 0) p += 1;
            points_.push_back(p);
            if (n > (std::int64_t(1) << 40) / spec.ratio)
                raise(errc::invalid_argument, "schedule grows past 2^40");
            n *= spec.ratio;
        }
        for (std::size_t j = 1; j < points_.size(); ++j)
            if (points_[j] <= points_[j - 1])
                raise(errc::invalid_argument, "schedule points must increase strictly");
    }

    const ScheduleSpec& spec() const { return spec_; }
    Parity parity() const { return parity_; }
    const std::string& symbol() const { return symbol_; }
    const std::vector<std::int64_t>& points() const { return points_; }
    int count() const { return static_cast<int>(points_.size()); }
    std::int64_t max_point() const { return points_.back(); }

    /// True when consecutive points keep one fixed ratio (parity adjustment
    /// can break this; extrapolation then falls back to the raw limit).
    bool uniform_ratio() const {
        const double r = static_cast<double>(points_[1]) / static_cast<double>(points_[0]);
        for (std::size_t j = 1; j + 1 < points_.size(); ++j) {
            const double rj = static_cast<double>(points_[j + 1]) / static_cast<double>(points_[j]);
            if (std::abs(rj - r) > 1e-9 * r) return false;
        }
        return true;
    }

private:
    ScheduleSpec spec_;
    Parity parity_;
    std::string symbol_;
    std::vector<std::int64_t> points_;
};

}  // namespace nonarch
