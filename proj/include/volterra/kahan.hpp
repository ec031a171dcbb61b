#pragma once

namespace volterra {

// Compensated (Kahan) accumulator. Summation order is part of the caller's
// contract: ascending coordinate index everywhere in this codebase, so that
// repeated evaluation of the same sum is bit-for-bit reproducible.
struct KahanAccumulator {
    double sum = 0.0;
    double compensation = 0.0;

    void add(double value) {
        const double y = value - compensation;
        const double t = sum + y;
        compensation = (t - sum) - y;
        sum = t;
    }

    KahanAccumulator& operator+=(double value) {
        add(value);
        return *this;
    }

    double value() const { return sum; }
};

} // namespace volterra
