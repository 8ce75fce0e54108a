#pragma once

#include <cmath>

namespace skewlab {

// Kahan-Neumaier compensated accumulator; summation order is the caller's
// iteration order, so fixed loops give bit-identical results across runs.
class KahanSum {
public:
    void add(double x) {
        double t = s_ + x;
        if (std::abs(s_) >= std::abs(x))
            c_ += (s_ - t) + x;
        else
            c_ += (x - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

}  // namespace skewlab
