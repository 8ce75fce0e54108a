#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace skewlab {

// Real-valued function on a product of two finite index sets. Rows are
// indexed by I, columns by J; `at` takes positions, `torus_at` takes
// residues directly (valid only for full-torus tables, where I and J are
// both 0..N-1 in order).
class FunctionTable2 {
public:
    FunctionTable2() = default;

    FunctionTable2(std::vector<std::int64_t> I, std::vector<std::int64_t> J,
                   std::vector<double> values)
        : I_(std::move(I)), J_(std::move(J)), v_(std::move(values)) {
        if (v_.size() != I_.size() * J_.size())
            throw std::invalid_argument("FunctionTable2: dimension mismatch");
        for (double x : v_)
            if (!std::isfinite(x))
                throw std::invalid_argument("FunctionTable2: non-finite value");
        refresh_sup();
    }

    static FunctionTable2 torus(std::int64_t N, double fill = 0.0) {
        std::vector<std::int64_t> idx(static_cast<std::size_t>(N));
        std::iota(idx.begin(), idx.end(), 0);
        return FunctionTable2(idx, idx,
                              std::vector<double>(static_cast<std::size_t>(N * N), fill));
    }

    const std::vector<std::int64_t>& rows() const { return I_; }
    const std::vector<std::int64_t>& cols() const { return J_; }
    std::size_t nrows() const { return I_.size(); }
    std::size_t ncols() const { return J_.size(); }
    double sup_norm() const { return sup_; }

    double at(std::size_t i, std::size_t j) const { return v_[i * J_.size() + j]; }

    bool is_full_torus(std::int64_t N) const {
        if (I_.size() != static_cast<std::size_t>(N) || J_.size() != I_.size())
            return false;
        for (std::size_t i = 0; i < I_.size(); ++i)
            if (I_[i] != static_cast<std::int64_t>(i) || J_[i] != static_cast<std::int64_t>(i))
                return false;
        return true;
    }

    std::int64_t torus_modulus() const { return static_cast<std::int64_t>(I_.size()); }

    // Residue access with reduction mod N; requires a full-torus table.
    double torus_at(std::int64_t x, std::int64_t y) const {
        const std::int64_t N = torus_modulus();
        x %= N; if (x < 0) x += N;
        y %= N; if (y < 0) y += N;
        return v_[static_cast<std::size_t>(x * N + y)];
    }

    void set(std::size_t i, std::size_t j, double val) {
        v_[i * J_.size() + j] = val;
        sup_ = std::max(sup_, std::abs(val));
    }

    void refresh_sup() {
        sup_ = 0.0;
        for (double x : v_) sup_ = std::max(sup_, std::abs(x));
    }

private:
    std::vector<std::int64_t> I_, J_;
    std::vector<double> v_;
    double sup_ = 0.0;
};

enum class NormMethod { exact, monte_carlo };

// A norm (or signed raw inner product) evaluation result. Exact values are
// reproducible bit-for-bit under the fixed summation order used throughout.
struct NormValue {
    double value = 0.0;             // the norm (rooted) or the signed raw value
    double raw = 0.0;               // the pre-root power/average
    NormMethod method = NormMethod::exact;
    double stderr_ = 0.0;           // monte_carlo only
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

}  // namespace skewlab
