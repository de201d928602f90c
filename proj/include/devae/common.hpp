#ifndef DEVAE_COMMON_HPP
#define DEVAE_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace devae {

template <class Real>
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <class Real>
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <class Real>
constexpr Real log_2pi() {
    return Real(1.8378770664093454835606594728112352797227949472755668L);
}

// ---------------------------------------------------------------------------
// Errors. DomainError for contract violations, ConfigError for bad
// configuration, ParseError carries a line number, NumericError carries the
// batch/sample index where a non-finite value surfaced.
// ---------------------------------------------------------------------------

struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, std::size_t line)
        : std::runtime_error(msg + " (line " + std::to_string(line) + ")"), line_number(line) {}
    std::size_t line_number;
};

struct NumericError : std::runtime_error {
    NumericError(const std::string& msg, std::ptrdiff_t index)
        : std::runtime_error(msg + " (sample index " + std::to_string(index) + ")"),
          sample_index(index) {}
    std::ptrdiff_t sample_index;
};

// ---------------------------------------------------------------------------
// Seeded RNG. All stochastic code takes an Rng& so runs replay exactly.
// fork(tag) derives an independent stream; derivation is pure so the same
// (seed, tag) always yields the same stream.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a64(s.data(), s.size(), h);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    template <class Real>
    Real normal(Real mean = 0, Real stddev = 1) {
        std::normal_distribution<Real> d(mean, stddev);
        return d(engine_);
    }

    template <class Real>
    Real uniform(Real lo, Real hi) {
        std::uniform_real_distribution<Real> d(lo, hi);
        return d(engine_);
    }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        std::uniform_int_distribution<std::size_t> d(0, n - 1);
        return d(engine_);
    }

    template <class Real>
    Mat<Real> normal_mat(Eigen::Index rows, Eigen::Index cols, Real stddev = 1) {
        Mat<Real> m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal<Real>(0, stddev);
        return m;
    }

    template <class Real>
    Mat<Real> uniform_mat(Eigen::Index rows, Eigen::Index cols, Real lo, Real hi) {
        Mat<Real> m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = uniform<Real>(lo, hi);
        return m;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

    Rng fork(const std::string& tag) const {
        return Rng(fnv1a64(tag, seed_ ^ 0x9e3779b97f4a7c15ULL));
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// Small numeric helpers.
// ---------------------------------------------------------------------------

template <class Real>
Real logsumexp(const Vec<Real>& v) {
    const Real m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

template <class Real>
bool all_finite(const Mat<Real>& m) {
    return m.allFinite();
}

// Deterministic float formatting for logs, CSV, and hashes.
template <class Real>
std::string format_real(Real x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline std::string lowercase_ascii(std::string s) {
    for (char& c : s)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return s;
}

}  // namespace devae

#endif  // DEVAE_COMMON_HPP
