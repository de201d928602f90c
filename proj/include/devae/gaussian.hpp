#ifndef DEVAE_GAUSSIAN_HPP
#define DEVAE_GAUSSIAN_HPP

#include "devae/common.hpp"

namespace devae {

// Diagonal Gaussian over a d-dimensional latent, parameterized by mean and
// strictly positive per-dimension scale.
template <class Real>
struct DiagonalGaussian {
    Vec<Real> mean;
    Vec<Real> scale;

    DiagonalGaussian() = default;
    DiagonalGaussian(Vec<Real> mu, Vec<Real> sigma) : mean(std::move(mu)), scale(std::move(sigma)) {
        if (mean.size() != scale.size()) throw DomainError("mean/scale dimension mismatch");
        if ((scale.array() <= Real(0)).any()) throw DomainError("scale must be strictly positive");
    }

    Eigen::Index dim() const { return mean.size(); }

    static DiagonalGaussian standard(Eigen::Index d) {
        return DiagonalGaussian(Vec<Real>::Zero(d), Vec<Real>::Ones(d));
    }

    Vec<Real> sample(const Vec<Real>& noise) const {
        if (noise.size() != mean.size()) throw DomainError("noise dimension mismatch");
        return mean + scale.cwiseProduct(noise);
    }

    Real log_pdf(const Vec<Real>& x) const {
        if (x.size() != mean.size()) throw DomainError("log_pdf dimension mismatch");
        const auto z = (x - mean).array() / scale.array();
        return -Real(0.5) * (z * z).sum() - scale.array().log().sum() -
               Real(0.5) * Real(dim()) * log_2pi<Real>();
    }
};

// KL(q || N(0, I)) in closed form: 0.5 * sum(mu^2 + sigma^2 - 1 - 2 log sigma).
template <class Real>
Real kl_to_standard_normal(const DiagonalGaussian<Real>& q) {
    const auto mu2 = q.mean.array().square();
    const auto s2 = q.scale.array().square();
    return Real(0.5) * (mu2 + s2 - Real(1) - s2.log()).sum();
}

// KL(N(mu1, s1^2) || N(mu2, s2^2)) for scalar Gaussians.
template <class Real>
Real kl_gaussian_1d(Real mu1, Real s1, Real mu2, Real s2) {
    if (s1 <= Real(0) || s2 <= Real(0)) throw DomainError("scales must be positive");
    const Real r = s1 / s2;
    const Real dm = (mu1 - mu2) / s2;
    return std::log(s2 / s1) + Real(0.5) * (r * r + dm * dm) - Real(0.5);
}

// General diagonal-Gaussian KL, summed over dimensions.
template <class Real>
Real kl_diag_gaussian(const DiagonalGaussian<Real>& q, const DiagonalGaussian<Real>& p) {
    if (q.dim() != p.dim()) throw DomainError("KL dimension mismatch");
    Real kl = 0;
    for (Eigen::Index i = 0; i < q.dim(); ++i)
        kl += kl_gaussian_1d(q.mean[i], q.scale[i], p.mean[i], p.scale[i]);
    return kl;
}

// log N(x; 0, I), batched over rows of X.
template <class Real>
Vec<Real> standard_normal_log_pdf_rows(const Mat<Real>& X) {
    Vec<Real> out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        out[i] = -Real(0.5) * X.row(i).squaredNorm() - Real(0.5) * Real(X.cols()) * log_2pi<Real>();
    return out;
}

}  // namespace devae

#endif  // DEVAE_GAUSSIAN_HPP
