#pragma once

#include "pplla/glm.hpp"

#include <cmath>
#include <random>

namespace testing {

using pplla::Index;
using pplla::Mat;
using pplla::Vec;

inline Mat random_matrix(Index n, Index p, std::mt19937_64& gen) {
    std::normal_distribution<double> z;
    Mat X(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) X(i, j) = z(gen);
    return X;
}

inline Vec random_vector(Index n, std::mt19937_64& gen, double scale = 1.0) {
    std::normal_distribution<double> z;
    Vec v(n);
    for (Index i = 0; i < n; ++i) v(i) = scale * z(gen);
    return v;
}

/// Response drawn with std::mt19937_64 so tests do not depend on the library generator.
inline Vec random_response(pplla::Family f, const Vec& eta, std::mt19937_64& gen) {
    Vec y(eta.size());
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u;
    for (Index i = 0; i < eta.size(); ++i) {
        switch (f) {
            case pplla::Family::gaussian: y(i) = eta(i) + z(gen); break;
            case pplla::Family::logistic: y(i) = u(gen) < 1.0 / (1.0 + std::exp(-eta(i))) ? 1.0 : 0.0; break;
            case pplla::Family::poisson: {
                std::poisson_distribution<int> pois(std::exp(eta(i)));
                y(i) = pois(gen);
                break;
            }
        }
    }
    return y;
}

inline pplla::Dataset random_dataset(pplla::Family f, Index n, Index p, std::mt19937_64& gen,
                                     bool intercept = false, double beta_scale = 0.3) {
    Mat X = random_matrix(n, p, gen);
    const Vec beta = random_vector(p, gen, beta_scale);
    const Vec y = random_response(f, X * beta, gen);
    return pplla::Dataset(std::move(X), y, intercept);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace testing
