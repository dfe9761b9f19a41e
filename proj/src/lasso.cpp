#include "pplla/lasso.hpp"

#include "pplla/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pplla {

namespace {

// Smooth part on the standardized scale. Gaussian uses the Gram matrix.
class SmoothLoss {
public:
    SmoothLoss(const GlmFamily& family, const Mat& Zs, const Vec& y)
        : family_(family), Zs_(Zs), y_(y), n_(static_cast<double>(Zs.rows())) {
        if (family_.kind == Family::gaussian) {
            gram_ = Zs_.transpose() * Zs_ / n_;
            zy_ = Zs_.transpose() * y_ / n_;
            yy_ = y_.squaredNorm() / (2.0 * n_);
        }
    }

    double value(const Vec& b) const {
        if (family_.kind == Family::gaussian) return 0.5 * b.dot(gram_ * b) - zy_.dot(b);
        return loss_from_predictor(family_, y_, Zs_ * b);
    }

    Vec grad(const Vec& b) const {
        if (family_.kind == Family::gaussian) return gram_ * b - zy_;
        const Vec theta = Zs_ * b;
        return -(Zs_.transpose() * (y_ - mean_response(family_, theta))) / n_;
    }

    // Gaussian values omit the constant ||y||^2 / 2n; add it back for reporting.
    double constant() const { return family_.kind == Family::gaussian ? -yy_ : 0.0; }

private:
    const GlmFamily& family_;
    const Mat& Zs_;
    const Vec& y_;
    double n_;
    Mat gram_;
    Vec zy_;
    double yy_ = 0.0;
};

Vec column_scales(const Dataset& data) {
    const Mat& Z = data.design();
    Vec s(Z.cols());
    const double n = static_cast<double>(Z.rows());
    for (Index j = 0; j < Z.cols(); ++j) {
        if (data.has_intercept() && j == 0) {
            s(j) = 1.0;
            continue;
        }
        const double mean = Z.col(j).mean();
        const double var = (Z.col(j).array() - mean).square().sum() / std::max(n - 1.0, 1.0);
        s(j) = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    return s;
}

double link(const GlmFamily& family, double mean) {
    switch (family.kind) {
        case Family::gaussian: return mean;
        case Family::logistic:
            mean = std::clamp(mean, 1e-10, 1.0 - 1e-10);
            return std::log(mean / (1.0 - mean));
        case Family::poisson: return std::log(std::max(mean, 1e-10));
    }
    return mean;
}

}  // namespace

Vec null_coefficients(const GlmFamily& family, const Dataset& data) {
    Vec b = Vec::Zero(data.num_coef());
    if (data.has_intercept()) b(0) = link(family, data.y().mean());
    return b;
}

double lasso_lambda_max(const GlmFamily& family, const Dataset& data) {
    Vec g = gradient(family, data, null_coefficients(family, data));
    if (data.has_intercept()) g(0) = 0.0;
    return g.lpNorm<Eigen::Infinity>();
}

std::vector<double> log_grid(double lambda_max, int count, double ratio) {
    if (count < 1) throw InputError("lambda grid needs at least one point");
    if (!(lambda_max > 0.0)) throw InputError("lambda grid needs a positive maximum");
    std::vector<double> grid(static_cast<std::size_t>(count));
    if (count == 1) {
        grid[0] = lambda_max;
        return grid;
    }
    const double lo = std::log(lambda_max * ratio);
    const double hi = std::log(lambda_max);
    for (int k = 0; k < count; ++k) {
        grid[static_cast<std::size_t>(k)] = std::exp(hi + (lo - hi) * k / (count - 1));
    }
    return grid;
}

FitResult fit_lasso(const GlmFamily& family, const Dataset& data, double lambda,
                    const LassoOptions& options, const std::optional<Vec>& warm_start) {
    if (!(lambda > 0.0)) throw InputError("fit_lasso requires lambda > 0");
    const Index d = data.num_coef();
    if (warm_start && warm_start->size() != d) throw InputError("warm start has wrong length");

    const Vec scale = column_scales(data);
    const Mat Zs = data.design() * scale.cwiseInverse().asDiagonal();
    Vec w = lambda * scale.cwiseInverse();   // penalty on the standardized coefficients
    if (data.has_intercept()) w(0) = 0.0;

    SmoothLoss smooth(family, Zs, data.y());
    auto penalty = [&](const Vec& b) { return w.dot(b.cwiseAbs()); };

    Vec b = warm_start ? Vec(warm_start->cwiseProduct(scale)) : null_coefficients(family, data);
    double f = smooth.value(b);
    double F = f + penalty(b);

    FitResult res;
    res.lambda = lambda;
    res.objective_trace.push_back(F + smooth.constant());

    double step = 1.0;
    Vec g = smooth.grad(b);
    Vec next(d);
    bool converged = false;
    int it = 0;
    for (; it < options.max_iter; ++it) {
        step *= 2.0;
        double f_next = 0.0;
        for (int bt = 0; bt < 100; ++bt) {
            for (Index j = 0; j < d; ++j) next(j) = soft_threshold(b(j) - step * g(j), step * w(j));
            const Vec diff = next - b;
            f_next = smooth.value(next);
            if (f_next <= f + g.dot(diff) + diff.squaredNorm() / (2.0 * step) + 1e-15 * std::abs(f)) {
                break;
            }
            step *= 0.5;
        }
        const double F_next = f_next + penalty(next);
        const double residual = (next - b).lpNorm<Eigen::Infinity>() / step;
        const double decrease = F - F_next;
        b = next;
        f = f_next;
        F = F_next;
        res.objective_trace.push_back(F + smooth.constant());
        g = smooth.grad(b);
        if (decrease < options.tol && residual < options.tol) {
            converged = true;
            ++it;
            break;
        }
    }

    Vec beta = b.cwiseQuotient(scale);
    if (!converged) {
        throw LassoNotConverged("lasso did not converge in " + std::to_string(options.max_iter) +
                                    " iterations",
                                it, std::move(beta));
    }
    res.beta = std::move(beta);
    res.iterations = it;
    res.converged = true;
    for (Index j = data.has_intercept() ? 1 : 0; j < d; ++j) {
        if (res.beta(j) != 0.0) res.support.push_back(j);
    }
    return res;
}

CvResult cv_select(const GlmFamily& family, const Dataset& data, const LassoConfig& config) {
    if (config.folds < 2) throw InputError("cross-validation needs at least 2 folds");
    if (data.n() < config.folds) throw InputError("cross-validation needs n >= folds");

    CvResult out;
    out.grid = config.lambda_grid.empty() ? log_grid(lasso_lambda_max(family, data), 50, 0.01)
                                          : config.lambda_grid;
    for (std::size_t k = 0; k < out.grid.size(); ++k) {
        if (!(out.grid[k] > 0.0)) throw InputError("lambda grid must be positive");
        if (k > 0 && !(out.grid[k] < out.grid[k - 1])) {
            throw InputError("lambda grid must be strictly descending");
        }
    }
    if (out.grid.size() == 1) {
        out.lambda = out.grid[0];
        out.cv_curve = {0.0};
        return out;
    }

    // Seeded Fisher-Yates shuffle, then contiguous blocks.
    std::vector<Index> order(static_cast<std::size_t>(data.n()));
    std::iota(order.begin(), order.end(), Index{0});
    Philox4x32 rng(config.seed, 0x6376u);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng.below(i)]);
    }

    const std::size_t G = out.grid.size();
    std::vector<double> sum(G, 0.0);
    int used = 0;
    const std::size_t n = order.size();
    const std::size_t K = static_cast<std::size_t>(config.folds);
    for (std::size_t f = 0; f < K; ++f) {
        const std::size_t lo = f * n / K;
        const std::size_t hi = (f + 1) * n / K;
        std::vector<Index> test(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                order.begin() + static_cast<std::ptrdiff_t>(hi));
        std::vector<Index> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(lo));
        train.insert(train.end(), order.begin() + static_cast<std::ptrdiff_t>(hi), order.end());
        std::sort(test.begin(), test.end());
        std::sort(train.begin(), train.end());

        const Dataset tr = data.subset(train);
        const Dataset te = data.subset(test);
        if (family.kind == Family::logistic) {
            auto constant = [](const Vec& y) { return (y.array() == y(0)).all(); };
            if (constant(tr.y()) || constant(te.y())) {
                out.warnings.push_back("fold " + std::to_string(f + 1) +
                                       " skipped: constant logistic response");
                ++out.skipped_folds;
                continue;
            }
        }

        std::optional<Vec> warm;
        std::vector<double> errs(G);
        for (std::size_t k = 0; k < G; ++k) {
            FitResult fit = fit_lasso(family, tr, out.grid[k], config.solver, warm);
            errs[k] = loss(family, te, fit.beta);
            warm = std::move(fit.beta);
        }
        for (std::size_t k = 0; k < G; ++k) sum[k] += errs[k];
        ++used;
    }
    if (used == 0) throw SolverError("cross-validation: every fold was degenerate");

    out.cv_curve.resize(G);
    std::size_t best = 0;
    for (std::size_t k = 0; k < G; ++k) {
        out.cv_curve[k] = sum[k] / used;
        if (out.cv_curve[k] < out.cv_curve[best]) best = k;
    }
    out.lambda = out.grid[best];
    return out;
}

}  // namespace pplla
