#include "pplla/newton.hpp"

#include <cmath>
#include <limits>

namespace pplla {

Eigen::LLT<Mat> robust_cholesky(const Mat& A, double ridge, const char* what) {
    Eigen::LLT<Mat> llt(A);
    if (llt.info() == Eigen::Success) return llt;
    Mat damped = A;
    damped.diagonal().array() += ridge * std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
    llt.compute(damped);
    if (llt.info() != Eigen::Success) {
        throw SolverError(std::string("singular or indefinite system in ") + what);
    }
    return llt;
}

namespace {

struct Objective {
    const GlmFamily& family;
    const Vec& y;
    const Mat& Za;
    const Vec& linear;

    double operator()(const Vec& beta_a) const {
        double f = loss_from_predictor(family, y, Za * beta_a);
        if (linear.size() > 0) f += linear.dot(beta_a);
        return f;
    }
};

}  // namespace

RestrictedNewtonResult restricted_newton(const GlmFamily& family, const Dataset& data,
                                         const RestrictedNewtonProblem& problem,
                                         const std::optional<Vec>& start,
                                         const NewtonOptions& options) {
    const IndexSet& A = problem.active;
    const Index na = static_cast<Index>(A.size());
    const Index r = problem.C.rows();
    const double n = static_cast<double>(data.n());

    if (na == 0) throw InputError("restricted Newton: empty active set");
    if (problem.linear.size() != 0 && problem.linear.size() != na) {
        throw InputError("restricted Newton: linear term has the wrong length");
    }

    // Constraint rows expressed over the active coordinates.
    Mat Cf = Mat::Zero(r, na);
    if (r > 0) {
        if (problem.C.cols() != static_cast<Index>(problem.constrained.size()) ||
            problem.t.size() != r) {
            throw InputError("restricted Newton: constraint shapes disagree");
        }
        for (std::size_t k = 0; k < problem.constrained.size(); ++k) {
            auto it = std::lower_bound(A.begin(), A.end(), problem.constrained[k]);
            if (it == A.end() || *it != problem.constrained[k]) {
                throw InputError("restricted Newton: constrained index not in active set");
            }
            Cf.col(it - A.begin()) = problem.C.col(static_cast<Index>(k));
        }
    }

    const Mat Za = gather_cols(data.design(), A);
    const Vec& y = data.y();
    Vec lin = problem.linear.size() ? problem.linear : Vec::Zero(na);
    Objective objective{family, y, Za, lin};

    Vec ba = start ? gather(*start, A) : Vec::Zero(na);

    Eigen::LLT<Mat> cct;
    if (r > 0) {
        cct.compute(Cf * Cf.transpose());
        if (cct.info() != Eigen::Success) throw SolverError("constraint matrix rank deficient");
        ba -= Cf.transpose() * cct.solve(Cf * ba - problem.t);
    }

    RestrictedNewtonResult res;
    double f = objective(ba);
    res.trace.push_back(f);
    Vec nu = Vec::Zero(r);

    auto grad_at = [&](const Vec& theta) -> Vec {
        Vec g = -(Za.transpose() * (y - mean_response(family, theta))) / n;
        return g + lin;
    };

    bool converged = false;
    int it = 0;
    for (; it < options.max_iter; ++it) {
        const Vec theta = Za * ba;
        const Vec g = grad_at(theta);

        // Stationarity of the Lagrangian, with the least-squares multiplier.
        Vec lag = g;
        if (r > 0) {
            nu = cct.solve(Cf * g);
            lag -= Cf.transpose() * nu;
        }
        if (lag.lpNorm<Eigen::Infinity>() < options.tol) {
            converged = true;
            break;
        }

        const Vec w = variance_weights(family, theta);
        Mat H = Za.transpose() * w.asDiagonal() * Za / n;
        auto llt = robust_cholesky(H, options.ridge, "restricted Newton Hessian block");

        Vec step;
        if (r > 0) {
            const Mat HiCt = llt.solve(Cf.transpose());
            const Vec Hig = llt.solve(g);
            const Mat S = Cf * HiCt;
            auto sllt = robust_cholesky(S, options.ridge, "restricted Newton Schur complement");
            const Vec mult = sllt.solve(-(Cf * Hig));
            step = -(Hig + HiCt * mult);
        } else {
            step = -llt.solve(g);
        }

        const double slope = g.dot(step);
        if (!(slope < 0.0)) {
            // No descent direction left at working precision.
            converged = lag.lpNorm<Eigen::Infinity>() < std::sqrt(options.tol);
            break;
        }
        double s = 1.0;
        double f_new = objective(ba + step);
        int halvings = 0;
        const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f);
        while (!(f_new <= f + 1e-4 * s * slope + slack) && halvings < 60) {
            s *= 0.5;
            f_new = objective(ba + s * step);
            ++halvings;
        }
        if (halvings == 60) {
            converged = lag.lpNorm<Eigen::Infinity>() < std::sqrt(options.tol);
            break;
        }
        ba += s * step;
        if (r > 0) {
            // Re-project to stop round-off drift off the constraint surface.
            ba -= Cf.transpose() * cct.solve(Cf * ba - problem.t);
            f_new = objective(ba);
        }
        f = f_new;
        res.trace.push_back(f);
    }
    if (!converged) {
        throw SolverError("restricted Newton did not converge in " +
                          std::to_string(options.max_iter) + " iterations", it);
    }

    res.beta = Vec::Zero(data.num_coef());
    scatter(res.beta, A, ba);
    res.iterations = it;
    res.objective = f;
    if (r > 0) {
        // g = Cf' nu on the constrained block: the gradient of the loss alone.
        const Vec g_loss = grad_at(Za * ba) - lin;
        res.multiplier = cct.solve(Cf * g_loss);
    }
    return res;
}

}  // namespace pplla
