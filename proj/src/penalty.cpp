#include "pplla/penalty.hpp"

#include "pplla/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pplla {

std::string to_string(PenaltyKind k) {
    switch (k) {
        case PenaltyKind::scad: return "scad";
        case PenaltyKind::mcp: return "mcp";
        case PenaltyKind::l1: return "l1";
    }
    return "unknown";
}

PenaltyKind penalty_kind_from_string(std::string_view name) {
    if (name == "scad") return PenaltyKind::scad;
    if (name == "mcp") return PenaltyKind::mcp;
    if (name == "l1" || name == "lasso") return PenaltyKind::l1;
    throw InputError("unknown penalty '" + std::string(name) + "'");
}

PenaltySpec PenaltySpec::scad(double lambda, double a) { return {PenaltyKind::scad, lambda, a}; }
PenaltySpec PenaltySpec::mcp(double lambda, double a) { return {PenaltyKind::mcp, lambda, a}; }
PenaltySpec PenaltySpec::l1(double lambda) { return {PenaltyKind::l1, lambda, 0.0}; }

double PenaltySpec::a1() const {
    return kind == PenaltyKind::mcp ? 1.0 - 1.0 / a : 1.0;
}

double PenaltySpec::a2() const {
    // The lasso slope never drops, so (iii) holds on the whole half line.
    return kind == PenaltyKind::l1 ? std::numeric_limits<double>::infinity() : 1.0;
}

double PenaltySpec::a0() const { return std::min(1.0, a2()); }

void PenaltySpec::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError("penalty lambda must be >= 0");
    if (kind == PenaltyKind::scad && !(a > 2.0)) throw InputError("SCAD requires a > 2");
    if (kind == PenaltyKind::mcp && !(a > 1.0)) throw InputError("MCP requires a > 1");
}

double derivative(const PenaltySpec& spec, double t) {
    if (t < 0.0) throw InputError("penalty derivative requires t >= 0");
    const double lam = spec.lambda;
    switch (spec.kind) {
        case PenaltyKind::scad:
            if (t <= lam) return lam;
            return std::max(spec.a * lam - t, 0.0) / (spec.a - 1.0);
        case PenaltyKind::mcp:
            return std::max(lam - t / spec.a, 0.0);
        case PenaltyKind::l1:
            return lam;
    }
    return 0.0;
}

double value(const PenaltySpec& spec, double t) {
    if (t < 0.0) throw InputError("penalty value requires t >= 0");
    const double lam = spec.lambda;
    const double a = spec.a;
    switch (spec.kind) {
        case PenaltyKind::scad:
            if (t <= lam) return lam * t;
            if (t <= a * lam) return (2.0 * a * lam * t - t * t - lam * lam) / (2.0 * (a - 1.0));
            return 0.5 * (a + 1.0) * lam * lam;
        case PenaltyKind::mcp:
            if (t <= a * lam) return lam * t - t * t / (2.0 * a);
            return 0.5 * a * lam * lam;
        case PenaltyKind::l1:
            return lam * t;
    }
    return 0.0;
}

AxiomReport verify_axioms(const PenaltySpec& spec, std::span<const double> grid) {
    if (grid.empty()) throw InputError("verify_axioms: empty grid");
    if (grid.front() < 0.0 || !std::is_sorted(grid.begin(), grid.end())) {
        throw InputError("verify_axioms: grid must be sorted and nonnegative");
    }
    const double lam = spec.lambda;
    const double slack = 1e-12 * std::max(1.0, lam);

    AxiomReport rep;

    bool ok = value(spec, 0.0) == 0.0;
    double prev_val = 0.0;
    double prev_der = derivative(spec, 0.0);
    for (double t : grid) {
        const double v = value(spec, t);
        const double d = derivative(spec, t);
        if (v < prev_val - slack || d > prev_der + slack) ok = false;
        prev_val = v;
        prev_der = d;
    }
    rep.increasing_concave = ok;

    rep.slope_at_zero = derivative(spec, 0.0) >= spec.a1() * lam - slack;

    ok = true;
    for (double t : grid) {
        if (t > 0.0 && t <= spec.a2() * lam && derivative(spec, t) < spec.a1() * lam - slack) {
            ok = false;
        }
    }
    rep.slope_near_zero = ok;

    if (spec.kind == PenaltyKind::l1) {
        rep.flat_tail = false;
    } else {
        ok = spec.a > spec.a2();
        for (double t : grid) {
            if (t >= spec.a * lam && derivative(spec, t) != 0.0) ok = false;
        }
        rep.flat_tail = ok;
    }
    return rep;
}

}  // namespace pplla
