#pragma once

#include <span>
#include <string>
#include <string_view>

namespace pplla {

enum class PenaltyKind { scad, mcp, l1 };

std::string to_string(PenaltyKind k);
PenaltyKind penalty_kind_from_string(std::string_view name);

inline constexpr double kDefaultScadA = 3.7;
inline constexpr double kDefaultMcpA = 3.0;

/// Folded-concave penalty p_lambda. The constants a0, a1, a2 are the ones in the
/// folded-concave axioms: p'(0+) >= a1*lambda, p' >= a1*lambda on (0, a2*lambda],
/// p' = 0 on [a*lambda, inf), a0 = min(1, a2).
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::scad;
    double lambda = 0.0;
    double a = kDefaultScadA;

    static PenaltySpec scad(double lambda, double a = kDefaultScadA);
    static PenaltySpec mcp(double lambda, double a = kDefaultMcpA);
    static PenaltySpec l1(double lambda);

    PenaltySpec with_lambda(double l) const {
        PenaltySpec out = *this;
        out.lambda = l;
        return out;
    }

    double a0() const;
    double a1() const;
    double a2() const;

    /// Throws InputError for negative lambda or an out-of-range a.
    void validate() const;
};

/// p'_lambda(t) for t >= 0.
double derivative(const PenaltySpec& spec, double t);
/// p_lambda(t) for t >= 0, closed form.
double value(const PenaltySpec& spec, double t);

struct AxiomReport {
    bool increasing_concave = false;   // (i)
    bool slope_at_zero = false;        // (ii)
    bool slope_near_zero = false;      // (iii)
    bool flat_tail = false;            // (iv)

    bool all() const { return increasing_concave && slope_at_zero && slope_near_zero && flat_tail; }
};

/// Audits the four folded-concave axioms on a sorted, nonnegative grid.
AxiomReport verify_axioms(const PenaltySpec& spec, std::span<const double> grid);

}  // namespace pplla
