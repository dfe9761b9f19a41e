#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pplla {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Sorted, duplicate-free coefficient indices.
using IndexSet = std::vector<Index>;

/// Bad user input: shapes, ranges, rank-deficient constraints. Maps to CLI exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to converge or hit a singular system. Maps to CLI exit code 3.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what, int iteration = -1)
        : std::runtime_error(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

/// Floating-point overflow that would otherwise surface as a silent infinity.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

IndexSet set_union(const IndexSet& a, const IndexSet& b);
IndexSet set_difference(const IndexSet& a, const IndexSet& b);
bool set_contains(const IndexSet& s, Index j);
IndexSet complement(const IndexSet& s, Index size);

Vec gather(const Vec& v, const IndexSet& idx);
Mat gather_cols(const Mat& m, const IndexSet& idx);
Mat gather_block(const Mat& m, const IndexSet& rows, const IndexSet& cols);
void scatter(Vec& dest, const IndexSet& idx, const Vec& values);

/// Outcome of any estimation routine.
struct FitResult {
    Vec beta;
    IndexSet support;                     // nonzero penalized coordinates
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    double lambda = 0.0;
    bool steps_coincide = false;          // LLA: last two iterates identical
    Vec multiplier;                       // constraint multiplier when constrained
};

}  // namespace pplla
