#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "graphwords/graph_feature.hpp"

namespace graphwords {

/// Which descriptor distance fills the feature correspondence matrix D.
/// squared_l2 is the sum of squared component differences, l2 its square
/// root. Both are kept because persisted dictionaries must record which one
/// they were built with.
enum class DistanceFlavor { squared_l2, l2 };

const char* to_string(DistanceFlavor f);
DistanceFlavor distance_flavor_from_string(const std::string& s);

/// Context Dependent Kernel parameters: context weight alpha, bandwidth
/// beta, iteration count, and the D-matrix distance flavor.
struct CdkParams {
    double alpha = 1e-4;
    double beta = 0.1;
    unsigned iterations = 2;
    DistanceFlavor flavor = DistanceFlavor::squared_l2;

    void validate() const;  ///< beta must be positive
};

/// The two matrices the kernel iteration works on, assembled over the union
/// C = A u B with A occupying rows/columns [0, m) and B [m, m+n).
///   d(i, j) = descriptor distance between union nodes i and j
///   t(i, j) = 1 iff an edge of A or of B connects i and j; the cross-graph
///             blocks are zero by construction.
struct PairMatrices {
    Eigen::MatrixXd d;
    Eigen::MatrixXd t;
    Eigen::Index m = 0;
    Eigen::Index n = 0;
};

PairMatrices assemble_pair_matrices(const GraphFeature& a, const GraphFeature& b,
                                    DistanceFlavor flavor);

/// Runs the kernel iteration
///   K(0) = exp(-D/beta) / ||exp(-D/beta)||_1
///   K(t) = G(K(t-1)) / ||G(K(t-1))||_1,  G(K) = exp(-D/beta + (alpha/beta) T K T)
/// where exp is coefficient-wise and ||.||_1 the entrywise L1 matrix norm.
/// Every exponent matrix is shifted by its maximum before exponentiation;
/// the L1 renormalization cancels the shift exactly, so overflow is avoided
/// without changing the result. Entries of the returned matrix are positive
/// and sum to 1.
Eigen::MatrixXd cdk_iterate(const PairMatrices& pm, const CdkParams& params);

/// Kernel dissimilarity rho(A, B) = s(A,A) + s(B,B) - 2 s(A,B), where
/// s(X, Y) sums the corresponding block of K(iterations).
///
/// rho(A, A) = 0 and rho is symmetric. Both graphs must sit on the same
/// layer; dictionaries are per-layer so cross-layer comparisons are a caller
/// bug and rejected. A numerically negative rho is clamped to zero and
/// counted (see negative_rho_clamp_count).
double graph_dissimilarity(const GraphFeature& a, const GraphFeature& b,
                           const CdkParams& params);

/// Plain descriptor distance under the chosen flavor. Used as the layer-0
/// dissimilarity: for two isolated points rho equals
/// (1 - exp(-d/beta)) / (1 + exp(-d/beta)) = tanh(d / (2 beta)), which is
/// monotone in d, so the raw distance ranks identically and is cheaper.
double point_dissimilarity(const std::vector<double>& a, const std::vector<double>& b,
                           DistanceFlavor flavor);

/// How many times graph_dissimilarity clamped a negative rho to zero since
/// process start. The iterated kernel has no nonnegativity proof, so the
/// clamp is tracked rather than silent.
std::uint64_t negative_rho_clamp_count();

}  // namespace graphwords
