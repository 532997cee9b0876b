#include "graphwords/cdk.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace graphwords {

namespace {

std::atomic<std::uint64_t> g_negative_rho_clamps{0};

double descriptor_distance(const std::vector<double>& a, const std::vector<double>& b,
                           DistanceFlavor flavor) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return flavor == DistanceFlavor::squared_l2 ? sum : std::sqrt(sum);
}

/// exp(M - max(M)) / sum(exp(M - max(M))). The shift cancels under the L1
/// renormalization (all entries positive, so the L1 matrix norm is the plain
/// sum) and keeps the exponentials in range.
Eigen::MatrixXd normalized_exp(const Eigen::MatrixXd& exponents) {
    const double shift = exponents.maxCoeff();
    Eigen::MatrixXd e = (exponents.array() - shift).exp();
    return e / e.sum();
}

}  // namespace

const char* to_string(DistanceFlavor f) {
    return f == DistanceFlavor::squared_l2 ? "squared_l2" : "l2";
}

DistanceFlavor distance_flavor_from_string(const std::string& s) {
    if (s == "squared_l2") return DistanceFlavor::squared_l2;
    if (s == "l2") return DistanceFlavor::l2;
    throw std::invalid_argument("unknown distance flavor '" + s + "'");
}

void CdkParams::validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("CdkParams: beta must be positive");
    if (alpha < 0.0) throw std::invalid_argument("CdkParams: alpha must be nonnegative");
}

PairMatrices assemble_pair_matrices(const GraphFeature& a, const GraphFeature& b,
                                    DistanceFlavor flavor) {
    const Eigen::Index m = static_cast<Eigen::Index>(a.node_count());
    const Eigen::Index n = static_cast<Eigen::Index>(b.node_count());
    const Eigen::Index size = m + n;

    for (const auto& d : a.node_descriptors) {
        if (d.size() != a.node_descriptors.front().size()) {
            throw std::invalid_argument("assemble_pair_matrices: ragged descriptors");
        }
    }
    if (!a.node_descriptors.empty() && !b.node_descriptors.empty() &&
        a.node_descriptors.front().size() != b.node_descriptors.front().size()) {
        throw std::invalid_argument("assemble_pair_matrices: descriptor dimension mismatch");
    }

    auto descriptor_of = [&](Eigen::Index i) -> const std::vector<double>& {
        return i < m ? a.node_descriptors[static_cast<std::size_t>(i)]
                     : b.node_descriptors[static_cast<std::size_t>(i - m)];
    };

    PairMatrices pm;
    pm.m = m;
    pm.n = n;
    pm.d = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i < size; ++i) {
        for (Eigen::Index j = i + 1; j < size; ++j) {
            const double d = descriptor_distance(descriptor_of(i), descriptor_of(j), flavor);
            pm.d(i, j) = d;
            pm.d(j, i) = d;
        }
    }

    pm.t = Eigen::MatrixXd::Zero(size, size);
    for (const auto& [u, v] : a.edges.pairs) {
        pm.t(u, v) = 1.0;
        pm.t(v, u) = 1.0;
    }
    for (const auto& [u, v] : b.edges.pairs) {
        pm.t(m + u, m + v) = 1.0;
        pm.t(m + v, m + u) = 1.0;
    }
    return pm;
}

Eigen::MatrixXd cdk_iterate(const PairMatrices& pm, const CdkParams& params) {
    params.validate();
    const Eigen::MatrixXd base = -pm.d / params.beta;

    Eigen::MatrixXd k = normalized_exp(base);
    for (unsigned step = 0; step < params.iterations; ++step) {
        const Eigen::MatrixXd context = (params.alpha / params.beta) * (pm.t * k * pm.t);
        k = normalized_exp(base + context);
    }
    return k;
}

double graph_dissimilarity(const GraphFeature& a, const GraphFeature& b,
                           const CdkParams& params) {
    if (a.layer != b.layer) {
        throw std::invalid_argument(
            "graph_dissimilarity: features on different layers (dictionaries are per-layer)");
    }
    const PairMatrices pm = assemble_pair_matrices(a, b, params.flavor);
    const Eigen::MatrixXd k = cdk_iterate(pm, params);

    const double s_aa = k.topLeftCorner(pm.m, pm.m).sum();
    const double s_bb = k.bottomRightCorner(pm.n, pm.n).sum();
    const double s_ab = k.block(0, pm.m, pm.m, pm.n).sum();

    double rho = s_aa + s_bb - 2.0 * s_ab;
    if (rho < 0.0) {
        g_negative_rho_clamps.fetch_add(1, std::memory_order_relaxed);
        rho = 0.0;
    }
    return rho;
}

double point_dissimilarity(const std::vector<double>& a, const std::vector<double>& b,
                           DistanceFlavor flavor) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("point_dissimilarity: descriptor dimension mismatch");
    }
    return descriptor_distance(a, b, flavor);
}

std::uint64_t negative_rho_clamp_count() {
    return g_negative_rho_clamps.load(std::memory_order_relaxed);
}

}  // namespace graphwords
