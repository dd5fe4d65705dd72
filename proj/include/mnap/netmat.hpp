#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace mnap {

// Simple edge-list graph; the raw material for every network matrix.
struct AdjacencyGraph {
    struct Edge {
        int src = 0;
        int dst = 0;
        double weight = 1.0;
    };

    int n = 0;
    bool directed = false;
    std::vector<Edge> edges;

    AdjacencyGraph() = default;
    AdjacencyGraph(int n_, bool directed_ = false) : n(n_), directed(directed_) {}

    void add_edge(int src, int dst, double weight = 1.0);

    // Throws mnap::Error on self-loops, out-of-range indices, negative weights.
    void validate() const;

    // Dense weight matrix; symmetric when undirected, diagonal zero.
    Eigen::MatrixXd adjacency() const;

    bool is_binary() const;

    // One edge per line: "i j [weight]"; '#' starts a comment.
    static AdjacencyGraph parse_edge_list(std::istream& in, int n, bool one_based,
                                          bool directed);
    static AdjacencyGraph load_edge_list(const std::string& path, int n, bool one_based,
                                         bool directed);
};

enum class NetworkKind { raw, cohesion, structural_equivalence, mixture };

std::string to_string(NetworkKind kind);
NetworkKind network_kind_from_string(const std::string& s);

// Dense nonnegative coefficient matrix W_i with zero diagonal.
struct NetworkMatrix {
    int n = 0;
    Eigen::MatrixXd values;
    NetworkKind kind = NetworkKind::raw;

    NetworkMatrix() = default;
    NetworkMatrix(Eigen::MatrixXd values_, NetworkKind kind_);

    // Checks nonnegativity, zero diagonal, finiteness, squareness.
    void validate() const;

    void save(const std::string& path) const;
    static NetworkMatrix load(const std::string& path, NetworkKind kind = NetworkKind::raw);
};

enum class CohesionNormalization {
    none,
    row_sum,   // every nonzero row sums to 1 (default elsewhere)
    adopters,  // divide row i by the number of adopting neighbors; needs y
};

std::string to_string(CohesionNormalization mode);
CohesionNormalization cohesion_normalization_from_string(const std::string& s);

// Direct-tie influence matrix. `outcomes` is only consulted in adopters mode.
NetworkMatrix build_cohesion(const AdjacencyGraph& g,
                             CohesionNormalization mode = CohesionNormalization::row_sum,
                             const Eigen::VectorXi* outcomes = nullptr);

// s_ij = 1 / (d_ij + 1) with d_ij the adjacency distance over third parties
// k != i, j. Requires an undirected binary graph.
NetworkMatrix build_structural_equivalence(const AdjacencyGraph& g);

// Convex combination of same-sized matrices; weights are renormalized to
// sum to one.
NetworkMatrix build_mixture(const std::vector<NetworkMatrix>& components,
                            const std::vector<double>& weights);

struct RhoBounds {
    double rho1_min = -1.0;
    double rho1_max = 1.0;
    double rho2_min = -1.0;
    double rho2_max = 1.0;
};

// Grid classification of (rho1, rho2) points by invertibility of
// B = I - rho1 W1 - rho2 W2.
struct ValidityRegion {
    Eigen::VectorXd rho1;        // grid axis values, length steps1
    Eigen::VectorXd rho2;        // length steps2
    Eigen::MatrixXi invertible;  // steps1 x steps2; 1 where B is invertible
    double tolerance = 0.0;      // |det B| threshold used (1e-10 * n)

    // A grid containing (0,0) always flags it invertible (B = I there).
    bool flag_at(int i, int j) const { return invertible(i, j) != 0; }
};

ValidityRegion scan_validity_region(const NetworkMatrix& w1, const NetworkMatrix& w2,
                                    const RhoBounds& bounds, int steps1, int steps2,
                                    int jobs = 1);

}  // namespace mnap
