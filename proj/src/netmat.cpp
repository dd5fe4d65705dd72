#include "mnap/netmat.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mnap/bmatrix.hpp"
#include "mnap/errors.hpp"
#include "mnap/parallel.hpp"

namespace mnap {

void AdjacencyGraph::add_edge(int src, int dst, double weight) {
    edges.push_back({src, dst, weight});
}

void AdjacencyGraph::validate() const {
    if (n < 0) throw Error("AdjacencyGraph: negative node count");
    for (const Edge& e : edges) {
        if (e.src == e.dst)
            throw Error("AdjacencyGraph: self-loop at node " + std::to_string(e.src));
        if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n)
            throw Error("AdjacencyGraph: edge (" + std::to_string(e.src) + "," +
                        std::to_string(e.dst) + ") out of range for n=" + std::to_string(n));
        if (!(e.weight >= 0.0) || !std::isfinite(e.weight))
            throw Error("AdjacencyGraph: edge weight must be finite and nonnegative");
    }
}

Eigen::MatrixXd AdjacencyGraph::adjacency() const {
    validate();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : edges) {
        a(e.src, e.dst) = e.weight;
        if (!directed) a(e.dst, e.src) = e.weight;
    }
    return a;
}

bool AdjacencyGraph::is_binary() const {
    for (const Edge& e : edges)
        if (e.weight != 1.0) return false;
    return true;
}

AdjacencyGraph AdjacencyGraph::parse_edge_list(std::istream& in, int n, bool one_based,
                                               bool directed) {
    AdjacencyGraph g(n, directed);
    std::string line;
    int lineno = 0;
    int max_index = -1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long src, dst;
        if (!(ls >> src)) continue;  // blank line
        if (!(ls >> dst))
            throw IoError("edge list line " + std::to_string(lineno) + ": expected 'i j [w]'");
        double w = 1.0;
        if (ls >> w) {
            std::string rest;
            if (ls >> rest)
                throw IoError("edge list line " + std::to_string(lineno) + ": trailing tokens");
        }
        if (one_based) {
            --src;
            --dst;
        }
        if (src < 0 || dst < 0)
            throw IoError("edge list line " + std::to_string(lineno) + ": negative index");
        g.add_edge(static_cast<int>(src), static_cast<int>(dst), w);
        max_index = std::max(max_index, static_cast<int>(std::max(src, dst)));
    }
    if (g.n <= 0) g.n = max_index + 1;
    g.validate();
    return g;
}

AdjacencyGraph AdjacencyGraph::load_edge_list(const std::string& path, int n, bool one_based,
                                              bool directed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open edge list: " + path);
    return parse_edge_list(in, n, one_based, directed);
}

std::string to_string(NetworkKind kind) {
    switch (kind) {
        case NetworkKind::raw: return "raw";
        case NetworkKind::cohesion: return "cohesion";
        case NetworkKind::structural_equivalence: return "structural_equivalence";
        case NetworkKind::mixture: return "mixture";
    }
    return "raw";
}

NetworkKind network_kind_from_string(const std::string& s) {
    if (s == "raw" || s == "matrix") return NetworkKind::raw;
    if (s == "cohesion") return NetworkKind::cohesion;
    if (s == "structural_equivalence" || s == "structural-equivalence")
        return NetworkKind::structural_equivalence;
    if (s == "mixture") return NetworkKind::mixture;
    throw ConfigError("unknown network kind: " + s);
}

std::string to_string(CohesionNormalization mode) {
    switch (mode) {
        case CohesionNormalization::none: return "none";
        case CohesionNormalization::row_sum: return "row_sum";
        case CohesionNormalization::adopters: return "adopters";
    }
    return "none";
}

CohesionNormalization cohesion_normalization_from_string(const std::string& s) {
    if (s == "none") return CohesionNormalization::none;
    if (s == "row_sum" || s == "row-sum") return CohesionNormalization::row_sum;
    if (s == "adopters") return CohesionNormalization::adopters;
    throw ConfigError("unknown cohesion normalization: " + s);
}

NetworkMatrix::NetworkMatrix(Eigen::MatrixXd values_, NetworkKind kind_)
    : n(static_cast<int>(values_.rows())), values(std::move(values_)), kind(kind_) {
    validate();
}

void NetworkMatrix::validate() const {
    if (values.rows() != values.cols())
        throw Error("NetworkMatrix: matrix must be square");
    if (static_cast<int>(values.rows()) != n) throw Error("NetworkMatrix: n mismatch");
    if (!values.allFinite()) throw Error("NetworkMatrix: non-finite entries");
    if ((values.array() < 0.0).any()) throw Error("NetworkMatrix: negative entries");
    for (int i = 0; i < n; ++i)
        if (values(i, i) != 0.0) throw Error("NetworkMatrix: nonzero diagonal");
}

NetworkMatrix build_cohesion(const AdjacencyGraph& g, CohesionNormalization mode,
                             const Eigen::VectorXi* outcomes) {
    g.validate();
    if (g.n < 2) throw Error("build_cohesion: need at least 2 nodes");
    Eigen::MatrixXd w = g.adjacency();

    switch (mode) {
        case CohesionNormalization::none:
            break;
        case CohesionNormalization::row_sum:
            for (int i = 0; i < g.n; ++i) {
                const double s = w.row(i).sum();
                if (s > 0.0) w.row(i) /= s;  // isolates keep their zero row
            }
            break;
        case CohesionNormalization::adopters: {
            if (outcomes == nullptr || outcomes->size() != g.n)
                throw Error("build_cohesion: adopters normalization needs outcomes of length n");
            for (int i = 0; i < g.n; ++i) {
                int adopters = 0;
                for (int j = 0; j < g.n; ++j)
                    if (w(i, j) > 0.0 && (*outcomes)(j) == 1) ++adopters;
                if (adopters > 0) w.row(i) /= static_cast<double>(adopters);
            }
            break;
        }
    }
    return NetworkMatrix(std::move(w), NetworkKind::cohesion);
}

NetworkMatrix build_structural_equivalence(const AdjacencyGraph& g) {
    g.validate();
    if (g.directed) throw Error("build_structural_equivalence: graph must be undirected");
    if (!g.is_binary()) throw Error("build_structural_equivalence: graph must be binary");
    const Eigen::MatrixXd a = g.adjacency();
    const int n = g.n;

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                const double diff = a(i, k) - a(j, k);
                sum += diff * diff;
            }
            const double d = std::sqrt(sum);
            const double sij = 1.0 / (d + 1.0);
            s(i, j) = sij;
            s(j, i) = sij;
        }
    }
    return NetworkMatrix(std::move(s), NetworkKind::structural_equivalence);
}

NetworkMatrix build_mixture(const std::vector<NetworkMatrix>& components,
                            const std::vector<double>& weights) {
    if (components.empty()) throw Error("build_mixture: no components");
    if (components.size() != weights.size())
        throw Error("build_mixture: component/weight count mismatch");
    const int n = components.front().n;
    double total = 0.0;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].n != n) throw Error("build_mixture: dimension mismatch");
        if (!(weights[i] >= 0.0)) throw Error("build_mixture: negative weight");
        total += weights[i];
    }
    if (!(total > 0.0)) throw Error("build_mixture: all-zero weight vector");

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < components.size(); ++i)
        w += (weights[i] / total) * components[i].values;
    return NetworkMatrix(std::move(w), NetworkKind::mixture);
}

ValidityRegion scan_validity_region(const NetworkMatrix& w1, const NetworkMatrix& w2,
                                    const RhoBounds& bounds, int steps1, int steps2,
                                    int jobs) {
    w1.validate();
    w2.validate();
    if (w1.n != w2.n) throw Error("scan_validity_region: dimension mismatch");
    if (steps1 < 1 || steps2 < 1) throw Error("scan_validity_region: resolution must be positive");

    const int n = w1.n;
    ValidityRegion region;
    region.rho1 = Eigen::VectorXd::LinSpaced(steps1, bounds.rho1_min, bounds.rho1_max);
    region.rho2 = Eigen::VectorXd::LinSpaced(steps2, bounds.rho2_min, bounds.rho2_max);
    region.invertible = Eigen::MatrixXi::Zero(steps1, steps2);
    region.tolerance = 1e-10 * n;

    parallel_for(static_cast<std::size_t>(steps1) * steps2, jobs, [&](std::size_t idx) {
        const int i = static_cast<int>(idx) / steps2;
        const int j = static_cast<int>(idx) % steps2;
        Eigen::MatrixXd b = Eigen::MatrixXd::Identity(n, n);
        b -= region.rho1(i) * w1.values;
        b -= region.rho2(j) * w2.values;
        region.invertible(i, j) = BFactor(std::move(b)).singular() ? 0 : 1;
    });
    return region;
}

void NetworkMatrix::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write matrix file: " + path);
    out.precision(17);
    out << "# kind " << to_string(kind) << "\n";
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j) out << ' ';
            out << values(i, j);
        }
        out << '\n';
    }
}

NetworkMatrix NetworkMatrix::load(const std::string& path, NetworkKind kind) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open matrix file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    NetworkKind file_kind = kind;
    bool kind_from_file = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string key, value;
            if (ls >> key >> value && key == "kind") {
                file_kind = network_kind_from_string(value);
                kind_from_file = true;
            }
            continue;
        }
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("empty matrix file: " + path);
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n)
            throw IoError("matrix file is not square: " + path);
        for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
    }
    return NetworkMatrix(std::move(m), kind_from_file ? file_kind : kind);
}

}  // namespace mnap
