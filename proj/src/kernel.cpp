#include "bandchain/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bandchain/stationary.hpp"

namespace bandchain {

namespace {

void check_row_stochastic(const SparseRow& row, const std::string& what) {
    double sum = 0.0;
    for (const auto& [j, p] : row) {
        if (p < 0.0 || p > 1.0)
            throw NegativeEntry(what + ": entry P(.," + std::to_string(j) +
                                ") = " + std::to_string(p) + " outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw NonStochasticRow(what + ": row sum " + std::to_string(sum) +
                               " differs from 1 by more than 1e-12");
}

SparseRow dense_to_sparse(const std::vector<double>& row) {
    SparseRow out;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0.0) out[static_cast<Index>(j)] = row[j];
    return out;
}

} // namespace

void Increments::validate(bool require_positive_extremes) const {
    if (g < 1 || d < 1)
        throw DegenerateIncrements("increment law needs g >= 1 and d >= 1");
    double sum = 0.0;
    for (const auto& [m, p] : a) {
        if (m < -g || m > d)
            throw DegenerateIncrements("increment offset " + std::to_string(m) +
                                       " outside {-g..d}");
        if (p < 0.0 || p > 1.0)
            throw NegativeEntry("increment a_" + std::to_string(m) + " outside [0,1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
        throw NonStochasticRow("increments sum to " + std::to_string(sum));
    if (require_positive_extremes) {
        if (at(-g) <= 0.0)
            throw DegenerateIncrements("a_{-g} must be positive");
        if (at(d) <= 0.0)
            throw DegenerateIncrements("a_d must be positive");
    }
}

BandKernel BandKernel::homogeneous_rw(int g, int d,
                                      const std::map<int, double>& increments,
                                      const std::vector<std::vector<double>>& boundary_rows) {
    Increments law{g, d, increments};
    law.validate();

    // Rows 0..g-1 would otherwise reach negative states; each needs an
    // explicit boundary row.
    if (static_cast<int>(boundary_rows.size()) != g)
        throw MissingBoundaryRow("expected exactly " + std::to_string(g) +
                                 " boundary rows, got " +
                                 std::to_string(boundary_rows.size()));

    BandKernel k;
    k.i0_ = g;
    k.half_bandwidth_ = std::max(g, d);
    k.limit_ = std::move(law);
    k.boundary_rows_.reserve(boundary_rows.size());
    for (std::size_t i = 0; i < boundary_rows.size(); ++i) {
        SparseRow row = dense_to_sparse(boundary_rows[i]);
        check_row_stochastic(row, "boundary row " + std::to_string(i));
        k.boundary_rows_.push_back(std::move(row));
    }
    return k;
}

BandKernel BandKernel::varying(Index i0, int half_bandwidth,
                               const std::vector<std::vector<double>>& boundary_rows,
                               RowGenerator generator, Increments limit) {
    limit.validate(/*require_positive_extremes=*/false);
    if (static_cast<Index>(boundary_rows.size()) != i0)
        throw MissingBoundaryRow("expected " + std::to_string(i0) + " boundary rows");
    if (!generator)
        throw Error("varying tail requires a row generator");

    BandKernel k;
    k.i0_ = i0;
    k.half_bandwidth_ = half_bandwidth;
    k.generator_ = std::move(generator);
    k.limit_ = std::move(limit);
    for (std::size_t i = 0; i < boundary_rows.size(); ++i) {
        SparseRow row = dense_to_sparse(boundary_rows[i]);
        check_row_stochastic(row, "boundary row " + std::to_string(i));
        k.boundary_rows_.push_back(std::move(row));
    }
    return k;
}

SparseRow BandKernel::row(Index i) const {
    if (i < i0_) return boundary_rows_[static_cast<std::size_t>(i)];
    if (generator_) {
        SparseRow r = generator_(i);
        check_row_stochastic(r, "generated row " + std::to_string(i));
        for (const auto& [j, p] : r)
            if (std::llabs(j - i) > half_bandwidth_)
                throw Error("generated row " + std::to_string(i) +
                            " violates the band limit");
        return r;
    }
    SparseRow r;
    for (const auto& [m, p] : limit_.a)
        if (p != 0.0) r[i + m] = p;
    return r;
}

AdjointKernel adjoint(const BandKernel& kernel, const StationaryDistribution& pi,
                      Index k) {
    const int N = kernel.half_bandwidth();
    if (pi.size() < k + N + 1)
        throw Error("adjoint: pi prefix must cover 0.." + std::to_string(k + N));

    AdjointKernel adj;
    adj.k = k;
    adj.half_bandwidth = N;
    adj.rows.resize(static_cast<std::size_t>(k + 1));

    // P*(i,j) = pi(j) P(j,i) / pi(i); scan source rows once.
    for (Index j = 0; j <= k; ++j) {
        const double pj = pi.at(j);
        for (const auto& [i, p] : kernel.row(j)) {
            if (i > k || p == 0.0) continue;
            const double pii = pi.at(i);
            if (pii <= 0.0)
                throw ZeroMass("adjoint: pi(" + std::to_string(i) + ") = 0");
            adj.rows[static_cast<std::size_t>(i)][j] += pj * p / pii;
        }
    }
    return adj;
}

StructureDiagnostics validate_structure(const BandKernel& kernel, Index k) {
    StructureDiagnostics diag;
    diag.k = k;
    diag.note = "checked on the k-truncated augmented chain only; the infinite "
                "chain's irreducibility/aperiodicity is not decidable from "
                "finitely many rows";

    const Index n = k + 1;
    const int N = kernel.half_bandwidth();

    // Adjacency of the augmented truncation (column k absorbs lost mass).
    std::vector<std::vector<Index>> adj(static_cast<std::size_t>(n));
    std::vector<std::vector<Index>> radj(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        double kept = 0.0;
        std::vector<bool> edge(static_cast<std::size_t>(n), false);
        for (const auto& [j, p] : kernel.row(i)) {
            if (p <= 0.0) continue;
            if (i >= kernel.i0() && std::llabs(j - i) > N)
                diag.band_violations.push_back(
                    "P(" + std::to_string(i) + "," + std::to_string(j) +
                    ") nonzero outside the band");
            if (j < k) {
                edge[static_cast<std::size_t>(j)] = true;
                kept += p;
            } else {
                edge[static_cast<std::size_t>(k)] = true;
            }
        }
        if (kept < 1.0 - kRowSumTol) edge[static_cast<std::size_t>(k)] = true;
        for (Index j = 0; j < n; ++j)
            if (edge[static_cast<std::size_t>(j)]) {
                adj[static_cast<std::size_t>(i)].push_back(j);
                radj[static_cast<std::size_t>(j)].push_back(i);
            }
    }

    auto reaches_all = [n](const std::vector<std::vector<Index>>& graph) {
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        std::deque<Index> queue{0};
        seen[0] = true;
        Index count = 1;
        while (!queue.empty()) {
            Index u = queue.front();
            queue.pop_front();
            for (Index v : graph[static_cast<std::size_t>(u)])
                if (!seen[static_cast<std::size_t>(v)]) {
                    seen[static_cast<std::size_t>(v)] = true;
                    ++count;
                    queue.push_back(v);
                }
        }
        return count == n;
    };
    diag.irreducible = reaches_all(adj) && reaches_all(radj);

    if (diag.irreducible) {
        // gcd of (level(u) + 1 - level(v)) over all edges u->v equals the
        // period of a strongly connected graph. The period is computed on
        // the kernel's own transitions restricted to {0..k}: the folded
        // column-k mass adds a self-loop at k that is an artifact of the
        // augmentation, not a cycle of the chain, and would mask genuine
        // periodicity (e.g. the symmetric +/-1 walk).
        std::vector<std::vector<Index>> tadj(static_cast<std::size_t>(n));
        for (Index i = 0; i < n; ++i)
            for (const auto& [j, p] : kernel.row(i))
                if (p > 0.0 && j <= k) tadj[static_cast<std::size_t>(i)].push_back(j);

        std::vector<Index> level(static_cast<std::size_t>(n), -1);
        std::deque<Index> queue{0};
        level[0] = 0;
        Index period = 0;
        while (!queue.empty()) {
            Index u = queue.front();
            queue.pop_front();
            for (Index v : tadj[static_cast<std::size_t>(u)]) {
                if (level[static_cast<std::size_t>(v)] < 0) {
                    level[static_cast<std::size_t>(v)] = level[static_cast<std::size_t>(u)] + 1;
                    queue.push_back(v);
                } else {
                    Index diff = level[static_cast<std::size_t>(u)] + 1 -
                                 level[static_cast<std::size_t>(v)];
                    period = std::gcd(period, std::llabs(diff));
                }
            }
        }
        diag.aperiodic = (period == 1);
    }
    return diag;
}

bool is_reversible(const BandKernel& kernel, const StationaryDistribution& pi,
                   Index k, double tol) {
    const AdjointKernel adj = adjoint(kernel, pi, k);
    for (Index i = 0; i <= k; ++i) {
        SparseRow row = kernel.row(i);
        for (const auto& [j, p] : row)
            if (j <= k && std::abs(adj.entry(i, j) - p) > tol) return false;
        for (const auto& [j, q] : adj.rows[static_cast<std::size_t>(i)]) {
            auto it = row.find(j);
            const double p = it == row.end() ? 0.0 : it->second;
            if (std::abs(q - p) > tol) return false;
        }
    }
    return true;
}

BandKernel parse_chain_spec(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text);

    const std::string type = doc.at("type").get<std::string>();

    auto parse_increments = [](const nlohmann::json& obj) {
        std::map<int, double> inc;
        for (auto it = obj.begin(); it != obj.end(); ++it)
            inc[std::stoi(it.key())] = it.value().get<double>();
        return inc;
    };
    auto parse_boundary = [](const nlohmann::json& arr) {
        std::vector<std::vector<double>> rows;
        for (const auto& r : arr) rows.push_back(r.get<std::vector<double>>());
        return rows;
    };

    if (type == "homogeneous_rw") {
        return BandKernel::homogeneous_rw(doc.at("g").get<int>(),
                                          doc.at("d").get<int>(),
                                          parse_increments(doc.at("increments")),
                                          parse_boundary(doc.at("boundary_rows")));
    }
    if (type == "band") {
        // Band tail given as a shift-invariant increment row applied from i0,
        // with limit increments declared separately when they differ.
        const int g = doc.at("g").get<int>();
        const int d = doc.at("d").get<int>();
        auto inc = parse_increments(doc.at("increments"));
        const Index i0 = doc.value("i0", static_cast<Index>(g));
        const int N = doc.value("N", std::max(g, d));
        Increments limit{g, d,
                         doc.contains("limit_increments")
                             ? parse_increments(doc.at("limit_increments"))
                             : inc};
        auto generator = [inc](Index i) {
            SparseRow r;
            for (const auto& [m, p] : inc)
                if (p != 0.0) r[i + m] = p;
            return r;
        };
        return BandKernel::varying(i0, N, parse_boundary(doc.at("boundary_rows")),
                                   generator, std::move(limit));
    }
    throw Error("unknown chain spec type: " + type);
}

BandKernel load_chain_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open chain spec: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_chain_spec(ss.str());
}

} // namespace bandchain
