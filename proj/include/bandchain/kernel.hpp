#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bandchain/errors.hpp"

namespace bandchain {

using Index = std::int64_t;

/// One transition row as a sparse map column -> probability.
using SparseRow = std::map<Index, double>;

// Row-sum tolerance applied to every constructed or generated row.
inline constexpr double kRowSumTol = 1e-12;

/// Bounded-increment law of the homogeneous (or limiting) tail:
/// a_m for m in {-g..d}.
struct Increments {
    int g = 0;            // largest downward jump, g >= 1
    int d = 0;            // largest upward jump, d >= 1
    std::map<int, double> a;

    double at(int m) const {
        auto it = a.find(m);
        return it == a.end() ? 0.0 : it->second;
    }
    /// Throws DegenerateIncrements / NonStochasticRow / NegativeEntry.
    /// Exact homogeneous tails require a_{-g} > 0 and a_d > 0; the limit law
    /// of a varying tail may have vanishing extremes (the tau = 0 case).
    void validate(bool require_positive_extremes = true) const;
};

/// Band-structured Markov kernel on the nonnegative integers: finitely many
/// explicit boundary rows (indices 0..i0-1) followed by a band-limited tail,
/// either a homogeneous increment law or a deterministic row generator with
/// declared limit increments.
class BandKernel {
public:
    using RowGenerator = std::function<SparseRow(Index)>;

    /// Random walk with i.d. bounded increments: rows i >= g follow the
    /// increment law, rows 0..g-1 are given explicitly.
    static BandKernel homogeneous_rw(int g, int d,
                                     const std::map<int, double>& increments,
                                     const std::vector<std::vector<double>>& boundary_rows);

    /// General band tail via a row generator; the generator must be
    /// band-limited by N and its rows must converge to `limit`.
    static BandKernel varying(Index i0, int half_bandwidth,
                              const std::vector<std::vector<double>>& boundary_rows,
                              RowGenerator generator, Increments limit);

    /// Exact row of P at index i (boundary row if i < i0, tail otherwise).
    SparseRow row(Index i) const;

    Index i0() const { return i0_; }
    int half_bandwidth() const { return half_bandwidth_; }
    bool homogeneous_tail() const { return !generator_; }

    /// Limit increments a_m of the tail (exact for a homogeneous tail).
    const Increments& limit_increments() const { return limit_; }

private:
    BandKernel() = default;

    Index i0_ = 0;
    int half_bandwidth_ = 0;
    std::vector<SparseRow> boundary_rows_;
    RowGenerator generator_;   // empty for homogeneous tails
    Increments limit_;
};

/// Time reversal of P with respect to pi, restricted to {0..k}:
/// entry (i,j) = pi(j) P(j,i) / pi(i).
struct AdjointKernel {
    Index k = 0;
    int half_bandwidth = 0;
    std::vector<SparseRow> rows;

    double entry(Index i, Index j) const {
        auto it = rows[static_cast<std::size_t>(i)].find(j);
        return it == rows[static_cast<std::size_t>(i)].end() ? 0.0 : it->second;
    }
};

struct StationaryDistribution;

AdjointKernel adjoint(const BandKernel& kernel, const StationaryDistribution& pi, Index k);

/// Structural diagnostics of the k-truncated augmented chain. Failures are
/// reported, never thrown.
struct StructureDiagnostics {
    Index k = 0;
    bool irreducible = false;
    bool aperiodic = false;
    std::vector<std::string> band_violations;
    // Irreducibility/aperiodicity of the infinite chain is undecidable from
    // finitely many rows; this records what was actually checked.
    std::string note;

    bool ok() const { return irreducible && aperiodic && band_violations.empty(); }
};

StructureDiagnostics validate_structure(const BandKernel& kernel, Index k);

/// Detailed balance check: P* == P entrywise within tol on {0..k}.
bool is_reversible(const BandKernel& kernel, const StationaryDistribution& pi,
                   Index k, double tol = 1e-10);

/// Parses the chain-spec JSON document (types "homogeneous_rw" and "band").
BandKernel parse_chain_spec(const std::string& json_text);
BandKernel load_chain_spec(const std::string& path);

} // namespace bandchain
