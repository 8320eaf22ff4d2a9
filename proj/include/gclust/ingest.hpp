#pragma once

// Turning timestamped interaction records into a sequence of graphs and the
// vectorized n^2 x T data matrix.

#include "gclust/types.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gclust {

/// One interaction record: at `time`, `source` acted on `target`.
struct Event {
    double time = 0.0;
    std::int64_t source = 0;
    std::int64_t target = 0;
    std::optional<std::string> action;

    bool operator==(const Event&) const = default;
};

/// Unsorted collection of records on the horizon [0, horizon].
struct EventLog {
    std::vector<Event> records;
    double horizon = 0.0;
};

enum class BadLinePolicy { strict, skip };

struct ParseOptions {
    char delimiter = '\t';
    bool header = false;
    BadLinePolicy policy = BadLinePolicy::strict;
};

struct ParseResult {
    EventLog log;
    std::size_t skipped = 0;
};

/// Reads `time source target [action]` lines. Blank lines are ignored. Under
/// the strict policy the first malformed line raises a parse error naming its
/// 1-based line number; under the skip policy it is counted in `skipped`.
/// Negative times and negative vertex ids are malformed. The log horizon is
/// the largest time seen.
ParseResult parse_events(std::istream& in, const ParseOptions& options = {});

/// Boundaries tau_0 = 0 < tau_1 < ... < tau_T. Bin t (0-based) is the
/// half-open interval [tau_t, tau_{t+1}).
class TemporalPartition {
public:
    explicit TemporalPartition(std::vector<double> boundaries);

    /// T equal-width bins on [0, horizon).
    static TemporalPartition uniform(double horizon, int bins);

    int bins() const noexcept { return static_cast<int>(boundaries_.size()) - 1; }
    const std::vector<double>& boundaries() const noexcept { return boundaries_; }
    double end() const noexcept { return boundaries_.back(); }

    /// Bin index of time s; throws out_of_range for s < 0 or s >= tau_T.
    int bin_of(double s) const;

private:
    std::vector<double> boundaries_;
};

/// Total map from n original vertices onto m non-empty groups.
class ContractionMap {
public:
    /// assignment[i] is the group of vertex i; groups must be 0..m-1, all used.
    explicit ContractionMap(std::vector<int> assignment);

    /// Reads `vertex_id group_id` pairs (whitespace, comma or tab separated).
    /// Group ids may be arbitrary non-negative integers; they are renumbered
    /// in increasing order. Every vertex in [0, vertices) must be listed.
    static ContractionMap read(std::istream& in, int vertices);

    static ContractionMap identity(int n);

    int vertices() const noexcept { return static_cast<int>(assignment_.size()); }
    int groups() const noexcept { return groups_; }
    int group_of(int vertex) const { return assignment_.at(static_cast<std::size_t>(vertex)); }
    const std::vector<int>& assignment() const noexcept { return assignment_; }

    /// The m x n 0/1 partition matrix J (1^T J = 1^T).
    Matrix partition_matrix() const;

    /// The map that applies *this first, then `outer`.
    ContractionMap then(const ContractionMap& outer) const;

private:
    std::vector<int> assignment_;
    int groups_ = 0;
};

/// T weighted n x n graphs on a shared vertex set plus per-slice totals.
struct GraphSequence {
    std::vector<Matrix> slices;
    Vector totals;

    int vertices() const noexcept { return slices.empty() ? 0 : static_cast<int>(slices.front().rows()); }
    int length() const noexcept { return static_cast<int>(slices.size()); }

    /// Builds a sequence and computes totals from the slices.
    static GraphSequence from_slices(std::vector<Matrix> slices);
};

/// Counts records into bins: G_ij(t) = #{(s, i, j) : s in bin t}. When
/// `vertices` is absent n is max vertex id + 1. Events at or past tau_T are
/// rejected with an out_of_range error.
GraphSequence temporal_bin(const EventLog& log, const TemporalPartition& partition,
                           std::optional<int> vertices = std::nullopt);

/// A(t) = J G(t) J^T for every slice.
GraphSequence contract_vertices(const GraphSequence& g, const ContractionMap& map);

/// A_ij = A_ji = G_ij + G_ji off the diagonal; the diagonal is kept as is.
GraphSequence symmetrize(const GraphSequence& g);

/// The n^2 x T matrix X whose column t is G(t) flattened row-major
/// (l = i*n + j, diagonal included), plus column totals N.
struct DataMatrix {
    Matrix X;
    Vector N;
    int n = 0;

    int length() const noexcept { return static_cast<int>(X.cols()); }

    /// Wraps an arbitrary non-negative matrix; n is sqrt(rows) when rows is a
    /// perfect square, else 0 (the matrix is not a graph sequence).
    static DataMatrix from_matrix(Matrix X);
};

inline constexpr const char* kIndexingConvention = "row-major: l = i*n + j (0-based, diagonal included)";

DataMatrix vectorize(const GraphSequence& g);
GraphSequence devectorize(const DataMatrix& data);

}  // namespace gclust
