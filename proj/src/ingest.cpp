#include "gclust/ingest.hpp"

#include "gclust/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <string_view>

namespace gclust {

namespace {

std::vector<std::string_view> split(std::string_view line, char delimiter) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delimiter, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(std::string_view text, T& value) {
    text = trim(text);
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc{} && ptr == end;
}

// Returns an error description, or an empty string when the line parsed.
std::string parse_line(std::string_view line, char delimiter, Event& event) {
    const auto fields = split(line, delimiter);
    if (fields.size() < 3 || fields.size() > 4)
        return fmt::format("expected 3 or 4 fields, found {}", fields.size());
    if (!parse_number(fields[0], event.time) || !std::isfinite(event.time))
        return fmt::format("bad time '{}'", fields[0]);
    if (event.time < 0.0) return fmt::format("negative time {}", event.time);
    if (!parse_number(fields[1], event.source) || event.source < 0)
        return fmt::format("bad source vertex '{}'", fields[1]);
    if (!parse_number(fields[2], event.target) || event.target < 0)
        return fmt::format("bad target vertex '{}'", fields[2]);
    event.action.reset();
    if (fields.size() == 4) {
        const auto action = trim(fields[3]);
        if (!action.empty()) event.action = std::string(action);
    }
    return {};
}

}  // namespace

ParseResult parse_events(std::istream& in, const ParseOptions& options) {
    ParseResult result;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (options.header && line_number == 1) continue;
        std::string_view view = line;
        if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
        if (trim(view).empty()) continue;

        Event event;
        const auto problem = parse_line(view, options.delimiter, event);
        if (!problem.empty()) {
            if (options.policy == BadLinePolicy::strict)
                fail(ErrorKind::parse, fmt::format("line {}: {}", line_number, problem));
            ++result.skipped;
            continue;
        }
        result.log.horizon = std::max(result.log.horizon, event.time);
        result.log.records.push_back(std::move(event));
    }
    return result;
}

TemporalPartition::TemporalPartition(std::vector<double> boundaries) : boundaries_(std::move(boundaries)) {
    require(boundaries_.size() >= 2, ErrorKind::invalid_argument, "temporal partition needs at least one bin");
    require(boundaries_.front() == 0.0, ErrorKind::invalid_argument, "temporal partition must start at 0");
    for (std::size_t i = 1; i < boundaries_.size(); ++i)
        require(boundaries_[i] > boundaries_[i - 1] && std::isfinite(boundaries_[i]), ErrorKind::invalid_argument,
                "temporal partition boundaries must be strictly increasing");
}

TemporalPartition TemporalPartition::uniform(double horizon, int bins) {
    require(bins >= 1, ErrorKind::invalid_argument, "bin count must be positive");
    require(horizon > 0.0, ErrorKind::invalid_argument, "horizon must be positive");
    std::vector<double> b(static_cast<std::size_t>(bins) + 1);
    for (int t = 0; t <= bins; ++t) b[static_cast<std::size_t>(t)] = horizon * t / bins;
    b.back() = horizon;
    return TemporalPartition(std::move(b));
}

int TemporalPartition::bin_of(double s) const {
    if (!(s >= 0.0) || s >= boundaries_.back())
        fail(ErrorKind::out_of_range, fmt::format("event time {} outside [0, {})", s, boundaries_.back()));
    // first boundary strictly greater than s closes the bin
    const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), s);
    return static_cast<int>(it - boundaries_.begin()) - 1;
}

ContractionMap::ContractionMap(std::vector<int> assignment) : assignment_(std::move(assignment)) {
    require(!assignment_.empty(), ErrorKind::invalid_argument, "contraction map is empty");
    const int max_group = *std::max_element(assignment_.begin(), assignment_.end());
    require(*std::min_element(assignment_.begin(), assignment_.end()) >= 0, ErrorKind::invalid_argument,
            "contraction map has a negative group");
    std::vector<bool> used(static_cast<std::size_t>(max_group) + 1, false);
    for (int g : assignment_) used[static_cast<std::size_t>(g)] = true;
    require(std::all_of(used.begin(), used.end(), [](bool u) { return u; }), ErrorKind::invalid_argument,
            "contraction map has an empty group");
    groups_ = max_group + 1;
}

ContractionMap ContractionMap::read(std::istream& in, int vertices) {
    require(vertices >= 1, ErrorKind::invalid_argument, "vertex count must be positive");
    std::vector<long long> raw(static_cast<std::size_t>(vertices), -1);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::replace_if(line.begin(), line.end(), [](char c) { return c == ',' || c == '\t' || c == '\r'; }, ' ');
        const auto view = trim(line);
        if (view.empty()) continue;
        const auto gap = view.find(' ');
        long long vertex = -1, group = -1;
        if (gap == std::string_view::npos || !parse_number(view.substr(0, gap), vertex) ||
            !parse_number(view.substr(gap + 1), group) || vertex < 0 || group < 0)
            fail(ErrorKind::parse, fmt::format("contraction map line {}: expected 'vertex_id group_id'", line_number));
        if (vertex >= vertices)
            fail(ErrorKind::invalid_argument,
                 fmt::format("contraction map line {}: vertex {} outside graph of {} vertices", line_number, vertex,
                             vertices));
        raw[static_cast<std::size_t>(vertex)] = group;
    }
    std::map<long long, int> renumber;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] < 0) fail(ErrorKind::invalid_argument, fmt::format("vertex {} is not mapped to a group", i));
        renumber.emplace(raw[i], 0);
    }
    int next = 0;
    for (auto& [group, id] : renumber) id = next++;
    std::vector<int> assignment(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) assignment[i] = renumber.at(raw[i]);
    return ContractionMap(std::move(assignment));
}

ContractionMap ContractionMap::identity(int n) {
    std::vector<int> a(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i)] = i;
    return ContractionMap(std::move(a));
}

Matrix ContractionMap::partition_matrix() const {
    Matrix J = Matrix::Zero(groups_, vertices());
    for (int i = 0; i < vertices(); ++i) J(assignment_[static_cast<std::size_t>(i)], i) = 1.0;
    return J;
}

ContractionMap ContractionMap::then(const ContractionMap& outer) const {
    require(outer.vertices() == groups_, ErrorKind::invalid_argument,
            "composed contraction maps have incompatible sizes");
    std::vector<int> a(assignment_.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = outer.group_of(assignment_[i]);
    return ContractionMap(std::move(a));
}

GraphSequence GraphSequence::from_slices(std::vector<Matrix> slices) {
    GraphSequence g;
    g.totals.resize(static_cast<Index>(slices.size()));
    for (std::size_t t = 0; t < slices.size(); ++t) {
        require(slices[t].rows() == slices[t].cols(), ErrorKind::invalid_argument, "graph slices must be square");
        require(slices[t].rows() == slices.front().rows(), ErrorKind::invalid_argument,
                "graph slices must share one vertex set");
        g.totals[static_cast<Index>(t)] = slices[t].sum();
    }
    g.slices = std::move(slices);
    return g;
}

GraphSequence temporal_bin(const EventLog& log, const TemporalPartition& partition, std::optional<int> vertices) {
    std::int64_t max_id = -1;
    for (const auto& e : log.records) max_id = std::max({max_id, e.source, e.target});
    const std::int64_t n = vertices ? *vertices : max_id + 1;
    require(n >= 1, ErrorKind::invalid_argument, "graph sequence needs at least one vertex");
    if (max_id >= n)
        fail(ErrorKind::invalid_argument, fmt::format("vertex id {} outside graph of {} vertices", max_id, n));

    std::vector<Matrix> slices(static_cast<std::size_t>(partition.bins()), Matrix::Zero(n, n));
    for (const auto& e : log.records) {
        const int t = partition.bin_of(e.time);
        slices[static_cast<std::size_t>(t)](e.source, e.target) += 1.0;
    }
    return GraphSequence::from_slices(std::move(slices));
}

GraphSequence contract_vertices(const GraphSequence& g, const ContractionMap& map) {
    if (map.vertices() != g.vertices())
        fail(ErrorKind::invalid_argument,
             fmt::format("contraction map covers {} vertices but the graphs have {}", map.vertices(), g.vertices()));
    const auto& a = map.assignment();
    std::vector<Matrix> out;
    out.reserve(g.slices.size());
    for (const auto& G : g.slices) {
        Matrix A = Matrix::Zero(map.groups(), map.groups());
        for (Index j = 0; j < G.cols(); ++j)
            for (Index i = 0; i < G.rows(); ++i)
                A(a[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)]) += G(i, j);
        out.push_back(std::move(A));
    }
    return GraphSequence::from_slices(std::move(out));
}

GraphSequence symmetrize(const GraphSequence& g) {
    std::vector<Matrix> out;
    out.reserve(g.slices.size());
    for (const auto& G : g.slices) {
        Matrix S = G + G.transpose();
        S.diagonal() = G.diagonal();
        out.push_back(std::move(S));
    }
    return GraphSequence::from_slices(std::move(out));
}

DataMatrix DataMatrix::from_matrix(Matrix X) {
    require(X.size() > 0, ErrorKind::invalid_argument, "data matrix is empty");
    require((X.array() >= 0.0).all() && X.allFinite(), ErrorKind::invalid_argument,
            "data matrix must be finite and non-negative");
    DataMatrix d;
    d.N = X.colwise().sum().transpose();
    const auto root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(X.rows()))));
    d.n = static_cast<Index>(root) * root == X.rows() ? root : 0;
    d.X = std::move(X);
    return d;
}

DataMatrix vectorize(const GraphSequence& g) {
    const Index n = g.vertices();
    DataMatrix d;
    d.n = static_cast<int>(n);
    d.X.resize(n * n, g.length());
    for (int t = 0; t < g.length(); ++t) {
        const auto& G = g.slices[static_cast<std::size_t>(t)];
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) d.X(i * n + j, t) = G(i, j);
    }
    d.N = d.X.colwise().sum().transpose();
    return d;
}

GraphSequence devectorize(const DataMatrix& data) {
    const Index n = data.n;
    require(n >= 1 && n * n == data.X.rows(), ErrorKind::invalid_argument,
            "data matrix rows are not n^2 for a vertex count n");
    std::vector<Matrix> slices;
    slices.reserve(static_cast<std::size_t>(data.X.cols()));
    for (Index t = 0; t < data.X.cols(); ++t) {
        Matrix G(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j) G(i, j) = data.X(i * n + j, t);
        slices.push_back(std::move(G));
    }
    return GraphSequence::from_slices(std::move(slices));
}

}  // namespace gclust
