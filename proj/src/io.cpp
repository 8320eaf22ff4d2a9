#include "gclust/io.hpp"

#include "gclust/error.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include <unistd.h>

namespace gclust::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double value) {
    // fmt's default float formatting is the shortest representation that round-trips
    return fmt::format("{}", value);
}

void write_matrix_csv(std::ostream& out, const Matrix& M) {
    std::string line;
    for (Index i = 0; i < M.rows(); ++i) {
        line.clear();
        for (Index j = 0; j < M.cols(); ++j) {
            if (j) line += ',';
            line += format_number(M(i, j));
        }
        line += '\n';
        out << line;
    }
}

void write_matrix_csv(const fs::path& path, const Matrix& M) {
    std::ostringstream out;
    write_matrix_csv(out, M);
    write_text_atomic(path, out.str());
}

Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            auto field = std::string_view(line).substr(start, comma == std::string::npos ? comma : comma - start);
            while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
            while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
                fail(ErrorKind::parse, fmt::format("matrix CSV line {}: bad number '{}'", line_number, field));
            row.push_back(v);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            fail(ErrorKind::parse, fmt::format("matrix CSV line {}: expected {} columns, found {}", line_number,
                                               rows.front().size(), row.size()));
        rows.push_back(std::move(row));
    }
    require(!rows.empty(), ErrorKind::parse, "matrix CSV is empty");
    Matrix M(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < M.rows(); ++i)
        for (Index j = 0; j < M.cols(); ++j) M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return M;
}

Matrix read_matrix_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, fmt::format("input not found: {}", path.string()));
    return read_matrix_csv(in);
}

void write_singular_values_csv(const fs::path& path, const Vector& values) {
    std::string text = "index,value\n";
    for (Index k = 0; k < values.size(); ++k) text += fmt::format("{},{}\n", k + 1, format_number(values[k]));
    write_text_atomic(path, text);
}

void write_data_matrix(const fs::path& directory, const DataMatrix& data, const std::string& csv_name,
                       const std::string& meta_name) {
    fs::create_directories(directory);
    write_matrix_csv(directory / csv_name, data.X);
    json meta;
    meta["n"] = data.n;
    meta["T"] = data.X.cols();
    meta["N"] = std::vector<double>(data.N.data(), data.N.data() + data.N.size());
    meta["indexing"] = kIndexingConvention;
    write_text_atomic(directory / meta_name, meta.dump(2) + "\n");
}

DataMatrix read_data_matrix(const fs::path& csv, const fs::path& meta) {
    DataMatrix data = DataMatrix::from_matrix(read_matrix_csv(csv));
    if (meta.empty()) return data;
    json j;
    try {
        j = json::parse(read_text(meta));
    } catch (const json::exception& e) {
        fail(ErrorKind::parse, fmt::format("{}: {}", meta.string(), e.what()));
    }
    if (j.contains("n")) {
        const int n = j.at("n").get<int>();
        require(n == 0 || static_cast<Index>(n) * n == data.X.rows(), ErrorKind::invalid_argument,
                fmt::format("{}: n = {} does not match {} matrix rows", meta.string(), n, data.X.rows()));
        data.n = n;
    }
    if (j.contains("N")) {
        const auto N = j.at("N").get<std::vector<double>>();
        require(static_cast<Index>(N.size()) == data.X.cols(), ErrorKind::invalid_argument,
                fmt::format("{}: N has {} entries for {} columns", meta.string(), N.size(), data.X.cols()));
        data.N = Eigen::Map<const Vector>(N.data(), static_cast<Index>(N.size()));
    }
    return data;
}

void write_text_atomic(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += fmt::format(".tmp{}.{}", ::getpid(), std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, fmt::format("cannot write {}", path.string()));
        out << text;
        out.flush();
        if (!out) fail(ErrorKind::io, fmt::format("failed writing {}", path.string()));
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(ErrorKind::io, fmt::format("cannot write {}", path.string()));
    }
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, fmt::format("input not found: {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gclust::io
