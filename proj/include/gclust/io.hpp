#pragma once

#include "gclust/ingest.hpp"
#include "gclust/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace gclust::io {

/// Dense CSV without header, one matrix row per line. Numbers are written in
/// shortest round-trip form so that re-reading reproduces the matrix exactly.
void write_matrix_csv(std::ostream& out, const Matrix& M);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& M);
Matrix read_matrix_csv(std::istream& in);
Matrix read_matrix_csv(const std::filesystem::path& path);

/// (index, value) rows with a header, 1-based index, for scree plots.
void write_singular_values_csv(const std::filesystem::path& path, const Vector& values);

std::string format_number(double value);

/// Writes the matrix CSV (rows = vertex pairs, columns = time bins) and a JSON
/// sidecar carrying n, T, N and the indexing convention.
void write_data_matrix(const std::filesystem::path& directory, const DataMatrix& data,
                       const std::string& csv_name = "X.csv", const std::string& meta_name = "meta.json");

/// Reads a data matrix CSV; if `meta` exists its n and N are used, otherwise
/// N is the column sums.
DataMatrix read_data_matrix(const std::filesystem::path& csv, const std::filesystem::path& meta = {});

/// Writes `text` to `path` via a temporary file and rename, so readers never
/// see a partial file.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace gclust::io
