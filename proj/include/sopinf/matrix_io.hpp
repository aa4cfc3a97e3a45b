#pragma once

#include "sopinf/structures.hpp"

#include <filesystem>

namespace sopinf {

// 16-byte header: "SOPF", u32 rows, u32 cols, u32 dtype (1 = f64), then column-major data.
void write_matrix_bin(const std::filesystem::path& path, const Matrix& A);
Matrix read_matrix_bin(const std::filesystem::path& path);

// Header row c0,c1,... then one line per matrix row, full round-trip precision.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& A);
Matrix read_matrix_csv(const std::filesystem::path& path);

// times, U, X, Xd, Xdd as separate files in dir. CSV files are time-major (one row per sample).
void write_snapshots(const std::filesystem::path& dir, const SnapshotSet& s, bool with_csv);
SnapshotSet read_snapshots(const std::filesystem::path& dir);

void write_rom(const std::filesystem::path& dir, const StructuredROM& rom);
StructuredROM read_rom(const std::filesystem::path& dir);

void write_system(const std::filesystem::path& dir, const SecondOrderSystem& sys);
SecondOrderSystem read_system(const std::filesystem::path& dir);

// Throws MissingArtifact naming the file if it does not exist.
void require_artifact(const std::filesystem::path& path);

}  // namespace sopinf
