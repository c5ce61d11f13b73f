#pragma once

// Plot-ready CSV tables for field dumps and file-based field/curve input.
//
// Dump layout: a header row naming every column, then one row per valid grid
// point in lexicographic index order (axis 0 slowest). Columns are the grid
// coordinates first (t for a leading time axis, then x, y, z for the spatial
// axes), followed by the field components in row-major component order.
// Numbers are written in shortest round-trip form, so re-reading a dump
// reproduces the exact binary values and identical inputs give identical
// bytes.

#include <string>
#include <vector>

#include "madelung/grid.hpp"
#include "madelung/wire.hpp"

namespace madelung {

struct Table {
    std::vector<std::string> columns;
    std::vector<double> data;         // row-major
    std::size_t valid_points = 0;     // rows
    std::size_t total_points = 0;     // grid points (== rows for curve tables)

    std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
};

/// Shortest round-trip decimal form of v (the same convention the JSON
/// reports use).
std::string format_double(double v);

/// Coordinate column names for a grid: "t" for a leading time axis; "x", "y",
/// "z" for up to three spatial axes; "x<k>" beyond that.
std::vector<std::string> coordinate_columns(const Grid& grid);

Table scalar_table(const ScalarField& f, const std::string& name);
Table covector_table(const CovectorField& f, const std::string& name);
Table matrix_table(const MatrixField& f, const std::string& name);
Table three_index_table(const ThreeIndexField& f, const std::string& name);

/// Curve-sample table: column s (arclength parameter) plus one column per
/// supplied component name; `rows` holds the per-sample component values and
/// `mask` selects the emitted samples (empty mask = all).
Table curve_table(const std::vector<double>& params,
                  const std::vector<std::string>& component_names,
                  const std::vector<double>& components,  // sample-major
                  const std::vector<std::uint8_t>& mask);

std::string to_csv(const Table& t);

/// Reads a whole file; raises a config error when it cannot be opened.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Parses a scalar-field CSV in the dump layout against `grid`: the header
/// must name the grid's coordinate columns plus exactly one value column, a
/// row is required for every grid point, and the coordinates must match the
/// grid to within 1e-9. Malformed content is a parse error; a structurally
/// valid file that does not match the grid is a constraint violation.
ScalarField read_scalar_csv(const std::string& text, GridPtr grid, const std::string& label);

/// Parses a curve CSV: header s,x,y,z (explicit parameter) or x,y,z
/// (index-parameterized), then one row per sample.
SampledCurve read_curve_csv(const std::string& text, const std::string& label);

}  // namespace madelung
