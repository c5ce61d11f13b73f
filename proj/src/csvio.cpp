#include "madelung/csvio.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "madelung/error.hpp"

namespace madelung {

namespace {

[[noreturn]] void csv_fail(const std::string& label, std::size_t line, const std::string& what) {
    std::ostringstream os;
    os << label << ": " << what << " at line " << line;
    fail(ErrorKind::parse, os.str());
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r' && c != ' ' && c != '\t') {
            cell.push_back(c);
        }
    }
    out.push_back(cell);
    return out;
}

double parse_cell(const std::string& cell, const std::string& label, std::size_t line) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + cell.size() || cell.empty())
        csv_fail(label, line, "malformed number '" + cell + "'");
    return v;
}

}  // namespace

std::string format_double(double v) {
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::vector<std::string> coordinate_columns(const Grid& grid) {
    std::vector<std::string> names;
    static const char* kSpatial[] = {"x", "y", "z"};
    int next = 0;
    for (int a = 0; a < grid.dim(); ++a) {
        if (grid.role(a) == AxisRole::time)
            names.push_back("t");
        else if (next < 3)
            names.push_back(kSpatial[next++]);
        else
            names.push_back("x" + std::to_string(a));
    }
    return names;
}

namespace {

/// Shared grid-field table builder: coordinate columns plus `comps` component
/// columns named by `component_name(c)`.
template <class NameFn>
Table field_table(const Grid& grid, const Mask& mask, const std::vector<double>& values,
                  std::size_t comps, NameFn&& component_name) {
    Table t;
    t.columns = coordinate_columns(grid);
    for (std::size_t c = 0; c < comps; ++c) t.columns.push_back(component_name(c));
    t.total_points = grid.point_count();
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < mask.size(); ++p) {
        if (!mask[p]) continue;
        ++t.valid_points;
        grid.point_coords(p, x);
        for (int a = 0; a < grid.dim(); ++a) t.data.push_back(x[static_cast<std::size_t>(a)]);
        for (std::size_t c = 0; c < comps; ++c) t.data.push_back(values[p * comps + c]);
    }
    return t;
}

}  // namespace

Table scalar_table(const ScalarField& f, const std::string& name) {
    return field_table(*f.grid, f.mask, f.values, 1, [&](std::size_t) { return name; });
}

Table covector_table(const CovectorField& f, const std::string& name) {
    const auto d = static_cast<std::size_t>(f.grid->dim());
    return field_table(*f.grid, f.mask, f.values, d, [&](std::size_t c) {
        return name + "_" + std::to_string(c);
    });
}

Table matrix_table(const MatrixField& f, const std::string& name) {
    const auto d = static_cast<std::size_t>(f.grid->dim());
    return field_table(*f.grid, f.mask, f.values, d * d, [&](std::size_t c) {
        return name + "_" + std::to_string(c / d) + std::to_string(c % d);
    });
}

Table three_index_table(const ThreeIndexField& f, const std::string& name) {
    const auto d = static_cast<std::size_t>(f.grid->dim());
    return field_table(*f.grid, f.mask, f.values, d * d * d, [&](std::size_t c) {
        return name + "_" + std::to_string(c / (d * d)) + std::to_string((c / d) % d) +
               std::to_string(c % d);
    });
}

Table curve_table(const std::vector<double>& params,
                  const std::vector<std::string>& component_names,
                  const std::vector<double>& components,
                  const std::vector<std::uint8_t>& mask) {
    Table t;
    t.columns.push_back("s");
    for (const auto& n : component_names) t.columns.push_back(n);
    const std::size_t comps = component_names.size();
    t.total_points = params.size();
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        ++t.valid_points;
        t.data.push_back(params[i]);
        for (std::size_t c = 0; c < comps; ++c) t.data.push_back(components[i * comps + c]);
    }
    return t;
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        if (c) out.push_back(',');
        out += t.columns[c];
    }
    out.push_back('\n');
    const std::size_t cols = t.columns.size();
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c) out.push_back(',');
            out += format_double(t.data[r * cols + c]);
        }
        out.push_back('\n');
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::config, "cannot read file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::config, "cannot write file '" + path + "'");
    out << content;
    if (!out) fail(ErrorKind::config, "failed writing file '" + path + "'");
}

namespace {

std::vector<std::vector<std::string>> split_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_line(line));
    }
    return rows;
}

}  // namespace

ScalarField read_scalar_csv(const std::string& text, GridPtr grid, const std::string& label) {
    const auto rows = split_rows(text);
    if (rows.empty()) csv_fail(label, 1, "empty file");
    const auto coords = coordinate_columns(*grid);
    const std::size_t want_cols = coords.size() + 1;
    if (rows[0].size() != want_cols) {
        std::ostringstream os;
        os << label << ": expected " << want_cols << " columns (" << coords.size()
           << " coordinates + 1 value), found " << rows[0].size();
        fail(ErrorKind::constraint,
             os.str() + "; referenced field files must match the scenario grid");
    }
    for (std::size_t a = 0; a < coords.size(); ++a) {
        if (rows[0][a] != coords[a])
            fail(ErrorKind::constraint, label + ": coordinate column '" + rows[0][a] +
                                            "' does not match the grid axis '" + coords[a] +
                                            "'; referenced field files must match the scenario grid");
    }

    if (rows.size() - 1 != grid->point_count()) {
        std::ostringstream os;
        os << label << ": " << rows.size() - 1 << " data rows for a grid of "
           << grid->point_count()
           << " points; referenced field files must match the scenario grid";
        fail(ErrorKind::constraint, os.str());
    }

    ScalarField f = make_scalar(grid);
    std::array<double, kMaxDim> x{};
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != want_cols) csv_fail(label, r + 1, "wrong number of columns");
        const std::size_t p = r - 1;
        grid->point_coords(p, x);
        for (std::size_t a = 0; a < coords.size(); ++a) {
            const double v = parse_cell(rows[r][a], label, r + 1);
            if (std::fabs(v - x[a]) > 1e-9 * std::max(1.0, std::fabs(x[a]))) {
                std::ostringstream os;
                os << label << ": coordinate " << coords[a] << " = " << v << " at line "
                   << r + 1 << " does not match the grid point " << x[a]
                   << "; referenced field files must match the scenario grid";
                fail(ErrorKind::constraint, os.str());
            }
        }
        f.values[p] = parse_cell(rows[r][want_cols - 1], label, r + 1);
    }
    return f;
}

SampledCurve read_curve_csv(const std::string& text, const std::string& label) {
    const auto rows = split_rows(text);
    if (rows.empty()) csv_fail(label, 1, "empty file");
    const auto& header = rows[0];
    bool with_param = false;
    if (header.size() == 4 && header[0] == "s" && header[1] == "x" && header[2] == "y" &&
        header[3] == "z") {
        with_param = true;
    } else if (header.size() == 3 && header[0] == "x" && header[1] == "y" && header[2] == "z") {
        with_param = false;
    } else {
        csv_fail(label, 1, "expected header 's,x,y,z' or 'x,y,z'");
    }

    std::vector<Vec3> points;
    std::vector<double> params;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != header.size()) csv_fail(label, r + 1, "wrong number of columns");
        std::size_t c = 0;
        if (with_param) params.push_back(parse_cell(rows[r][c++], label, r + 1));
        Vec3 p{};
        for (int k = 0; k < 3; ++k) p[static_cast<std::size_t>(k)] = parse_cell(rows[r][c++], label, r + 1);
        points.push_back(p);
    }
    return make_sampled_curve(std::move(points), std::move(params));
}

}  // namespace madelung
