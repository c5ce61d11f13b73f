#pragma once

// Small arithmetic-expression interpreter for closed-form field definitions.
// Supported: + - * / ^ (power, right-associative), unary minus, parentheses,
// the functions exp, sin, cos, sqrt, log, pow(a, b), the constant pi, and
// coordinate variables derived from the grid axes:
//   * every axis k is addressable as "x<k>" (x0, x1, ...);
//   * a leading time axis is also "t";
//   * the spatial axes are also "x", "y", "z" in axis order.
// Parse failures raise a parse error naming the 1-based character position.

#include <array>
#include <string>
#include <vector>

#include "madelung/grid.hpp"

namespace madelung {

class Expression {
  public:
    /// Compiles `text` against the coordinate names of `grid`.
    static Expression parse(const std::string& text, const Grid& grid);

    /// Evaluates at a coordinate tuple (entries beyond the grid dim ignored).
    double eval(const std::array<double, kMaxDim>& x) const;

    const std::string& text() const { return text_; }

  private:
    struct Op {
        enum class Kind : std::uint8_t {
            push_const,
            push_var,
            add,
            sub,
            mul,
            div,
            pow,
            neg,
            fn_exp,
            fn_sin,
            fn_cos,
            fn_sqrt,
            fn_log,
        };
        Kind kind;
        double value = 0.0;  // push_const
        int axis = 0;        // push_var
    };

    std::string text_;
    std::vector<Op> program_;

    friend class ExpressionParser;
};

/// Convenience: parse and sample onto the grid in one step. The mask is left
/// all-valid; a non-finite value (overflow, log of a non-positive number)
/// raises a constraint error naming the offending point.
ScalarField sample_expression(const std::string& text, GridPtr grid, const char* field_name);

}  // namespace madelung
