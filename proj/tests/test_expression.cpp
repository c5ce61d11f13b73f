#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include "doctest.h"
#include "madelung/error.hpp"
#include "madelung/expression.hpp"
#include "madelung/grid.hpp"

using namespace madelung;

namespace {

GridPtr line() { return Grid::euclidean(1, {9}, {0.25}, {-1.0}); }

GridPtr space3() { return Grid::euclidean(3, {5, 5, 5}, {0.5, 0.5, 0.5}, {-1.0, -1.0, -1.0}); }

GridPtr spacetime() {
    return Grid::euclidean_with_time(3, {5, 5, 5, 5}, {0.5, 0.5, 0.5, 0.5},
                                     {0.0, -1.0, -1.0, -1.0});
}

double eval1(const std::string& text, double x) {
    auto g = line();
    return Expression::parse(text, *g).eval({x, 0.0, 0.0, 0.0});
}

bool parse_fails_mentioning(const std::string& text, const Grid& g, const std::string& what) {
    try {
        Expression::parse(text, g);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::parse);
        return std::string(e.what()).find(what) != std::string::npos;
    }
    return false;
}

}  // namespace

TEST_CASE("arithmetic follows the usual precedence and associativity") {
    CHECK(eval1("1 + 2 * 3", 0.0) == 7.0);
    CHECK(eval1("(1 + 2) * 3", 0.0) == 9.0);
    CHECK(eval1("2 - 3 - 4", 0.0) == -5.0);   // left associative
    CHECK(eval1("24 / 4 / 2", 0.0) == 3.0);   // left associative
    CHECK(eval1("2 ^ 3 ^ 2", 0.0) == 512.0);  // right associative
    CHECK(eval1("-2 ^ 2", 0.0) == -4.0);      // unary minus binds looser than ^
    CHECK(eval1("2 * -3", 0.0) == -6.0);
    CHECK(eval1("--5", 0.0) == 5.0);
}

TEST_CASE("functions, pi, and pow evaluate to library values") {
    CHECK(eval1("exp(1)", 0.0) == std::exp(1.0));
    CHECK(eval1("sin(pi / 2)", 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(eval1("cos(0)", 0.0) == 1.0);
    CHECK(eval1("sqrt(2)", 0.0) == std::sqrt(2.0));
    CHECK(eval1("log(exp(2))", 0.0) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(eval1("pow(3, 4)", 0.0) == 81.0);
    CHECK(eval1("pi", 0.0) == doctest::Approx(3.14159265358979).epsilon(1e-14));
}

TEST_CASE("coordinate names follow the grid axes") {
    auto g3 = space3();
    auto e = Expression::parse("x + 10*y + 100*z", *g3);
    CHECK(e.eval({1.0, 2.0, 3.0, 0.0}) == 321.0);
    // The x<k> aliases address the same axes.
    auto ek = Expression::parse("x0 + 10*x1 + 100*x2", *g3);
    CHECK(ek.eval({1.0, 2.0, 3.0, 0.0}) == 321.0);

    // With a leading time axis, t is axis 0 and x,y,z shift to the spatial axes.
    auto gt = spacetime();
    auto et = Expression::parse("t + 2*x + 3*y + 4*z", *gt);
    CHECK(et.eval({1.0, 10.0, 100.0, 1000.0}) == 4321.0);

    // A pure spatial grid has no t.
    CHECK(parse_fails_mentioning("t + 1", *g3, "t"));
    // A 1-D grid has no y.
    CHECK(parse_fails_mentioning("y", *line(), "y"));
}

TEST_CASE("parse errors name the 1-based character position") {
    auto g = line();
    CHECK(parse_fails_mentioning("1 + * 2", *g, "position 5"));
    CHECK(parse_fails_mentioning("(1 + 2", *g, "position"));
    CHECK(parse_fails_mentioning("1 + foo(2)", *g, "foo"));
    CHECK(parse_fails_mentioning("", *g, "position"));
    CHECK(parse_fails_mentioning("1 2", *g, "position"));
    CHECK(parse_fails_mentioning("pow(1)", *g, "position"));
}

TEST_CASE("deep nesting is rejected instead of overflowing") {
    auto g = line();
    std::string deep(300, '(');
    deep += "1";
    deep += std::string(300, ')');
    CHECK_THROWS_AS(Expression::parse(deep, *g), Error);
}

TEST_CASE("sampling an expression fills every grid point") {
    auto g = line();
    ScalarField f = sample_expression("x^2", g, "profile");
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        const double x = g->coord(0, static_cast<int>(p));
        CHECK(f.values[p] == x * x);
        CHECK(f.mask[p] == 1);
    }
}

TEST_CASE("non-finite samples raise a constraint error naming the point") {
    auto g = line();  // spans [-1, 1], so log(x) hits non-positive arguments
    CHECK_THROWS_AS(sample_expression("log(x)", g, "profile"), Error);
    try {
        sample_expression("1 / x", g, "profile");  // division by zero at x = 0
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::constraint);
        CHECK(std::string(e.what()).find("profile") != std::string::npos);
    }
}
