#pragma once

#include "conepath/dynamics.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace conepath {

/// Config error with a 1-based source position.
class ParseError : public std::runtime_error {
public:
    ParseError(int line, int column, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

/// Variables an expression may reference.
struct ExprVars {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double theta = 0.0;
};

/// Arithmetic over + - * /, sin cos exp, numeric literals, pi, and the
/// variables t x y z theta. Immutable and cheap to copy.
class Expression {
public:
    /// `allowed` lists the variable names permitted here; `column0` offsets error columns.
    static Expression parse(const std::string& text, const std::vector<std::string>& allowed, int line = 1,
                            int column0 = 1);
    static Expression constant(double value);

    double eval(const ExprVars& vars) const;
    bool uses(const std::string& var) const;
    const std::string& source() const { return source_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
    std::vector<std::string> used_;
};

struct Scenario {
    std::string name = "unnamed";
    std::uint64_t seed = 1;

    std::string topology = "torus";  // torus | euclidean
    int dim = 2;
    Expression period = Expression::constant(6.283185307179586);

    std::string kind = "euclidean";  // euclidean | riemannian | randers | gauge
    std::map<std::string, Expression> coefficients;  // a11, a12, ..., b1, ..., gauge

    IntegratorConfig integrator;
    std::map<std::string, double> tolerances;
    std::vector<std::string> tasks;

    int rays = 20;
    int directions = 0;
    int sky_rays = 64;
    int probe_rays = 200;
    double probe_horizon = 5.0;
    double probe_step = 1e-2;
    int roundtrip_times = 5;
    int roundtrip_points = 8;

    static const std::vector<std::string>& all_tasks();
    static const std::map<std::string, double>& default_tolerances();
    double tolerance(const std::string& key) const;
    bool has_task(const std::string& task) const;

    BaseManifold manifold() const;
    /// Throws DomainError on inadmissible coefficients (e.g. Randers |b|_A >= 1).
    FinslerFamily finsler() const;
    /// Generator of the gauge kind: H = |v| / r(t, p, theta).
    Generator gauge_generator() const;
};

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_file(const std::string& path);
/// Canonical text form; parse_scenario(serialize_scenario(s)) reproduces s.
std::string serialize_scenario(const Scenario& s);

}  // namespace conepath
