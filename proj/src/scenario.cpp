#include "conepath/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace conepath {

// ---------------------------------------------------------------- expressions

struct Expression::Node {
    enum class Op { number, var, neg, add, sub, mul, div, sin, cos, exp } op;
    double value = 0.0;
    int var = 0;  // 0 t, 1 x, 2 y, 3 z, 4 theta
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

const std::vector<std::string> kVarNames = {"t", "x", "y", "z", "theta"};

std::string format_double(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

// Recursive descent:  sum := prod (('+'|'-') prod)* ;  prod := unary (('*'|'/') unary)* ;
// unary := '-' unary | atom ;  atom := number | name | name '(' sum ')' | '(' sum ')'.
class ExprParser {
public:
    ExprParser(const std::string& s, const std::vector<std::string>& allowed, int line, int column0)
        : s_(s), allowed_(allowed), line_(line), col0_(column0) {}

    NodePtr parse() {
        skip();
        if (pos_ >= s_.size()) fail("empty expression");
        NodePtr e = sum();
        skip();
        if (pos_ < s_.size()) fail(std::string("unexpected '") + s_[pos_] + "'");
        return e;
    }

    const std::set<std::string>& used() const { return used_; }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col0_ + static_cast<int>(pos_), msg); }

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr sum() {
        NodePtr e = prod();
        for (;;) {
            if (accept('+')) e = make(Op::add, e, prod());
            else if (accept('-')) e = make(Op::sub, e, prod());
            else return e;
        }
    }

    NodePtr prod() {
        NodePtr e = unary();
        for (;;) {
            if (accept('*')) e = make(Op::mul, e, unary());
            else if (accept('/')) e = make(Op::div, e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (accept('-')) return make(Op::neg, unary());
        if (accept('+')) return unary();
        return atom();
    }

    NodePtr atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        const char c = s_[pos_];
        if (accept('(')) {
            NodePtr e = sum();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
        fail(std::string("unexpected '") + c + "'");
    }

    NodePtr number() {
        double x = 0.0;
        const char* first = s_.data() + pos_;
        const auto res = std::from_chars(first, s_.data() + s_.size(), x);
        if (res.ec != std::errc()) fail("malformed number");
        pos_ += static_cast<std::size_t>(res.ptr - first);
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::number;
        n->value = x;
        return n;
    }

    NodePtr name() {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string id = s_.substr(start, pos_ - start);
        if (id == "sin" || id == "cos" || id == "exp") {
            if (!accept('(')) fail("expected '(' after " + id);
            NodePtr arg = sum();
            if (!accept(')')) fail("expected ')'");
            return make(id == "sin" ? Op::sin : id == "cos" ? Op::cos : Op::exp, arg);
        }
        if (id == "pi") {
            auto n = std::make_shared<Expression::Node>();
            n->op = Op::number;
            n->value = std::numbers::pi;
            return n;
        }
        const auto it = std::find(kVarNames.begin(), kVarNames.end(), id);
        if (it == kVarNames.end()) {
            pos_ = start;
            fail("unknown identifier '" + id + "'");
        }
        if (std::find(allowed_.begin(), allowed_.end(), id) == allowed_.end()) {
            pos_ = start;
            fail("variable '" + id + "' is not allowed here");
        }
        used_.insert(id);
        auto n = std::make_shared<Expression::Node>();
        n->op = Op::var;
        n->var = static_cast<int>(it - kVarNames.begin());
        return n;
    }

    const std::string& s_;
    const std::vector<std::string>& allowed_;
    int line_;
    int col0_;
    std::size_t pos_ = 0;
    std::set<std::string> used_;
};

double eval_node(const Expression::Node& n, const ExprVars& v) {
    switch (n.op) {
        case Op::number: return n.value;
        case Op::var: {
            switch (n.var) {
                case 0: return v.t;
                case 1: return v.x;
                case 2: return v.y;
                case 3: return v.z;
                default: return v.theta;
            }
        }
        case Op::neg: return -eval_node(*n.a, v);
        case Op::add: return eval_node(*n.a, v) + eval_node(*n.b, v);
        case Op::sub: return eval_node(*n.a, v) - eval_node(*n.b, v);
        case Op::mul: return eval_node(*n.a, v) * eval_node(*n.b, v);
        case Op::div: return eval_node(*n.a, v) / eval_node(*n.b, v);
        case Op::sin: return std::sin(eval_node(*n.a, v));
        case Op::cos: return std::cos(eval_node(*n.a, v));
        case Op::exp: return std::exp(eval_node(*n.a, v));
    }
    return 0.0;
}

}  // namespace

Expression Expression::parse(const std::string& text, const std::vector<std::string>& allowed, int line, int column0) {
    ExprParser parser(text, allowed, line, column0);
    Expression e;
    e.root_ = parser.parse();
    e.source_ = text;
    e.used_.assign(parser.used().begin(), parser.used().end());
    return e;
}

Expression Expression::constant(double value) {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::number;
    n->value = value;
    Expression e;
    e.root_ = n;
    e.source_ = format_double(value);
    return e;
}

double Expression::eval(const ExprVars& vars) const { return eval_node(*root_, vars); }

bool Expression::uses(const std::string& var) const {
    return std::find(used_.begin(), used_.end(), var) != used_.end();
}

// ---------------------------------------------------------------- scenario

const std::vector<std::string>& Scenario::all_tasks() {
    static const std::vector<std::string> tasks = {"geodesics", "roundtrip", "positivity", "skies", "lipschitz", "probe"};
    return tasks;
}

const std::map<std::string, double>& Scenario::default_tolerances() {
    static const std::map<std::string, double> tol = {
        {"null_residual", 1e-6}, {"cross_method", 1e-4},   {"hausdorff", 1e-3},     {"g", 1e-3},
        {"alpha", 1e-5},         {"dalpha", 1e-4},         {"violation", 1e-6},     {"lipschitz_rel", 0.1},
        {"tangent_margin", 1e-5}, {"timelike_margin", 0.1}, {"straightness", 1e-6},
    };
    return tol;
}

double Scenario::tolerance(const std::string& key) const {
    if (auto it = tolerances.find(key); it != tolerances.end()) return it->second;
    return default_tolerances().at(key);
}

bool Scenario::has_task(const std::string& task) const {
    return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

namespace {

std::vector<std::string> coordinate_vars(int dim) {
    std::vector<std::string> v = {"t"};
    const char* names[] = {"x", "y", "z"};
    for (int i = 0; i < dim; ++i) v.emplace_back(names[i]);
    return v;
}

ExprVars vars_at(double t, const Vec& p) {
    ExprVars v;
    v.t = t;
    if (p.size() > 0) v.x = p[0];
    if (p.size() > 1) v.y = p[1];
    if (p.size() > 2) v.z = p[2];
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_coefficient_key(const std::string& k) {
    if (k == "gauge") return true;
    if (k.size() == 3 && k[0] == 'a' && k[1] >= '1' && k[1] <= '3' && k[2] >= '1' && k[2] <= '3') return k[1] <= k[2];
    return k.size() == 2 && k[0] == 'b' && k[1] >= '1' && k[1] <= '3';
}

struct Entry {
    std::string value;
    int line;
    int key_col;
    int value_col;
};

}  // namespace

Scenario parse_scenario(std::istream& in) {
    std::map<std::string, Entry> entries;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            const auto col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
            throw ParseError(line_no, col, "expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const int key_col = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (key.empty()) throw ParseError(line_no, key_col, "missing key");
        const std::string rest = line.substr(eq + 1);
        const auto vstart = rest.find_first_not_of(" \t");
        const std::string value = trim(rest);
        const int value_col = static_cast<int>(eq + 1 + (vstart == std::string::npos ? 0 : vstart)) + 1;
        if (value.empty()) throw ParseError(line_no, value_col, "missing value for '" + key + "'");
        if (entries.count(key)) throw ParseError(line_no, key_col, "duplicate key '" + key + "'");
        entries[key] = {value, line_no, key_col, value_col};
    }

    Scenario s;
    std::set<std::string> consumed;
    auto take = [&](const std::string& key) -> const Entry* {
        const auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        consumed.insert(key);
        return &it->second;
    };
    auto as_int = [](const Entry& e, long long lo) {
        long long x = 0;
        const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), x);
        if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size())
            throw ParseError(e.line, e.value_col, "expected an integer");
        if (x < lo) throw ParseError(e.line, e.value_col, "value must be at least " + std::to_string(lo));
        return x;
    };
    auto as_positive = [](const Entry& e) {
        const double x = Expression::parse(e.value, {}, e.line, e.value_col).eval({});
        if (!(x > 0.0) || !std::isfinite(x)) throw ParseError(e.line, e.value_col, "value must be positive");
        return x;
    };

    if (auto e = take("name")) s.name = e->value;
    if (auto e = take("seed")) s.seed = static_cast<std::uint64_t>(as_int(*e, 0));
    if (auto e = take("manifold.topology")) {
        if (e->value != "torus" && e->value != "euclidean")
            throw ParseError(e->line, e->value_col, "topology must be 'torus' or 'euclidean'");
        s.topology = e->value;
    }
    if (auto e = take("manifold.dim")) {
        s.dim = static_cast<int>(as_int(*e, 1));
        if (s.dim > 3) throw ParseError(e->line, e->value_col, "dimension must be 1, 2 or 3");
    }
    if (auto e = take("manifold.period")) {
        s.period = Expression::parse(e->value, {}, e->line, e->value_col);
        if (!(s.period.eval({}) > 0.0)) throw ParseError(e->line, e->value_col, "period must be positive");
    }
    if (auto e = take("metric.kind")) {
        static const std::set<std::string> kinds = {"euclidean", "riemannian", "randers", "gauge"};
        if (!kinds.count(e->value)) throw ParseError(e->line, e->value_col, "unknown metric kind '" + e->value + "'");
        s.kind = e->value;
    }

    for (auto& [key, e] : entries) {
        if (key.rfind("metric.", 0) != 0 || key == "metric.kind") continue;
        const std::string coef = key.substr(7);
        if (!is_coefficient_key(coef)) throw ParseError(e.line, e.key_col, "unknown key '" + key + "'");
        const int index_max = coef == "gauge" ? 0 : coef.back() - '0';
        const bool fits = coef == "gauge" ? (s.kind == "gauge") : (index_max <= s.dim && s.kind != "euclidean" &&
                                                                   s.kind != "gauge" && (coef[0] == 'a' || s.kind == "randers"));
        if (!fits) throw ParseError(e.line, e.key_col, "'" + key + "' does not apply to metric kind " + s.kind);
        std::vector<std::string> allowed = coordinate_vars(s.dim);
        if (coef == "gauge") {
            if (s.dim != 2) throw ParseError(e.line, e.key_col, "the gauge kind needs manifold.dim = 2");
            allowed.emplace_back("theta");
        }
        s.coefficients.emplace(coef, Expression::parse(e.value, allowed, e.line, e.value_col));
        consumed.insert(key);
    }
    if (s.kind == "gauge" && !s.coefficients.count("gauge")) {
        const Entry* e = take("metric.kind");
        throw ParseError(e ? e->line : 1, 1, "the gauge kind needs metric.gauge");
    }

    if (auto e = take("integrator.step")) s.integrator.step = as_positive(*e);
    if (auto e = take("integrator.horizon")) s.integrator.horizon = as_positive(*e);
    for (auto& [key, e] : entries) {
        if (key.rfind("tolerance.", 0) != 0) continue;
        const std::string name = key.substr(10);
        if (!Scenario::default_tolerances().count(name)) throw ParseError(e.line, e.key_col, "unknown key '" + key + "'");
        s.tolerances[name] = as_positive(e);
        consumed.insert(key);
    }
    if (auto e = take("tasks")) {
        if (e->value == "all") {
            s.tasks = Scenario::all_tasks();
        } else {
            std::stringstream ss(e->value);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                const auto& all = Scenario::all_tasks();
                if (std::find(all.begin(), all.end(), item) == all.end())
                    throw ParseError(e->line, e->value_col, "unknown task '" + item + "'");
                if (!s.has_task(item)) s.tasks.push_back(item);
            }
        }
    } else {
        s.tasks = Scenario::all_tasks();
    }
    if (auto e = take("rays")) s.rays = static_cast<int>(as_int(*e, 1));
    if (auto e = take("directions")) s.directions = static_cast<int>(as_int(*e, 0));
    if (auto e = take("skies.rays")) s.sky_rays = static_cast<int>(as_int(*e, 1));
    if (auto e = take("probe.rays")) s.probe_rays = static_cast<int>(as_int(*e, 1));
    if (auto e = take("probe.horizon")) s.probe_horizon = as_positive(*e);
    if (auto e = take("probe.step")) s.probe_step = as_positive(*e);
    if (auto e = take("roundtrip.times")) s.roundtrip_times = static_cast<int>(as_int(*e, 1));
    if (auto e = take("roundtrip.points")) s.roundtrip_points = static_cast<int>(as_int(*e, 1));

    for (const auto& [key, e] : entries)
        if (!consumed.count(key)) throw ParseError(e.line, e.key_col, "unknown key '" + key + "'");
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

std::string serialize_scenario(const Scenario& s) {
    std::ostringstream out;
    out << "name = " << s.name << '\n';
    out << "seed = " << s.seed << '\n';
    out << "manifold.topology = " << s.topology << '\n';
    out << "manifold.dim = " << s.dim << '\n';
    out << "manifold.period = " << s.period.source() << '\n';
    out << "metric.kind = " << s.kind << '\n';
    for (const auto& [k, e] : s.coefficients) out << "metric." << k << " = " << e.source() << '\n';
    out << "integrator.step = " << format_double(s.integrator.step) << '\n';
    out << "integrator.horizon = " << format_double(s.integrator.horizon) << '\n';
    for (const auto& [k, v] : s.tolerances) out << "tolerance." << k << " = " << format_double(v) << '\n';
    out << "tasks = ";
    for (std::size_t i = 0; i < s.tasks.size(); ++i) out << (i ? ", " : "") << s.tasks[i];
    out << '\n';
    out << "rays = " << s.rays << '\n';
    out << "directions = " << s.directions << '\n';
    out << "skies.rays = " << s.sky_rays << '\n';
    out << "probe.rays = " << s.probe_rays << '\n';
    out << "probe.horizon = " << format_double(s.probe_horizon) << '\n';
    out << "probe.step = " << format_double(s.probe_step) << '\n';
    out << "roundtrip.times = " << s.roundtrip_times << '\n';
    out << "roundtrip.points = " << s.roundtrip_points << '\n';
    return out.str();
}

// ---------------------------------------------------------------- metric construction

BaseManifold Scenario::manifold() const {
    if (topology == "torus") return BaseManifold::torus(dim, period.eval({}));
    return BaseManifold::euclidean(dim);
}

namespace {

AdmissibilityRegion region_for(const Scenario& s) {
    AdmissibilityRegion r;
    r.t_lo = -s.integrator.horizon;
    r.t_hi = s.integrator.horizon;
    if (s.topology == "torus") {
        r.p_lo = 0.0;
        r.p_hi = s.period.eval({});
    }
    return r;
}

}  // namespace

FinslerFamily Scenario::finsler() const {
    const int n = dim;
    if (kind == "euclidean") return FinslerFamily::euclidean(n);
    if (kind == "gauge") throw DomainError("the gauge kind defines a Hamiltonian, not a Finsler metric");

    std::vector<std::vector<std::shared_ptr<Expression>>> a(n, std::vector<std::shared_ptr<Expression>>(n));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const std::string key = "a" + std::to_string(i + 1) + std::to_string(j + 1);
            const auto it = coefficients.find(key);
            const Expression e = it != coefficients.end() ? it->second : Expression::constant(i == j ? 1.0 : 0.0);
            a[i][j] = a[j][i] = std::make_shared<Expression>(e);
        }
    MatrixField A = [a, n](double t, const Vec& p) {
        const ExprVars v = vars_at(t, p);
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = a[i][j]->eval(v);
        return m;
    };
    if (kind == "riemannian") return FinslerFamily::riemannian(n, A, region_for(*this));

    std::vector<Expression> b;
    for (int i = 0; i < n; ++i) {
        const auto it = coefficients.find("b" + std::to_string(i + 1));
        b.push_back(it != coefficients.end() ? it->second : Expression::constant(0.0));
    }
    OneFormField B = [b, n](double t, const Vec& p) {
        const ExprVars v = vars_at(t, p);
        Vec out(n);
        for (int i = 0; i < n; ++i) out[i] = b[i].eval(v);
        return out;
    };
    return FinslerFamily::randers(n, A, B, region_for(*this));
}

Generator Scenario::gauge_generator() const {
    if (kind != "gauge") throw DomainError("gauge_generator: scenario is not of the gauge kind");
    const Expression r = coefficients.at("gauge");
    // Admissibility: the gauge radius must stay positive on the sampled region.
    const AdmissibilityRegion reg = region_for(*this);
    const int k = reg.samples_per_axis;
    for (int it = 0; it < k; ++it)
        for (int ix = 0; ix < k; ++ix)
            for (int iy = 0; iy < k; ++iy)
                for (int ia = 0; ia < 64; ++ia) {
                    ExprVars v;
                    v.t = reg.t_lo + (reg.t_hi - reg.t_lo) * it / (k - 1);
                    v.x = reg.p_lo + (reg.p_hi - reg.p_lo) * ix / (k - 1);
                    v.y = reg.p_lo + (reg.p_hi - reg.p_lo) * iy / (k - 1);
                    v.theta = 2.0 * std::numbers::pi * ia / 64;
                    const double x = r.eval(v);
                    if (!(x > 0.0) || !std::isfinite(x))
                        throw DomainError("gauge admissibility violated: radius " + std::to_string(x) + " at t = " +
                                          std::to_string(v.t) + ", theta = " + std::to_string(v.theta));
                }
    const bool invariant = !r.uses("t") && !r.uses("x") && !r.uses("y");
    auto H = [r](double t, const Vec& p, const Vec& v) {
        const double len = v.norm();
        if (len == 0.0) return 0.0;
        ExprVars vars = vars_at(t, p);
        vars.theta = std::atan2(v[1], v[0]);
        return len / r.eval(vars);
    };
    return Generator::hamiltonian(2, H).with_invariant(invariant);
}

}  // namespace conepath
