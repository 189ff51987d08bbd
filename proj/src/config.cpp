#include "fraclap/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fraclap {

// ---------------------------------------------------------------------------
// Expression

struct Expression::Node {
    enum class Op { number, var_x, var_y, add, sub, mul, div, pow, neg, sin, cos, exp };
    Op op = Op::number;
    double value = 0.0;
    std::shared_ptr<const Node> a, b;
};

namespace {

using ExprNode = Expression::Node;

}  // namespace

struct ExprParser {
    const std::string& text;
    std::size_t pos = 0;

    explicit ExprParser(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("expression: " + what + " at position " +
                                    std::to_string(pos) + " in '" + text + "'");
    }

    std::shared_ptr<const ExprNode> make(ExprNode::Op op,
                                         std::shared_ptr<const ExprNode> a = nullptr,
                                         std::shared_ptr<const ExprNode> b = nullptr) {
        auto n = std::make_shared<ExprNode>();
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    std::shared_ptr<const ExprNode> parse_expr() {
        auto lhs = parse_term();
        while (true) {
            if (eat('+')) lhs = make(ExprNode::Op::add, lhs, parse_term());
            else if (eat('-')) lhs = make(ExprNode::Op::sub, lhs, parse_term());
            else return lhs;
        }
    }

    std::shared_ptr<const ExprNode> parse_term() {
        auto lhs = parse_factor();
        while (true) {
            if (eat('*')) lhs = make(ExprNode::Op::mul, lhs, parse_factor());
            else if (eat('/')) lhs = make(ExprNode::Op::div, lhs, parse_factor());
            else return lhs;
        }
    }

    std::shared_ptr<const ExprNode> parse_factor() {
        if (eat('-')) return make(ExprNode::Op::neg, parse_factor());
        return parse_power();
    }

    std::shared_ptr<const ExprNode> parse_power() {
        auto base = parse_atom();
        if (eat('^')) return make(ExprNode::Op::pow, base, parse_factor());
        return base;
    }

    std::shared_ptr<const ExprNode> parse_atom() {
        skip_ws();
        if (pos >= text.size()) fail("unexpected end of input");
        char c = text[pos];
        if (c == '(') {
            ++pos;
            auto e = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = pos;
            double v = std::stod(text.substr(pos), &end);
            pos += end;
            auto n = std::make_shared<ExprNode>();
            n->op = ExprNode::Op::number;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t start = pos;
            while (pos < text.size() &&
                   std::isalpha(static_cast<unsigned char>(text[pos]))) ++pos;
            std::string name = text.substr(start, pos - start);
            if (name == "x") return make(ExprNode::Op::var_x);
            if (name == "y") return make(ExprNode::Op::var_y);
            ExprNode::Op op;
            if (name == "sin") op = ExprNode::Op::sin;
            else if (name == "cos") op = ExprNode::Op::cos;
            else if (name == "exp") op = ExprNode::Op::exp;
            else fail("unknown identifier '" + name + "'");
            if (!eat('(')) fail("expected '(' after " + name);
            auto arg = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return make(op, arg);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

Expression::Expression() : source_("0") {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::number;
    root_ = n;
}

Expression Expression::parse(const std::string& text) {
    ExprParser parser(text);
    Expression e;
    e.root_ = parser.parse_expr();
    parser.skip_ws();
    if (parser.pos != text.size()) parser.fail("trailing input");
    e.source_ = text;
    return e;
}

namespace {

double eval_node(const ExprNode& n, double x, double y) {
    using Op = ExprNode::Op;
    switch (n.op) {
        case Op::number: return n.value;
        case Op::var_x: return x;
        case Op::var_y: return y;
        case Op::add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
        case Op::sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
        case Op::mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
        case Op::div: return eval_node(*n.a, x, y) / eval_node(*n.b, x, y);
        case Op::pow: return std::pow(eval_node(*n.a, x, y), eval_node(*n.b, x, y));
        case Op::neg: return -eval_node(*n.a, x, y);
        case Op::sin: return std::sin(eval_node(*n.a, x, y));
        case Op::cos: return std::cos(eval_node(*n.a, x, y));
        case Op::exp: return std::exp(eval_node(*n.a, x, y));
    }
    return 0.0;
}

}  // namespace

double Expression::eval(double x, double y) const { return eval_node(*root_, x, y); }

// ---------------------------------------------------------------------------
// RunConfig helpers

GridSpec RunConfig::make_grid() const {
    return build_grid(dimension, box_min, box_max, h);
}

SourceTerm RunConfig::make_source(const GridSpec& grid) const {
    SourceTerm f{grid, std::vector<double>(grid.node_count(), 0.0)};
    for (int i = 0; i < grid.node_count(); ++i) {
        auto xy = grid.position(i);
        f.density[i] = source.eval(xy[0], xy[1]);
        if (!std::isfinite(f.density[i]))
            throw std::invalid_argument("source: non-finite value at a node");
    }
    return f;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

struct RawEntry {
    int line = 0;
    std::string value;
    bool used = false;
};

struct Sections {
    // section -> key -> entry
    std::map<std::string, std::map<std::string, RawEntry>> data;
    std::map<std::string, int> section_lines;
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

const std::set<std::string> kKnownSections = {
    "grid", "params", "shape", "capacity", "sequence", "source", "solver", "experiment"};

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"grid", {"dimension", "box_min", "box_max", "h"}},
    {"params", {"s", "p", "tail_mode", "quadrature_order"}},
    {"shape", {"omega"}},
    {"capacity", {"e", "d"}},
    {"sequence",
     {"kind", "center", "radii", "amplitudes", "perforation_radii",
      "perforation_spacings", "steps"}},
    {"source", {"f"}},
    {"solver",
     {"max_iterations", "gradient_tolerance", "initial_step", "shrink_factor",
      "sufficient_decrease", "initialization"}},
    {"experiment", {"decrease_factor", "floor_fraction"}},
};

class ConfigReader {
public:
    ConfigReader(const std::string& text, std::vector<ParseError>& errors)
        : errors_(errors) {
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        std::string section;
        while (std::getline(is, line)) {
            ++lineno;
            std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::string t = trim(line);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']') {
                    error(lineno, "malformed section header");
                    continue;
                }
                section = trim(t.substr(1, t.size() - 2));
                if (!kKnownSections.count(section))
                    error(lineno, "unknown section [" + section + "]");
                sections_.section_lines[section] = lineno;
                continue;
            }
            std::size_t eq = t.find('=');
            if (eq == std::string::npos) {
                error(lineno, "expected `key = value`");
                continue;
            }
            std::string key = trim(t.substr(0, eq));
            std::string value = trim(t.substr(eq + 1));
            if (section.empty()) {
                error(lineno, "key '" + key + "' outside any section");
                continue;
            }
            auto ks = kKnownKeys.find(section);
            if (ks != kKnownKeys.end() && !ks->second.count(key)) {
                error(lineno, "unknown key '" + key + "' in [" + section + "]");
                continue;
            }
            sections_.data[section][key] = RawEntry{lineno, value, false};
        }
    }

    void error(int line, const std::string& msg) { errors_.push_back({line, msg}); }

    bool has(const std::string& section, const std::string& key) const {
        auto s = sections_.data.find(section);
        return s != sections_.data.end() && s->second.count(key);
    }

    bool has_section(const std::string& section) const {
        return sections_.data.count(section) || sections_.section_lines.count(section);
    }

    int section_line(const std::string& section) const {
        auto it = sections_.section_lines.find(section);
        return it == sections_.section_lines.end() ? 0 : it->second;
    }

    const RawEntry* entry(const std::string& section, const std::string& key) {
        auto s = sections_.data.find(section);
        if (s == sections_.data.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    double number(const std::string& section, const std::string& key, double fallback,
                  bool required = false) {
        const RawEntry* e = entry(section, key);
        if (!e) {
            if (required) error(section_line(section), "missing key '" + key + "' in [" + section + "]");
            return fallback;
        }
        try {
            std::size_t end = 0;
            double v = std::stod(e->value, &end);
            if (end != e->value.size()) throw std::invalid_argument("trailing text");
            return v;
        } catch (const std::exception&) {
            error(e->line, "malformed number for '" + key + "': " + e->value);
            return fallback;
        }
    }

    long integer(const std::string& section, const std::string& key, long fallback,
                 bool required = false) {
        double v = number(section, key, static_cast<double>(fallback), required);
        if (v != std::floor(v)) {
            const RawEntry* e = entry(section, key);
            error(e ? e->line : section_line(section), "'" + key + "' must be an integer");
            return fallback;
        }
        return static_cast<long>(v);
    }

    std::vector<double> number_list(const std::string& section, const std::string& key) {
        const RawEntry* e = entry(section, key);
        std::vector<double> out;
        if (!e) return out;
        std::istringstream is(e->value);
        std::string cell;
        while (std::getline(is, cell, ',')) {
            try {
                std::size_t end = 0;
                std::string t = trim(cell);
                double v = std::stod(t, &end);
                if (end != t.size()) throw std::invalid_argument("trailing text");
                out.push_back(v);
            } catch (const std::exception&) {
                error(e->line, "malformed list entry for '" + key + "': " + cell);
            }
        }
        return out;
    }

    std::string word(const std::string& section, const std::string& key,
                     const std::string& fallback) {
        const RawEntry* e = entry(section, key);
        return e ? e->value : fallback;
    }

private:
    Sections sections_;
    std::vector<ParseError>& errors_;
};

// Shape text: box(...), ball(...), difference(s, s), union(s, s).
struct ShapeParser {
    const std::string& text;
    std::size_t pos = 0;
    int dimension;

    ShapeParser(const std::string& t, int dim) : text(t), dimension(dim) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("shape: " + what + " in '" + text + "'");
    }

    void expect(char c) {
        skip_ws();
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }

    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() &&
               (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        if (start == pos) fail("expected a shape name");
        return text.substr(start, pos - start);
    }

    double num() {
        skip_ws();
        std::size_t end = 0;
        double v;
        try {
            v = std::stod(text.substr(pos), &end);
        } catch (const std::exception&) {
            fail("expected a number");
        }
        pos += end;
        return v;
    }

    Shape parse() {
        std::string name = ident();
        expect('(');
        Shape result = Shape::box1d(0, 1);
        if (name == "box") {
            if (dimension == 1) {
                double lo = num();
                expect(',');
                double hi = num();
                result = Shape::box({lo, 0.0}, {hi, 0.0});
            } else {
                double x0 = num(); expect(','); double y0 = num(); expect(',');
                double x1 = num(); expect(','); double y1 = num();
                result = Shape::box({x0, y0}, {x1, y1});
            }
        } else if (name == "ball") {
            if (dimension == 1) {
                double c = num();
                expect(',');
                double r = num();
                result = Shape::ball({c, 0.0}, r);
            } else {
                double cx = num(); expect(','); double cy = num(); expect(',');
                double r = num();
                result = Shape::ball({cx, cy}, r);
            }
        } else if (name == "difference" || name == "union") {
            Shape a = parse();
            expect(',');
            Shape b = parse();
            result = name == "difference" ? Shape::difference(std::move(a), std::move(b))
                                          : Shape::set_union(std::move(a), std::move(b));
        } else {
            fail("unknown shape '" + name + "'");
        }
        expect(')');
        return result;
    }

    Shape run() {
        Shape s = parse();
        skip_ws();
        if (pos != text.size()) fail("trailing input");
        return s;
    }
};

}  // namespace

ParseResult parse_config(const std::string& text) {
    ParseResult result;
    ConfigReader reader(text, result.errors);
    RunConfig cfg;

    // [grid]
    if (!reader.has_section("grid")) {
        result.errors.push_back({0, "missing required section [grid]"});
        return result;
    }
    cfg.dimension = static_cast<int>(reader.integer("grid", "dimension", 1, true));
    if (cfg.dimension != 1 && cfg.dimension != 2) {
        const auto* e = reader.entry("grid", "dimension");
        result.errors.push_back({e ? e->line : 0, "dimension must be 1 or 2"});
        cfg.dimension = 1;
    }
    auto read_point = [&](const char* key, std::array<double, 2>& out, double fb) {
        if (!reader.has("grid", key)) {
            result.errors.push_back(
                {reader.section_line("grid"), std::string("missing key '") + key + "' in [grid]"});
            out = {fb, fb};
            return;
        }
        std::vector<double> v = reader.number_list("grid", key);
        if (static_cast<int>(v.size()) != cfg.dimension) {
            const auto* e = reader.entry("grid", key);
            result.errors.push_back(
                {e ? e->line : 0, std::string("'") + key + "' needs " +
                                      std::to_string(cfg.dimension) + " coordinate(s)"});
            out = {fb, fb};
            return;
        }
        out = {v[0], v.size() > 1 ? v[1] : 0.0};
    };
    read_point("box_min", cfg.box_min, 0.0);
    read_point("box_max", cfg.box_max, 1.0);
    cfg.h = reader.number("grid", "h", 0.1, true);

    // [params]
    if (!reader.has_section("params")) {
        result.errors.push_back({0, "missing required section [params]"});
        return result;
    }
    cfg.params.s = reader.number("params", "s", 0.5, true);
    if (reader.has("params", "s") && !(cfg.params.s >= 0.05 && cfg.params.s <= 0.95)) {
        const auto* e = reader.entry("params", "s");
        result.errors.push_back({e->line, "'s' out of range [0.05, 0.95]: " + e->value});
        cfg.params.s = 0.5;
    }
    cfg.params.p = reader.number("params", "p", 2.0, true);
    if (reader.has("params", "p") && !(cfg.params.p >= 1.1 && cfg.params.p <= 10.0)) {
        const auto* e = reader.entry("params", "p");
        result.errors.push_back({e->line, "'p' out of range [1.1, 10]: " + e->value});
        cfg.params.p = 2.0;
    }
    std::string tail = reader.word("params", "tail_mode", "analytic");
    if (tail == "analytic") cfg.params.tail_mode = TailMode::analytic;
    else if (tail == "none") cfg.params.tail_mode = TailMode::none;
    else {
        const auto* e = reader.entry("params", "tail_mode");
        result.errors.push_back({e ? e->line : 0, "tail_mode must be none or analytic"});
    }
    cfg.params.quadrature_order =
        static_cast<int>(reader.integer("params", "quadrature_order", 4));
    if (cfg.params.quadrature_order < 1) {
        const auto* e = reader.entry("params", "quadrature_order");
        result.errors.push_back({e ? e->line : 0, "quadrature_order must be >= 1"});
        cfg.params.quadrature_order = 4;
    }

    auto read_shape = [&](const std::string& section, const std::string& key,
                          std::optional<Shape>& out) {
        const auto* e = reader.entry(section, key);
        if (!e) return;
        try {
            out = ShapeParser(e->value, cfg.dimension).run();
        } catch (const std::exception& ex) {
            result.errors.push_back({e->line, ex.what()});
        }
    };

    // [shape]
    if (!reader.has("shape", "omega")) {
        result.errors.push_back(
            {reader.section_line("shape"), "missing key 'omega' in [shape]"});
    } else {
        std::optional<Shape> omega;
        read_shape("shape", "omega", omega);
        if (omega) cfg.omega = *omega;
    }

    // [capacity]
    read_shape("capacity", "e", cfg.capacity_e);
    read_shape("capacity", "d", cfg.capacity_d);

    // [sequence]
    if (reader.has_section("sequence")) {
        DomainSequenceSpec seq;
        seq.base = cfg.omega;
        std::string kind = reader.word("sequence", "kind", "");
        int kind_line = reader.section_line("sequence");
        if (const auto* e = reader.entry("sequence", "kind")) kind_line = e->line;
        if (kind == "shrinking_hole") seq.kind = SequenceKind::shrinking_hole;
        else if (kind == "boundary_oscillation") seq.kind = SequenceKind::boundary_oscillation;
        else if (kind == "periodic_perforation") seq.kind = SequenceKind::periodic_perforation;
        else result.errors.push_back({kind_line, "sequence kind must be shrinking_hole, "
                                                 "boundary_oscillation or periodic_perforation"});
        std::vector<double> center = reader.number_list("sequence", "center");
        if (!center.empty()) {
            if (static_cast<int>(center.size()) != cfg.dimension)
                result.errors.push_back({kind_line, "'center' needs " +
                                                        std::to_string(cfg.dimension) +
                                                        " coordinate(s)"});
            else
                seq.center = {center[0], center.size() > 1 ? center[1] : 0.0};
        }
        seq.radii = reader.number_list("sequence", "radii");
        seq.amplitudes = reader.number_list("sequence", "amplitudes");
        seq.perforation_radii = reader.number_list("sequence", "perforation_radii");
        seq.perforation_spacings = reader.number_list("sequence", "perforation_spacings");
        seq.steps = static_cast<int>(reader.integer("sequence", "steps", 0, true));
        try {
            seq.validate();
        } catch (const std::exception& ex) {
            result.errors.push_back({kind_line, ex.what()});
        }
        cfg.sequence = std::move(seq);
    }

    // [source]
    if (!reader.has("source", "f")) {
        result.errors.push_back(
            {reader.section_line("source"), "missing key 'f' in [source]"});
    } else {
        const auto* e = reader.entry("source", "f");
        try {
            cfg.source = Expression::parse(e->value);
        } catch (const std::exception& ex) {
            result.errors.push_back({e->line, ex.what()});
        }
    }

    // [solver]
    cfg.solver.max_iterations =
        static_cast<int>(reader.integer("solver", "max_iterations", 50000));
    cfg.solver.gradient_tolerance = reader.number("solver", "gradient_tolerance", 1e-8);
    cfg.solver.initial_step = reader.number("solver", "initial_step", 1.0);
    cfg.solver.shrink_factor = reader.number("solver", "shrink_factor", 0.5);
    cfg.solver.sufficient_decrease = reader.number("solver", "sufficient_decrease", 1e-4);
    std::string init = reader.word("solver", "initialization", "zero");
    if (init == "zero") cfg.init_mode = InitMode::zero;
    else if (init == "random") cfg.init_mode = InitMode::random;
    else {
        const auto* e = reader.entry("solver", "initialization");
        result.errors.push_back({e ? e->line : 0, "initialization must be zero or random"});
    }
    try {
        cfg.solver.validate();
    } catch (const std::exception& ex) {
        result.errors.push_back({reader.section_line("solver"), ex.what()});
    }

    // [experiment]
    cfg.decrease_factor = reader.number("experiment", "decrease_factor", 0.2);
    cfg.floor_fraction = reader.number("experiment", "floor_fraction", 0.25);

    if (result.errors.empty()) result.config = std::move(cfg);
    return result;
}

namespace {

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_point(std::array<double, 2> x, int dim) {
    std::string s = fmt(x[0]);
    if (dim == 2) s += ", " + fmt(x[1]);
    return s;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt(v[i]);
    }
    return s;
}

}  // namespace

std::string serialize_config(const RunConfig& c) {
    std::ostringstream os;
    os << "[grid]\n";
    os << "dimension = " << c.dimension << "\n";
    os << "box_min = " << fmt_point(c.box_min, c.dimension) << "\n";
    os << "box_max = " << fmt_point(c.box_max, c.dimension) << "\n";
    os << "h = " << fmt(c.h) << "\n\n";

    os << "[params]\n";
    os << "s = " << fmt(c.params.s) << "\n";
    os << "p = " << fmt(c.params.p) << "\n";
    os << "tail_mode = " << (c.params.tail_mode == TailMode::analytic ? "analytic" : "none")
       << "\n";
    os << "quadrature_order = " << c.params.quadrature_order << "\n\n";

    os << "[shape]\n";
    os << "omega = " << c.omega.to_string(c.dimension) << "\n\n";

    if (c.capacity_e || c.capacity_d) {
        os << "[capacity]\n";
        if (c.capacity_e) os << "e = " << c.capacity_e->to_string(c.dimension) << "\n";
        if (c.capacity_d) os << "d = " << c.capacity_d->to_string(c.dimension) << "\n";
        os << "\n";
    }

    if (c.sequence) {
        const DomainSequenceSpec& s = *c.sequence;
        os << "[sequence]\n";
        switch (s.kind) {
            case SequenceKind::shrinking_hole: os << "kind = shrinking_hole\n"; break;
            case SequenceKind::boundary_oscillation: os << "kind = boundary_oscillation\n"; break;
            case SequenceKind::periodic_perforation: os << "kind = periodic_perforation\n"; break;
        }
        os << "center = " << fmt_point(s.center, c.dimension) << "\n";
        if (!s.radii.empty()) os << "radii = " << fmt_list(s.radii) << "\n";
        if (!s.amplitudes.empty()) os << "amplitudes = " << fmt_list(s.amplitudes) << "\n";
        if (!s.perforation_radii.empty())
            os << "perforation_radii = " << fmt_list(s.perforation_radii) << "\n";
        if (!s.perforation_spacings.empty())
            os << "perforation_spacings = " << fmt_list(s.perforation_spacings) << "\n";
        os << "steps = " << s.steps << "\n\n";
    }

    os << "[source]\n";
    os << "f = " << c.source.source() << "\n\n";

    os << "[solver]\n";
    os << "max_iterations = " << c.solver.max_iterations << "\n";
    os << "gradient_tolerance = " << fmt(c.solver.gradient_tolerance) << "\n";
    os << "initial_step = " << fmt(c.solver.initial_step) << "\n";
    os << "shrink_factor = " << fmt(c.solver.shrink_factor) << "\n";
    os << "sufficient_decrease = " << fmt(c.solver.sufficient_decrease) << "\n";
    os << "initialization = " << (c.init_mode == InitMode::zero ? "zero" : "random") << "\n\n";

    os << "[experiment]\n";
    os << "decrease_factor = " << fmt(c.decrease_factor) << "\n";
    os << "floor_fraction = " << fmt(c.floor_fraction) << "\n";
    return os.str();
}

}  // namespace fraclap
