#include "confine/scenario.hpp"

#include "confine/certifier.hpp"
#include "confine/monitors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

namespace confine::scenario {

namespace {

Vec to_vec(const std::vector<double>& v) {
    Vec out(static_cast<long>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[static_cast<long>(i)] = v[i];
    return out;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Cuts a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& line) {
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
        if (c == '#' && !in_str) return line.substr(0, i);
    }
    return line;
}

void skip_ws(const std::string& s, size_t& pos) {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
}

Value parse_value(const std::string& s, size_t& pos, int lineno) {
    skip_ws(s, pos);
    if (pos >= s.size()) throw ParseError("missing value", lineno);
    const char c = s[pos];
    if (c == '"') {
        ++pos;
        std::string out;
        while (pos < s.size() && s[pos] != '"') {
            if (s[pos] == '\\' && pos + 1 < s.size()) {
                ++pos;
                out += (s[pos] == 'n') ? '\n' : s[pos];
            } else {
                out += s[pos];
            }
            ++pos;
        }
        if (pos >= s.size()) throw ParseError("unterminated string", lineno);
        ++pos;
        Value v;
        v.kind = Value::Kind::Str;
        v.str = std::move(out);
        return v;
    }
    if (c == '[') {
        ++pos;
        Value v;
        v.kind = Value::Kind::Arr;
        skip_ws(s, pos);
        if (pos < s.size() && s[pos] == ']') {
            ++pos;
            return v;
        }
        while (true) {
            v.arr.push_back(parse_value(s, pos, lineno));
            skip_ws(s, pos);
            if (pos >= s.size()) throw ParseError("unterminated array", lineno);
            if (s[pos] == ',') {
                ++pos;
                continue;
            }
            if (s[pos] == ']') {
                ++pos;
                return v;
            }
            throw ParseError("expected ',' or ']' in array", lineno);
        }
    }
    auto is_word_end = [&](size_t p) {
        return p >= s.size() || !(std::isalnum(static_cast<unsigned char>(s[p])) || s[p] == '_');
    };
    if (s.compare(pos, 4, "true") == 0 && is_word_end(pos + 4)) {
        pos += 4;
        Value v;
        v.kind = Value::Kind::Bool;
        v.boolean = true;
        return v;
    }
    if (s.compare(pos, 5, "false") == 0 && is_word_end(pos + 5)) {
        pos += 5;
        Value v;
        v.kind = Value::Kind::Bool;
        v.boolean = false;
        return v;
    }
    char* end = nullptr;
    const double d = std::strtod(s.c_str() + pos, &end);
    if (end == s.c_str() + pos) throw ParseError("expected a value", lineno);
    pos = static_cast<size_t>(end - s.c_str());
    Value v;
    v.kind = Value::Kind::Num;
    v.num = d;
    return v;
}

std::string kind_name(Value::Kind k) {
    switch (k) {
        case Value::Kind::Str: return "string";
        case Value::Kind::Num: return "number";
        case Value::Kind::Bool: return "boolean";
        case Value::Kind::Arr: return "array";
    }
    return "?";
}

} // namespace

const Value& Table::raw(const std::string& key) const {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        const std::string where = name.empty() ? "" : " in [" + name + "]";
        throw ParseError("missing required key '" + key + "'" + where, line);
    }
    return it->second;
}

int Table::line_of(const std::string& key) const {
    const auto it = key_lines.find(key);
    return it == key_lines.end() ? line : it->second;
}

double Table::num(const std::string& key) const {
    const Value& v = raw(key);
    if (v.kind != Value::Kind::Num)
        throw ParseError("key '" + key + "' must be a number, not a " + kind_name(v.kind),
                         line_of(key));
    return v.num;
}

double Table::num_or(const std::string& key, double fallback) const {
    return has(key) ? num(key) : fallback;
}

std::string Table::str(const std::string& key) const {
    const Value& v = raw(key);
    if (v.kind != Value::Kind::Str)
        throw ParseError("key '" + key + "' must be a string, not a " + kind_name(v.kind),
                         line_of(key));
    return v.str;
}

std::string Table::str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
}

bool Table::bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Value& v = raw(key);
    if (v.kind != Value::Kind::Bool)
        throw ParseError("key '" + key + "' must be a boolean", line_of(key));
    return v.boolean;
}

std::vector<double> Table::num_array(const std::string& key) const {
    const Value& v = raw(key);
    if (v.kind != Value::Kind::Arr)
        throw ParseError("key '" + key + "' must be an array", line_of(key));
    std::vector<double> out;
    out.reserve(v.arr.size());
    for (const Value& e : v.arr) {
        if (e.kind != Value::Kind::Num)
            throw ParseError("key '" + key + "' must be an array of numbers", line_of(key));
        out.push_back(e.num);
    }
    return out;
}

std::vector<double> Table::num_array_or(const std::string& key,
                                        const std::vector<double>& fallback) const {
    return has(key) ? num_array(key) : fallback;
}

Document parse_scenario_text(const std::string& text) {
    Document doc;
    Table* current = &doc.root;
    std::istringstream in(text);
    std::string raw_line;
    int lineno = 0;
    while (std::getline(in, raw_line)) {
        ++lineno;
        const std::string s = trim(strip_comment(raw_line));
        if (s.empty()) continue;

        if (s.front() == '[') {
            const bool is_array = s.size() >= 2 && s[1] == '[';
            const std::string closer = is_array ? "]]" : "]";
            const size_t name_begin = is_array ? 2 : 1;
            const size_t close = s.find(closer, name_begin);
            if (close == std::string::npos || trim(s.substr(close + closer.size())) != "")
                throw ParseError("malformed section header", lineno);
            const std::string name = trim(s.substr(name_begin, close - name_begin));
            if (name.empty()) throw ParseError("empty section name", lineno);
            if (is_array) {
                if (name != "task")
                    throw ParseError("only [[task]] section arrays are supported", lineno);
                doc.tasks.emplace_back();
                current = &doc.tasks.back();
                current->name = "task " + std::to_string(doc.tasks.size());
            } else {
                if (doc.sections.count(name))
                    throw ParseError("duplicate section [" + name + "]", lineno);
                current = &doc.sections[name];
                current->name = name;
            }
            current->line = lineno;
            continue;
        }

        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value' or a section header", lineno);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty() ||
            key.find_first_not_of(
                "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                std::string::npos)
            throw ParseError("malformed key '" + key + "'", lineno);
        if (current->kv.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
        const std::string rhs = s.substr(eq + 1);
        size_t pos = 0;
        Value v = parse_value(rhs, pos, lineno);
        skip_ws(rhs, pos);
        if (pos != rhs.size()) throw ParseError("trailing characters after value", lineno);
        current->kv.emplace(key, std::move(v));
        current->key_lines[key] = lineno;
    }
    return doc;
}

Document parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NumericsError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario_text(ss.str());
}

std::unique_ptr<fields::VectorField> make_field(const Table& t) {
    const std::string kind = t.str("kind");
    std::unique_ptr<fields::VectorField> f;
    if (kind == "gl") {
        f = std::make_unique<fields::GinzburgLandauField>(to_vec(t.num_array("a")));
    } else if (kind == "triple_well") {
        const auto a = t.num_array("a"), b = t.num_array("b"), c = t.num_array("c");
        if (a.size() != 2 || b.size() != 2 || c.size() != 2)
            throw ParseError("triple_well wells a, b, c must be planar points", t.line);
        f = std::make_unique<fields::TripleWellGradientField>(Eigen::Vector2d(a[0], a[1]),
                                                              Eigen::Vector2d(b[0], b[1]),
                                                              Eigen::Vector2d(c[0], c[1]));
    } else if (kind == "gp") {
        f = std::make_unique<fields::GrossPitaevskiiField>(t.num("g11"), t.num("g22"),
                                                           t.num("g12"), t.num("mu"));
    } else if (kind == "symmetry_demo") {
        f = std::make_unique<fields::SymmetryDemoField>();
    } else if (kind == "polynomial") {
        const int m = static_cast<int>(t.num("m"));
        if (m < 1) throw ParseError("polynomial m must be >= 1", t.line_of("m"));
        std::vector<std::vector<fields::Monomial>> comps(m);
        for (int i = 0; i < m; ++i) {
            const std::string key = "terms" + std::to_string(i + 1);
            const Value& v = t.raw(key);
            if (v.kind != Value::Kind::Arr)
                throw ParseError("key '" + key + "' must be an array of [coeff, exponents...]",
                                 t.line_of(key));
            for (const Value& term : v.arr) {
                if (term.kind != Value::Kind::Arr ||
                    term.arr.size() != static_cast<size_t>(m) + 1)
                    throw ParseError("each term of '" + key + "' needs 1 + " +
                                         std::to_string(m) + " numbers",
                                     t.line_of(key));
                fields::Monomial mono;
                mono.coeff = term.arr[0].num;
                for (int k = 0; k < m; ++k)
                    mono.exponents.push_back(static_cast<int>(term.arr[k + 1].num));
                comps[i].push_back(std::move(mono));
            }
        }
        f = std::make_unique<fields::PolynomialField>(m, std::move(comps));
    } else {
        throw ParseError("unknown field kind '" + kind + "'", t.line_of("kind"));
    }
    if (t.bool_or("negate", false)) {
        std::shared_ptr<const fields::VectorField> base = std::move(f);
        f = std::make_unique<fields::NegatedField>(base);
    }
    return f;
}

geometry::ConvexBody make_body(const Table& t) {
    const std::string kind = t.str("kind");
    if (kind == "ball")
        return geometry::ConvexBody::ball(t.num("radius"),
                                          static_cast<int>(t.num_or("dim", 2)));
    if (kind == "ellipse" || kind == "ellipsoid")
        return geometry::ConvexBody::ellipsoid(to_vec(t.num_array("semi_axes")));
    if (kind == "polygon" || kind == "triangle") {
        const Value& v = t.raw("vertices");
        if (v.kind != Value::Kind::Arr)
            throw ParseError("key 'vertices' must be an array of [x, y] pairs",
                             t.line_of("vertices"));
        std::vector<Eigen::Vector2d> verts;
        for (const Value& p : v.arr) {
            if (p.kind != Value::Kind::Arr || p.arr.size() != 2)
                throw ParseError("each vertex must be an [x, y] pair", t.line_of("vertices"));
            verts.emplace_back(p.arr[0].num, p.arr[1].num);
        }
        return geometry::ConvexBody::polygon(std::move(verts));
    }
    if (kind == "halfspace")
        return geometry::ConvexBody::half_space(to_vec(t.num_array("normal")), t.num("level"));
    throw ParseError("unknown body kind '" + kind + "'", t.line_of("kind"));
}

namespace {

std::vector<double> parse_numbers(const std::vector<std::string>& tokens, size_t from,
                                  const std::string& what) {
    std::vector<double> out;
    for (size_t i = from; i < tokens.size(); ++i) {
        char* end = nullptr;
        const double v = std::strtod(tokens[i].c_str(), &end);
        if (end != tokens[i].c_str() + tokens[i].size())
            throw ContractError(what + ": '" + tokens[i] + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

std::unique_ptr<fields::VectorField> parse_field_spec(const std::string& spec) {
    std::vector<std::string> tok = tokenize(spec);
    require(!tok.empty(), "empty field spec");
    bool negate = false;
    if (tok[0] == "negated") {
        negate = true;
        tok.erase(tok.begin());
        require(!tok.empty(), "field spec: 'negated' needs a base field");
    }
    const std::string kind = tok[0];
    const std::vector<double> nums = parse_numbers(tok, 1, "field spec");
    std::unique_ptr<fields::VectorField> f;
    if (kind == "gl") {
        require(!nums.empty(), "field spec: gl needs diagonal entries, e.g. 'gl 2 1'");
        f = std::make_unique<fields::GinzburgLandauField>(to_vec(nums));
    } else if (kind == "gp") {
        require(nums.size() == 4, "field spec: gp needs 'gp g11 g22 g12 mu'");
        f = std::make_unique<fields::GrossPitaevskiiField>(nums[0], nums[1], nums[2], nums[3]);
    } else if (kind == "triple_well") {
        require(nums.size() == 6, "field spec: triple_well needs 'triple_well ax ay bx by cx cy'");
        f = std::make_unique<fields::TripleWellGradientField>(Eigen::Vector2d(nums[0], nums[1]),
                                                              Eigen::Vector2d(nums[2], nums[3]),
                                                              Eigen::Vector2d(nums[4], nums[5]));
    } else if (kind == "symmetry_demo") {
        require(nums.empty(), "field spec: symmetry_demo takes no parameters");
        f = std::make_unique<fields::SymmetryDemoField>();
    } else {
        throw ContractError("unknown field kind '" + kind +
                            "' (expected gl, gp, triple_well, or symmetry_demo)");
    }
    if (negate) {
        std::shared_ptr<const fields::VectorField> base = std::move(f);
        f = std::make_unique<fields::NegatedField>(base);
    }
    return f;
}

geometry::ConvexBody parse_body_spec(const std::string& spec) {
    const std::vector<std::string> tok = tokenize(spec);
    require(!tok.empty(), "empty body spec");
    const std::string kind = tok[0];
    const std::vector<double> nums = parse_numbers(tok, 1, "body spec");
    if (kind == "ball") {
        require(nums.size() == 1 || nums.size() == 2, "body spec: ball needs 'ball R [dim]'");
        return geometry::ConvexBody::ball(nums[0],
                                          nums.size() == 2 ? static_cast<int>(nums[1]) : 2);
    }
    if (kind == "ellipse" || kind == "ellipsoid") {
        require(!nums.empty(), "body spec: ellipse needs semi-axes, e.g. 'ellipse 2 1'");
        return geometry::ConvexBody::ellipsoid(to_vec(nums));
    }
    if (kind == "polygon" || kind == "triangle") {
        require(nums.size() >= 6 && nums.size() % 2 == 0,
                "body spec: polygon needs pairs 'polygon x1 y1 x2 y2 x3 y3 ...'");
        std::vector<Eigen::Vector2d> verts;
        for (size_t i = 0; i < nums.size(); i += 2) verts.emplace_back(nums[i], nums[i + 1]);
        return geometry::ConvexBody::polygon(std::move(verts));
    }
    if (kind == "halfspace") {
        require(nums.size() >= 2, "body spec: halfspace needs 'halfspace n1 ... nk L'");
        const std::vector<double> n(nums.begin(), nums.end() - 1);
        return geometry::ConvexBody::half_space(to_vec(n), nums.back());
    }
    throw ContractError("unknown body kind '" + kind +
                        "' (expected ball, ellipse, polygon, or halfspace)");
}

solver::BoundaryFn2D make_bc_2d(const std::string& name, const fields::VectorField& field,
                                double lo, double hi, const Table& params) {
    if (name == "radial_unit") {
        require(field.dimension() == 2, "radial_unit boundary data needs a planar field");
        return [](double x, double y) {
            const double r = std::hypot(x, y);
            require(r > 0.0, "radial_unit boundary data undefined at the origin");
            Vec v(2);
            v << x / r, y / r;
            return v;
        };
    }
    if (name == "three_phase") {
        const auto* tw = dynamic_cast<const fields::TripleWellGradientField*>(&field);
        require(tw != nullptr, "three_phase boundary data needs a triple_well field");
        const double cx = 0.5 * (lo + hi), cy = 0.5 * (lo + hi);
        const std::array<Eigen::Vector2d, 3> wells = {tw->well_a(), tw->well_b(), tw->well_c()};
        std::array<double, 3> angles{};
        for (int i = 0; i < 3; ++i) angles[i] = std::atan2(wells[i].y(), wells[i].x());
        return [=](double x, double y) {
            const double theta = std::atan2(y - cy, x - cx);
            int best = 0;
            double best_dist = std::numeric_limits<double>::infinity();
            for (int i = 0; i < 3; ++i) {
                double diff = std::fabs(theta - angles[i]);
                diff = std::min(diff, 2.0 * M_PI - diff);
                if (diff < best_dist) {
                    best_dist = diff;
                    best = i;
                }
            }
            Vec v(2);
            v << wells[best].x(), wells[best].y();
            return v;
        };
    }
    if (name == "symmetric_sine") {
        require(field.dimension() == 2, "symmetric_sine boundary data needs a planar field");
        const double amp = params.num_or("amp", 0.5);
        const double span = hi - lo;
        return [=](double x, double y) {
            const double s = amp * std::sin(M_PI * (x + y) / span);
            Vec v(2);
            v << s, s;
            return v;
        };
    }
    if (name == "constant") {
        const Vec value = to_vec(params.num_array("value"));
        require(value.size() == field.dimension(),
                "constant boundary data dimension mismatch with field");
        return [value](double, double) { return value; };
    }
    throw ContractError("unknown boundary generator '" + name +
                        "' (expected radial_unit, three_phase, symmetric_sine, or constant)");
}

namespace {

std::string utc_timestamp() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

certifier::CertifyOptions certify_options_from(const Table& t) {
    certifier::CertifyOptions o;
    o.margin_threshold = t.num_or("margin_threshold", o.margin_threshold);
    o.shell_inner = t.num_or("shell_inner", o.shell_inner);
    o.level_band = t.num_or("level_band", o.level_band);
    o.symmetry_band = t.num_or("symmetry_band", o.symmetry_band);
    o.refine_count = static_cast<int>(t.num_or("refine_count", o.refine_count));
    o.refine_budget = static_cast<int>(t.num_or("refine_budget", o.refine_budget));
    return o;
}

std::string cert_outcome(const certifier::Certificate& c) { return to_string(c.status); }

/// Boundary values must sit in the closed body before a confinement claim
/// makes sense; this is validated, not assumed.
void check_bc_in_body(const geometry::ConvexBody& body, const std::vector<Vec>& bc_values,
                      const std::string& task_name) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const Vec& v : bc_values) worst = std::max(worst, body.signed_distance(v));
    if (worst > 1e-9)
        throw ContractError(task_name + ": boundary data lies outside the body (max signed "
                                        "distance " +
                            std::to_string(worst) + ")");
}

} // namespace

RunResult run_scenario(const std::string& path, const RunOptions& opts) {
    const Document doc = parse_scenario_file(path);
    const std::filesystem::path scenario_dir = std::filesystem::path(path).parent_path();

    const std::string name =
        doc.root.str_or("name", std::filesystem::path(path).stem().string());
    const unsigned seed = static_cast<unsigned>(doc.root.num_or("seed", 0));

    std::string outdir = opts.output_dir;
    if (outdir.empty()) outdir = doc.root.str_or("output", "");
    if (outdir.empty()) {
        const char* env = std::getenv(kOutputEnvVar);
        outdir = env ? env : ".";
    }
    std::filesystem::create_directories(outdir);

    std::unique_ptr<fields::VectorField> field;
    if (doc.sections.count("field")) field = make_field(doc.sections.at("field"));
    std::optional<geometry::ConvexBody> body;
    if (doc.sections.count("body")) body = make_body(doc.sections.at("body"));

    auto need_field = [&]() -> const fields::VectorField& {
        require(field != nullptr, "scenario has no [field] section");
        return *field;
    };
    auto need_body = [&]() -> const geometry::ConvexBody& {
        require(body.has_value(), "scenario has no [body] section");
        return *body;
    };

    nlohmann::ordered_json report;
    report["scenario"] = name;
    report["version"] = kVersion;
    report["seed"] = seed;
    if (field) report["field"] = field->describe();
    if (body) report["body"] = body->describe();
    report["timestamp"] = utc_timestamp(); // the only run-dependent field
    report["tasks"] = nlohmann::ordered_json::array();

    std::map<std::string, solver::SolutionGrid> solutions;
    auto resolve_solution = [&](const Table& t) -> const solver::SolutionGrid& {
        if (t.has("load")) {
            const std::string file = (scenario_dir / t.str("load")).string();
            const std::string key = "load:" + file;
            if (!solutions.count(key)) solutions[key] = solver::load_csv(file);
            return solutions.at(key);
        }
        const std::string label = t.str_or("use", "solution");
        const auto it = solutions.find(label);
        require(it != solutions.end(),
                "monitor references unknown solution '" + label + "'");
        return it->second;
    };

    bool all_expected = true;
    for (size_t ti = 0; ti < doc.tasks.size(); ++ti) {
        const Table& t = doc.tasks[ti];
        const std::string kind = t.str("kind");
        const std::string expect = t.str_or("expect", "pass");
        const unsigned task_seed = static_cast<unsigned>(t.num_or("seed", seed));
        const int samples = static_cast<int>(t.num_or("samples", 10000));

        nlohmann::ordered_json entry;
        entry["kind"] = kind;
        if (t.has("name")) entry["name"] = t.str("name");
        entry["expect"] = expect;
        std::string outcome;

        if (kind == "certify_convex") {
            const certifier::Certificate c = certifier::certify_convex_condition(
                need_field(), need_body(), t.num_or("shell_outer", 2.0), samples, task_seed,
                certify_options_from(t));
            outcome = cert_outcome(c);
            entry["certificate"] = c.to_json();
        } else if (kind == "certify_halfspace") {
            const certifier::Certificate c = certifier::certify_halfspace(
                need_field(), to_vec(t.num_array("e")), t.num("level"),
                to_vec(t.num_array("box_lo")), to_vec(t.num_array("box_hi")), samples, task_seed,
                certify_options_from(t));
            outcome = cert_outcome(c);
            entry["certificate"] = c.to_json();
        } else if (kind == "certify_triangle") {
            const certifier::Certificate c = certifier::certify_triangle(
                need_field(), need_body(), samples, task_seed, certify_options_from(t));
            outcome = cert_outcome(c);
            entry["certificate"] = c.to_json();
        } else if (kind == "certify_symmetry") {
            const std::string variant = t.str_or("variant", "rotated_lemma");
            require(variant == "rotated_lemma" || variant == "as_stated",
                    "certify_symmetry variant must be rotated_lemma or as_stated");
            const certifier::Certificate c = certifier::certify_symmetry_condition(
                need_field(),
                variant == "as_stated" ? certifier::SymmetryVariant::AsStated
                                       : certifier::SymmetryVariant::RotatedLemma,
                to_vec(t.num_array_or("box_lo", {-3.0, -3.0})),
                to_vec(t.num_array_or("box_hi", {3.0, 3.0})), samples, task_seed,
                certify_options_from(t));
            outcome = cert_outcome(c);
            entry["certificate"] = c.to_json();
        } else if (kind == "anisotropic_margin") {
            const auto* gl = dynamic_cast<const fields::GinzburgLandauField*>(&need_field());
            require(gl != nullptr, "anisotropic_margin needs a gl field");
            const double margin =
                certifier::gl_anisotropic_margin(gl->a_diag(), to_vec(t.num_array("point")));
            outcome = margin > 0.0 ? "pass" : "fail";
            entry["margin"] = margin;
        } else if (kind == "solve_1d") {
            const double X = t.num_or("X", 20.0);
            const double lo = t.num_or("lo", -X), hi = t.num_or("hi", X);
            const int N = static_cast<int>(t.num("N"));
            solver::BoundaryData1D bc{to_vec(t.num_array("bc_left")),
                                      to_vec(t.num_array("bc_right"))};
            if (body) check_bc_in_body(*body, {bc.left, bc.right}, kind);
            solver::NewtonOptions nopts;
            nopts.tol = t.num_or("tol", nopts.tol);
            nopts.max_iters = static_cast<int>(t.num_or("max_iters", nopts.max_iters));
            const solver::SolutionGrid sol =
                solver::solve_bvp_1d(need_field(), lo, hi, bc, N, nopts);
            outcome = sol.converged ? "pass" : "fail";
            entry["solve"] = {{"converged", sol.converged},
                              {"iterations", sol.iterations},
                              {"residual_norm", sol.residual_norm},
                              {"N", sol.N}};
            const std::string label = t.str_or("name", "solution");
            if (t.has("save")) {
                const std::string file =
                    (std::filesystem::path(outdir) / t.str("save")).string();
                solver::save_csv(sol, file);
                entry["solve"]["csv"] = t.str("save");
            }
            solutions[label] = sol;
        } else if (kind == "solve_2d") {
            const double lo = t.num_or("lo", -5.0), hi = t.num_or("hi", 5.0);
            const int N = static_cast<int>(t.num("N"));
            const solver::BoundaryFn2D bc = make_bc_2d(t.str("bc"), need_field(), lo, hi, t);
            if (body) {
                std::vector<Vec> bvals;
                const double h = (hi - lo) / (N - 1);
                for (int i = 0; i < N; ++i) {
                    bvals.push_back(bc(lo + i * h, lo));
                    bvals.push_back(bc(lo + i * h, hi));
                    bvals.push_back(bc(lo, lo + i * h));
                    bvals.push_back(bc(hi, lo + i * h));
                }
                check_bc_in_body(*body, bvals, kind);
            }
            solver::FlowOptions fopts;
            fopts.tol = t.num_or("tol", fopts.tol);
            fopts.max_steps = static_cast<long>(t.num_or("max_steps", fopts.max_steps));
            fopts.dt = t.num_or("dt", fopts.dt);
            const solver::SolutionGrid sol =
                solver::solve_relax_2d(need_field(), lo, hi, bc, N, fopts);
            outcome = sol.converged ? "pass" : "fail";
            entry["solve"] = {{"converged", sol.converged},
                              {"iterations", sol.iterations},
                              {"residual_norm", sol.residual_norm},
                              {"N", sol.N}};
            const std::string label = t.str_or("name", "solution");
            if (t.has("save")) {
                const std::string file =
                    (std::filesystem::path(outdir) / t.str("save")).string();
                solver::save_csv(sol, file);
                entry["solve"]["csv"] = t.str("save");
            }
            solutions[label] = sol;
        } else if (kind == "monitor_confinement") {
            const solver::SolutionGrid& sol = resolve_solution(t);
            double tol = t.num_or("tol", -1.0);
            if (tol < 0.0) tol = t.num_or("kappa", 1.0) * sol.h() * sol.h();
            const monitors::MonitorReport rep =
                monitors::confinement_report(sol, need_body(), tol);
            outcome = rep.pass ? "pass" : "fail";
            entry["monitor"] = rep.to_json();
        } else if (kind == "monitor_strictness") {
            const solver::SolutionGrid& sol = resolve_solution(t);
            const monitors::MonitorReport rep =
                monitors::strictness_report(sol, need_body(), t.num_or("band", 0.0));
            outcome = rep.pass ? "pass" : "fail";
            if (t.has("expect_class") &&
                monitors::to_string(rep.classification) != t.str("expect_class"))
                outcome = "fail";
            entry["monitor"] = rep.to_json();
        } else if (kind == "monitor_p") {
            const solver::SolutionGrid& sol = resolve_solution(t);
            const monitors::MonitorReport rep = monitors::p_function_report(
                sol, t.num("C"), t.num("R"), t.num_or("tol", 1e-8));
            outcome = rep.pass ? "pass" : "fail";
            entry["monitor"] = rep.to_json();
        } else if (kind == "monitor_component") {
            const solver::SolutionGrid& sol = resolve_solution(t);
            const monitors::MonitorReport rep = monitors::component_bound_report(
                sol, to_vec(t.num_array("e")), t.num("level"), t.num_or("tol", 1e-9));
            outcome = rep.pass ? "pass" : "fail";
            entry["monitor"] = rep.to_json();
        } else if (kind == "monitor_symmetry") {
            const solver::SolutionGrid& sol = resolve_solution(t);
            const monitors::MonitorReport rep =
                monitors::symmetry_report(sol, t.num_or("tol", 1e-8));
            outcome = rep.pass ? "pass" : "fail";
            entry["monitor"] = rep.to_json();
        } else {
            throw ParseError("unknown task kind '" + kind + "'", t.line_of("kind"));
        }

        const bool ok = expect == "none" || outcome == expect;
        entry["outcome"] = outcome;
        entry["ok"] = ok;
        all_expected = all_expected && ok;
        report["tasks"].push_back(std::move(entry));
        if (!opts.quiet)
            std::cout << "[" << name << "] task " << (ti + 1) << " " << kind << ": " << outcome
                      << (ok ? "" : " (expected " + expect + ")") << "\n";
    }

    report["all_expected"] = all_expected;

    const std::string report_path =
        (std::filesystem::path(outdir) / (name + "_report.json")).string();
    std::ofstream out(report_path);
    if (!out) throw NumericsError("cannot write report to '" + report_path + "'");
    out << report.dump(2) << "\n";

    RunResult result;
    result.report = std::move(report);
    result.all_expected = all_expected;
    result.report_path = report_path;
    return result;
}

} // namespace confine::scenario
