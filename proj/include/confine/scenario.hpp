#pragma once

#include "confine/common.hpp"
#include "confine/fields.hpp"
#include "confine/geometry.hpp"
#include "confine/solver.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace confine::scenario {

inline constexpr const char* kVersion = "0.1.0";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutputEnvVar = "CONFINE_OUT_DIR";

/// Scenario file problem (syntax or schema) with the offending line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

/// One value from a scenario file: string, number, boolean, or (possibly
/// nested) array.
struct Value {
    enum class Kind { Str, Num, Bool, Arr };
    Kind kind = Kind::Num;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<Value> arr;
};

/// One section of key/value pairs. Typed accessors throw ParseError naming
/// the key and its line when the type or presence does not match.
struct Table {
    std::string name;
    int line = 0;
    std::map<std::string, Value> kv;
    std::map<std::string, int> key_lines;

    bool has(const std::string& key) const { return kv.count(key) > 0; }
    const Value& raw(const std::string& key) const;
    int line_of(const std::string& key) const;

    double num(const std::string& key) const;
    double num_or(const std::string& key, double fallback) const;
    std::string str(const std::string& key) const;
    std::string str_or(const std::string& key, const std::string& fallback) const;
    bool bool_or(const std::string& key, bool fallback) const;
    std::vector<double> num_array(const std::string& key) const;
    std::vector<double> num_array_or(const std::string& key,
                                     const std::vector<double>& fallback) const;
};

/// Parsed scenario file: root keys, the optional [field] and [body]
/// sections, and the ordered [[task]] list.
struct Document {
    Table root;
    std::map<std::string, Table> sections;
    std::vector<Table> tasks;
};

/// Line-based parser for the scenario format: `key = value` pairs, [section]
/// and [[task]] headers, `#` comments, quoted strings, numbers, booleans,
/// and single-line (nested) arrays.
Document parse_scenario_text(const std::string& text);
Document parse_scenario_file(const std::string& path);

/// Builds a field from a [field] table (kind = gl | triple_well | gp |
/// symmetry_demo | polynomial, plus `negate = true` for sign-flipped
/// controls).
std::unique_ptr<fields::VectorField> make_field(const Table& t);

/// Builds a body from a [body] table (kind = ball | ellipse | polygon |
/// halfspace).
geometry::ConvexBody make_body(const Table& t);

/// Compact command-line specs, e.g. "gl 2 1", "gp 1 1 2 1",
/// "triple_well 0 1 0 -1 -1 0", "symmetry_demo", with optional leading
/// "negated"; bodies: "ball R [dim]", "ellipse a1 a2 ...",
/// "polygon x1 y1 x2 y2 x3 y3 ...", "halfspace n1 .. nk L".
std::unique_ptr<fields::VectorField> parse_field_spec(const std::string& spec);
geometry::ConvexBody parse_body_spec(const std::string& spec);

/// Named boundary-value generators for the 2D solver:
///   radial_unit     u(x, y) = (x, y)/|(x, y)|
///   three_phase     nearest triple-well minimum by boundary angle
///   symmetric_sine  u1 = u2 = amp * sin(pi (x + y)/(hi - lo))
///   constant        fixed vector from `value`
solver::BoundaryFn2D make_bc_2d(const std::string& name, const fields::VectorField& field,
                                double lo, double hi, const Table& params);

struct RunOptions {
    std::string output_dir; // overrides the scenario's `output` key when set
    bool quiet = false;     // suppress the per-task progress lines
};

struct RunResult {
    nlohmann::ordered_json report;
    bool all_expected = true;
    std::string report_path;
};

/// Executes the tasks of a scenario file in order, writes the JSON report
/// (and any requested CSV grids) into the output directory, and returns the
/// report. Reports are byte-identical across reruns except for the single
/// isolated `timestamp` field.
RunResult run_scenario(const std::string& path, const RunOptions& opts = {});

} // namespace confine::scenario
