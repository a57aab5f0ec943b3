#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace petic::config {

// Minimal structured-text config: [section.sub] headers, key = value pairs,
// '#' comments, values are integers, floats, booleans, quoted strings,
// (possibly nested, possibly multi-line) arrays and inline tables
// { k = v, ... }. Unknown keys are the caller's problem: every getter marks
// its key consumed and Section::finish() rejects leftovers, which gives the
// strict schema the scenario loader needs.

struct Value;
using Array = std::vector<Value>;

struct Table {
    // insertion order preserved for deterministic serialization
    std::vector<std::pair<std::string, Value>> entries;
    int line = -1;

    const Value* find(const std::string& key) const;
};

struct Value {
    std::variant<int64_t, double, bool, std::string, Array, std::shared_ptr<Table>> data;
    int line = -1;

    bool is_int() const { return std::holds_alternative<int64_t>(data); }
    bool is_number() const { return is_int() || std::holds_alternative<double>(data); }
    bool is_string() const { return std::holds_alternative<std::string>(data); }
    bool is_array() const { return std::holds_alternative<Array>(data); }
    bool is_table() const { return std::holds_alternative<std::shared_ptr<Table>>(data); }
};

// Parses the whole document into a root table; section headers become nested
// tables. Throws ConfigError with the line number on malformed input.
Table parse(const std::string& text, const std::string& origin = "<config>");

// Typed access with consumption tracking.
class Section {
public:
    Section(const Table* table, std::string path);

    bool has(const std::string& key) const;

    double get_double(const std::string& key) const;
    double get_double_or(const std::string& key, double fallback) const;
    int64_t get_int(const std::string& key) const;
    int64_t get_int_or(const std::string& key, int64_t fallback) const;
    std::string get_string(const std::string& key) const;
    std::string get_string_or(const std::string& key, const std::string& fallback) const;
    Eigen::VectorXd get_vector(const std::string& key) const;
    Eigen::MatrixXd get_matrix(const std::string& key) const; // row-major nested arrays
    const Value& get_raw(const std::string& key) const;

    std::optional<Section> subsection(const std::string& key) const;

    // Rejects any key that was never consumed.
    void finish() const;

    const std::string& path() const { return path_; }

private:
    const Value& require(const std::string& key) const;

    const Table* table_;
    std::string path_;
    mutable std::vector<std::string> consumed_;
};

} // namespace petic::config
