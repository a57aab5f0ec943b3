#include "petic/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "petic/errors.hpp"

namespace petic::config {

namespace {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1;
    std::string origin;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws_and_comments(bool cross_lines) {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') take();
            } else if (c == ' ' || c == '\t' || c == '\r') {
                take();
            } else if (c == '\n' && cross_lines) {
                take();
            } else {
                break;
            }
        }
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(origin, msg, line);
    }
};

bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string parse_bare_key(Cursor& cur) {
    std::string key;
    while (!cur.eof() && is_bare_char(cur.peek())) key += cur.take();
    if (key.empty()) cur.fail("expected a key");
    return key;
}

Value parse_value(Cursor& cur);

Value parse_number(Cursor& cur) {
    const int line = cur.line;
    std::string tok;
    while (!cur.eof()) {
        char c = cur.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' ||
            c == 'e' || c == 'E' || c == '_') {
            if (c != '_') tok += c;
            cur.take();
        } else {
            break;
        }
    }
    if (tok.empty()) cur.fail("expected a number");
    const bool integral = tok.find_first_of(".eE") == std::string::npos;
    if (integral) {
        int64_t v = 0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || p != tok.data() + tok.size())
            cur.fail("malformed integer '" + tok + "'");
        return Value{v, line};
    }
    try {
        size_t idx = 0;
        double v = std::stod(tok, &idx);
        if (idx != tok.size()) cur.fail("malformed number '" + tok + "'");
        return Value{v, line};
    } catch (const std::exception&) {
        cur.fail("malformed number '" + tok + "'");
    }
}

Value parse_string(Cursor& cur) {
    const int line = cur.line;
    cur.take(); // opening quote
    std::string out;
    while (true) {
        if (cur.eof()) cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"') break;
        if (c == '\n') cur.fail("newline inside string");
        if (c == '\\') {
            if (cur.eof()) cur.fail("dangling escape");
            char e = cur.take();
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: cur.fail("unsupported escape sequence");
            }
        } else {
            out += c;
        }
    }
    return Value{out, line};
}

Value parse_array(Cursor& cur) {
    const int line = cur.line;
    cur.take(); // '['
    Array items;
    while (true) {
        cur.skip_ws_and_comments(true); // arrays may span lines
        if (cur.eof()) cur.fail("unterminated array");
        if (cur.peek() == ']') {
            cur.take();
            break;
        }
        items.push_back(parse_value(cur));
        cur.skip_ws_and_comments(true);
        if (cur.eof()) cur.fail("unterminated array");
        if (cur.peek() == ',') {
            cur.take();
        } else if (cur.peek() != ']') {
            cur.fail("expected ',' or ']' in array");
        }
    }
    return Value{std::move(items), line};
}

Value parse_inline_table(Cursor& cur) {
    const int line = cur.line;
    cur.take(); // '{'
    auto table = std::make_shared<Table>();
    table->line = line;
    while (true) {
        cur.skip_ws_and_comments(false);
        if (cur.eof()) cur.fail("unterminated inline table");
        if (cur.peek() == '}') {
            cur.take();
            break;
        }
        std::string key = parse_bare_key(cur);
        cur.skip_ws_and_comments(false);
        if (cur.eof() || cur.take() != '=') cur.fail("expected '=' in inline table");
        cur.skip_ws_and_comments(false);
        table->entries.emplace_back(key, parse_value(cur));
        cur.skip_ws_and_comments(false);
        if (!cur.eof() && cur.peek() == ',') cur.take();
    }
    return Value{table, line};
}

Value parse_value(Cursor& cur) {
    cur.skip_ws_and_comments(false);
    if (cur.eof()) cur.fail("expected a value");
    char c = cur.peek();
    if (c == '"') return parse_string(cur);
    if (c == '[') return parse_array(cur);
    if (c == '{') return parse_inline_table(cur);
    if (std::isalpha(static_cast<unsigned char>(c))) {
        const int line = cur.line;
        std::string word = parse_bare_key(cur);
        if (word == "true") return Value{true, line};
        if (word == "false") return Value{false, line};
        cur.fail("unexpected token '" + word + "' (strings must be quoted)");
    }
    return parse_number(cur);
}

Table* descend(Table& root, const std::string& dotted, int line, const std::string& origin) {
    Table* current = &root;
    std::stringstream ss(dotted);
    std::string part;
    while (std::getline(ss, part, '.')) {
        if (part.empty()) throw ConfigError(origin, "empty section-name component", line);
        Value* found = nullptr;
        for (auto& [k, v] : current->entries)
            if (k == part) found = &v;
        if (found) {
            if (!found->is_table())
                throw ConfigError(origin, "section '" + dotted + "' collides with a key", line);
            current = std::get<std::shared_ptr<Table>>(found->data).get();
        } else {
            auto child = std::make_shared<Table>();
            child->line = line;
            current->entries.emplace_back(part, Value{child, line});
            current = child.get();
        }
    }
    return current;
}

} // namespace

const Value* Table::find(const std::string& key) const {
    for (const auto& [k, v] : entries)
        if (k == key) return &v;
    return nullptr;
}

Table parse(const std::string& text, const std::string& origin) {
    Table root;
    Cursor cur{text, 0, 1, origin};
    Table* section = &root;
    while (true) {
        cur.skip_ws_and_comments(true);
        if (cur.eof()) break;
        char c = cur.peek();
        if (c == '[') {
            cur.take();
            std::string name;
            while (!cur.eof() && cur.peek() != ']' && cur.peek() != '\n')
                name += cur.take();
            if (cur.eof() || cur.peek() != ']') cur.fail("unterminated section header");
            cur.take();
            // trim
            name.erase(0, name.find_first_not_of(" \t"));
            name.erase(name.find_last_not_of(" \t") + 1);
            if (name.empty()) cur.fail("empty section name");
            section = descend(root, name, cur.line, origin);
        } else {
            const int line = cur.line;
            std::string key = parse_bare_key(cur);
            cur.skip_ws_and_comments(false);
            if (cur.eof() || cur.take() != '=') cur.fail("expected '=' after key '" + key + "'");
            Value v = parse_value(cur);
            v.line = v.line < 0 ? line : v.line;
            if (section->find(key))
                throw ConfigError(origin, "duplicate key '" + key + "'", line);
            section->entries.emplace_back(key, std::move(v));
            cur.skip_ws_and_comments(false);
            if (!cur.eof() && cur.peek() != '\n') cur.fail("trailing characters after value");
        }
    }
    if (root.entries.empty()) throw ConfigError(origin, "empty config", 1);
    return root;
}

Section::Section(const Table* table, std::string path) : table_(table), path_(std::move(path)) {}

bool Section::has(const std::string& key) const {
    return table_ != nullptr && table_->find(key) != nullptr;
}

const Value& Section::require(const std::string& key) const {
    if (!table_) throw ConfigError(path_, "missing section");
    const Value* v = table_->find(key);
    if (!v) throw ConfigError(path_ + " " + key, "missing required key");
    consumed_.push_back(key);
    return *v;
}

double Section::get_double(const std::string& key) const {
    const Value& v = require(key);
    if (v.is_int()) return static_cast<double>(std::get<int64_t>(v.data));
    if (std::holds_alternative<double>(v.data)) return std::get<double>(v.data);
    throw ConfigError(path_ + " " + key, "expected a number", v.line);
}

double Section::get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int64_t Section::get_int(const std::string& key) const {
    const Value& v = require(key);
    if (!v.is_int()) throw ConfigError(path_ + " " + key, "expected an integer", v.line);
    return std::get<int64_t>(v.data);
}

int64_t Section::get_int_or(const std::string& key, int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::string Section::get_string(const std::string& key) const {
    const Value& v = require(key);
    if (!v.is_string()) throw ConfigError(path_ + " " + key, "expected a string", v.line);
    return std::get<std::string>(v.data);
}

std::string Section::get_string_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

namespace {
double number_of(const Value& v, const std::string& where) {
    if (v.is_int()) return static_cast<double>(std::get<int64_t>(v.data));
    if (std::holds_alternative<double>(v.data)) return std::get<double>(v.data);
    throw ConfigError(where, "expected a number", v.line);
}
} // namespace

Eigen::VectorXd Section::get_vector(const std::string& key) const {
    const Value& v = require(key);
    if (!v.is_array()) throw ConfigError(path_ + " " + key, "expected an array", v.line);
    const Array& arr = std::get<Array>(v.data);
    Eigen::VectorXd out(static_cast<Eigen::Index>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = number_of(arr[i], path_ + " " + key);
    return out;
}

Eigen::MatrixXd Section::get_matrix(const std::string& key) const {
    const Value& v = require(key);
    if (!v.is_array()) throw ConfigError(path_ + " " + key, "expected a nested array", v.line);
    const Array& rows = std::get<Array>(v.data);
    if (rows.empty()) throw ConfigError(path_ + " " + key, "matrix must not be empty", v.line);
    Eigen::Index ncols = -1;
    Eigen::MatrixXd out;
    for (size_t r = 0; r < rows.size(); ++r) {
        if (!rows[r].is_array())
            throw ConfigError(path_ + " " + key, "matrix rows must be arrays", rows[r].line);
        const Array& row = std::get<Array>(rows[r].data);
        if (ncols < 0) {
            ncols = static_cast<Eigen::Index>(row.size());
            out.resize(static_cast<Eigen::Index>(rows.size()), ncols);
        }
        if (static_cast<Eigen::Index>(row.size()) != ncols)
            throw ConfigError(path_ + " " + key, "ragged matrix rows", rows[r].line);
        for (size_t c = 0; c < row.size(); ++c)
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                number_of(row[c], path_ + " " + key);
    }
    return out;
}

const Value& Section::get_raw(const std::string& key) const { return require(key); }

std::optional<Section> Section::subsection(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    const Value& v = require(key);
    if (!v.is_table()) throw ConfigError(path_ + " " + key, "expected a section", v.line);
    return Section(std::get<std::shared_ptr<Table>>(v.data).get(),
                   path_.empty() ? "[" + key + "]" : path_ + "." + key);
}

void Section::finish() const {
    if (!table_) return;
    for (const auto& [k, v] : table_->entries) {
        if (std::find(consumed_.begin(), consumed_.end(), k) == consumed_.end())
            throw ConfigError(path_, "unknown key '" + k + "'", v.line);
    }
}

} // namespace petic::config
