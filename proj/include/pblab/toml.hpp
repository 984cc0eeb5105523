// toml.hpp — reader for the flat TOML subset used by scenario and
// experiment config files.
//
// Supported: `key = value` lines, strings in double quotes, numbers,
// booleans, flat arrays of numbers or strings, `#` comments, and a single
// optional [section] header (ignored).  That covers every config this
// project writes or documents; it is not a general TOML parser.

#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pblab {

struct TomlError : std::runtime_error {
    explicit TomlError(const std::string& what) : std::runtime_error(what) {}
};

struct TomlValue {
    enum class Kind { String, Number, Boolean, NumberArray, StringArray } kind;
    std::string str;
    double num = 0.0;
    bool boolean = false;
    std::vector<double> nums;
    std::vector<std::string> strs;
};

class TomlTable {
public:
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    const TomlValue& at(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw TomlError("missing key '" + key + "'");
        return it->second;
    }

    std::string get_string(const std::string& key) const {
        const auto& v = at(key);
        if (v.kind != TomlValue::Kind::String)
            throw TomlError("key '" + key + "' is not a string");
        return v.str;
    }

    double get_number(const std::string& key) const {
        const auto& v = at(key);
        if (v.kind != TomlValue::Kind::Number)
            throw TomlError("key '" + key + "' is not a number");
        return v.num;
    }

    bool get_bool(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (v.kind != TomlValue::Kind::Boolean)
            throw TomlError("key '" + key + "' is not a boolean");
        return v.boolean;
    }

    std::vector<double> get_numbers(const std::string& key) const {
        const auto& v = at(key);
        if (v.kind == TomlValue::Kind::Number) return {v.num};
        if (v.kind != TomlValue::Kind::NumberArray)
            throw TomlError("key '" + key + "' is not a number array");
        return v.nums;
    }

    std::string get_string_or(const std::string& key, const std::string& fallback) const {
        return has(key) ? get_string(key) : fallback;
    }

    double get_number_or(const std::string& key, double fallback) const {
        return has(key) ? get_number(key) : fallback;
    }

    void set(const std::string& key, TomlValue v) { values_[key] = std::move(v); }

    const std::map<std::string, TomlValue>& entries() const { return values_; }

    static TomlTable parse(std::istream& in) {
        TomlTable table;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string trimmed = strip(line);
            if (trimmed.empty() || trimmed[0] == '#') continue;
            if (trimmed[0] == '[') continue;  // section headers carry no data here
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw TomlError("line " + std::to_string(lineno) + ": expected key = value");
            const std::string key = strip(trimmed.substr(0, eq));
            const std::string raw = strip(trimmed.substr(eq + 1));
            if (key.empty() || raw.empty())
                throw TomlError("line " + std::to_string(lineno) + ": empty key or value");
            table.values_[key] = parse_value(raw, lineno);
        }
        return table;
    }

    static TomlTable parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw TomlError("cannot open '" + path + "'");
        return parse(in);
    }

    static TomlTable parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

private:
    static std::string strip(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    static TomlValue parse_value(const std::string& raw, int lineno) {
        TomlValue v;
        if (raw.front() == '"') {
            if (raw.size() < 2 || raw.back() != '"')
                throw TomlError("line " + std::to_string(lineno) + ": unterminated string");
            v.kind = TomlValue::Kind::String;
            v.str = raw.substr(1, raw.size() - 2);
            return v;
        }
        if (raw == "true" || raw == "false") {
            v.kind = TomlValue::Kind::Boolean;
            v.boolean = raw == "true";
            return v;
        }
        if (raw.front() == '[') {
            if (raw.back() != ']')
                throw TomlError("line " + std::to_string(lineno) + ": unterminated array");
            const std::string body = raw.substr(1, raw.size() - 2);
            std::vector<std::string> items;
            std::string cur;
            for (char c : body) {
                if (c == ',') {
                    items.push_back(strip(cur));
                    cur.clear();
                } else {
                    cur += c;
                }
            }
            if (!strip(cur).empty()) items.push_back(strip(cur));
            const bool strings = !items.empty() && items.front().front() == '"';
            v.kind = strings ? TomlValue::Kind::StringArray : TomlValue::Kind::NumberArray;
            for (const auto& item : items) {
                if (strings) {
                    if (item.size() < 2 || item.front() != '"' || item.back() != '"')
                        throw TomlError("line " + std::to_string(lineno) + ": bad string item");
                    v.strs.push_back(item.substr(1, item.size() - 2));
                } else {
                    v.nums.push_back(to_number(item, lineno));
                }
            }
            return v;
        }
        v.kind = TomlValue::Kind::Number;
        v.num = to_number(raw, lineno);
        return v;
    }

    static double to_number(const std::string& s, int lineno) {
        try {
            std::size_t used = 0;
            const double x = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return x;
        } catch (const std::exception&) {
            throw TomlError("line " + std::to_string(lineno) + ": bad number '" + s + "'");
        }
    }

    std::map<std::string, TomlValue> values_;
};

}  // namespace pblab
