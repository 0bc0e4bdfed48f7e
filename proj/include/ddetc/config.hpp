#pragma once

#include "ddetc/linalg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ddetc {

/// Flat `block.key = value` configuration document.
///
/// One assignment per line; `#` starts a comment; blank lines are ignored.
/// Values are numbers, words, booleans (true/false) or matrix literals in
/// the form `[a b; c d]` (commas also separate entries). A scalar where a
/// matrix is expected means that multiple of the identity.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text, const std::string& origin = "<config>");
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long get_int(const std::string& key, long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    std::optional<std::string> string_opt(const std::string& key) const;
    std::optional<double> double_opt(const std::string& key) const;

    // `identity_size` > 0 lets a scalar stand for that multiple of I.
    Matrix get_matrix(const std::string& key, Eigen::Index identity_size = 0) const;
    // Accepts a row or a column literal.
    Vector get_vector(const std::string& key) const;

    // Throws on keys outside `known`.
    void require_known(const std::vector<std::string>& known) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    const std::string& raw(const std::string& key) const;
    std::map<std::string, std::string> values_;
    std::string origin_;
};

Matrix parse_matrix_literal(const std::string& text);
std::string format_matrix_literal(const Matrix& M);

}  // namespace ddetc
