#include "ddetc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddetc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (ec != std::errc() || ptr != end || t.empty()) throw Error("bad number '" + t + "' for " + what);
    return v;
}

}  // namespace

Matrix parse_matrix_literal(const std::string& text) {
    std::string t = trim(text);
    if (t.empty()) throw Error("empty matrix literal");
    if (t.front() != '[') {
        Matrix M(1, 1);
        M(0, 0) = to_double(t, "matrix literal");
        return M;
    }
    if (t.back() != ']') throw Error("unterminated matrix literal '" + t + "'");
    t = t.substr(1, t.size() - 2);
    std::replace(t.begin(), t.end(), ',', ' ');
    std::vector<std::vector<double>> rows;
    std::stringstream rs(t);
    std::string row;
    while (std::getline(rs, row, ';')) {
        std::stringstream es(row);
        std::vector<double> r;
        std::string tok;
        while (es >> tok) r.push_back(to_double(tok, "matrix literal"));
        if (r.empty()) throw Error("empty row in matrix literal");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw Error("empty matrix literal");
    Matrix M(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw Error("ragged matrix literal");
        for (std::size_t j = 0; j < rows[i].size(); ++j) M(i, j) = rows[i][j];
    }
    return M;
}

std::string format_matrix_literal(const Matrix& M) {
    std::string out = "[";
    char buf[32];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        if (i) out += "; ";
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out += ' ';
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            out += buf;
        }
    }
    return out + "]";
}

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
    KeyValueConfig cfg;
    cfg.origin_ = origin;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(origin + ":" + std::to_string(lineno) + ": empty key or value");
        if (cfg.values_.count(key)) throw Error(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

const std::string& KeyValueConfig::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw Error("missing config key '" + key + "'");
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? raw(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? to_double(raw(key), key) : fallback;
}

long KeyValueConfig::get_int(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const double v = to_double(raw(key), key);
    if (v != static_cast<double>(static_cast<long>(v))) throw Error("expected an integer for " + key);
    return static_cast<long>(v);
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string& v = raw(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error("expected a boolean for " + key);
}

std::optional<std::string> KeyValueConfig::string_opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return raw(key);
}

std::optional<double> KeyValueConfig::double_opt(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return to_double(raw(key), key);
}

Matrix KeyValueConfig::get_matrix(const std::string& key, Eigen::Index identity_size) const {
    Matrix M = parse_matrix_literal(raw(key));
    if (identity_size > 0 && M.size() == 1) return M(0, 0) * Matrix::Identity(identity_size, identity_size);
    return M;
}

Vector KeyValueConfig::get_vector(const std::string& key) const {
    Matrix M = parse_matrix_literal(raw(key));
    if (M.rows() != 1 && M.cols() != 1) throw Error("expected a vector for " + key);
    return Eigen::Map<const Vector>(M.data(), M.size());
}

void KeyValueConfig::require_known(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : values_)
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw Error(origin_ + ": unknown config key '" + key + "'");
}

}  // namespace ddetc
