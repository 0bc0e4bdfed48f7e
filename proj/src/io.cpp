// Dataset CSV and design-report JSON persistence.
#include "ddetc/pipeline.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace ddetc {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(row);
    }
    return json{{"rows", M.rows()}, {"cols", M.cols()}, {"data", rows}};
}

Matrix matrix_from(const json& j) {
    const auto r = j.at("rows").get<Eigen::Index>();
    const auto c = j.at("cols").get<Eigen::Index>();
    Matrix M(r, c);
    const auto& data = j.at("data");
    if (static_cast<Eigen::Index>(data.size()) != r) throw Error("matrix row count mismatch in design report");
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(data[i].size()) != c) throw Error("matrix column count mismatch in design report");
        for (Eigen::Index j2 = 0; j2 < c; ++j2) M(i, j2) = data[i][j2].get<double>();
    }
    return M;
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> opt_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json spec_to_json(const TriggerSpec& spec) {
    json j = std::visit(
        overloaded{
            [](const rules::StaticRelative& r) { return json{{"sigma", r.sigma}}; },
            [](const rules::Mixed& r) { return json{{"sigma", r.sigma}, {"nu", r.nu}}; },
            [](const rules::MixedSquared& r) { return json{{"sigma", r.sigma}, {"nu", r.nu}}; },
            [](const rules::TimeRegularized& r) { return json{{"sigma", r.sigma}, {"tau_d", r.tau_d}}; },
            [](const rules::Combined& r) {
                return json{{"sigma1", r.sigma1}, {"tau_d", r.tau_d}, {"sigma2", r.sigma2}, {"nu", r.nu}};
            },
            [](const rules::QuadraticNoiseFree& r) { return json{{"PsiTilde", to_json(r.PsiTilde)}}; },
            [](const rules::QuadraticNoisy& r) {
                return json{{"PsiTilde", to_json(r.PsiTilde)}, {"tau_bar_d", r.tau_bar_d}, {"nu", r.nu}};
            },
            [](const rules::DynamicNoiseFree& r) {
                return json{{"PsiTilde", to_json(r.PsiTilde)}, {"lambda", r.lambda}, {"theta", r.theta}, {"eta0", r.eta0}};
            },
            [](const rules::DynamicNoisy& r) {
                return json{{"PsiTilde", to_json(r.PsiTilde)}, {"lambda", r.lambda}, {"theta", r.theta},
                            {"nu", r.nu},       {"tau_bar_d", r.tau_bar_d}, {"eta0", r.eta0}};
            },
            [](const rules::LyapThresholdNoiseFree& r) {
                return json{{"varsigma", r.varsigma}, {"rho1", r.rho1}, {"S", to_json(r.S)}, {"eta0", opt(r.eta0)}};
            },
            [](const rules::LyapThresholdNoisy& r) {
                return json{{"varsigma_d", r.varsigma_d}, {"nu", r.nu}, {"tau_d", r.tau_d}, {"S", to_json(r.S)},
                            {"eta0", opt(r.eta0)}};
            },
        },
        spec);
    j["rule"] = rule_name(spec);
    return j;
}

TriggerSpec spec_from_json(const json& j) {
    const std::string name = j.at("rule").get<std::string>();
    auto d = [&](const char* k) { return j.at(k).get<double>(); };
    if (name == "static-relative") return rules::StaticRelative{d("sigma")};
    if (name == "mixed") return rules::Mixed{d("sigma"), d("nu")};
    if (name == "mixed-squared") return rules::MixedSquared{d("sigma"), d("nu")};
    if (name == "time-regularized") return rules::TimeRegularized{d("sigma"), d("tau_d")};
    if (name == "combined") return rules::Combined{d("sigma1"), d("tau_d"), d("sigma2"), d("nu")};
    if (name == "quadratic") return rules::QuadraticNoiseFree{matrix_from(j.at("PsiTilde"))};
    if (name == "quadratic-noisy") return rules::QuadraticNoisy{matrix_from(j.at("PsiTilde")), d("tau_bar_d"), d("nu")};
    if (name == "dynamic")
        return rules::DynamicNoiseFree{matrix_from(j.at("PsiTilde")), d("lambda"), d("theta"), d("eta0")};
    if (name == "dynamic-noisy")
        return rules::DynamicNoisy{matrix_from(j.at("PsiTilde")), d("lambda"), d("theta"),
                                   d("nu"), d("tau_bar_d"), d("eta0")};
    if (name == "lyap-threshold")
        return rules::LyapThresholdNoiseFree{d("varsigma"), d("rho1"), matrix_from(j.at("S")), opt_from(j.at("eta0"))};
    if (name == "lyap-threshold-noisy")
        return rules::LyapThresholdNoisy{d("varsigma_d"), d("nu"), d("tau_d"), matrix_from(j.at("S")),
                                         opt_from(j.at("eta0"))};
    throw Error("unknown rule '" + name + "'");
}

json result_to_json(const TriggerDesignResult& r) {
    json j{{"sigma", r.sigma},       {"sigma1", r.sigma1},     {"sigma2", r.sigma2},
           {"mu", r.mu},             {"eps", r.eps},           {"gamma", r.gamma},
           {"rho1", r.rho1},         {"varsigma", r.varsigma}, {"varsigma_d", r.varsigma_d},
           {"nu", r.nu},             {"residual", r.residual}, {"tau", r.tau.tau},
           {"tau_bar", r.tau.tau_bar}, {"tau_d", r.tau.tau_d}, {"tau_m", opt(r.tau.tau_m)}};
    if (r.PsiTilde.size()) j["PsiTilde"] = to_json(r.PsiTilde);
    return j;
}

TriggerDesignResult result_from_json(const json& j) {
    TriggerDesignResult r;
    r.sigma = j.at("sigma");
    r.sigma1 = j.at("sigma1");
    r.sigma2 = j.at("sigma2");
    r.mu = j.at("mu");
    r.eps = j.at("eps");
    r.gamma = j.at("gamma");
    r.rho1 = j.at("rho1");
    r.varsigma = j.at("varsigma");
    r.varsigma_d = j.at("varsigma_d");
    r.nu = j.at("nu");
    r.residual = j.at("residual");
    r.tau.tau = j.at("tau");
    r.tau.tau_bar = j.at("tau_bar");
    r.tau.tau_d = j.at("tau_d");
    r.tau.tau_m = opt_from(j.at("tau_m"));
    if (j.contains("PsiTilde")) r.PsiTilde = matrix_from(j.at("PsiTilde"));
    return r;
}

json params_to_json(const RuleParams& p) {
    return json{{"name", p.name},
                {"nu", p.nu},
                {"lambda", p.lambda},
                {"theta", p.theta},
                {"eta0", p.eta0},
                {"lyap_eta0", opt(p.lyap_eta0)},
                {"varsigma", p.varsigma},
                {"varsigma_d_margin", p.varsigma_d_margin},
                {"tau_bar_d_zero", p.tau_bar_d_zero},
                {"gamma", opt(p.gamma)},
                {"maximize", p.maximize}};
}

RuleParams params_from_json(const json& j) {
    RuleParams p;
    p.name = j.at("name");
    p.nu = j.at("nu");
    p.lambda = j.at("lambda");
    p.theta = j.at("theta");
    p.eta0 = j.at("eta0");
    p.lyap_eta0 = opt_from(j.at("lyap_eta0"));
    p.varsigma = j.at("varsigma");
    p.varsigma_d_margin = j.at("varsigma_d_margin");
    p.tau_bar_d_zero = j.at("tau_bar_d_zero");
    p.gamma = opt_from(j.at("gamma"));
    p.maximize = j.at("maximize");
    return p;
}

json norms_to_json(const DesignNorms& n) {
    return json{{"X1G", n.X1G}, {"X1L", n.X1L}, {"X1V0", n.X1V0}, {"G", n.G},         {"L", n.L},
                {"V0", n.V0},   {"Delta", n.Delta}, {"alpha", n.alpha}, {"c_A", n.c_A}, {"c_Phi", n.c_Phi},
                {"c_e", n.c_e}, {"omega1", n.omega1}, {"omega2", n.omega2}, {"omega3", n.omega3}};
}

DesignNorms norms_from_json(const json& j) {
    DesignNorms n;
    n.X1G = j.at("X1G");
    n.X1L = j.at("X1L");
    n.X1V0 = j.at("X1V0");
    n.G = j.at("G");
    n.L = j.at("L");
    n.V0 = j.at("V0");
    n.Delta = j.at("Delta");
    n.alpha = j.at("alpha");
    n.c_A = j.at("c_A");
    n.c_Phi = j.at("c_Phi");
    n.c_e = j.at("c_e");
    n.omega1 = j.at("omega1");
    n.omega2 = j.at("omega2");
    n.omega3 = j.at("omega3");
    return n;
}

}  // namespace

void write_dataset_csv(std::ostream& os, const DataMatrices& dm) {
    os << "# ddetc dataset\n";
    os << "# Ts=" << fmt(dm.Ts) << "\n";
    os << "# mode=" << to_string(dm.mode) << "\n";
    os << "# n=" << dm.n() << "\n";
    os << "# m=" << dm.m() << "\n";
    os << "k";
    for (Eigen::Index i = 1; i <= dm.m(); ++i) os << ",u0_" << i;
    for (Eigen::Index i = 1; i <= dm.n(); ++i) os << ",x0_" << i;
    for (Eigen::Index i = 1; i <= dm.n(); ++i) os << ",x1_" << i;
    os << "\n";
    for (Eigen::Index k = 0; k < dm.T(); ++k) {
        os << k;
        for (Eigen::Index i = 0; i < dm.m(); ++i) os << ',' << fmt(dm.U0(i, k));
        for (Eigen::Index i = 0; i < dm.n(); ++i) os << ',' << fmt(dm.X0(i, k));
        for (Eigen::Index i = 0; i < dm.n(); ++i) os << ',' << fmt(dm.X1(i, k));
        os << "\n";
    }
}

DataMatrices read_dataset_csv(std::istream& is) {
    DataMatrices dm;
    long n = -1, m = -1;
    bool have_ts = false;
    std::string line;
    std::vector<std::vector<double>> rows;
    bool header_seen = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            std::string key = line.substr(1, eq - 1);
            key.erase(0, key.find_first_not_of(' '));
            const std::string value = line.substr(eq + 1);
            if (key == "Ts") {
                dm.Ts = std::stod(value);
                have_ts = true;
            } else if (key == "mode") {
                dm.mode = acquisition_mode_from_string(value);
            } else if (key == "n") {
                n = std::stol(value);
            } else if (key == "m") {
                m = std::stol(value);
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
        rows.push_back(std::move(row));
    }
    if (!have_ts || n <= 0 || m <= 0) throw Error("dataset is missing Ts, n or m metadata");
    const auto T = static_cast<Eigen::Index>(rows.size());
    dm.U0.resize(m, T);
    dm.X0.resize(n, T);
    dm.X1.resize(n, T);
    for (Eigen::Index k = 0; k < T; ++k) {
        const auto& r = rows[k];
        if (static_cast<long>(r.size()) != 1 + m + 2 * n) throw Error("dataset row has the wrong number of fields");
        for (long i = 0; i < m; ++i) dm.U0(i, k) = r[1 + i];
        for (long i = 0; i < n; ++i) dm.X0(i, k) = r[1 + m + i];
        for (long i = 0; i < n; ++i) dm.X1(i, k) = r[1 + m + n + i];
    }
    dm.validate();
    return dm;
}

void save_dataset(const std::string& path, const DataMatrices& dm) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    write_dataset_csv(out, dm);
    if (!out) throw IoError("write failed for '" + path + "'");
}

DataMatrices load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    return read_dataset_csv(in);
}

std::string design_report_json(const DesignReport& r) {
    const auto& cd = r.cd;
    json c{{"regime", to_string(cd.regime)},
           {"Y", to_json(cd.Y)},
           {"S", to_json(cd.S)},
           {"K", to_json(cd.K)},
           {"G", to_json(cd.G)},
           {"L", to_json(cd.L)},
           {"J0", to_json(cd.J0)},
           {"V0", to_json(cd.V0)},
           {"Q", to_json(cd.Q)},
           {"Omega", to_json(cd.Omega)},
           {"Delta", to_json(cd.Delta)},
           {"delta", cd.delta},
           {"epsilon", cd.epsilon},
           {"lmi_residual", cd.lmi_residual},
           {"norms", norms_to_json(cd.norms)}};
    json model = nullptr;
    if (r.model) model = json{{"Delta", to_json(r.model->Delta)}, {"delta", r.model->delta}, {"T", r.model->T}};
    json rule{{"params", params_to_json(r.params)},
              {"spec", spec_to_json(r.rule.spec)},
              {"result", result_to_json(r.rule.result)},
              {"miet_bound", r.rule.miet_bound},
              {"bound_name", r.rule.bound_name}};
    json doc{{"format", "ddetc-design/1"}, {"Ts", r.Ts}, {"controller", c}, {"model", model}, {"rule", rule}};
    return doc.dump(2) + "\n";
}

DesignReport parse_design_report(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(std::string("malformed design report: ") + e.what());
    }
    try {
        if (doc.at("format") != "ddetc-design/1") throw Error("unsupported design report format");
        DesignReport r;
        r.Ts = doc.at("Ts");
        const auto& c = doc.at("controller");
        auto& cd = r.cd;
        cd.regime = regime_from_string(c.at("regime"));
        cd.Y = matrix_from(c.at("Y"));
        cd.S = matrix_from(c.at("S"));
        cd.K = matrix_from(c.at("K"));
        cd.G = matrix_from(c.at("G"));
        cd.L = matrix_from(c.at("L"));
        cd.J0 = matrix_from(c.at("J0"));
        cd.V0 = matrix_from(c.at("V0"));
        cd.Q = matrix_from(c.at("Q"));
        cd.Omega = matrix_from(c.at("Omega"));
        cd.Delta = matrix_from(c.at("Delta"));
        cd.delta = c.at("delta");
        cd.epsilon = c.at("epsilon");
        cd.lmi_residual = c.at("lmi_residual");
        cd.norms = norms_from_json(c.at("norms"));
        if (!doc.at("model").is_null()) {
            const auto& m = doc.at("model");
            DisturbanceModel model;
            model.Delta = matrix_from(m.at("Delta"));
            model.delta = m.at("delta");
            model.T = m.at("T");
            r.model = model;
        }
        const auto& rule = doc.at("rule");
        r.params = params_from_json(rule.at("params"));
        r.rule.spec = spec_from_json(rule.at("spec"));
        r.rule.result = result_from_json(rule.at("result"));
        r.rule.miet_bound = rule.at("miet_bound");
        r.rule.bound_name = rule.at("bound_name");
        return r;
    } catch (const json::exception& e) {
        throw Error(std::string("malformed design report: ") + e.what());
    }
}

void save_design(const std::string& path, const DesignReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << design_report_json(report);
    if (!out) throw IoError("write failed for '" + path + "'");
}

DesignReport load_design(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_design_report(buf.str());
}

}  // namespace ddetc
