#include "srg/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace srg {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw SrgError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

int to_int(const std::string& v, const std::string& key) {
    const double d = to_double(v, key);
    if (d != std::floor(d)) throw SrgError("config: expected integer for " + key);
    return static_cast<int>(d);
}

bool to_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "on" || v == "1") return true;
    if (v == "false" || v == "off" || v == "0") return false;
    throw SrgError("config: expected boolean for " + key + ": '" + v + "'");
}

}  // namespace

Complex parse_complex(const std::string& token) {
    std::string t = trim(token);
    if (t.empty()) throw SrgError("parse_complex: empty token");
    if (t.back() != 'i') return Complex(to_double(t, "complex"), 0.0);
    t.pop_back();  // strip 'i'
    // split at the last +/- that is not an exponent sign or leading sign
    for (size_t p = t.size(); p-- > 1;) {
        if ((t[p] == '+' || t[p] == '-') && t[p - 1] != 'e' && t[p - 1] != 'E') {
            const double re = to_double(t.substr(0, p), "complex");
            std::string im = t.substr(p);
            if (im == "+") im = "1";
            if (im == "-") im = "-1";
            return Complex(re, to_double(im, "complex"));
        }
    }
    if (t.empty() || t == "+") return Complex(0.0, 1.0);
    if (t == "-") return Complex(0.0, -1.0);
    return Complex(0.0, to_double(t, "complex"));
}

Mat parse_matrix(const std::string& text) {
    std::vector<std::vector<Complex>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        std::vector<Complex> r;
        std::stringstream rs(row);
        std::string tok;
        while (rs >> tok) r.push_back(parse_complex(tok));
        if (!r.empty()) rows.push_back(r);
    }
    if (rows.empty()) throw SrgError("parse_matrix: empty matrix");
    Mat m(rows.size(), rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size()) throw SrgError("parse_matrix: ragged rows");
        for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return m;
}

RunConfig parse_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SrgError("config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw SrgError("config: line " + std::to_string(lineno) + " has an empty key or value");
        kv[key] = val;
    }

    RunConfig c;
    std::map<std::string, std::string> h_at_rows;
    for (const auto& [key, val] : kv) {
        if (key == "model") c.model = val;
        else if (key == "model.g") c.g = to_double(val, key);
        else if (key == "model.mu") c.mu = to_double(val, key);
        else if (key == "model.s0") c.s0 = to_double(val, key);
        else if (key == "model.g0_exponent") c.g0_exponent = to_double(val, key);
        else if (key == "model.uv_cutoff") c.uv_cutoff = to_double(val, key);
        else if (key == "model.u_radius_s") c.u_radius_s = to_double(val, key);
        else if (key == "model.u_radius_z") c.u_radius_z = to_double(val, key);
        else if (key == "model.atom_dim") c.atom_dim = to_int(val, key);
        else if (key.rfind("model.h_at.", 0) == 0) h_at_rows[key] = val;
        else if (key == "model.d") c.d_matrix = parse_matrix(val);
        else if (key == "grid.rho") c.rho = to_double(val, key);
        else if (key == "grid.shells") c.shells = to_int(val, key);
        else if (key == "grid.angular") c.angular = to_int(val, key);
        else if (key == "fock.n_max") c.n_max = to_int(val, key);
        else if (key == "rg.n_steps") c.n_steps = to_int(val, key);
        else if (key == "rg.u_threshold") c.u_threshold = to_double(val, key);
        else if (key == "rg.zero_tol") c.zero_tol = to_double(val, key);
        else if (key == "rg.newton_max") c.newton_max = to_int(val, key);
        else if (key == "rg.leak_bound") c.leak_bound = to_double(val, key);
        else if (key == "polydisc.mode") c.polydisc_mode = val;
        else if (key == "polydisc.alpha0") c.alpha0 = to_double(val, key);
        else if (key == "polydisc.beta0") c.beta0 = to_double(val, key);
        else if (key == "polydisc.gamma0") c.gamma0 = to_double(val, key);
        else if (key == "polydisc.c_chi") c.c_chi = to_double(val, key);
        else if (key == "polydisc.c_beta_emp") c.c_beta_emp = to_double(val, key);
        else if (key == "polydisc.c_gamma_emp") c.c_gamma_emp = to_double(val, key);
        else if (key == "calibrate.enabled") c.calibrate = to_bool(val, key);
        else if (key == "calibrate.g_cap") c.g_cap = to_double(val, key);
        else if (key == "verify.contour_radius") c.contour_radius = to_double(val, key);
        else if (key == "verify.contour_points") c.contour_points = to_int(val, key);
        else if (key == "verify.oracle") c.oracle = to_bool(val, key);
        else if (key == "verify.oracle_tol") c.oracle_tol = to_double(val, key);
        else if (key == "verify.loop_tol") c.loop_tol = to_double(val, key);
        else if (key == "verify.depth") c.depth = to_int(val, key);
        else if (key == "wick.l_max") c.wick_l_max = to_int(val, key);
        else if (key == "wick.shells") c.wick_shells = to_int(val, key);
        else if (key == "wick.angular") c.wick_angular = to_int(val, key);
        else if (key == "wick.n_max") c.wick_n_max = to_int(val, key);
        else if (key == "counterexample.s_values") {
            c.cx_s_values.clear();
            std::stringstream vs(val);
            std::string tok;
            while (vs >> tok) c.cx_s_values.push_back(to_double(tok, key));
        } else if (key == "counterexample.box") c.cx_box = to_double(val, key);
        else if (key == "counterexample.step") c.cx_step = to_double(val, key);
        else if (key == "output.dir") c.out_dir = val;
        else if (key == "threads") c.threads = to_int(val, key);
        else throw SrgError("config: unknown key '" + key + "'");
    }

    if (!h_at_rows.empty()) {
        c.h_at_coeffs.clear();
        for (size_t p = 0;; ++p) {
            const auto it = h_at_rows.find("model.h_at." + std::to_string(p));
            if (it == h_at_rows.end()) break;
            c.h_at_coeffs.push_back(parse_matrix(it->second));
        }
        if (c.h_at_coeffs.size() != h_at_rows.size())
            throw SrgError("config: model.h_at.<p> powers must be consecutive from 0");
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SrgError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void RunConfig::validate() const {
    if (model != "spin_boson" && model != "dipole_toy")
        throw SrgError("config: model must be spin_boson or dipole_toy");
    if (model == "dipole_toy" && (h_at_coeffs.empty() || d_matrix.size() == 0))
        throw SrgError("config: dipole_toy requires model.h_at.<p> and model.d");
    if (!(rho > 0.0 && rho < 0.8)) throw SrgError("config: grid.rho must lie in (0, 4/5)");
    if (n_steps + 2 > shells) throw SrgError("config: insufficient shells (need rg.n_steps + 2 <= grid.shells)");
    if (polydisc_mode != "empirical" && polydisc_mode != "paper-locked")
        throw SrgError("config: polydisc.mode must be empirical or paper-locked");
    if (threads < 1) throw SrgError("config: threads must be >= 1");
}

ModelSpec RunConfig::make_model() const {
    ModelSpec m;
    if (model == "spin_boson") {
        m = spin_boson_spec(g, s0);
    } else {
        m = dipole_toy_spec(h_at_coeffs, d_matrix, g, s0);
    }
    m.g0_exponent = g0_exponent;
    m.uv_cutoff = uv_cutoff;
    m.mu = mu;
    m.u_radius_s = u_radius_s;
    m.u_radius_z = u_radius_z_resolved();
    return m;
}

ModeGrid RunConfig::make_grid() const { return build_grid(rho, shells, angular); }

RGConfig RunConfig::make_rg() const {
    RGConfig r;
    r.rho = rho;
    r.n_steps = n_steps;
    r.u_threshold = u_threshold;
    r.zero_tol = zero_tol;
    r.newton_max = newton_max;
    r.leak_bound = leak_bound;
    r.polydisc.alpha = alpha0_resolved();
    r.polydisc.beta = beta0_resolved();
    r.polydisc.gamma = gamma0_resolved();
    r.polydisc.rho = rho;
    r.polydisc.mu = mu;
    r.polydisc.c_chi = c_chi;
    r.polydisc.xi = 0.0;  // locked formula
    return r;
}

}  // namespace srg
