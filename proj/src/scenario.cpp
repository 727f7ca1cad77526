#include "degen/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <regex>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "degen/error.hpp"

namespace degen {

namespace {

struct Leaf {
    YAML::Node node;
    int line = 0;
};

[[noreturn]] void bad(const std::string& key, int line, const std::string& what) {
    std::ostringstream os;
    os << "key '" << key << "' at line " << line << ": " << what;
    throw Error(ErrorKind::config, os.str());
}

void flatten(const YAML::Node& map, const std::string& prefix, std::map<std::string, Leaf>& out) {
    for (auto it = map.begin(); it != map.end(); ++it) {
        std::string key = prefix.empty() ? it->first.as<std::string>() : prefix + "." + it->first.as<std::string>();
        int line = it->first.Mark().line + 1;
        if (out.count(key)) bad(key, line, "duplicate key");
        if (it->second.IsMap())
            flatten(it->second, key, out);
        else
            out[key] = {it->second, line};
    }
}

std::string emit(const YAML::Node& n) {
    YAML::Emitter e;
    e.SetSeqFormat(YAML::Flow);
    e.SetMapFormat(YAML::Flow);
    e << n;
    return e.c_str();
}

double to_double(const std::string& key, const Leaf& l, const YAML::Node& n) {
    if (!n.IsScalar()) bad(key, l.line, "expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        bad(key, l.line, "expected a number, got '" + n.Scalar() + "'");
    }
}

double as_double(const std::string& key, const Leaf& l) { return to_double(key, l, l.node); }

int as_int(const std::string& key, const Leaf& l) {
    double v = as_double(key, l);
    if (v != std::floor(v)) bad(key, l.line, "expected an integer");
    return static_cast<int>(v);
}

std::string as_string(const std::string& key, const Leaf& l) {
    if (!l.node.IsScalar()) bad(key, l.line, "expected a scalar");
    return l.node.Scalar();
}

bool as_bool(const std::string& key, const Leaf& l) {
    try {
        return l.node.as<bool>();
    } catch (const YAML::Exception&) {
        bad(key, l.line, "expected true or false");
    }
}

std::vector<double> as_doubles(const std::string& key, const Leaf& l) {
    if (l.node.IsScalar()) return {as_double(key, l)};
    if (!l.node.IsSequence()) bad(key, l.line, "expected a number or a list of numbers");
    std::vector<double> v;
    for (const auto& e : l.node) v.push_back(to_double(key, l, e));
    return v;
}

std::pair<double, double> as_pair(const std::string& key, const Leaf& l) {
    auto v = as_doubles(key, l);
    if (v.size() != 2) bad(key, l.line, "expected two numbers");
    return {v[0], v[1]};
}

Side as_side(const std::string& key, const Leaf& l) {
    std::string s = as_string(key, l);
    if (s == "left") return Side::left;
    if (s == "right") return Side::right;
    bad(key, l.line, "expected left or right");
}

std::vector<Piece> as_pieces(const std::string& key, const Leaf& l) {
    if (!l.node.IsSequence()) bad(key, l.line, "expected a list of pieces");
    std::vector<Piece> out;
    for (const auto& p : l.node) {
        if (!p.IsMap()) bad(key, l.line, "each piece is a map with lo, hi and poly or power");
        Piece pc;
        bool have_model = false;
        for (auto it = p.begin(); it != p.end(); ++it) {
            std::string k = it->first.as<std::string>();
            Leaf sub{it->second, it->first.Mark().line + 1};
            std::string full = key + "." + k;
            if (k == "lo") {
                pc.lo = as_double(full, sub);
            } else if (k == "hi") {
                pc.hi = as_double(full, sub);
            } else if (k == "poly") {
                pc.model = Polynomial{as_doubles(full, sub)};
                have_model = true;
            } else if (k == "power") {
                auto v = as_doubles(full, sub);
                if (v.size() != 4 && v.size() != 5) bad(full, sub.line, "expected [a_left, d_left, a_right, d_right, origin?]");
                pc.model = PowerLaw{v[0], v[1], v[2], v[3], v.size() == 5 ? v[4] : 0.0};
                have_model = true;
            } else {
                bad(full, sub.line, "unknown key");
            }
        }
        if (!have_model) bad(key, l.line, "piece needs poly or power");
        out.push_back(pc);
    }
    return out;
}

std::string trim(std::string s) {
    auto ws = [](unsigned char ch) { return std::isspace(ch) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

}  // namespace

Datum parse_datum(const std::string& s) {
    static const std::regex re(R"(^\s*(gaussian|indicator|constant)\s*\(([^)]*)\)\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw Error(ErrorKind::config, "malformed datum '" + s + "'");
    std::vector<double> args;
    std::stringstream ss(m[2].str());
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw Error(ErrorKind::config, "malformed datum argument '" + tok + "'");
        args.push_back(v);
    }
    std::string kind = m[1].str();
    if (kind == "constant") {
        if (args.size() > 1) throw Error(ErrorKind::config, "constant takes at most one argument");
        return Datum::constant(args.empty() ? 1.0 : args[0]);
    }
    if (args.size() != 2) throw Error(ErrorKind::config, kind + " takes two arguments");
    if (kind == "gaussian") {
        if (!(args[1] > 0)) throw Error(ErrorKind::config, "gaussian width must be positive");
        return Datum::gaussian(args[0], args[1]);
    }
    if (!(args[1] > args[0])) throw Error(ErrorKind::config, "indicator needs a < b");
    return Datum::indicator(args[0], args[1]);
}

Coefficient CoefficientSpec::build() const {
    if (model == "power_law")
        return Coefficient::power_law(PowerLaw{amplitude_left, exponent_left, amplitude_right, exponent_right, origin},
                                      domain);
    if (model == "piecewise") return Coefficient::piecewise(pieces, domain);
    std::ifstream in(table);
    if (!in) throw Error(ErrorKind::config, "cannot open coefficient table '" + table + "'");
    std::vector<double> xs, cs;
    std::string line;
    int row = 0;
    while (std::getline(in, line)) {
        ++row;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw Error(ErrorKind::config, "table row " + std::to_string(row) + " needs two columns");
        try {
            double x = std::stod(a), c = std::stod(b);
            xs.push_back(x);
            cs.push_back(c);
        } catch (const std::exception&) {
            if (!xs.empty()) throw Error(ErrorKind::config, "table row " + std::to_string(row) + " is not numeric");
        }
    }
    return Coefficient::tabulated(std::move(xs), std::move(cs));
}

BoundaryCondition BoundarySpec::condition(std::size_t i) const {
    double a = alpha[std::min(i, alpha.size() - 1)], b = beta[std::min(i, beta.size() - 1)];
    if (kind == "friedrichs") return BoundaryCondition::friedrichs();
    if (kind == "dirichlet") return BoundaryCondition::dirichlet();
    if (kind == "neumann") return BoundaryCondition::neumann();
    if (kind == "robin") return BoundaryCondition::robin(a, b);
    return BoundaryCondition::line_jump(a, b);
}

Mesh Scenario::build_mesh(const Coefficient& c) const {
    Geometry g;
    switch (geometry.kind) {
    case Geometry::Kind::interval: {
        auto degenerate = [&c](double x) { return c.eval(x) <= 1e-12; };
        g = Geometry::interval(geometry.a, geometry.b, degenerate(geometry.a), degenerate(geometry.b));
        break;
    }
    case Geometry::Kind::half_line:
    case Geometry::Kind::line: {
        double L = geometry.truncation ? *geometry.truncation : truncation_length(c, evolve.horizon).length;
        g = geometry.kind == Geometry::Kind::line ? Geometry::line(L) : Geometry::half_line(geometry.side, L);
        break;
    }
    }
    return degen::build_mesh(g, mesh.n_cells, mesh.grading);
}

Scenario parse_scenario(const std::string& text, const std::filesystem::path& base_dir) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorKind::config, std::string("scenario does not parse: ") + e.what());
    }
    if (!root.IsMap()) throw Error(ErrorKind::config, "scenario must be a map of keys");
    std::map<std::string, Leaf> leaves;
    flatten(root, "", leaves);

    Scenario sc;
    std::set<std::string> given;
    std::string domain_kind = "line";
    Side domain_side = Side::right;
    std::pair<double, double> domain_interval{0.0, 1.0};

    using Handler = std::function<void(const std::string&, const Leaf&)>;
    const std::map<std::string, Handler> handlers{
        {"name", [&](auto& k, auto& l) { sc.name = as_string(k, l); }},
        {"seed",
         [&](auto& k, auto& l) {
             double v = as_double(k, l);
             if (v < 0 || v != std::floor(v)) bad(k, l.line, "seed must be a non-negative integer");
             sc.seed = static_cast<std::uint64_t>(v);
         }},
        {"analyses",
         [&](auto& k, auto& l) {
             static const std::set<std::string> known{"classify", "deficiency", "evolve", "krein",
                                                      "blowup",   "decompose",  "cutoffs"};
             sc.analyses.clear();
             std::vector<std::string> items;
             if (l.node.IsScalar())
                 items.push_back(l.node.Scalar());
             else if (l.node.IsSequence())
                 for (const auto& e : l.node) items.push_back(e.Scalar());
             else
                 bad(k, l.line, "expected a list of analyses");
             for (const auto& a : items) {
                 if (!known.count(a)) bad(k, l.line, "unknown analysis '" + a + "'");
                 sc.analyses.insert(a);
             }
         }},
        {"coefficient.model",
         [&](auto& k, auto& l) {
             std::string m = as_string(k, l);
             if (m != "power_law" && m != "piecewise" && m != "table") bad(k, l.line, "unknown model '" + m + "'");
             sc.coefficient.model = m;
         }},
        {"coefficient.exponents",
         [&](auto& k, auto& l) {
             auto v = as_doubles(k, l);
             if (v.size() > 2 || v.empty()) bad(k, l.line, "expected δ or [δ_left, δ_right]");
             sc.coefficient.exponent_left = v[0];
             sc.coefficient.exponent_right = v.back();
         }},
        {"coefficient.amplitudes",
         [&](auto& k, auto& l) {
             auto v = as_doubles(k, l);
             if (v.size() > 2 || v.empty()) bad(k, l.line, "expected a or [a_left, a_right]");
             sc.coefficient.amplitude_left = v[0];
             sc.coefficient.amplitude_right = v.back();
         }},
        {"coefficient.origin", [&](auto& k, auto& l) { sc.coefficient.origin = as_double(k, l); }},
        {"coefficient.table",
         [&](auto& k, auto& l) {
             std::filesystem::path p = as_string(k, l);
             sc.coefficient.table = (p.is_absolute() ? p : base_dir / p).string();
         }},
        {"coefficient.pieces", [&](auto& k, auto& l) { sc.coefficient.pieces = as_pieces(k, l); }},
        {"coefficient.domain",
         [&](auto& k, auto& l) {
             domain_kind = as_string(k, l);
             if (domain_kind != "line" && domain_kind != "half_line" && domain_kind != "interval")
                 bad(k, l.line, "expected line, half_line or interval");
         }},
        {"coefficient.side", [&](auto& k, auto& l) { domain_side = as_side(k, l); }},
        {"coefficient.interval", [&](auto& k, auto& l) { domain_interval = as_pair(k, l); }},
        {"geometry.kind",
         [&](auto& k, auto& l) {
             std::string g = as_string(k, l);
             if (g == "line")
                 sc.geometry.kind = Geometry::Kind::line;
             else if (g == "half_line")
                 sc.geometry.kind = Geometry::Kind::half_line;
             else if (g == "interval")
                 sc.geometry.kind = Geometry::Kind::interval;
             else
                 bad(k, l.line, "expected line, half_line or interval");
         }},
        {"geometry.side", [&](auto& k, auto& l) { sc.geometry.side = as_side(k, l); }},
        {"geometry.interval",
         [&](auto& k, auto& l) {
             auto p = as_pair(k, l);
             sc.geometry.a = p.first;
             sc.geometry.b = p.second;
         }},
        {"geometry.truncation",
         [&](auto& k, auto& l) {
             if (l.node.IsScalar() && l.node.Scalar() == "auto") return;
             double v = as_double(k, l);
             if (!(v > 0)) bad(k, l.line, "truncation must be positive");
             sc.geometry.truncation = v;
         }},
        {"bc.kind",
         [&](auto& k, auto& l) {
             static const std::set<std::string> known{"friedrichs", "dirichlet", "neumann", "robin", "line_jump"};
             std::string s = as_string(k, l);
             if (!known.count(s)) bad(k, l.line, "unknown boundary condition '" + s + "'");
             sc.bc.kind = s;
         }},
        {"bc.alpha", [&](auto& k, auto& l) { sc.bc.alpha = as_doubles(k, l); }},
        {"bc.beta", [&](auto& k, auto& l) { sc.bc.beta = as_doubles(k, l); }},
        {"mesh.n_cells", [&](auto& k, auto& l) { sc.mesh.n_cells = as_int(k, l); }},
        {"mesh.grading", [&](auto& k, auto& l) { sc.mesh.grading = as_double(k, l); }},
        {"mesh.flux",
         [&](auto& k, auto& l) {
             std::string s = as_string(k, l);
             if (s == "midpoint")
                 sc.mesh.flux = FluxRule::midpoint;
             else if (s == "harmonic")
                 sc.mesh.flux = FluxRule::harmonic;
             else
                 bad(k, l.line, "expected midpoint or harmonic");
         }},
        {"evolve.horizon", [&](auto& k, auto& l) { sc.evolve.horizon = as_double(k, l); }},
        {"evolve.steps", [&](auto& k, auto& l) { sc.evolve.steps = as_int(k, l); }},
        {"evolve.scheme",
         [&](auto& k, auto& l) {
             std::string s = as_string(k, l);
             if (s == "backward_euler")
                 sc.evolve.scheme = Scheme::backward_euler;
             else if (s == "crank_nicolson")
                 sc.evolve.scheme = Scheme::crank_nicolson;
             else
                 bad(k, l.line, "expected backward_euler or crank_nicolson");
         }},
        {"evolve.datum",
         [&](auto& k, auto& l) {
             try {
                 sc.evolve.datum = parse_datum(as_string(k, l));
             } catch (const Error& e) {
                 bad(k, l.line, e.what());
             }
         }},
        {"evolve.dump_snapshots", [&](auto& k, auto& l) { sc.evolve.dump_snapshots = as_bool(k, l); }},
        {"deficiency.gamma", [&](auto& k, auto& l) { sc.deficiency_gamma = as_doubles(k, l); }},
        {"krein.gamma", [&](auto& k, auto& l) { sc.krein_gamma = as_doubles(k, l); }},
        {"blowup.gamma_boundary", [&](auto& k, auto& l) { sc.blowup.gamma_boundary = as_doubles(k, l); }},
        {"blowup.dirichlet", [&](auto& k, auto& l) { sc.blowup.dirichlet = as_bool(k, l); }},
        {"blowup.x_max", [&](auto& k, auto& l) { sc.blowup.x_max = as_double(k, l); }},
        {"cutoffs.n", [&](auto& k, auto& l) { sc.cutoffs_n = as_doubles(k, l); }},
        {"sweep.exponents", [&](auto& k, auto& l) { sc.sweep.exponents = as_doubles(k, l); }},
        {"sweep.exponents_left", [&](auto& k, auto& l) { sc.sweep.exponents_left = as_doubles(k, l); }},
        {"sweep.exponents_right", [&](auto& k, auto& l) { sc.sweep.exponents_right = as_doubles(k, l); }},
        {"sweep.alpha", [&](auto& k, auto& l) { sc.sweep.alpha = as_doubles(k, l); }},
        {"sweep.beta", [&](auto& k, auto& l) { sc.sweep.beta = as_doubles(k, l); }},
    };

    for (const auto& [key, leaf] : leaves) {
        auto h = handlers.find(key);
        if (h == handlers.end()) bad(key, leaf.line, "unknown key");
        h->second(key, leaf);
        given.insert(key);
        sc.echo[key] = emit(leaf.node);
        if (key.rfind("sweep.", 0) == 0) sc.sweep.present = true;
    }

    if (domain_kind == "half_line")
        sc.coefficient.domain = Domain::half_line(domain_side);
    else if (domain_kind == "interval")
        sc.coefficient.domain = Domain::interval(domain_interval.first, domain_interval.second);

    // Cross-key validation, before any computation.
    auto need = [&](const std::string& analysis, const std::string& key) {
        if (sc.wants(analysis) && !given.count(key))
            throw Error(ErrorKind::config, "analysis '" + analysis + "' requires key '" + key + "'");
    };
    need("deficiency", "deficiency.gamma");
    need("krein", "krein.gamma");
    need("cutoffs", "cutoffs.n");
    need("evolve", "evolve.datum");
    if (sc.wants("blowup") && !given.count("blowup.gamma_boundary") && !sc.blowup.dirichlet)
        throw Error(ErrorKind::config, "analysis 'blowup' requires key 'blowup.gamma_boundary' or 'blowup.dirichlet'");
    if (sc.coefficient.model == "table" && sc.coefficient.table.empty())
        throw Error(ErrorKind::config, "model 'table' requires key 'coefficient.table'");
    if (sc.coefficient.model == "piecewise" && sc.coefficient.pieces.empty())
        throw Error(ErrorKind::config, "model 'piecewise' requires key 'coefficient.pieces'");
    if (sc.bc.alpha.empty() || sc.bc.beta.empty()) throw Error(ErrorKind::config, "bc.alpha and bc.beta must be non-empty");
    if (sc.bc.alpha.size() != sc.bc.beta.size() && sc.bc.alpha.size() != 1 && sc.bc.beta.size() != 1)
        throw Error(ErrorKind::config, "bc.alpha and bc.beta lists must have equal length");
    if (sc.bc.kind == "robin" && sc.geometry.kind == Geometry::Kind::line)
        throw Error(ErrorKind::config, "robin applies to half-line and interval ends; use line_jump on the line");
    if (sc.bc.kind == "line_jump" && sc.geometry.kind != Geometry::Kind::line)
        throw Error(ErrorKind::config, "line_jump applies only to line geometries");
    if (sc.wants("krein") && sc.geometry.kind == Geometry::Kind::interval)
        throw Error(ErrorKind::config, "analysis 'krein' needs a half-line or line geometry");
    if (sc.wants("evolve") && (sc.evolve.steps < 1 || !(sc.evolve.horizon > 0)))
        throw Error(ErrorKind::config, "evolve needs a positive horizon and at least one step");
    if (sc.mesh.n_cells < 8) throw Error(ErrorKind::config, "mesh.n_cells must be at least 8");
    if (!(sc.mesh.grading > 0 && sc.mesh.grading < 1)) throw Error(ErrorKind::config, "mesh.grading must lie in (0, 1)");
    if (sc.sweep.present) {
        bool sym = !sc.sweep.exponents.empty();
        bool asym = !sc.sweep.exponents_left.empty() || !sc.sweep.exponents_right.empty();
        if (!sym && !asym && sc.sweep.alpha.empty()) throw Error(ErrorKind::config, "sweep grid is empty");
        if (asym && sc.sweep.exponents_left.size() != sc.sweep.exponents_right.size())
            throw Error(ErrorKind::config, "sweep.exponents_left and sweep.exponents_right must have equal length");
        if (sc.sweep.alpha.size() != sc.sweep.beta.size())
            throw Error(ErrorKind::config, "sweep.alpha and sweep.beta must have equal length");
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::config, "cannot open scenario '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

void Tolerances::override_from(const std::filesystem::path& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path.string());
    } catch (const YAML::Exception& e) {
        throw Error(ErrorKind::config, "cannot read tolerance overrides: " + std::string(e.what()));
    }
    if (!root.IsMap()) throw Error(ErrorKind::config, "tolerance overrides must be a map");
    for (auto it = root.begin(); it != root.end(); ++it) {
        std::string k = it->first.as<std::string>();
        Leaf l{it->second, it->first.Mark().line + 1};
        if (!values.count(k)) bad(k, l.line, "unknown tolerance");
        values[k] = as_double(k, l);
    }
}

}  // namespace degen
