#include "degen/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "degen/error.hpp"

namespace degen {

namespace {

struct Assertions {
    Json list = Json::array();
    bool ok = true;

    void add(const std::string& analysis, const std::string& name, bool pass, double value, double tol) {
        list.push_back({{"analysis", analysis}, {"name", name}, {"pass", pass}, {"value", number(value)},
                        {"tolerance", number(tol)}});
        ok = ok && pass;
    }
};

ClassifyOptions classify_options() { return {}; }

ClassificationReport classify_any(const Coefficient& c) {
    if (c.domain().kind != Domain::Kind::interval) return classify(c, classify_options());
    Decomposition dec = decompose(c);
    if (dec.components.size() != 1 || !dec.plateau_blocks.empty())
        throw Error(ErrorKind::unsupported, "interval has several components; request the decompose analysis");
    return dec.components.front().report;
}

std::vector<Side> sides_of(const Scenario& sc) {
    switch (sc.geometry.kind) {
    case Geometry::Kind::half_line: return {sc.geometry.side};
    case Geometry::Kind::line: return {Side::left, Side::right};
    default: return {};
    }
}

const HarmonicProfile& profile_for(const ClassificationReport& r, Side s) {
    const auto& p = s == Side::left ? r.left : r.right;
    if (!p) throw Error(ErrorKind::config, std::string("coefficient has no ") + to_string(s) + " side");
    return *p;
}

std::string tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void write_file(const RunOptions& opt, const std::string& name, const std::function<void(std::ostream&)>& body,
                Json& artifacts, bool binary = false) {
    if (!opt.out_dir) return;
    std::filesystem::create_directories(*opt.out_dir);
    std::ofstream out(*opt.out_dir / name, binary ? std::ios::binary : std::ios::out);
    if (!out) throw Error(ErrorKind::config, "cannot write " + (*opt.out_dir / name).string());
    body(out);
    artifacts.push_back(name);
}

Json error_json(const std::exception& e) {
    Json j{{"status", "error"}, {"error", e.what()}};
    if (const auto* d = dynamic_cast<const Error*>(&e)) j["kind"] = to_string(d->kind());
    return j;
}

Json tolerances_json(const Tolerances& t) {
    Json j;
    for (const auto& [k, v] : t.values) j[k] = v;
    return j;
}

Json header(const Scenario& sc, const RunOptions& opt, std::uint64_t seed) {
    Json r;
    r["schema"] = kReportSchema;
    r["started_at"] = timestamp_now();
    r["scenario"] = {{"name", sc.name}, {"keys", sc.echo}};
    r["seed"] = seed;
    r["provenance"] = {{"version", kVersion}, {"tolerances", tolerances_json(opt.tol)}};
    return r;
}

// --- individual analyses -------------------------------------------------

Json run_deficiency(const Scenario& sc, const Coefficient& c, const ClassificationReport& rep, double length,
                    const RunOptions& opt, Assertions& as, Json& artifacts) {
    Json rows = Json::array();
    auto sides = sides_of(sc);
    if (sides.empty()) throw Error(ErrorKind::unsupported, "deficiency analysis needs a half-line or line geometry");
    for (Side s : sides) {
        const HarmonicProfile& prof = profile_for(rep, s);
        const int expected = prof.nu_in_l2 ? 1 : 0;
        for (double g : sc.deficiency_gamma) {
            Json row{{"side", to_string(s)}, {"gamma", g}};
            try {
                DeficiencyResult d = deficiency_index(c, s, g);
                row["index"] = to_json(d);
                as.add("deficiency", std::string("index_matches_case_") + to_string(s) + "_g" + tag(g),
                       d.index == expected, d.index, expected);
                if (d.index == 1) {
                    ShootingSolution eta = deficiency_solution(c, s, g, length);
                    EtaProperties ep = eta_properties(eta, &prof);
                    row["eta"] = to_json(ep);
                    row["eta"]["length"] = length;
                    as.add("deficiency", std::string("eta_positive_") + to_string(s) + "_g" + tag(g), ep.positive,
                           ep.positive, 1);
                    as.add("deficiency", std::string("eta_non_increasing_") + to_string(s) + "_g" + tag(g),
                           ep.non_increasing, ep.non_increasing, 1);
                    write_file(opt, std::string("eta_") + to_string(s) + "_g" + tag(g) + ".csv",
                               [&](std::ostream& os) { eta.write_csv(os); }, artifacts);
                }
            } catch (const std::exception& e) {
                row.update(error_json(e));
            }
            rows.push_back(row);
        }
    }
    return {{"status", "ok"}, {"rows", rows}};
}

Json run_blowup(const Scenario& sc, const Coefficient& c, Assertions& as) {
    Json rows = Json::array();
    auto one = [&](double gb, bool dir) {
        Json row{{"gamma_boundary", dir ? Json("dirichlet") : Json(gb)}, {"x_max", sc.blowup.x_max}};
        BlowupResult b = blowup_check(c, gb, sc.blowup.x_max, dir);
        row.update(to_json(b));
        as.add("blowup", "monotone_square_" + (dir ? std::string("dirichlet") : tag(gb)), b.monotone_square,
               b.monotone_square, 1);
        rows.push_back(row);
    };
    for (double gb : sc.blowup.gamma_boundary) one(gb, false);
    if (sc.blowup.dirichlet) one(0.0, true);
    return {{"status", "ok"}, {"rows", rows}};
}

Json run_cutoffs(const Scenario& sc, const Coefficient& c, const RunOptions& opt, Assertions& as) {
    Json rows = Json::array();
    auto sides = sides_of(sc);
    if (sides.empty()) sides = {Side::right};
    for (Side s : sides)
        for (double n : sc.cutoffs_n) {
            Json row{{"side", to_string(s)}, {"n", n}};
            try {
                double e = cutoff_energy(c, s, n);
                double v = nu(c, s, sign_of(s) / n);
                double prod = e * v;
                row["energy"] = e;
                row["nu_n"] = v;
                row["energy_times_nu"] = prod;
                as.add("cutoffs", std::string("energy_identity_") + to_string(s) + "_n" + tag(n),
                       std::abs(prod - 1.0) < opt.tol["cutoff_identity"], std::abs(prod - 1.0),
                       opt.tol["cutoff_identity"]);
                SmoothCutoff sm = smooth_cutoff_l1(c, s, n);
                row["smooth_flux_divergence_l1"] = sm.flux_divergence_l1;
                row["smooth_ratio_to_inverse_nu"] = sm.ratio;
            } catch (const std::exception& ex) {
                row.update(error_json(ex));
            }
            rows.push_back(row);
        }
    return {{"status", "ok"}, {"rows", rows}};
}

Json run_evolve(const Scenario& sc, const Coefficient& c, const ClassificationReport* rep, const Mesh& mesh,
                const RunOptions& opt, Assertions& as, Json& artifacts) {
    AssemblyOptions ao;
    ao.flux = sc.mesh.flux;
    DiscreteOperator op = assemble(c, mesh, sc.bc.condition(0), ao);
    std::vector<double> phi0 = op.sample(sc.evolve.datum);
    SemigroupTrace tr = evolve(op, phi0, sc.evolve.horizon, sc.evolve.steps, sc.evolve.scheme);
    write_file(opt, "evolve_trace.csv", [&](std::ostream& os) { tr.write_csv(os); }, artifacts);
    if (sc.evolve.dump_snapshots)
        write_file(opt, "evolve_snapshots.bin", [&](std::ostream& os) { tr.write_binary(os); }, artifacts, true);

    Json j{{"status", "ok"},
           {"scheme", to_string(sc.evolve.scheme)},
           {"positivity_reliable", tr.positivity_reliable()},
           {"datum", sc.evolve.datum.describe()},
           {"condition", sc.bc.condition(0).describe()},
           {"dofs", op.size()},
           {"initial", to_json(tr.metrics.front())},
           {"final", to_json(tr.metrics.back())}};

    const SnapshotMetrics& m0 = tr.metrics.front();
    bool nonneg = true;
    for (double v : phi0) nonneg = nonneg && v >= 0;
    double min_rel = 0, sup_rel = 0, l2_rise = 0, leak = 0;
    const bool datum_right = m0.mass_right >= m0.mass_left;
    for (std::size_t i = 0; i < tr.metrics.size(); ++i) {
        const auto& m = tr.metrics[i];
        min_rel = std::min(min_rel, m.min_value / m0.sup_norm);
        sup_rel = std::max(sup_rel, m.sup_norm / m0.sup_norm - 1.0);
        if (i > 0) l2_rise = std::max(l2_rise, tr.metrics[i].l2_norm - tr.metrics[i - 1].l2_norm * (1 + 1e-12));
        if (m.l1_mass > 0) leak = std::max(leak, (datum_right ? m.mass_left : m.mass_right) / m.l1_mass);
    }
    j["min_relative"] = min_rel;
    j["sup_expansion"] = sup_rel;
    if (op.interface != Interface::none) j["invariance_leak"] = leak;

    try {
        Conservation cons = conservativeness(tr, opt.tol["far_outflow"]);
        j["conservation"] = to_json(cons);
        double internal = 0;
        for (std::size_t i = 0; i < op.size(); ++i) internal += std::abs(op.a.s[i] - op.far_sink[i]);
        if (internal == 0.0)
            as.add("evolve", "conservative", cons.max_mass_drift < opt.tol["conservation_drift"], cons.max_mass_drift,
                   opt.tol["conservation_drift"]);
    } catch (const std::exception& e) {
        j["conservation"] = error_json(e);
    }

    if (op.submarkovian_sign() && tr.positivity_reliable()) {
        if (nonneg)
            as.add("evolve", "positivity", min_rel >= -opt.tol["positivity"], min_rel, -opt.tol["positivity"]);
        as.add("evolve", "sup_contraction", sup_rel <= opt.tol["markov"], sup_rel, opt.tol["markov"]);
        as.add("evolve", "l2_contraction", l2_rise <= 0, l2_rise, 0);
    }
    if (rep && op.interface == Interface::merged && rep->kase == Case::II &&
        sc.bc.condition(0).kind == BoundaryCondition::Kind::friedrichs)
        as.add("evolve", "half_line_invariance", leak <= opt.tol["invariance_leak"], leak, opt.tol["invariance_leak"]);
    return j;
}

Json run_krein(const Scenario& sc, const Coefficient& c, const Mesh& mesh, std::uint64_t seed, const RunOptions& opt,
               Assertions& as) {
    Json rows = Json::array();
    KreinOptions ko;
    ko.seed = seed;
    ko.assembly.flux = sc.mesh.flux;
    for (std::size_t i = 0; i < sc.bc.pairs(); ++i) {
        double a = sc.bc.alpha[std::min(i, sc.bc.alpha.size() - 1)];
        double b = sc.bc.beta[std::min(i, sc.bc.beta.size() - 1)];
        for (double g : sc.krein_gamma) {
            Json row{{"alpha", a}, {"beta", b}};
            try {
                KreinDiagnostics k = krein_check(c, a, b, g, mesh, ko);
                row.update(to_json(k));
                std::string id = "_a" + tag(a) + "_b" + tag(b) + "_g" + tag(g);
                as.add("krein", "kappa_nonnegative" + id, k.kappa >= opt.tol["krein_kappa_floor"], k.kappa,
                       opt.tol["krein_kappa_floor"]);
                as.add("krein", "rank_one" + id, k.rank_ratio < opt.tol["krein_rank_ratio"], k.rank_ratio,
                       opt.tol["krein_rank_ratio"]);
                if (!std::isnan(k.range_alignment))
                    as.add("krein", "range_alignment" + id, k.range_alignment > opt.tol["krein_alignment"],
                           k.range_alignment, opt.tol["krein_alignment"]);
            } catch (const std::exception& e) {
                row.update(error_json(e));
            }
            rows.push_back(row);
        }
    }
    return {{"status", "ok"}, {"rows", rows}};
}

Json run_decompose(const Coefficient& c) {
    Decomposition dec = decompose(c);
    Json j = to_json(dec);
    DirectSum ds = assemble_direct_sum(c, dec);
    j["blocks"] = ds.blocks.size();
    j["status"] = "ok";
    return j;
}

}  // namespace

RunOutcome run(const Scenario& sc, const RunOptions& opt) {
    const std::uint64_t seed = opt.seed.value_or(sc.seed);
    RunOutcome out;
    Json& r = out.report;
    r = header(sc, opt, seed);
    Assertions as;
    Json analyses;
    Json artifacts = Json::array();

    Coefficient c = sc.coefficient.build();
    r["coefficient"] = c.describe();

    std::optional<ClassificationReport> rep;
    try {
        rep = classify_any(c);
        analyses["classify"] = {{"status", "ok"}, {"report", to_json(*rep)}};
    } catch (const std::exception& e) {
        analyses["classify"] = error_json(e);
    }

    std::optional<Mesh> mesh;
    auto need_mesh = [&]() -> const Mesh& {
        if (!mesh) {
            mesh = sc.build_mesh(c);
            r["provenance"]["mesh"] = to_json(*mesh);
        }
        return *mesh;
    };
    auto guarded = [&](const std::string& name, const std::function<Json()>& body) {
        if (!sc.wants(name)) return;
        try {
            analyses[name] = body();
        } catch (const std::exception& e) {
            analyses[name] = error_json(e);
        }
    };

    guarded("deficiency", [&] {
        if (!rep) throw Error(ErrorKind::hypothesis, "classification unavailable");
        double length = sc.geometry.kind == Geometry::Kind::interval ? 1.0 : need_mesh().geometry.length;
        return run_deficiency(sc, c, *rep, length, opt, as, artifacts);
    });
    guarded("blowup", [&] { return run_blowup(sc, c, as); });
    guarded("cutoffs", [&] { return run_cutoffs(sc, c, opt, as); });
    guarded("evolve", [&] { return run_evolve(sc, c, rep ? &*rep : nullptr, need_mesh(), opt, as, artifacts); });
    guarded("krein", [&] { return run_krein(sc, c, need_mesh(), seed, opt, as); });
    guarded("decompose", [&] { return run_decompose(c); });

    r["analyses"] = analyses;
    r["assertions"] = as.list;
    r["passed"] = as.ok;
    out.passed = as.ok;
    if (opt.out_dir) {
        artifacts.push_back("report.json");
        r["artifacts"] = artifacts;
        Json dummy = Json::array();
        write_file(opt, "report.json", [&](std::ostream& os) { os << r.dump(2) << '\n'; }, dummy);
    }
    return out;
}

RunOutcome classify_only(const Scenario& sc, const RunOptions& opt) {
    Scenario only = sc;
    only.analyses = {"classify"};
    return run(only, opt);
}

std::vector<SweepRow> sweep(const Scenario& sc, const RunOptions& opt) {
    struct Point {
        double dl, dr;
        std::optional<double> a, b;
    };
    std::vector<std::pair<double, double>> deltas;
    if (!sc.sweep.exponents.empty())
        for (double d : sc.sweep.exponents) deltas.emplace_back(d, d);
    for (std::size_t i = 0; i < sc.sweep.exponents_left.size(); ++i)
        deltas.emplace_back(sc.sweep.exponents_left[i], sc.sweep.exponents_right[i]);
    if (deltas.empty()) deltas.emplace_back(sc.coefficient.exponent_left, sc.coefficient.exponent_right);
    std::vector<Point> grid;
    for (const auto& [dl, dr] : deltas) {
        if (sc.sweep.alpha.empty())
            grid.push_back({dl, dr, std::nullopt, std::nullopt});
        else
            for (std::size_t i = 0; i < sc.sweep.alpha.size(); ++i)
                grid.push_back({dl, dr, sc.sweep.alpha[i], sc.sweep.beta[i]});
    }
    if (grid.empty()) throw Error(ErrorKind::config, "sweep grid is empty");
    if (sc.coefficient.model != "power_law") throw Error(ErrorKind::config, "sweeps vary power-law exponents");

    std::vector<SweepRow> rows(grid.size());
    auto work = [&](std::size_t i) {
        const Point& p = grid[i];
        SweepRow& row = rows[i];
        row.delta_left = p.dl;
        row.delta_right = p.dr;
        row.alpha = p.a;
        row.beta = p.b;
        try {
            CoefficientSpec cs = sc.coefficient;
            cs.exponent_left = p.dl;
            cs.exponent_right = p.dr;
            Coefficient c = cs.build();
            ClassificationReport rep = classify(c);
            Case k = rep.kase;
            bool unique = rep.unique_submarkovian;
            auto sides = sides_of(sc);
            if (sc.geometry.kind == Geometry::Kind::half_line) {
                const auto& prof = profile_for(rep, sc.geometry.side);
                k = case_from(prof.nu_in_l2, prof.nu_in_linf);
                unique = k != Case::III;
            }
            row.kase = to_string(k);
            row.unique_submarkovian = unique;
            double g = sc.deficiency_gamma.empty() ? 1.0 : sc.deficiency_gamma.front();
            int idx = 1;
            for (Side s : sides) idx = std::min(idx, deficiency_index(c, s, g).index);
            row.deficiency_index = sides.empty() ? -1 : idx;

            Mesh mesh = sc.build_mesh(c);
            AssemblyOptions ao;
            ao.flux = sc.mesh.flux;
            BoundaryCondition bc = sc.bc.condition(0);
            if (p.a) {
                bc = sc.geometry.kind == Geometry::Kind::line ? BoundaryCondition::line_jump(*p.a, *p.b)
                                                               : BoundaryCondition::robin(*p.a, *p.b);
            }
            DiscreteOperator op = assemble(c, mesh, bc, ao);
            row.lambda1 = lowest_eigenpairs(op, 1).front().value;
            row.lambda1_sign = row.lambda1 < -1e-8 ? -1 : (row.lambda1 > 1e-8 ? 1 : 0);
            if (sc.wants("evolve") && op.interface != Interface::none) {
                SemigroupTrace tr = evolve(op, op.sample(sc.evolve.datum), sc.evolve.horizon, sc.evolve.steps,
                                           sc.evolve.scheme);
                const auto& m0 = tr.metrics.front();
                bool right = m0.mass_right >= m0.mass_left;
                double leak = 0;
                for (const auto& m : tr.metrics)
                    if (m.l1_mass > 0) leak = std::max(leak, (right ? m.mass_left : m.mass_right) / m.l1_mass);
                row.leak = leak;
            }
        } catch (const std::exception& e) {
            row.status = "error";
            row.error = e.what();
        }
    };

    std::atomic<std::size_t> next{0};
    int n_threads = std::max(1, std::min<int>(opt.threads, static_cast<int>(grid.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) work(i);
        });
    for (auto& th : pool) th.join();
    return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
    os.precision(12);
    os << "delta_left,delta_right,alpha,beta,case,deficiency_index,unique_submarkovian,invariance_leak,lambda1,"
          "lambda1_sign,status,error\n";
    auto opt = [&os](const std::optional<double>& v) {
        if (v) os << *v;
    };
    for (const auto& r : rows) {
        os << r.delta_left << ',' << r.delta_right << ',';
        opt(r.alpha);
        os << ',';
        opt(r.beta);
        os << ',' << r.kase << ',' << r.deficiency_index << ',' << (r.unique_submarkovian ? "true" : "false") << ',';
        opt(r.leak);
        os << ',' << r.lambda1 << ',' << r.lambda1_sign << ',' << r.status << ',';
        std::string e = r.error;
        for (char& ch : e)
            if (ch == '"') ch = '\'';
        if (!e.empty()) os << '"' << e << '"';
        os << '\n';
    }
}

void dump_matrix(const Scenario& sc, std::ostream& os) {
    Coefficient c = sc.coefficient.build();
    Mesh mesh = sc.build_mesh(c);
    AssemblyOptions ao;
    ao.flux = sc.mesh.flux;
    write_matrix_market(assemble(c, mesh, sc.bc.condition(0), ao), os);
}

}  // namespace degen
