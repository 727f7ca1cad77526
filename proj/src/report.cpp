#include "degen/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <string>

namespace degen {

Json number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

Json to_json(const HarmonicProfile& h) {
    Json j;
    j["origin"] = h.endpoint.origin;
    j["side"] = to_string(h.endpoint.side);
    j["reach"] = h.endpoint.reach;
    j["exponent"] = h.exponent;
    j["amplitude"] = h.amplitude;
    j["basis"] = to_string(h.basis);
    j["borderline"] = h.borderline;
    j["nu_in_l2"] = h.nu_in_l2;
    j["nu_in_linf"] = h.nu_in_linf;
    j["nu_l2_norm_sq"] = number(h.nu_l2_norm_sq);
    j["nu_sup"] = number(h.nu_sup);
    if (h.mu_available) {
        j["mu_exponent"] = h.mu_exponent;
        j["mu_in_linf"] = h.mu_in_linf;
        j["mu_sup"] = number(h.mu_sup);
    }
    return j;
}

Json to_json(const ClassificationReport& r) {
    Json j;
    j["case"] = to_string(r.kase);
    j["half_line"] = r.half_line;
    j["essentially_self_adjoint"] = r.essentially_self_adjoint;
    j["deficiency_indices"] = {r.deficiency_indices.first, r.deficiency_indices.second};
    j["unique_submarkovian"] = r.unique_submarkovian;
    Json menu = Json::array();
    for (const auto& e : r.extension_menu)
        menu.push_back({{"name", e.name}, {"condition", e.condition}, {"submarkovian", e.submarkovian},
                        {"realized", e.realized}});
    j["extension_menu"] = menu;
    j["growth_known"] = r.growth_known;
    if (r.growth_known) j["growth_inaccessible_at_infinity"] = r.growth_inaccessible_at_infinity;
    if (r.left) j["left"] = to_json(*r.left);
    if (r.right) j["right"] = to_json(*r.right);
    return j;
}

Json to_json(const Mesh& m) {
    return {{"geometry", m.geometry.describe()}, {"n_cells", m.n_cells},   {"grading", m.grading_ratio},
            {"h_min", m.h_min},                  {"h_max", m.h_max},       {"lo", m.nodes.front()},
            {"hi", m.nodes.back()}};
}

Json to_json(const DeficiencyResult& d) {
    Json j;
    j["index"] = d.index;
    j["eps"] = d.eps;
    Json seeds = Json::array();
    for (std::size_t k = 0; k < 2; ++k) {
        Json m = Json::array();
        for (double v : d.mass[k]) m.push_back(number(v));
        seeds.push_back({{"partial_mass", m}, {"ratio", number(d.ratio[k])}, {"divergent", d.divergent[k]}});
    }
    j["seeds"] = seeds;
    return j;
}

Json to_json(const EtaProperties& e) {
    Json lp;
    for (const char* p : {"1", "2", "3.5", "4.5", "inf"}) lp[p] = e.lp_member(std::stod(p));
    return {{"positive", e.positive},           {"non_increasing", e.non_increasing},
            {"tail_exponent", e.tail_exponent}, {"snapped", e.snapped},
            {"bounded", e.bounded},             {"lp_member", lp}};
}

Json to_json(const BlowupResult& b) {
    return {{"monotone_square", b.monotone_square}, {"growth_factor", number(b.growth_factor)},
            {"start", b.start},                     {"x0", b.x0},
            {"x_end", b.x_end},                     {"truncated", b.solution.truncated}};
}

Json to_json(const SnapshotMetrics& m) {
    return {{"min", m.min_value},       {"sup", m.sup_norm},          {"l1", m.l1_mass},
            {"integral", m.integral},   {"l2", m.l2_norm},            {"mass_left", m.mass_left},
            {"mass_right", m.mass_right}};
}

Json to_json(const Conservation& c) {
    return {{"max_mass_drift", c.max_mass_drift}, {"far_outflow", c.far_outflow}, {"absorbed", c.absorbed}};
}

Json to_json(const KreinDiagnostics& k) {
    return {{"gamma", k.gamma},
            {"kappa", k.kappa},
            {"second", k.second},
            {"rank_ratio", k.rank_ratio},
            {"range_alignment", number(k.range_alignment)},
            {"baseline", k.baseline},
            {"extension", k.extension},
            {"dofs", k.dofs}};
}

Json to_json(const Decomposition& d) {
    Json comps = Json::array();
    for (const auto& c : d.components) {
        auto end = [](const ComponentEnd& e) {
            Json j{{"kind", to_string(e.kind)}, {"x", number(e.x)}, {"plateau_edge", e.plateau_edge}};
            if (e.profile) {
                j["exponent"] = e.profile->exponent;
                j["nu_in_l2"] = e.profile->nu_in_l2;
                j["nu_in_linf"] = e.profile->nu_in_linf;
            }
            return j;
        };
        comps.push_back({{"lo", number(c.lo)},
                         {"hi", number(c.hi)},
                         {"lo_end", end(c.lo_end)},
                         {"hi_end", end(c.hi_end)},
                         {"case", to_string(c.report.kase)},
                         {"unique_submarkovian", c.report.unique_submarkovian}});
    }
    Json plateaus = Json::array();
    for (const auto& p : d.plateau_blocks) plateaus.push_back({p.first, p.second});
    return {{"components", comps},
            {"plateau_blocks", plateaus},
            {"zero_points", d.zero_points},
            {"lipschitz", d.lipschitz},
            {"flags", d.flags}};
}

std::string timestamp_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

}  // namespace degen
