#include "rod/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rod/ensemble.hpp"
#include "rod/io.hpp"
#include "rod/lax.hpp"
#include "rod/poincare.hpp"
#include "rod/reduction.hpp"
#include "rod/rng.hpp"
#include "rod/sim.hpp"
#include "rod/so3.hpp"

namespace rod {

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

// Walks a dotted path ("section.alpha") through nested objects.
const json* find_path(const json& root, const std::string& dotted) {
    const json* cur = &root;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dotpos = dotted.find('.', start);
        const std::string key = dotted.substr(
            start, dotpos == std::string::npos ? std::string::npos : dotpos - start);
        if (!cur->is_object() || !cur->contains(key)) return nullptr;
        cur = &cur->at(key);
        if (dotpos == std::string::npos) return cur;
        start = dotpos + 1;
    }
}

bool has_path(const json& root, const std::string& path) {
    return find_path(root, path) != nullptr;
}

double get_num(const json& root, const std::string& path) {
    const json* j = find_path(root, path);
    if (!j || !j->is_number())
        throw ConfigError("config field '" + path + "' must be a number");
    return j->get<double>();
}

double get_num_or(const json& root, const std::string& path, double fallback) {
    const json* j = find_path(root, path);
    if (!j) return fallback;
    if (!j->is_number())
        throw ConfigError("config field '" + path + "' must be a number");
    return j->get<double>();
}

int get_int(const json& root, const std::string& path) {
    const json* j = find_path(root, path);
    if (!j || !j->is_number_integer())
        throw ConfigError("config field '" + path + "' must be an integer");
    return j->get<int>();
}

std::size_t get_count_or(const json& root, const std::string& path, std::size_t fb) {
    const json* j = find_path(root, path);
    if (!j) return fb;
    if (!j->is_number_integer() || j->get<long long>() < 0)
        throw ConfigError("config field '" + path + "' must be a non-negative integer");
    return j->get<std::size_t>();
}

bool get_bool_or(const json& root, const std::string& path, bool fb) {
    const json* j = find_path(root, path);
    if (!j) return fb;
    if (!j->is_boolean())
        throw ConfigError("config field '" + path + "' must be a boolean");
    return j->get<bool>();
}

std::string get_str(const json& root, const std::string& path) {
    const json* j = find_path(root, path);
    if (!j || !j->is_string())
        throw ConfigError("config field '" + path + "' must be a string");
    return j->get<std::string>();
}

std::string get_str_or(const json& root, const std::string& path,
                       const std::string& fb) {
    const json* j = find_path(root, path);
    if (!j) return fb;
    if (!j->is_string())
        throw ConfigError("config field '" + path + "' must be a string");
    return j->get<std::string>();
}

Vec3 get_vec3(const json& root, const std::string& path) {
    const json* j = find_path(root, path);
    if (!j || !j->is_array() || j->size() != 3 || !(*j)[0].is_number() ||
        !(*j)[1].is_number() || !(*j)[2].is_number())
        throw ConfigError("config field '" + path + "' must be an array of 3 numbers");
    return {(*j)[0].get<double>(), (*j)[1].get<double>(), (*j)[2].get<double>()};
}

RodParams params_from(const json& root) {
    RodParams p;
    p.K1 = get_num_or(root, "params.K1", 1.0);
    p.K2 = get_num_or(root, "params.K2", 1.0);
    p.K3 = get_num_or(root, "params.K3", 1.0);
    p.validate();
    return p;
}

json params_to_json(const RodParams& p) {
    return json{{"K1", p.K1}, {"K2", p.K2}, {"K3", p.K3}};
}

const char* kFieldNames[4] = {"m", "n", "B", "D"};

std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

FieldState state_from(const json& root, const std::string& base, int level) {
    FieldState st(level);
    for (int i = 0; i <= level; ++i)
        st.f[i] = get_vec3(root, join(base, kFieldNames[i]));
    return st;
}

json state_to_json(const FieldState& st) {
    json j;
    for (int i = 0; i <= st.level; ++i)
        j[kFieldNames[i]] = {st.f[i].x, st.f[i].y, st.f[i].z};
    return j;
}

CasimirTriple triple_from(const json& root, const std::string& base) {
    return {get_num(root, join(base, "C1")), get_num(root, join(base, "C2")),
            get_num(root, join(base, "C3"))};
}

CanonicalState canonical_from(const json& root, const std::string& base) {
    return {get_num(root, join(base, "theta")),   get_num(root, join(base, "psi")),
            get_num(root, join(base, "phi")),     get_num(root, join(base, "p_theta")),
            get_num(root, join(base, "p_psi")),   get_num(root, join(base, "p_phi"))};
}

json canonical_to_json(const CanonicalState& z) {
    return json{{"theta", z.theta},     {"psi", z.psi},     {"phi", z.phi},
                {"p_theta", z.p_theta}, {"p_psi", z.p_psi}, {"p_phi", z.p_phi}};
}

void write_manifest(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << doc.dump(2) << '\n';
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

FieldState random_state(Rng& rng, int level, double amp) {
    FieldState st(level);
    for (int i = 0; i <= level; ++i)
        st.f[i] = Vec3{rng.uniform(-amp, amp), rng.uniform(-amp, amp),
                       rng.uniform(-amp, amp)};
    return st;
}

}  // namespace

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& config_path) {
    return guarded([&]() -> int {
        const json cfg = load_config(config_path);
        const int level = get_int(cfg, "level");
        FieldState::check_level(level);
        const RodParams params = params_from(cfg);
        const FieldState initial = state_from(cfg, "initial", level);
        const double s_end = get_num(cfg, "s_end");

        SimOptions so;
        so.tol = get_num_or(cfg, "tol", 1e-10);
        so.fixed_step = get_num_or(cfg, "fixed_step", 0.0);
        so.samples = get_count_or(cfg, "samples", 201);
        so.project_casimirs = get_bool_or(cfg, "project_casimirs", false);

        const SimResult res = simulate(initial, params, s_end, so);

        if (has_path(cfg, "output.trajectory_csv"))
            write_trajectory_csv(get_str(cfg, "output.trajectory_csv"), res);
        if (has_path(cfg, "output.curve_csv")) {
            const std::size_t csamples = get_count_or(cfg, "output.curve_samples", 1001);
            write_curve_csv(get_str(cfg, "output.curve_csv"),
                            reconstruct(res.trajectory, params, csamples));
        }

        double max_cas = 0.0;
        for (double d : res.casimir_drift) max_cas = std::max(max_cas, d);

        if (has_path(cfg, "output.manifest")) {
            json man;
            man["command"] = "simulate";
            man["level"] = level;
            man["params"] = params_to_json(params);
            man["s_end"] = s_end;
            man["tol"] = so.tol;
            man["samples"] = so.samples;
            man["project_casimirs"] = so.project_casimirs;
            man["initial"] = state_to_json(initial);
            man["final"] = state_to_json(res.final_state);
            man["steps_accepted"] = res.trajectory.n_accepted;
            man["steps_rejected"] = res.trajectory.n_rejected;
            man["rhs_calls"] = res.trajectory.n_rhs;
            man["hamiltonian_drift"] = res.hamiltonian_drift;
            man["casimir_drift"] = res.casimir_drift;
            json idrift = json::object();
            for (std::size_t i = 0; i < res.integral_drift.size(); ++i)
                idrift[res.sample_ledgers.front().integrals[i].name] =
                    res.integral_drift[i];
            man["integral_drift"] = idrift;
            write_manifest(get_str(cfg, "output.manifest"), man);
        }

        std::cout << "simulate: level " << level << ", s in [0, " << format_g17(s_end)
                  << "], H drift " << format_g17(res.hamiltonian_drift)
                  << ", max Casimir drift " << format_g17(max_cas) << '\n';
        return 0;
    });
}

int cmd_reduce(const std::string& config_path) {
    return guarded([&]() -> int {
        const json cfg = load_config(config_path);
        const RodParams params = params_from(cfg);

        const bool has_fields = has_path(cfg, "initial.fields");
        const bool has_canonical = has_path(cfg, "initial.canonical");
        if (has_fields == has_canonical)
            throw ConfigError(
                "config must provide exactly one of 'initial.fields' or "
                "'initial.canonical'");

        CanonicalState z0;
        CasimirTriple cas;
        if (has_fields) {
            if (has_path(cfg, "casimirs"))
                throw ConfigError(
                    "'casimirs' is derived from 'initial.fields'; give it only with "
                    "'initial.canonical'");
            const FieldState fs = state_from(cfg, "initial.fields", 2);
            cas = casimir_triple(fs);
            z0 = to_canonical(fs);
        } else {
            z0 = canonical_from(cfg, "initial.canonical");
            cas = triple_from(cfg, "casimirs");
        }

        const double s_end = get_num(cfg, "s_end");
        if (s_end == 0.0) throw ConfigError("config field 's_end' must be nonzero");
        const double tol = get_num_or(cfg, "tol", 1e-12);
        const std::size_t samples = std::max<std::size_t>(get_count_or(cfg, "samples", 201), 2);

        const RhsFn f = [&cas, &params](double, const std::vector<double>& y,
                                        std::vector<double>& dy) {
            const CanonicalState z{y[0], y[1], y[2], y[3], y[4], y[5]};
            const std::array<double, 6> d = reduced_rhs(z, cas, params);
            dy.assign(d.begin(), d.end());
        };
        IntegratorOptions io;
        io.tol = tol;
        const std::array<double, 6> zf = z0.flat();
        const Trajectory tr =
            integrate(f, std::vector<double>(zf.begin(), zf.end()), 0.0, s_end, io);

        std::vector<double> svals(samples);
        std::vector<CanonicalState> states(samples);
        std::vector<double> hcol(samples), icol(samples);
        std::vector<double> buf;
        double h_drift = 0.0, i_drift = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            svals[i] = s_end * static_cast<double>(i) / static_cast<double>(samples - 1);
            tr.eval(svals[i], buf);
            states[i] = {buf[0], buf[1], buf[2], buf[3], buf[4], buf[5]};
            hcol[i] = reduced_hamiltonian(states[i], cas, params);
            icol[i] = integral_I(states[i], cas, params);
            h_drift = std::max(h_drift, std::fabs(hcol[i] - hcol[0]));
            i_drift = std::max(i_drift, std::fabs(icol[i] - icol[0]));
        }

        if (has_path(cfg, "output.trajectory_csv"))
            write_reduced_csv(get_str(cfg, "output.trajectory_csv"), svals, states,
                              {"H", "I"}, {hcol, icol});

        if (has_path(cfg, "output.manifest")) {
            json man;
            man["command"] = "reduce";
            man["params"] = params_to_json(params);
            man["casimirs"] = {{"C1", cas.C1}, {"C2", cas.C2}, {"C3", cas.C3}};
            man["initial"] = canonical_to_json(z0);
            man["s_end"] = s_end;
            man["tol"] = tol;
            man["samples"] = samples;
            man["steps_accepted"] = tr.n_accepted;
            man["hamiltonian_drift"] = h_drift;
            man["integral_drift"] = i_drift;
            write_manifest(get_str(cfg, "output.manifest"), man);
        }

        std::cout << "reduce: s in [0, " << format_g17(s_end) << "], H drift "
                  << format_g17(h_drift) << ", I drift " << format_g17(i_drift) << '\n';
        return 0;
    });
}

int cmd_poincare(const std::string& config_path) {
    return guarded([&]() -> int {
        const json cfg = load_config(config_path);
        const RodParams params = params_from(cfg);
        const CasimirTriple cas = triple_from(cfg, "casimirs");

        SectionSpec spec;
        spec.alpha = get_num(cfg, "section.alpha");
        const std::string dir = get_str_or(cfg, "section.direction", "both");
        if (dir == "both")
            spec.direction = CrossingDirection::kBoth;
        else if (dir == "increasing")
            spec.direction = CrossingDirection::kIncreasing;
        else if (dir == "decreasing")
            spec.direction = CrossingDirection::kDecreasing;
        else
            throw ConfigError(
                "config field 'section.direction' must be 'both', 'increasing' or "
                "'decreasing'");
        spec.max_crossings = get_count_or(cfg, "section.max_crossings", 250);
        spec.max_arclength = get_num_or(cfg, "section.max_arclength", 2500.0);
        spec.tol = get_num_or(cfg, "section.tol", 1e-12);

        // Accepted for compatibility with run metadata; the sections themselves
        // do not depend on it.
        const bool has_lambda = has_path(cfg, "lambda");
        const double lambda = has_lambda ? get_num(cfg, "lambda") : 0.0;

        SectionWindow win;
        if (has_path(cfg, "window")) {
            const json* wt = find_path(cfg, "window.theta");
            const json* wp = find_path(cfg, "window.p_theta");
            if (!wt || !wt->is_array() || wt->size() != 2 || !wp || !wp->is_array() ||
                wp->size() != 2)
                throw ConfigError(
                    "config fields 'window.theta' and 'window.p_theta' must be "
                    "2-element arrays");
            win.theta_min = (*wt)[0].get<double>();
            win.theta_max = (*wt)[1].get<double>();
            win.p_theta_min = (*wp)[0].get<double>();
            win.p_theta_max = (*wp)[1].get<double>();
        }

        const bool has_level_set = has_path(cfg, "seeds.level_set");
        const bool has_explicit = has_path(cfg, "seeds.canonical");
        if (has_level_set == has_explicit)
            throw ConfigError(
                "config must provide exactly one of 'seeds.level_set' or "
                "'seeds.canonical'");

        std::vector<CanonicalState> seeds;
        if (has_level_set) {
            seeds = seeds_on_level_set(
                get_num(cfg, "seeds.level_set.hamiltonian"),
                get_num(cfg, "seeds.level_set.integral"), spec.alpha,
                get_num(cfg, "seeds.level_set.p_phi"), cas, params,
                get_count_or(cfg, "seeds.level_set.count", 1));
        } else {
            const json* arr = find_path(cfg, "seeds.canonical");
            if (!arr->is_array() || arr->empty())
                throw ConfigError(
                    "config field 'seeds.canonical' must be a non-empty array");
            for (std::size_t i = 0; i < arr->size(); ++i)
                seeds.push_back(canonical_from((*arr)[i], ""));
        }

        const bool parallel = get_bool_or(cfg, "parallel", true);
        const ScanResult res = scan(seeds, cas, params, spec, parallel);

        if (has_path(cfg, "output.points_csv"))
            write_section_csv(get_str(cfg, "output.points_csv"), res.points);

        double max_resid = 0.0;
        for (const SectionPoint& pt : res.points)
            max_resid = std::max(max_resid, pt.residual);

        json orbit_stats = json::array();
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            std::vector<SectionPoint> inwin;
            for (const SectionPoint& pt : res.points)
                if (pt.orbit_id == i && in_window(pt, win)) inwin.push_back(pt);
            json o;
            o["orbit_id"] = i;
            o["seed"] = canonical_to_json(seeds[i]);
            o["crossings"] = res.per_orbit[i];
            o["in_window"] = inwin.size();
            if (inwin.size() >= 8) {
                const CurveStats st = curve_statistic(inwin, win);
                o["median_thickness"] = st.median_thickness;
                o["max_nn_gap"] = st.max_nn_gap;
            }
            orbit_stats.push_back(o);
        }

        if (has_path(cfg, "output.manifest")) {
            json man;
            man["command"] = "poincare";
            man["params"] = params_to_json(params);
            man["casimirs"] = {{"C1", cas.C1}, {"C2", cas.C2}, {"C3", cas.C3}};
            man["section"] = {{"alpha", spec.alpha},
                              {"direction", dir},
                              {"max_crossings", spec.max_crossings},
                              {"max_arclength", spec.max_arclength},
                              {"tol", spec.tol}};
            if (has_lambda) man["lambda"] = lambda;
            man["window"] = {{"theta", {win.theta_min, win.theta_max}},
                             {"p_theta", {win.p_theta_min, win.p_theta_max}}};
            man["parallel"] = parallel;
            man["orbits"] = orbit_stats;
            man["total_crossings"] = res.points.size();
            man["max_residual"] = max_resid;
            write_manifest(get_str(cfg, "output.manifest"), man);
        }

        std::cout << "poincare: " << seeds.size() << " orbit(s), "
                  << res.points.size() << " crossings, max residual "
                  << format_g17(max_resid) << '\n';
        return 0;
    });
}

int cmd_laxcheck(const std::string& config_path) {
    return guarded([&]() -> int {
        const json cfg = load_config(config_path);
        const RodParams params = params_from(cfg);

        std::vector<int> levels;
        if (const json* jl = find_path(cfg, "levels")) {
            if (!jl->is_array() || jl->empty())
                throw ConfigError("config field 'levels' must be a non-empty array");
            for (const json& v : *jl) {
                if (!v.is_number_integer())
                    throw ConfigError("config field 'levels' must hold integers");
                FieldState::check_level(v.get<int>());
                levels.push_back(v.get<int>());
            }
        } else {
            levels = {0, 1, 2, 3};
        }

        const std::size_t count = get_count_or(cfg, "random_states.count", 100);
        const std::uint64_t seed =
            static_cast<std::uint64_t>(get_num_or(cfg, "random_states.seed", 20240817.0));
        const double amp = get_num_or(cfg, "random_states.amplitude", 1.0);

        std::vector<double> mus = {0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0, 8.0,
                                   1.0 / 3.0};
        if (const json* jm = find_path(cfg, "mu_samples")) {
            if (!jm->is_array() || jm->empty())
                throw ConfigError("config field 'mu_samples' must be a non-empty array");
            mus.clear();
            for (const json& v : *jm) {
                if (!v.is_number() || v.get<double>() == 0.0)
                    throw ConfigError(
                        "config field 'mu_samples' must hold nonzero numbers");
                mus.push_back(v.get<double>());
            }
        }

        const double s_end = get_num_or(cfg, "s_end", 50.0);
        const double tol = get_num_or(cfg, "tol", 1e-12);

        double coeff_defect = 0.0, comm_defect = 0.0, slot_defect = 0.0,
               ham_defect = 0.0, iso_defect = 0.0;

        Rng rng(seed);
        for (const int level : levels) {
            for (std::size_t c = 0; c < count; ++c) {
                const FieldState st = random_state(rng, level, amp);
                const LaxOperator L = lax_from_state(st, params);
                const LaxOperator d = lax_derivative(L, params);
                const FieldState dr = rhs(st, params);

                for (int k = 0; k < 3; ++k)
                    coeff_defect = std::max(coeff_defect, std::fabs(d.coeff[0][k]));
                for (int i = 0; i <= level; ++i)
                    for (int k = 0; k < 3; ++k)
                        coeff_defect = std::max(
                            coeff_defect,
                            std::fabs(d.coeff[static_cast<std::size_t>(i) + 1][k] -
                                      dr.f[i][k]));

                for (const double mu : mus) {
                    const Mat3 lhs = hat(lax_vector(d, mu));
                    const Mat3 rhs_m =
                        commutator(lax_matrix(L, mu), lax_flow_matrix(L, params, mu));
                    for (std::size_t k = 0; k < 9; ++k)
                        comm_defect =
                            std::max(comm_defect, std::fabs(lhs.a[k] - rhs_m.a[k]));
                }

                const SpectralInvariants inv = spectral_invariants(L);
                const std::vector<double> cs = casimirs(st);
                if (level == 0) {
                    slot_defect =
                        std::max(slot_defect, std::fabs(inv.at(0) - 0.5 * cs[0]));
                } else {
                    for (int k = 1; k <= level; ++k)
                        slot_defect = std::max(
                            slot_defect, std::fabs(inv.at(level - 1 + k) - cs[k - 1]));
                    slot_defect = std::max(
                        slot_defect, std::fabs(inv.at(2 * level) - 0.5 * cs[level]));
                }
                const Vec3 m = st.m();
                slot_defect =
                    std::max(slot_defect, std::fabs(inv.at(-1) - params.K1 * m.z));
                if (level >= 2)
                    slot_defect = std::max(
                        slot_defect, std::fabs(inv.at(1) - (dot(m, st.n()) +
                                                            params.K1 * st.B().z)));
                if (level >= 3)
                    slot_defect = std::max(
                        slot_defect,
                        std::fabs(inv.at(2) - (0.5 * dot(st.n(), st.n()) +
                                               dot(m, st.B()) + params.K1 * st.D().z)));

                ham_defect = std::max(
                    ham_defect,
                    std::fabs(lax_hamiltonian(L, params) - hamiltonian(st, params)));
            }

            // Isospectrality along one trajectory per level.
            Rng orng = rng.split(static_cast<std::uint64_t>(level));
            const FieldState init = random_state(orng, level, amp);
            SimOptions so;
            so.tol = tol;
            so.samples = 101;
            const SimResult sr = simulate(init, params, s_end, so);
            const SpectralInvariants inv0 =
                spectral_invariants(lax_from_state(init, params));
            std::vector<double> g0(mus.size());
            for (std::size_t k = 0; k < mus.size(); ++k)
                g0[k] = lax_eigenvalues(lax_from_state(init, params), mus[k])[1].imag();
            for (const FieldState& st : sr.sample_states) {
                const LaxOperator L = lax_from_state(st, params);
                const SpectralInvariants inv = spectral_invariants(L);
                for (int i = inv.min_index(); i <= inv.max_index(); ++i)
                    iso_defect = std::max(
                        iso_defect, std::fabs(inv.at(i) - inv0.at(i)) /
                                        std::max(1.0, std::fabs(inv0.at(i))));
                for (std::size_t k = 0; k < mus.size(); ++k)
                    iso_defect = std::max(
                        iso_defect,
                        std::fabs(lax_eigenvalues(L, mus[k])[1].imag() - g0[k]) /
                            std::max(1.0, std::fabs(g0[k])));
            }
        }

        struct Line {
            const char* name;
            double value;
            double limit;
        };
        const Line lines[] = {
            {"coefficient-match", coeff_defect, 1e-13},
            {"commutator-match", comm_defect, 1e-12},
            {"invariant-slots", slot_defect, 1e-13},
            {"hamiltonian-identity", ham_defect, 1e-13},
            {"isospectrality", iso_defect, 1e-8},
        };
        bool all_ok = true;
        json report;
        for (const Line& ln : lines) {
            const bool ok = ln.value < ln.limit;
            all_ok = all_ok && ok;
            std::cout << (ok ? "PASS " : "FAIL ") << ln.name << ": max defect "
                      << format_g17(ln.value) << " (limit " << format_g17(ln.limit)
                      << ")\n";
            report[ln.name] = {{"max_defect", ln.value},
                               {"limit", ln.limit},
                               {"pass", ok}};
        }
        if (has_path(cfg, "output.report")) {
            json man;
            man["command"] = "lax-check";
            man["params"] = params_to_json(params);
            man["levels"] = levels;
            man["mu_samples"] = mus;
            man["random_states"] = {{"count", count}, {"seed", seed}, {"amplitude", amp}};
            man["s_end"] = s_end;
            man["tol"] = tol;
            man["checks"] = report;
            write_manifest(get_str(cfg, "output.report"), man);
        }
        return all_ok ? 0 : 3;
    });
}

// ---------------------------------------------------------------------------
// Built-in verification suites.

namespace {

struct SuiteReport {
    bool ok = true;
    void metric(const std::string& name, double value, double limit) {
        const bool pass = value < limit;
        ok = ok && pass;
        std::cout << (pass ? "ok   " : "FAIL ") << name << " = " << format_g17(value)
                  << " (limit " << format_g17(limit) << ")\n";
    }
    void expect(const std::string& name, bool pass) {
        ok = ok && pass;
        std::cout << (pass ? "ok   " : "FAIL ") << name << '\n';
    }
};

ScalarField random_quadratic(Rng& rng, std::size_t dim) {
    std::vector<double> lin(dim), qa(dim);
    for (double& v : lin) v = rng.uniform(-1.0, 1.0);
    for (double& v : qa) v = rng.uniform(-1.0, 1.0);
    ScalarField f;
    f.value = [lin, qa](const std::vector<double>& y) {
        double s = 0.0, q = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            s += lin[i] * y[i];
            q += qa[i] * y[i];
        }
        return s + q * q;
    };
    return f;
}

bool suite_bracket() {
    std::cout << "[bracket]\n";
    SuiteReport rep;
    Rng rng(99);
    RodParams params{1.0, 1.3, 0.7};
    double skew = 0.0, antisym = 0.0, casdef = 0.0, flow = 0.0;
    for (int level = 0; level <= 3; ++level) {
        const std::size_t dim = 3 * static_cast<std::size_t>(level + 1);
        for (int trial = 0; trial < 5; ++trial) {
            const FieldState st = random_state(rng, level, 1.0);
            const ScalarField f = random_quadratic(rng, dim);
            const ScalarField g = random_quadratic(rng, dim);
            skew = std::max(skew, std::fabs(lie_poisson_bracket(f, f, st, level)));
            antisym = std::max(antisym,
                               std::fabs(lie_poisson_bracket(f, g, st, level) +
                                         lie_poisson_bracket(g, f, st, level)));

            const auto grads = casimir_gradients(st);
            for (std::size_t k = 0; k < grads.size(); ++k) {
                ScalarField ck;
                const int lvl = level;
                const std::size_t kk = k;
                ck.value = [lvl, kk](const std::vector<double>& y) {
                    return casimirs(FieldState::from_flat(lvl, y))[kk];
                };
                ck.gradient = [lvl, kk](const std::vector<double>& y) {
                    return casimir_gradients(FieldState::from_flat(lvl, y))[kk];
                };
                casdef = std::max(casdef,
                                  std::fabs(lie_poisson_bracket(ck, g, st, level)));
                casdef = std::max(casdef,
                                  std::fabs(lie_poisson_bracket(f, ck, st, level)));
            }

            // J grad(H) must reproduce the equations of motion.
            std::vector<double> gradH(dim, 0.0);
            const Vec3 u = strains(st.m(), params);
            gradH[0] = u.x;
            gradH[1] = u.y;
            gradH[2] = u.z;
            if (level >= 1) gradH[5] += 1.0;  // d/dn3 of the tension term
            const Matrix J = structure_matrix(st, level);
            const std::vector<double> jdh = J * gradH;
            const std::vector<double> dr = rhs(st, params).flat();
            for (std::size_t i = 0; i < dim; ++i)
                flow = std::max(flow, std::fabs(jdh[i] - dr[i]));
        }
    }
    rep.metric("bracket of a field with itself", skew, 1e-10);
    rep.metric("antisymmetry defect", antisym, 1e-10);
    rep.metric("casimir bracket defect", casdef, 1e-10);
    rep.metric("J grad(H) vs equations of motion", flow, 1e-13);
    return rep.ok;
}

bool suite_canonical() {
    std::cout << "[canonical]\n";
    SuiteReport rep;
    Rng rng(7);
    const RodParams iso{1.0, 1.0, 0.75};
    const RodParams aniso{1.1, 0.8, 0.9};
    double roundtrip = 0.0, jac = 0.0, defect = 0.0, hcomp = 0.0, icomp = 0.0;
    int done = 0, attempts = 0;
    while (done < 50 && attempts < 5000) {
        ++attempts;
        const FieldState st = random_state(rng, 2, 1.0);
        try {
            const CanonicalState z = to_canonical(st);
            // Keep clear of the chart's singular margins so finite differences
            // stay meaningful.
            if (std::fabs(std::sin(z.psi)) < 0.15 || z.theta < 0.15 ||
                z.theta > std::numbers::pi - 0.15)
                continue;
            const CasimirTriple cas = casimir_triple(st);
            if (transverse_tension_sq(z.p_psi, cas) < 0.05) continue;

            const FieldState back = from_canonical(z, cas);
            const std::vector<double> a = st.flat(), b = back.flat();
            for (std::size_t i = 0; i < a.size(); ++i)
                roundtrip = std::max(roundtrip, std::fabs(a[i] - b[i]));

            const Matrix Ga = chart_jacobian(st, cas);
            const Matrix Gf = chart_jacobian_fd(st, cas);
            jac = std::max(jac, (Ga - Gf).max_abs());
            defect = std::max(defect, canonical_defect(st));

            hcomp = std::max(hcomp, std::fabs(reduced_hamiltonian(z, cas, aniso) -
                                              hamiltonian(st, aniso)));
            const Vec3 m = st.m(), n = st.n(), B = st.B();
            icomp = std::max(icomp, std::fabs(integral_I(z, cas, iso) -
                                              (dot(n, m) + iso.K1 * B.z)));
            ++done;
        } catch (const NumericalError&) {
            continue;  // aligned/vertical draws are simply re-sampled
        }
    }
    rep.expect("sampled 50 chart-regular states", done == 50);
    rep.metric("round-trip error", roundtrip, 1e-9);
    rep.metric("closed-form vs finite-difference Jacobian", jac, 1e-6);
    rep.metric("G J G^T vs canonical structure", defect, 1e-6);
    rep.metric("reduced energy vs composition", hcomp, 1e-11);
    rep.metric("reduced integral vs composition", icomp, 1e-11);
    return rep.ok;
}

bool suite_lax() {
    std::cout << "[lax]\n";
    SuiteReport rep;
    Rng rng(11);
    const RodParams params{1.0, 1.0, 0.75};
    double coeff = 0.0, comm = 0.0, slots = 0.0, ham = 0.0;
    for (int level = 0; level <= 3; ++level) {
        for (int trial = 0; trial < 25; ++trial) {
            const FieldState st = random_state(rng, level, 1.0);
            const LaxOperator L = lax_from_state(st, params);
            const LaxOperator d = lax_derivative(L, params);
            const FieldState dr = rhs(st, params);
            for (int k = 0; k < 3; ++k)
                coeff = std::max(coeff, std::fabs(d.coeff[0][k]));
            for (int i = 0; i <= level; ++i)
                for (int k = 0; k < 3; ++k)
                    coeff = std::max(coeff,
                                     std::fabs(d.coeff[static_cast<std::size_t>(i) + 1][k] -
                                               dr.f[i][k]));
            for (const double mu : {0.5, -1.0, 2.0}) {
                const Mat3 lhs = hat(lax_vector(d, mu));
                const Mat3 cm =
                    commutator(lax_matrix(L, mu), lax_flow_matrix(L, params, mu));
                for (std::size_t k = 0; k < 9; ++k)
                    comm = std::max(comm, std::fabs(lhs.a[k] - cm.a[k]));
            }
            const SpectralInvariants inv = spectral_invariants(L);
            const std::vector<double> cs = casimirs(st);
            if (level == 0) {
                slots = std::max(slots, std::fabs(inv.at(0) - 0.5 * cs[0]));
            } else {
                for (int k = 1; k <= level; ++k)
                    slots = std::max(slots, std::fabs(inv.at(level - 1 + k) - cs[k - 1]));
                slots = std::max(slots, std::fabs(inv.at(2 * level) - 0.5 * cs[level]));
            }
            ham = std::max(ham, std::fabs(lax_hamiltonian(L, params) -
                                          hamiltonian(st, params)));
        }
    }
    rep.metric("derivative vs equations of motion", coeff, 1e-13);
    rep.metric("derivative vs commutator", comm, 1e-12);
    rep.metric("spectral coefficients vs casimirs", slots, 1e-13);
    rep.metric("spectral energy identity", ham, 1e-13);
    return rep.ok;
}

bool suite_align() {
    std::cout << "[align]\n";
    SuiteReport rep;
    const RodParams params{1.0, 1.3, 0.7};

    // Vertical stacks (every field along the symmetry axis) are equilibria:
    // they stay exactly aligned.
    for (int level = 2; level <= 3; ++level) {
        FieldState st(level);
        st.f[0] = {0.0, 0.0, 0.7};
        st.f[1] = {0.0, 0.0, -0.3};
        st.f[2] = {0.0, 0.0, 1.1};
        if (level == 3) st.f[3] = {0.0, 0.0, 0.4};
        SimOptions so;
        so.tol = 1e-11;
        so.samples = 51;
        const SimResult sr = simulate(st, params, 50.0, so);
        double worst = 0.0;
        for (const FieldState& s : sr.sample_states)
            worst = std::max(worst, alignment_defect(s));
        rep.metric("vertical stack stays aligned (level " + std::to_string(level) + ")",
                   worst, 1e-9);
    }

    // A tilted aligned pair (n parallel to B, but B off the axis) does NOT
    // stay aligned; the defect must grow to order one.
    FieldState tilted(2);
    tilted.f[0] = {0.3, -0.2, 0.5};
    tilted.f[1] = {0.4, 0.1, 0.8};
    tilted.f[2] = {0.4, 0.1, 0.8};
    SimOptions so;
    so.tol = 1e-11;
    so.samples = 51;
    const SimResult sr = simulate(tilted, params, 1.0, so);
    const double grown = alignment_defect(sr.final_state);
    rep.expect("tilted aligned pair de-aligns (defect " + format_g17(grown) + " > 0.01)",
               grown > 0.01);
    return rep.ok;
}

bool suite_roundtrip() {
    std::cout << "[roundtrip]\n";
    SuiteReport rep;
    Rng rng(13);
    double zerr = 0.0, cerr = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        CasimirTriple cas;
        cas.C3 = rng.uniform(0.3, 2.0);
        cas.C2 = rng.uniform(-1.0, 1.0);
        CanonicalState z;
        z.theta = rng.uniform(0.2, std::numbers::pi - 0.2);
        z.psi = rng.uniform(-3.0, 3.0);
        z.phi = rng.uniform(-3.0, 3.0);
        z.p_theta = rng.uniform(-1.5, 1.5);
        z.p_psi = rng.uniform(-1.5, 1.5);
        z.p_phi = rng.uniform(-1.5, 1.5);
        // Choose C1 so the transverse tension is comfortably positive.
        const double rad = rng.uniform(0.05, 2.0);
        cas.C1 = 0.5 * (rad + cas.C2 * cas.C2 / cas.C3 +
                        2.0 * std::sqrt(cas.C3) * z.p_psi);

        const FieldState st = from_canonical(z, cas);
        const CanonicalState zz = to_canonical(st);
        zerr = std::max(zerr, std::fabs(zz.theta - z.theta));
        zerr = std::max(zerr, std::fabs(angle_diff(zz.psi, z.psi)));
        zerr = std::max(zerr, std::fabs(angle_diff(zz.phi, z.phi)));
        zerr = std::max(zerr, std::fabs(zz.p_theta - z.p_theta));
        zerr = std::max(zerr, std::fabs(zz.p_psi - z.p_psi));
        zerr = std::max(zerr, std::fabs(zz.p_phi - z.p_phi));

        const CasimirTriple back = casimir_triple(st);
        cerr = std::max(cerr, std::fabs(back.C1 - cas.C1));
        cerr = std::max(cerr, std::fabs(back.C2 - cas.C2));
        cerr = std::max(cerr, std::fabs(back.C3 - cas.C3));
    }
    rep.metric("chart round-trip error", zerr, 1e-10);
    rep.metric("casimir reconstruction error", cerr, 1e-12);
    return rep.ok;
}

}  // namespace

int cmd_verify(const std::string& suite) {
    return guarded([&]() -> int {
        bool ok = true;
        bool ran = false;
        const bool all = (suite == "all");
        if (all || suite == "bracket") ok &= suite_bracket(), ran = true;
        if (all || suite == "canonical") ok &= suite_canonical(), ran = true;
        if (all || suite == "lax") ok &= suite_lax(), ran = true;
        if (all || suite == "align") ok &= suite_align(), ran = true;
        if (all || suite == "roundtrip") ok &= suite_roundtrip(), ran = true;
        if (!ran)
            throw ConfigError("unknown suite '" + suite +
                              "' (expected bracket, canonical, lax, align, roundtrip "
                              "or all)");
        std::cout << (ok ? "verify: all checks passed\n"
                         : "verify: some checks FAILED\n");
        return ok ? 0 : 3;
    });
}

}  // namespace rod
