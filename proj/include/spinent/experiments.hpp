// Copyright 2026 The spinent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// experiments.hpp: schema-checked experiment configs, the drivers behind each
// CLI subcommand, and run manifests.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinent/config.hpp"
#include "spinent/dynamics.hpp"
#include "spinent/effective.hpp"
#include "spinent/ensemble.hpp"
#include "spinent/hamiltonians.hpp"
#include "spinent/lindblad.hpp"
#include "spinent/measures.hpp"
#include "spinent/output.hpp"
#include "spinent/protocol.hpp"

namespace spinent {

inline constexpr const char* kVersion = "1.0.0";

enum class Experiment { P1, P2, ScanB, Disorder, Dephasing, NonMarkovian, Effective, MeasuresDemo };

inline const std::vector<std::pair<std::string, Experiment>>& experiment_names() {
    static const std::vector<std::pair<std::string, Experiment>> names = {
        {"p1", Experiment::P1},
        {"p2", Experiment::P2},
        {"scan_b", Experiment::ScanB},
        {"disorder", Experiment::Disorder},
        {"dephasing", Experiment::Dephasing},
        {"nonmarkovian", Experiment::NonMarkovian},
        {"effective", Experiment::Effective},
        {"measures-demo", Experiment::MeasuresDemo},
    };
    return names;
}

inline std::string to_string(Experiment e) {
    for (const auto& [n, v] : experiment_names()) {
        if (v == e) return n;
    }
    return "p1";
}

// Boundary field used for the weak-boundary chain when none is configured.
inline double default_p2_field(SpinValue spin) {
    switch (spin.twice()) {
        case 1: return 3.7;
        case 2: return 2.9;
        default: return 4.7;
    }
}

// ---------------------------------------------------------------------------
// Schema

struct KeySpec {
    std::string key;
    std::string default_value;  // empty: derived at run time
    std::string help;
};

inline const std::vector<KeySpec>& config_schema() {
    static const std::vector<KeySpec> schema = {
        {"experiment", "p1", "p1 | p2 | scan_b | disorder | dephasing | nonmarkovian | effective | measures-demo"},
        {"output.name", "", "stem of output files (default: experiment name)"},
        {"seed", "0", "root seed for every random stream"},
        {"chain.n_sites", "7", "number of sites N"},
        {"chain.spin", "1/2", "site spin s: 1/2, 1 or 3/2"},
        {"chain.delta_strong", "10", "strong coupling Delta (units of delta)"},
        {"chain.delta_weak", "1", "weak coupling delta, the energy unit"},
        {"chain.field", "", "boundary field B of the weak-boundary chain (default 3.7, 2.9, 4.7 by spin)"},
        {"grid.t_start", "0", "first time point"},
        {"grid.t_end", "", "last time point (default: twice the peak-time estimate)"},
        {"grid.n_points", "2000", "number of time points"},
        {"rz.convention", "spin_z", "R_z sign: spin_z = exp(-i theta S_z), label = diag(e^{-i theta/2}, e^{i theta/2})"},
        {"scan.fields", "0:8:0.1", "boundary fields to scan"},
        {"scan.t_end", "40", "scan horizon"},
        {"scan.n_points", "801", "time points per field"},
        {"disorder.kind", "diagonal", "diagonal | offdiagonal | both"},
        {"disorder.strengths", "0:1:0.1", "disorder strengths E (units of delta)"},
        {"disorder.n_realizations", "1000", "realizations per strength"},
        {"disorder.protocols", "p1,p2", "protocols to run"},
        {"disorder.full_chain_diagonal", "false", "on-site disorder on every site instead of the boundary pair"},
        {"disorder.sample_std", "false", "sample instead of population standard deviation"},
        {"disorder.dump_realizations", "false", "also write per-realization peaks"},
        {"disorder.n_points", "2000", "time points per realization"},
        {"disorder.reading", "window_max", "window_max (maximum over [0, 2 t_clean]) | clean_time (value at t_clean)"},
        {"dephasing.gammas", "0,0.005,0.01,0.02,0.05,0.1", "dephasing rates"},
        {"dephasing.strong_couplings", "10,30", "Delta values"},
        {"dephasing.fields", "3.7,8.8", "weak-boundary field for each Delta"},
        {"dephasing.n_points", "1000", "time points per trajectory"},
        {"nonmarkovian.protocols", "p1,p2", "protocols to run"},
        {"nonmarkovian.g", "0.01,0.0215443469,0.0464158883,0.1,0.215443469,0.464158883,1", "system-mode couplings"},
        {"nonmarkovian.kappas", "0.01,1,100", "pseudomode decay rates"},
        {"nonmarkovian.omega_a", "0", "pseudomode frequency"},
        {"nonmarkovian.n_max", "3", "highest pseudomode Fock level kept"},
        {"nonmarkovian.n_points", "400", "time points per trajectory"},
    };
    return schema;
}

// Checks every key against the schema and fills defaults. Unknown keys are
// reported with their source line.
inline Config resolve_config(const Config& in) {
    const auto& schema = config_schema();
    for (const auto& [key, e] : in.entries()) {
        const bool known = std::any_of(schema.begin(), schema.end(), [&](const KeySpec& k) { return k.key == key; });
        if (!known) throw ConfigError(e.source, e.line, "unknown key '" + key + "'");
    }
    Config out = in;
    for (const auto& k : schema) {
        if (!out.has(k.key) && !k.default_value.empty()) out.set(k.key, k.default_value);
    }
    return out;
}

struct ExperimentConfig {
    Experiment experiment = Experiment::P1;
    std::string name;
    std::uint64_t seed = 0;

    int n_sites = 7;
    SpinValue spin = SpinValue::from_twice(1);
    double strong = 10.0;
    double weak = 1.0;
    double field = 3.7;
    bool field_set = false;

    double t_start = 0.0;
    std::optional<double> t_end;
    int n_points = kDefaultGridPoints;
    RzConvention rz = kDefaultRzConvention;

    std::vector<double> scan_fields;
    double scan_t_end = 40.0;
    int scan_n_points = 801;

    DisorderKind disorder_kind = DisorderKind::Diagonal;
    std::vector<double> disorder_strengths;
    int n_realizations = 1000;
    std::vector<Protocol> disorder_protocols;
    bool full_chain_diagonal = false;
    bool sample_std = false;
    bool dump_realizations = false;
    int disorder_n_points = kDefaultGridPoints;
    bool disorder_at_clean_time = false;

    std::vector<double> gammas;
    std::vector<double> dephasing_strong;
    std::vector<double> dephasing_fields;
    int dephasing_n_points = 1000;

    std::vector<Protocol> nm_protocols;
    std::vector<double> nm_g;
    std::vector<double> nm_kappas;
    double omega_a = 0.0;
    int n_max = 3;
    int nm_n_points = 400;

    Config resolved;
};

namespace detail {

inline ConfigError key_error(const Config& c, const std::string& key, const std::string& msg) {
    const auto& e = c.entry(key);
    return ConfigError(e.source, e.line, "key '" + key + "': " + msg);
}

inline std::vector<Protocol> protocol_list(const Config& c, const std::string& key) {
    std::vector<Protocol> out;
    for (const auto& p : get_string_list(c, key)) {
        if (p == "p1") {
            out.push_back(Protocol::P1);
        } else if (p == "p2") {
            out.push_back(Protocol::P2);
        } else {
            throw key_error(c, key, "unknown protocol '" + p + "'");
        }
    }
    return out;
}

inline int positive_int(const Config& c, const std::string& key, int minimum) {
    const long long v = get_int(c, key);
    if (v < minimum || v > 100'000'000) throw key_error(c, key, "must be >= " + std::to_string(minimum));
    return static_cast<int>(v);
}

}  // namespace detail

inline ExperimentConfig parse_experiment(const Config& raw) {
    const Config c = resolve_config(raw);
    ExperimentConfig x;
    x.resolved = c;
    std::vector<std::string> names;
    for (const auto& [n, v] : experiment_names()) names.push_back(n);
    const std::string exp = get_choice(c, "experiment", names);
    for (const auto& [n, v] : experiment_names()) {
        if (n == exp) x.experiment = v;
    }
    x.name = c.has("output.name") ? get_string(c, "output.name") : exp;
    if (x.name.empty() || x.name.find_first_of("/\\") != std::string::npos) {
        throw detail::key_error(c, "output.name", "must be a plain file stem");
    }
    x.seed = get_uint64(c, "seed");

    x.n_sites = static_cast<int>(get_int(c, "chain.n_sites"));
    if (x.n_sites < 2) throw detail::key_error(c, "chain.n_sites", "chain needs at least two sites");
    if (x.n_sites > 40) throw detail::key_error(c, "chain.n_sites", "chain length above 40 is not supported");
    try {
        x.spin = SpinValue::from_double(get_double(c, "chain.spin"));
    } catch (const UnsupportedSpin&) {
        throw detail::key_error(c, "chain.spin", "supported spins are 1/2, 1 and 3/2");
    }
    x.strong = get_double(c, "chain.delta_strong");
    x.weak = get_double(c, "chain.delta_weak");
    if (!(x.strong > 0.0)) throw detail::key_error(c, "chain.delta_strong", "must be > 0");
    if (!(x.weak > 0.0)) throw detail::key_error(c, "chain.delta_weak", "must be > 0");
    x.field_set = c.has("chain.field");
    x.field = x.field_set ? get_double(c, "chain.field") : default_p2_field(x.spin);

    x.t_start = get_double(c, "grid.t_start");
    if (c.has("grid.t_end")) x.t_end = get_double(c, "grid.t_end");
    x.n_points = detail::positive_int(c, "grid.n_points", 2);
    if (x.t_end && !(*x.t_end > x.t_start)) throw detail::key_error(c, "grid.t_end", "must exceed grid.t_start");
    if (x.t_start < 0.0) throw detail::key_error(c, "grid.t_start", "must be >= 0");
    x.rz = get_choice(c, "rz.convention", {"spin_z", "label"}) == "label" ? RzConvention::Label : RzConvention::SpinZ;

    x.scan_fields = get_double_list(c, "scan.fields");
    x.scan_t_end = get_double(c, "scan.t_end");
    if (!(x.scan_t_end > 0.0)) throw detail::key_error(c, "scan.t_end", "must be > 0");
    x.scan_n_points = detail::positive_int(c, "scan.n_points", 2);

    const std::string kind = get_choice(c, "disorder.kind", {"diagonal", "offdiagonal", "both"});
    x.disorder_kind = kind == "diagonal" ? DisorderKind::Diagonal
                      : kind == "offdiagonal" ? DisorderKind::OffDiagonal
                                              : DisorderKind::Both;
    x.disorder_strengths = get_double_list(c, "disorder.strengths");
    for (double e : x.disorder_strengths) {
        if (e < 0.0) throw detail::key_error(c, "disorder.strengths", "strengths must be >= 0");
    }
    x.n_realizations = detail::positive_int(c, "disorder.n_realizations", 1);
    x.disorder_protocols = detail::protocol_list(c, "disorder.protocols");
    x.full_chain_diagonal = get_bool(c, "disorder.full_chain_diagonal");
    x.sample_std = get_bool(c, "disorder.sample_std");
    x.dump_realizations = get_bool(c, "disorder.dump_realizations");
    x.disorder_n_points = detail::positive_int(c, "disorder.n_points", 3);
    x.disorder_at_clean_time = get_choice(c, "disorder.reading", {"window_max", "clean_time"}) == "clean_time";

    x.gammas = get_double_list(c, "dephasing.gammas");
    for (double g : x.gammas) {
        if (g < 0.0) throw detail::key_error(c, "dephasing.gammas", "rates must be >= 0");
    }
    x.dephasing_strong = get_double_list(c, "dephasing.strong_couplings");
    x.dephasing_fields = get_double_list(c, "dephasing.fields");
    if (x.dephasing_fields.size() != x.dephasing_strong.size()) {
        throw detail::key_error(c, "dephasing.fields", "needs one field per strong coupling");
    }
    x.dephasing_n_points = detail::positive_int(c, "dephasing.n_points", 3);

    x.nm_protocols = detail::protocol_list(c, "nonmarkovian.protocols");
    x.nm_g = get_double_list(c, "nonmarkovian.g");
    x.nm_kappas = get_double_list(c, "nonmarkovian.kappas");
    for (double k : x.nm_kappas) {
        if (!(k > 0.0)) throw detail::key_error(c, "nonmarkovian.kappas", "kappa must be > 0");
    }
    x.omega_a = get_double(c, "nonmarkovian.omega_a");
    x.n_max = detail::positive_int(c, "nonmarkovian.n_max", 1);
    x.nm_n_points = detail::positive_int(c, "nonmarkovian.n_points", 3);

    // Structural checks that would otherwise fail deep inside a run.
    auto uses = [](const std::vector<Protocol>& v, Protocol p) { return std::find(v.begin(), v.end(), p) != v.end(); };
    const bool needs_p1 = x.experiment == Experiment::P1 || x.experiment == Experiment::Dephasing ||
                          (x.experiment == Experiment::Disorder && uses(x.disorder_protocols, Protocol::P1)) ||
                          (x.experiment == Experiment::NonMarkovian && uses(x.nm_protocols, Protocol::P1));
    if (needs_p1) {
        try {
            p1_pattern(x.n_sites, x.strong, x.weak);
        } catch (const Error& e) {
            throw detail::key_error(c, "chain.n_sites", e.what());
        }
    }
    if (x.experiment != Experiment::P1 && x.experiment != Experiment::MeasuresDemo && x.n_sites < 3) {
        throw detail::key_error(c, "chain.n_sites", "weak-boundary chain needs N >= 3");
    }
    if (x.experiment == Experiment::NonMarkovian) {
        PseudomodeSpec pm;
        pm.n_max = x.n_max;
        const ChainSpec probe = p2_chain(x.n_sites, x.spin, x.strong, x.weak, x.field);
        try {
            check_pseudomode_budget(probe, pm);
        } catch (const Error& e) {
            throw detail::key_error(c, "nonmarkovian.n_max", e.what());
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Results

struct OutputFile {
    std::string name;
    std::string content;
};

struct RunResult {
    std::vector<OutputFile> files;
    nlohmann::json results = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
};

inline nlohmann::json conventions_json(RzConvention rz) {
    return {
        {"operators", "literal spin-s matrices; S = sigma/2 for s = 1/2; an XX bond J hops one quantum with J/2"},
        {"units", "weak coupling delta = 1 sets energies; times in units of 1/delta"},
        {"local_basis", "level n <-> m = -s + n; site 0 most significant"},
        {"rz_convention", to_string(rz)},
        {"rz_angle", kExtractionAngle},
        {"negativity", "(||rho^T_A||_1 - 1)/2, normalized by (d-1)/2"},
        {"entropy_units", "bits"},
        {"horizon", "2x peak-time estimate (dimerized: trimer time / 2s; weak-boundary: pi/(4|j_eff|) when "
                    "dispersive, else the trimer time of the same couplings); ensembles and open runs: 2x the clean "
                    "closed peak time"},
        {"std", "population standard deviation unless disorder.sample_std = true"},
    };
}

inline nlohmann::json effective_json(const ExperimentConfig& x) {
    nlohmann::json j;
    j["trimer_eta"] = trimer_eta(x.strong, x.weak);
    const BandSpectrum b = band_spectrum(x.strong, x.weak);
    j["band"] = {{"e0", b.e0}, {"e_pm1", b.e_p1}, {"e_pm2", b.e_p2}, {"e_pm3", b.e_p3}};
    j["p1_peak_estimate"] = p1_peak_estimate(x.strong, x.weak);
    if (x.n_sites >= 3) {
        try {
            const P2EffectiveModel m = p2_effective(x.n_sites - 2, x.strong, x.weak, x.field);
            j["p2"] = {{"field", x.field},
                       {"lambda_bar", m.lambda_bar},
                       {"zeta", m.zeta},
                       {"j_eff", m.j_eff},
                       {"boundary_shift", m.boundary_shift},
                       {"gamma_eff_per_gamma", m.dephasing_rate(1.0)},
                       {"gamma_eff_per_gamma_single_detuning", m.dephasing_rate_single_detuning(1.0)},
                       {"max_lambda_over_zeta", m.dispersive_ratio},
                       {"dispersive", m.dispersive()},
                       {"peak_time_estimate", m.j_eff != 0.0 ? p2_effective_peak_time(m) : 0.0}};
        } catch (const ResonantMode& e) {
            j["p2"] = {{"field", x.field}, {"error", e.what()}};
        }
    }
    return j;
}

inline ChainSpec chain_for(const ExperimentConfig& x, Protocol p, std::optional<double> strong = {},
                           std::optional<double> field = {}) {
    const double big = strong.value_or(x.strong);
    if (p == Protocol::P1) return p1_chain(x.n_sites, x.spin, big, x.weak);
    return p2_chain(x.n_sites, x.spin, big, x.weak, field.value_or(x.field));
}

inline nlohmann::json peak_json(const Peak& p) {
    return {{"value", p.value}, {"time", p.time}, {"grid_index", p.index}};
}

// time, negativity, normalized_negativity, fidelity_bell, bulk_population
inline RunResult run_protocol(const ExperimentConfig& x) {
    const Protocol proto = x.experiment == Experiment::P1 ? Protocol::P1 : Protocol::P2;
    const ChainSpec chain = chain_for(x, proto);
    const TimeEstimate est = protocol_time_estimate(chain);
    const TimeGrid grid = x.t_end ? TimeGrid{x.t_start, *x.t_end, x.n_points}
                                  : TimeGrid{x.t_start, x.t_start + 2.0 * est.time, x.n_points};
    const ClosedProtocol p(chain, x.rz);
    const ProtocolSeries s = run_closed_protocol(p, grid);
    CsvTable csv({"time", "negativity", "normalized_negativity", "fidelity_bell", "bulk_population"});
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        const auto& v = s.values[i];
        csv.add_row({s.times[i], v.negativity, v.normalized_negativity, v.fidelity_bell, v.bulk_population});
    }
    RunResult r;
    r.files.push_back({x.name + ".csv", csv.str()});
    r.results = {{"protocol", to_string(proto)},
                 {"peak", peak_json(s.peak)},
                 {"fidelity_bell_at_peak", s.at_peak.fidelity_bell},
                 {"negativity_at_peak", s.at_peak.negativity},
                 {"max_bulk_population", s.max_bulk_population},
                 {"sector_dim", p.basis().dim()},
                 {"solver", s.solver},
                 {"grid", {{"t_start", grid.t_start}, {"t_end", grid.t_end}, {"n_points", grid.n_points}}},
                 {"time_estimate", {{"time", est.time}, {"source", to_string(est.source)}}}};
    if (proto == Protocol::P2) r.results["field"] = x.field;
    return r;
}

struct ScanResult {
    std::vector<double> fields;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // [field][time]
    double best_field = 0.0;
    double best_time = 0.0;
    double best_value = -1.0;
};

inline ScanResult scan_boundary_field(const ExperimentConfig& x, int threads = 1) {
    ScanResult s;
    s.fields = x.scan_fields;
    s.times = TimeGrid{0.0, x.scan_t_end, x.scan_n_points}.times();
    s.values.assign(s.fields.size(), {});
    parallel_for(s.fields.size(), threads, [&](std::size_t i) {
        const ClosedProtocol p(p2_chain(x.n_sites, x.spin, x.strong, x.weak, s.fields[i]), x.rz);
        std::vector<double> row;
        row.reserve(s.times.size());
        for (double t : s.times) row.push_back(p.normalized_negativity_at(t));
        s.values[i] = std::move(row);
    });
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            if (s.values[i][k] > s.best_value) {
                s.best_value = s.values[i][k];
                s.best_field = s.fields[i];
                s.best_time = s.times[k];
            }
        }
    }
    return s;
}

// B, t, normalized_negativity
inline RunResult run_scan(const ExperimentConfig& x, int threads) {
    const ScanResult s = scan_boundary_field(x, threads);
    CsvTable csv({"B", "t", "normalized_negativity"});
    for (std::size_t i = 0; i < s.fields.size(); ++i) {
        for (std::size_t k = 0; k < s.times.size(); ++k) csv.add_row({s.fields[i], s.times[k], s.values[i][k]});
    }
    // Refined peak along time at the best field.
    const ClosedProtocol best(p2_chain(x.n_sites, x.spin, x.strong, x.weak, s.best_field), x.rz);
    const auto it = std::find(s.fields.begin(), s.fields.end(), s.best_field);
    const Peak refined = find_peak(s.times, s.values[static_cast<std::size_t>(it - s.fields.begin())],
                                   [&](double t) { return best.normalized_negativity_at(t); });
    RunResult r;
    r.files.push_back({x.name + ".csv", csv.str()});
    r.results = {{"argmax", {{"B", s.best_field}, {"t", s.best_time}, {"normalized_negativity", s.best_value}}},
                 {"refined_peak_at_argmax", peak_json(refined)},
                 {"n_fields", s.fields.size()},
                 {"n_times", s.times.size()}};
    return r;
}

// E, mean_peak, std_peak, n_realizations, seed (one file per protocol)
inline RunResult run_disorder(const ExperimentConfig& x, int threads) {
    RunResult r;
    for (Protocol proto : x.disorder_protocols) {
        const ChainSpec clean = chain_for(x, proto);
        const Peak clean_peak = closed_negativity_peak(clean, default_time_grid(clean, x.disorder_n_points));
        const TimeGrid grid{0.0, 2.0 * clean_peak.time, x.disorder_n_points};
        CsvTable csv({"E", "mean_peak", "std_peak", "n_realizations", "seed"});
        CsvTable dump({"E", "r", "peak"});
        nlohmann::json rows = nlohmann::json::array();
        for (double e : x.disorder_strengths) {
            DisorderConfig cfg;
            cfg.kind = x.disorder_kind;
            cfg.strength = e;
            cfg.n_realizations = x.n_realizations;
            cfg.seed = x.seed;
            cfg.full_chain_diagonal = x.full_chain_diagonal;
            const EnsembleStats st =
                run_ensemble(clean, cfg, grid, threads, x.sample_std,
                             x.disorder_at_clean_time ? std::optional<double>(clean_peak.time) : std::nullopt);
            csv.add_row({e, st.mean, st.stddev, static_cast<long long>(st.n_realizations), std::to_string(st.seed)});
            if (x.dump_realizations) {
                for (std::size_t i = 0; i < st.peaks.size(); ++i) {
                    dump.add_row({e, static_cast<long long>(i), st.peaks[i]});
                }
            }
            rows.push_back({{"E", e}, {"mean", st.mean}, {"std", st.stddev}});
        }
        const std::string stem = x.name + "_" + to_string(proto);
        r.files.push_back({stem + ".csv", csv.str()});
        if (x.dump_realizations) r.files.push_back({stem + "_realizations.csv", dump.str()});
        r.results[to_string(proto)] = {{"clean_peak", peak_json(clean_peak)},
                                       {"horizon", grid.t_end},
                                       {"curve", rows},
                                       {"stream_label", disorder_stream_label(x.disorder_kind)}};
    }
    r.results["kind"] = to_string(x.disorder_kind);
    r.results["diagonal_sites"] = x.full_chain_diagonal ? "all" : "1,N";
    r.results["reading"] = x.disorder_at_clean_time ? "clean_time" : "window_max";
    r.results["notes"] = {
        "diagonal disorder acts on the field-carrying boundary sites 1 and N; the index N-1 in the displayed "
        "perturbation is treated as a typo",
        x.disorder_at_clean_time ? "values are normalized negativities at t_clean, the clean-chain peak time"
                                 : "peaks are maxima over [0, 2 t_clean], t_clean the clean-chain peak time"};
    return r;
}

struct OpenPeak {
    double peak = 0.0;
    double peak_time = 0.0;
    double max_bulk_population = 0.0;
    OpenDiagnostics diagnostics;
};

// Sector-representation dephasing run over twice the clean peak time.
inline OpenPeak dephasing_peak(const ChainSpec& chain, double gamma, int n_points, double horizon) {
    const QuantumState psi0 = initial_state(chain);
    const OpenSystemSpec spec = dephasing_spec(chain, *psi0.basis, gamma);
    const TracePartition part = boundary_partition(*psi0.basis);
    const Eigen::VectorXd bulk = bulk_excitation_diagonal(*psi0.basis);
    const int d = chain.spin.local_dim();
    const TimeGrid grid{0.0, horizon, n_points};
    std::vector<double> neg(static_cast<std::size_t>(n_points));
    OpenPeak out;
    const OpenTrajectory tr = evolve_lindblad(spec, pure_density(psi0.amplitudes), grid, {}, [&](std::size_t i, double, const Eigen::MatrixXcd& rho) {
        neg[i] = negativity(reduce_mixed(part, rho), {d, d}) / max_negativity(d);
        out.max_bulk_population = std::max(out.max_bulk_population, (rho.diagonal().real().array() * bulk.array()).sum());
    });
    const Peak p = find_peak(tr.times, neg);
    out.peak = p.value;
    out.peak_time = p.time;
    out.diagnostics = tr.diagnostics;
    return out;
}

// gamma, Delta_ratio, protocol, peak_neg_norm, max_bulk_population
inline RunResult run_dephasing(const ExperimentConfig& x, int threads) {
    struct Cell {
        double strong, field, gamma;
        Protocol proto;
        double horizon = 0.0;
        OpenPeak result;
    };
    std::vector<Cell> cells;
    for (std::size_t k = 0; k < x.dephasing_strong.size(); ++k) {
        for (Protocol proto : {Protocol::P1, Protocol::P2}) {
            const ChainSpec chain = chain_for(x, proto, x.dephasing_strong[k], x.dephasing_fields[k]);
            const double horizon = 2.0 * closed_negativity_peak(chain, default_time_grid(chain)).time;
            for (double g : x.gammas) cells.push_back({x.dephasing_strong[k], x.dephasing_fields[k], g, proto, horizon, {}});
        }
    }
    parallel_for(cells.size(), threads, [&](std::size_t i) {
        Cell& c = cells[i];
        c.result = dephasing_peak(chain_for(x, c.proto, c.strong, c.field), c.gamma, x.dephasing_n_points, c.horizon);
    });
    CsvTable csv({"gamma", "Delta_ratio", "protocol", "peak_neg_norm", "max_bulk_population"});
    nlohmann::json diag = nlohmann::json::array();
    for (const auto& c : cells) {
        csv.add_row({c.gamma, c.strong / x.weak, to_string(c.proto), c.result.peak, c.result.max_bulk_population});
        diag.push_back({{"gamma", c.gamma},
                        {"Delta", c.strong},
                        {"protocol", to_string(c.proto)},
                        {"horizon", c.horizon},
                        {"peak_time", c.result.peak_time},
                        {"max_trace_drift", c.result.diagnostics.max_trace_drift},
                        {"min_eigenvalue", c.result.diagnostics.min_eigenvalue},
                        {"accepted_steps", c.result.diagnostics.accepted_steps}});
    }
    RunResult r;
    r.files.push_back({x.name + ".csv", csv.str()});
    r.results = {{"fields", x.dephasing_fields}, {"cells", diag}};
    return r;
}

struct HeatmapCell {
    double g = 0.0;
    double kappa = 0.0;
    double peak = std::numeric_limits<double>::quiet_NaN();
    bool valid = false;
    double truncation_leak = 0.0;
    std::string error;
};

// Peak normalized boundary negativity of the chain coupled to a pseudomode,
// over [0, horizon].
inline HeatmapCell pseudomode_peak(const ChainSpec& chain, const PseudomodeSpec& pm, double horizon, int n_points) {
    HeatmapCell cell;
    cell.g = pm.g;
    cell.kappa = pm.kappa;
    try {
        const OpenSystemSpec spec = pseudomode_system(chain, pm);
        const TracePartition part = boundary_partition(spec, chain.n_sites);
        const int d = chain.spin.local_dim();
        std::vector<double> neg(static_cast<std::size_t>(n_points));
        IntegratorOptions opt;
        opt.rtol = 1e-9;
        opt.atol = 1e-11;
        opt.eigen_checks = 10;
        const OpenTrajectory tr = evolve_lindblad(spec, pure_density(pseudomode_initial_state(chain, pm)),
                                                  {0.0, horizon, n_points}, opt,
                                                  [&](std::size_t i, double, const Eigen::MatrixXcd& rho) {
                                                      neg[i] = negativity(reduce_mixed(part, rho), {d, d}) / max_negativity(d);
                                                  });
        cell.peak = find_peak(tr.times, neg).value;
        cell.truncation_leak = tr.diagnostics.max_truncation_leak;
        cell.valid = true;
    } catch (const Error& e) {
        cell.error = e.what();
    }
    return cell;
}

inline std::vector<HeatmapCell> heatmap_nonmarkovian(const ChainSpec& chain, const std::vector<double>& g_grid,
                                                     const std::vector<double>& kappas, double omega_a, int n_max,
                                                     int n_points, double horizon, int threads = 1) {
    if (g_grid.empty() || kappas.empty()) throw InvalidArgument("heatmap grids must be nonempty");
    std::vector<HeatmapCell> cells(g_grid.size() * kappas.size());
    parallel_for(cells.size(), threads, [&](std::size_t i) {
        PseudomodeSpec pm;
        pm.kappa = kappas[i / g_grid.size()];
        pm.g = g_grid[i % g_grid.size()];
        pm.omega_a = omega_a;
        pm.n_max = n_max;
        cells[i] = pseudomode_peak(chain, pm, horizon, n_points);
    });
    return cells;
}

// g, kappa, tau_c, peak_neg_norm, valid, truncation_leak (one file per protocol)
inline RunResult run_nonmarkovian(const ExperimentConfig& x, int threads) {
    RunResult r;
    for (Protocol proto : x.nm_protocols) {
        const ChainSpec chain = chain_for(x, proto);
        const Peak closed = closed_negativity_peak(chain, default_time_grid(chain));
        const double horizon = 2.0 * closed.time;
        const auto cells = heatmap_nonmarkovian(chain, x.nm_g, x.nm_kappas, x.omega_a, x.n_max, x.nm_n_points, horizon,
                                                threads);
        CsvTable csv({"g", "kappa", "tau_c", "peak_neg_norm", "valid", "truncation_leak"});
        nlohmann::json errors = nlohmann::json::array();
        for (const auto& c : cells) {
            csv.add_row({c.g, c.kappa, 1.0 / c.kappa, c.peak, static_cast<long long>(c.valid), c.truncation_leak});
            if (!c.valid) errors.push_back({{"g", c.g}, {"kappa", c.kappa}, {"error", c.error}});
        }
        r.files.push_back({x.name + "_" + to_string(proto) + ".csv", csv.str()});
        r.results[to_string(proto)] = {{"closed_peak", peak_json(closed)}, {"horizon", horizon}, {"invalid_cells", errors}};
    }
    r.results["omega_a"] = x.omega_a;
    r.results["n_max"] = x.n_max;
    r.results["tau_c"] = "1/kappa";
    return r;
}

// k, lambda_bar, zeta, ratio
inline RunResult run_effective(const ExperimentConfig& x) {
    const P2EffectiveModel m = p2_effective(x.n_sites - 2, x.strong, x.weak, x.field);
    CsvTable csv({"k", "lambda_bar", "zeta", "ratio"});
    for (std::size_t k = 0; k < m.zeta.size(); ++k) {
        csv.add_row({static_cast<long long>(k + 1), m.lambda_bar[k], m.zeta[k], m.lambda_bar[k] / m.zeta[k]});
    }
    RunResult r;
    r.files.push_back({x.name + ".csv", csv.str()});
    r.results = effective_json(x);
    return r;
}

// measure, value
inline RunResult run_measures_demo(const ExperimentConfig& x) {
    CsvTable csv({"measure", "value"});
    const double p[] = {0.99, 0.01};
    csv.add_row({std::string("shannon_0.99_0.01_bits"), shannon_entropy(p)});
    csv.add_row({std::string("von_neumann_maximally_mixed_qubit_bits"), von_neumann_entropy(Eigen::MatrixXcd(0.5 * Eigen::MatrixXcd::Identity(2, 2)))});
    const Eigen::MatrixXcd bell = pure_density(bell_psi_plus());
    csv.add_row({std::string("negativity_psi_plus"), negativity(bell, {2, 2})});
    csv.add_row({std::string("normalized_negativity_psi_plus"), normalized_negativity(bell, {2, 2}, 2)});
    csv.add_row({std::string("von_neumann_reduced_psi_plus_bits"),
                 von_neumann_entropy(reduce_pure(mixed_radix_partition({2, 2}, {0}), bell_psi_plus()))});
    const double q[] = {0.5, 0.5};
    csv.add_row({std::string("bhattacharyya_0.99_0.01_vs_uniform"), bhattacharyya(p, q)});
    RunResult r;
    r.files.push_back({x.name + ".csv", csv.str()});
    return r;
}

inline RunResult run_experiment(const ExperimentConfig& x, int threads) {
    switch (x.experiment) {
        case Experiment::P1:
        case Experiment::P2: return run_protocol(x);
        case Experiment::ScanB: return run_scan(x, threads);
        case Experiment::Disorder: return run_disorder(x, threads);
        case Experiment::Dephasing: return run_dephasing(x, threads);
        case Experiment::NonMarkovian: return run_nonmarkovian(x, threads);
        case Experiment::Effective: return run_effective(x);
        case Experiment::MeasuresDemo: return run_measures_demo(x);
    }
    throw InvalidArgument("unknown experiment");
}

// Writes the CSVs and <name>.manifest.json into out_dir. Everything written
// is removed again if any step fails.
inline nlohmann::json write_run(const ExperimentConfig& x, const RunResult& r, const std::filesystem::path& out_dir,
                                double wall_seconds, int threads) {
    OutputSet out(out_dir);
    std::vector<OutputSet::Written> written;
    for (const auto& f : r.files) written.push_back(out.write(f.name, f.content));
    out.verify(written);

    nlohmann::json m;
    m["software"] = {{"name", "spinent"}, {"version", kVersion}};
    m["experiment"] = to_string(x.experiment);
    nlohmann::json echo = nlohmann::json::object();
    for (const auto& [k, e] : x.resolved.entries()) echo[k] = e.value;
    m["config"] = echo;
    m["seed"] = x.seed;
    m["threads"] = threads;
    m["conventions"] = conventions_json(x.rz);
    m["effective_model"] = effective_json(x);
    m["results"] = r.results;
    m["wall_time_s"] = wall_seconds;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& w : written) files.push_back({{"path", w.name}, {"sha256", w.sha256}, {"bytes", w.bytes}});
    m["outputs"] = files;
    out.write(x.name + ".manifest.json", m.dump(2) + "\n");
    out.verify(written);
    out.commit();
    return m;
}

}  // namespace spinent
