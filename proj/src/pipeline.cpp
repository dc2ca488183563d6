#include "dmrisk/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "dmrisk/calibration.hpp"
#include "dmrisk/density.hpp"
#include "dmrisk/error.hpp"
#include "dmrisk/importance_sampling.hpp"
#include "dmrisk/random.hpp"
#include "dmrisk/stats.hpp"

namespace dmrisk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs one stage; library errors become PipelineError with the stage name.
template <class F>
auto stage(const std::string& name, const RunConfig& cfg, int code, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError&) {
        throw;
    } catch (const PipelineError&) {
        throw;
    } catch (const std::exception& e) {
        const std::string where = cfg.source.empty() ? "" : " (config " + cfg.source + ")";
        throw PipelineError(name, e.what() + where, code);
    }
}

json gamma_json(const GammaMatrix& g) {
    json rows = json::array();
    for (int j = 0; j < g.K(); ++j) {
        json r = json::array();
        for (int i = 0; i < g.m(); ++i) r.push_back(g(j, i));
        rows.push_back(r);
    }
    return rows;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

void write_json(const json& j, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

fs::path prepare_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw InputError("cannot create output directory " + dir + ": " + ec.message());
    return fs::path(dir);
}

void write_manifest(const RunConfig& cfg, const fs::path& dir, const std::string& command) {
    json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["config"] = cfg.doc;
    m["config_source"] = cfg.source;
    m["config_hash"] = cfg.hash;
    m["seed"] = cfg.seed;
    m["threads"] = thread_count();
    json fx = json::array();
    for (const auto& f : fixture_paths(cfg)) fx.push_back({{"path", f}, {"fnv1a", file_hash(f)}});
    m["fixtures"] = fx;
    write_json(m, dir / "manifest.json");
}

json run_header(const RunConfig& cfg, const std::string& command) {
    json r;
    r["command"] = command;
    r["version"] = kVersion;
    r["seed"] = cfg.seed;
    r["config_hash"] = cfg.hash;
    r["p"] = cfg.p;
    return r;
}

std::vector<double> batch_avars(std::span<const double> losses, double p, int batches) {
    std::vector<double> out;
    const std::size_t n = losses.size();
    for (int b = 0; b < batches; ++b) {
        const std::size_t lo = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(batches);
        const std::size_t hi = n * static_cast<std::size_t>(b + 1) / static_cast<std::size_t>(batches);
        out.push_back(empirical_var_avar(losses.subspan(lo, hi - lo), p).avar);
    }
    return out;
}

}  // namespace

BenchmarkResult benchmark_avar(const std::vector<Distribution>& marginals, const CopulaSpec& copula,
                               const Aggregation& agg, double p, std::size_t n, std::uint64_t seed, int batches) {
    const int d = dimension(copula);
    require(static_cast<int>(marginals.size()) == d, "benchmark: copula dimension differs from the marginals");
    require(batches >= 2 && n >= static_cast<std::size_t>(batches) * 10, "benchmark: too few samples for the batches");
    std::vector<double> losses(n);
    parallel_chunks(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, 0x62656e63, chunk);
        std::vector<double> u(static_cast<std::size_t>(d)), x(static_cast<std::size_t>(d));
        for (std::size_t l = begin; l < end; ++l) {
            copula_draw(copula, rng, u);
            for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = quantile(marginals[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i)]);
            losses[l] = aggregate(agg, x);
        }
    });
    const VarAvar va = empirical_var_avar(losses, p);
    const auto b = batch_avars(losses, p, batches);
    return BenchmarkResult{va.var, va.avar, std::sqrt(variance(b) / static_cast<double>(batches)), n};
}

json strip_timing(json report) {
    report.erase("timing");
    return report;
}

json run_benchmark(const RunConfig& cfg, const std::string& out_dir) {
    if (!cfg.benchmark) throw InputError("config: benchmark requires a [benchmark] section");
    const auto t0 = Clock::now();
    const fs::path dir = prepare_dir(out_dir);
    const DMSpec spec = build_spec(cfg);
    const CopulaSpec cop = build_copula(cfg, cfg.benchmark->copula);
    const auto res = stage("benchmark", cfg, kExitSolver, [&] {
        return benchmark_avar(spec.marginals, cop, spec.aggregation, cfg.p, cfg.benchmark->samples,
                              derive_seed(cfg.seed, 0x62656e63), cfg.benchmark->batches);
    });
    json r = run_header(cfg, "benchmark");
    r["benchmark"] = {{"copula", cfg.benchmark->copula}, {"description", describe(cop)}, {"samples", res.samples},
                      {"var", res.var}, {"avar", res.avar}, {"se", res.se}, {"batches", cfg.benchmark->batches}};
    r["timing"] = {{"total_seconds", seconds_since(t0)}};
    write_json(r, dir / "report.json");
    write_manifest(cfg, dir, "benchmark");
    return r;
}

json run_solve(const RunConfig& cfg, const std::string& out_dir) {
    const auto t0 = Clock::now();
    const fs::path dir = prepare_dir(out_dir);
    json r = run_header(cfg, "solve");
    json timing;
    json warnings = json::array();

    auto tick = Clock::now();
    const DMSpec spec = build_spec(cfg);
    const auto& alpha = spec.distortions.weights();
    r["problem"] = {{"d", spec.d()}, {"m", spec.m()}, {"K", spec.K()}, {"candidates", spec.candidate_names},
                    {"distortion", spec.distortions.describe()}, {"aggregation", describe(spec.aggregation)},
                    {"alpha", alpha}};
    timing["build_seconds"] = seconds_since(tick);

    if (cfg.benchmark) {
        tick = Clock::now();
        const CopulaSpec cop = build_copula(cfg, cfg.benchmark->copula);
        const auto b = stage("benchmark", cfg, kExitSolver, [&] {
            return benchmark_avar(spec.marginals, cop, spec.aggregation, cfg.p, cfg.benchmark->samples,
                                  derive_seed(cfg.seed, 0x62656e63), cfg.benchmark->batches);
        });
        r["benchmark"] = {{"copula", cfg.benchmark->copula}, {"samples", b.samples}, {"var", b.var},
                          {"avar", b.avar}, {"se", b.se}};
        timing["benchmark_seconds"] = seconds_since(tick);
    }

    // Step 1: component densities
    tick = Clock::now();
    const ComponentDensities dens = stage("density", cfg, kExitSolver, [&] {
        const auto bank = component_losses(spec, cfg.sa.kde_samples, derive_seed(cfg.seed, 0x6b6465));
        return fit_component_densities(bank, cfg.sa.kde_points, cfg.sa.kde_bandwidth);
    });
    timing["density_seconds"] = seconds_since(tick);

    // Step 2: SA
    tick = Clock::now();
    SAConfig sa = cfg.sa;
    sa.seed = derive_seed(cfg.seed, 0x5341);
    const SATrace trace = stage("solver_sa", cfg, kExitSolver, [&] {
        return sa_solve(spec, sa, GammaMatrix::uniform(spec.K(), spec.m()), dens);
    });
    write_trace_csv(trace, (dir / "sa_trace.csv").string());
    const auto& fin = trace.final();
    r["sa"] = {{"t_star", trace.t_star},
               {"converged", trace.converged},
               {"samples_per_iteration", sa.samples},
               {"initial_avar", trace.iterations.front().avar},
               {"final_avar", fin.avar},
               {"final_var", fin.var},
               {"avar_sd_last10", trace.avar_sd(10)},
               {"final_gamma", gamma_json(fin.gamma)},
               {"final_gradient", matrix_json(fin.gradient)}};
    timing["sa_seconds"] = seconds_since(tick);

    // dimension reduction
    const int k_star = std::min(cfg.k_star, spec.K());
    if (k_star < cfg.k_star) warnings.push_back("k_star exceeds the number of candidates; all are kept");
    const auto selected = stage("selection", cfg, kExitSolver, [&] { return select_copulas(fin.gamma, fin.gradient, k_star); });
    json sel_names = json::array(), sel_idx = json::array();
    for (int j : selected) {
        sel_names.push_back(spec.candidate_names[static_cast<std::size_t>(j)]);
        sel_idx.push_back(j + 1);
    }
    r["selection"] = {{"k_star", k_star}, {"selected", sel_names}, {"indices", sel_idx}};

    // Step 3: SAA
    tick = Clock::now();
    const SAAResult saa = stage("solver_saa", cfg, kExitSolver, [&] {
        const auto bank = component_losses(spec, cfg.saa.samples, derive_seed(cfg.seed, 0x534141), selected);
        const PreparedBank prepared(bank);
        return saa_search(prepared, alpha, cfg.p, selected, cfg.saa);
    });
    write_grid_csv(saa, (dir / "saa_grid.csv").string());
    r["saa"] = {{"samples", cfg.saa.samples},
                {"h", cfg.saa.h},
                {"refinement_rounds", cfg.saa.refinement_rounds},
                {"grid_points", saa.table.size()},
                {"best_gamma", gamma_json(saa.best)},
                {"u", saa.best_u},
                {"avar", saa.best_avar}};
    timing["saa_seconds"] = seconds_since(tick);

    if (cfg.is) {
        tick = Clock::now();
        const auto cmp = stage("importance_sampling", cfg, kExitSolver, [&] {
            const auto h = fit_is_densities(spec, cfg.is->spec, cfg.is->kde_samples, cfg.sa.kde_points,
                                            derive_seed(cfg.seed, 0x6973), cfg.sa.kde_bandwidth);
            return is_compare(spec, cfg.is->spec, fin.gamma, dens, h, cfg.p, cfg.is->samples, cfg.is->replications,
                              derive_seed(cfg.seed, 0x69737270));
        });
        if (cmp.max_floor_fraction > 0.01) {
            warnings.push_back("IS density h hit the floor on more than 1% of draws");
        }
        r["is"] = {{"samples", cfg.is->samples},
                   {"replications", cfg.is->replications},
                   {"crude_avar", cmp.crude},
                   {"is_avar", cmp.is},
                   {"crude_variance", cmp.crude_variance},
                   {"is_variance", cmp.is_variance},
                   {"variance_ratio", cmp.ratio},
                   {"max_floor_fraction", cmp.max_floor_fraction}};
        timing["is_seconds"] = seconds_since(tick);
    }

    r["warnings"] = warnings;
    timing["total_seconds"] = seconds_since(t0);
    r["timing"] = timing;
    write_json(r, dir / "report.json");
    write_manifest(cfg, dir, "solve");
    return r;
}

json run_trace_export(const RunConfig& cfg, const std::string& out_dir) {
    const auto t0 = Clock::now();
    const fs::path dir = prepare_dir(out_dir);
    const DMSpec spec = build_spec(cfg);
    const ComponentDensities dens = stage("density", cfg, kExitSolver, [&] {
        const auto bank = component_losses(spec, cfg.sa.kde_samples, derive_seed(cfg.seed, 0x6b6465));
        return fit_component_densities(bank, cfg.sa.kde_points, cfg.sa.kde_bandwidth);
    });
    write_density_csv(dens.central, (dir / "density_central.csv").string());
    for (int i = 1; i <= dens.m; ++i) {
        for (int j = 0; j < dens.K; ++j) {
            write_density_csv(dens.tail(i, j), (dir / ("density_" + std::to_string(i) + "_" + std::to_string(j + 1) + ".csv")).string());
        }
    }
    SAConfig sa = cfg.sa;
    sa.seed = derive_seed(cfg.seed, 0x5341);
    const SATrace trace = stage("solver_sa", cfg, kExitSolver, [&] {
        return sa_solve(spec, sa, GammaMatrix::uniform(spec.K(), spec.m()), dens);
    });
    write_trace_csv(trace, (dir / "sa_trace.csv").string());
    json r = run_header(cfg, "trace-export");
    r["sa"] = {{"t_star", trace.t_star}, {"final_avar", trace.final().avar}, {"avar_sd_last10", trace.avar_sd(10)}};
    r["timing"] = {{"total_seconds", seconds_since(t0)}};
    write_json(r, dir / "report.json");
    write_manifest(cfg, dir, "trace-export");
    return r;
}

// --- calibrate -------------------------------------------------------------------

namespace {

json gpd_json(const GpdFit& g) {
    return {{"xi", g.xi}, {"scale", g.scale}, {"se_xi", g.se_xi}, {"se_scale", g.se_scale},
            {"n", g.n}, {"loglik", g.loglik}, {"at_boundary", g.at_boundary}};
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& x, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = x.row(rows[k]);
    return out;
}

json dependence_fits(const Eigen::MatrixXd& x, bool gumbel) {
    json out;
    const Eigen::MatrixXd tau = kendall_tau_matrix(x);
    bool repaired = false;
    const CorrelationMatrix P = to_correlation(tau, &repaired);
    out["n"] = x.rows();
    out["kendall_tau"] = matrix_json(tau);
    out["correlation"] = matrix_json(P.matrix());
    out["correlation_repaired"] = repaired;
    const Eigen::MatrixXd U = column_pseudo_observations(x);
    const NuFit nu = fit_t_nu_profile(U, P);
    out["t_nu"] = {{"nu", nu.nu}, {"loglik", nu.loglik}, {"ci95", {nu.ci_lower, nu.ci_upper}}, {"at_boundary", nu.at_boundary}};
    if (gumbel) {
        const auto mle = fit_gumbel(U, GumbelMethod::MLE);
        const auto cvm = fit_gumbel(U, GumbelMethod::CvM);
        out["gumbel_mle"] = {{"theta", mle.theta}, {"loglik", mle.objective}, {"at_boundary", mle.at_boundary}};
        out["gumbel_cvm"] = {{"theta", cvm.theta}, {"distance", cvm.objective}, {"at_boundary", cvm.at_boundary}};
    }
    return out;
}

}  // namespace

json run_calibrate(const RunConfig& cfg, const std::string& out_dir) {
    if (!cfg.doc.contains("calibrate")) throw InputError("config: calibrate requires a [calibrate] section");
    const json& c = cfg.doc.at("calibrate");
    if (!c.is_object()) throw InputError("config: 'calibrate' must be a table");
    static const std::set<std::string> allowed{"kind", "data", "counts", "horizon", "p_lower", "p_upper",
                                               "cuts", "shift", "zero_seed"};
    for (const auto& [k, v] : c.items()) {
        if (!allowed.count(k)) throw InputError("config: unknown key 'calibrate." + k + "'");
    }
    if (!c.contains("kind") || !c.at("kind").is_string()) throw InputError("config: missing required key 'calibrate.kind'");
    if (!c.contains("data") || !c.at("data").is_string()) throw InputError("config: missing required key 'calibrate.data'");
    const std::string kind = c.at("kind").get<std::string>();
    const std::string data = resolve_path(cfg.base_dir, c.at("data").get<std::string>());
    const auto t0 = Clock::now();
    const fs::path dir = prepare_dir(out_dir);

    json out = run_header(cfg, "calibrate");
    out.erase("p");
    out["kind"] = kind;
    out["inputs"] = json::array({{{"path", data}, {"fnv1a", file_hash(data)}}});

    if (kind == "inverse_gaussian") {
        const PanelData panel = read_panel_csv(data);
        json margs = json::array();
        stage("calibration", cfg, kExitCalibration, [&] {
            for (int k = 0; k < panel.cols(); ++k) {
                const Eigen::VectorXd col = panel.values.col(k);
                const auto ig = fit_inverse_gaussian(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
                margs.push_back({{"type", "inverse_gaussian"}, {"mu", ig.mu}, {"lambda", ig.lambda}, {"label", panel.labels[static_cast<std::size_t>(k)]}});
            }
            return 0;
        });
        out["marginals"] = margs;
    } else if (kind == "spliced") {
        const PanelData prices = read_panel_csv(data);
        const int horizon = c.value("horizon", 10);
        const double pl = c.value("p_lower", 0.1), pu = c.value("p_upper", 0.1);
        const auto cuts = c.value("cuts", std::vector<double>{0.04, 0.08});
        if (cuts.size() != 2) throw InputError("config: 'calibrate.cuts' must have two entries");
        const double shift = c.value("shift", 1.0);
        stage("calibration", cfg, kExitCalibration, [&] {
            const PanelData x = returns_transform(prices, horizon);
            out["rows"] = x.rows();
            json margs = json::array(), fits = json::array();
            for (int k = 0; k < x.cols(); ++k) {
                const Eigen::VectorXd col = x.values.col(k);
                const auto f = build_spliced(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), pl, pu);
                const auto& knots = f.marginal.knots();
                margs.push_back({{"type", "spliced"},
                                 {"p_lower", pl},
                                 {"p_upper", pu},
                                 {"x_lower", f.marginal.x_lower()},
                                 {"xi_lower", f.lower.xi},
                                 {"scale_lower", f.lower.scale},
                                 {"x_upper", f.marginal.x_upper()},
                                 {"xi_upper", f.upper.xi},
                                 {"scale_upper", f.upper.scale},
                                 {"central", std::vector<double>(knots.begin(), knots.end())}});
                fits.push_back({{"label", x.labels[static_cast<std::size_t>(k)]}, {"lower", gpd_json(f.lower)}, {"upper", gpd_json(f.upper)}});
            }
            out["marginals"] = margs;
            out["tail_fits"] = fits;
            const auto part = partition_by_aggregate(x.values, ShiftedSumAggregation{shift}, cuts[0], cuts[1]);
            out["partition"] = {{"extreme", part.extreme.size()}, {"upper", part.upper.size()}, {"center", part.center.size()}};
            json dep;
            dep["center"] = dependence_fits(select_rows(x.values, part.center), false);
            if (part.upper.size() >= 10) dep["upper"] = dependence_fits(select_rows(x.values, part.upper), false);
            if (part.extreme.size() >= 10) dep["extreme"] = dependence_fits(select_rows(x.values, part.extreme), false);
            out["dependence"] = dep;
            return 0;
        });
    } else if (kind == "frequency_severity") {
        if (!c.contains("counts") || !c.at("counts").is_string()) throw InputError("config: missing required key 'calibrate.counts'");
        const std::string counts_path = resolve_path(cfg.base_dir, c.at("counts").get<std::string>());
        out["inputs"].push_back({{"path", counts_path}, {"fnv1a", file_hash(counts_path)}});
        const PanelData counts = read_panel_csv(counts_path);
        const PanelData losses = read_panel_csv(data);
        // losses: one record per row with columns type and loss
        int type_col = -1, loss_col = -1;
        for (int k = 0; k < losses.cols(); ++k) {
            if (losses.labels[static_cast<std::size_t>(k)] == "type") type_col = k;
            if (losses.labels[static_cast<std::size_t>(k)] == "loss") loss_col = k;
        }
        if (type_col < 0 || loss_col < 0) throw InputError(data + ":1: header needs 'type' and 'loss' columns");
        const int d = counts.cols();
        std::vector<std::vector<double>> sev(static_cast<std::size_t>(d));
        for (int r = 0; r < losses.rows(); ++r) {
            const double t = losses.values(r, type_col);
            if (t != std::floor(t) || t < 1 || t > d) {
                throw InputError(data + ":" + std::to_string(r + 2) + ":" + std::to_string(type_col + 1) + ": type must be an integer in 1.." + std::to_string(d));
            }
            sev[static_cast<std::size_t>(t) - 1].push_back(losses.values(r, loss_col));
        }
        const auto zero_seed = static_cast<std::uint64_t>(c.value("zero_seed", std::int64_t{0}));
        stage("calibration", cfg, kExitCalibration, [&] {
            json margs = json::array();
            std::size_t zeros = 0;
            for (int k = 0; k < d; ++k) {
                std::vector<int> n;
                for (int r = 0; r < counts.rows(); ++r) {
                    const double v = counts.values(r, k);
                    if (v < 0 || v != std::floor(v)) throw DomainError("counts must be nonnegative integers");
                    n.push_back(static_cast<int>(v));
                }
                auto& s = sev[static_cast<std::size_t>(k)];
                zeros += replace_zeros_uniform(s, derive_seed(zero_seed, static_cast<std::uint64_t>(k)));
                const auto f = fit_frequency_severity(n, s);
                margs.push_back({{"type", "compound"},
                                 {"label", counts.labels[static_cast<std::size_t>(k)]},
                                 {"r", f.frequency.r},
                                 {"p", f.frequency.p},
                                 {"mu", f.severity.mu},
                                 {"sigma", f.severity.sigma},
                                 {"nb_loglik", f.nb_loglik},
                                 {"nb_at_boundary", f.nb_at_boundary}});
            }
            out["marginals"] = margs;
            out["zero_replacement"] = {{"seed", zero_seed}, {"replaced", zeros}};
            return 0;
        });
        // per-period aggregate losses for the copula fits, when periods are given
        if (!losses.dates.empty() && !counts.dates.empty() && d >= 2) {
            std::map<std::string, int> period_row;
            for (int r = 0; r < counts.rows(); ++r) period_row[counts.dates[static_cast<std::size_t>(r)]] = r;
            Eigen::MatrixXd agg = Eigen::MatrixXd::Zero(counts.rows(), d);
            for (int r = 0; r < losses.rows(); ++r) {
                const auto it = period_row.find(losses.dates[static_cast<std::size_t>(r)]);
                if (it == period_row.end()) {
                    throw InputError(data + ":" + std::to_string(r + 2) + ":1: period '" + losses.dates[static_cast<std::size_t>(r)] + "' not in counts");
                }
                agg(it->second, static_cast<Eigen::Index>(losses.values(r, type_col)) - 1) += losses.values(r, loss_col);
            }
            std::vector<double> flat(agg.data(), agg.data() + agg.size());
            replace_zeros_uniform(flat, derive_seed(zero_seed, 0x706572));
            agg = Eigen::Map<Eigen::MatrixXd>(flat.data(), agg.rows(), agg.cols());
            stage("calibration", cfg, kExitCalibration, [&] {
                out["dependence"] = dependence_fits(agg, true);
                return 0;
            });
        }
    } else {
        throw InputError("config: unknown calibrate.kind '" + kind + "'");
    }
    out["timing"] = {{"total_seconds", seconds_since(t0)}};
    write_json(out, dir / "calibration.json");
    return out;
}

}  // namespace dmrisk
