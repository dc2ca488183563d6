#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dmrisk/config.hpp"

namespace dmrisk {

/// A failure inside one stage of a run, tagged with the stage name and the
/// process exit code the CLI should use.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& msg, int exit_code)
        : std::runtime_error(stage + ": " + msg), stage_(std::move(stage)), exit_code_(exit_code) {}
    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

inline constexpr int kExitInput = 2;
inline constexpr int kExitCalibration = 3;
inline constexpr int kExitSolver = 4;

struct BenchmarkResult {
    double var = 0.0;
    double avar = 0.0;
    double se = 0.0;  // batch means
    std::size_t samples = 0;
};

/// Plain Monte Carlo AV@R of Psi(X) with X = F^{-1}(U), U from one copula.
BenchmarkResult benchmark_avar(const std::vector<Distribution>& marginals, const CopulaSpec& copula,
                               const Aggregation& agg, double p, std::size_t n, std::uint64_t seed,
                               int batches = 20);

/// SA, copula selection and SAA; writes report.json, sa_trace.csv,
/// saa_grid.csv and manifest.json into out_dir and returns the report.
nlohmann::json run_solve(const RunConfig& cfg, const std::string& out_dir);
nlohmann::json run_benchmark(const RunConfig& cfg, const std::string& out_dir);
/// Fits from the [calibrate] section; writes calibration.json.
nlohmann::json run_calibrate(const RunConfig& cfg, const std::string& out_dir);
/// SA only, with trace and component density tables as CSV.
nlohmann::json run_trace_export(const RunConfig& cfg, const std::string& out_dir);

/// The report without its timing block, as compared across reruns.
nlohmann::json strip_timing(nlohmann::json report);

}  // namespace dmrisk
