#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dmrisk/dm_model.hpp"
#include "dmrisk/importance_sampling.hpp"
#include "dmrisk/solver_saa.hpp"
#include "dmrisk/solver_sa.hpp"

namespace dmrisk {

struct BenchmarkConfig {
    std::string copula;
    std::size_t samples = 1'000'000;
    int batches = 20;  // batch-means standard error
};

struct ISConfig {
    ISSpec spec;
    std::size_t samples = 1'000'000;      // per replication
    std::size_t kde_samples = 1'000'000;  // bank used to fit h
    int replications = 10;
};

/// Validated run configuration. The raw document is kept for hashing and
/// for the calibrate command.
struct RunConfig {
    std::string source;    // config file path, empty for in-memory documents
    std::string base_dir;  // fixture paths resolve against this
    nlohmann::json doc;
    std::string hash;      // FNV-1a of the canonical JSON document

    std::uint64_t seed = 0;
    int threads = 0;
    std::string output = "out";
    double p = 0.95;
    SAConfig sa;
    SAAConfig saa;
    int k_star = 2;
    std::optional<BenchmarkConfig> benchmark;
    std::optional<ISConfig> is;
};

/// Reads TOML (or JSON when the file ends in .json). Unknown keys, missing
/// required keys and type mismatches throw InputError naming the key.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir, const std::string& source = "");

/// Command-line overrides; samples applies to SA, SAA and benchmark sizes.
void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed, std::optional<int> threads,
                     std::optional<std::string> output, std::optional<std::size_t> samples);

DMSpec build_spec(const RunConfig& cfg);
CopulaSpec build_copula(const RunConfig& cfg, const std::string& name);
/// Fixture files referenced by the problem section, resolved.
std::vector<std::string> fixture_paths(const RunConfig& cfg);

std::string resolve_path(const std::string& base_dir, const std::string& p);
std::string fnv1a_hex(const std::string& bytes);
std::string file_hash(const std::string& path);

}  // namespace dmrisk
