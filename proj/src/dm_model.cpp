#include "dmrisk/dm_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dmrisk/error.hpp"

namespace dmrisk {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr std::uint64_t kMixtureStream = 0x6d6978;
constexpr std::uint64_t kBankStream = 0x62616e6b;

// Index drawn from a discrete law given by nonnegative weights.
int draw_index(const double* w, int n, Rng& rng) {
    const double u = uniform01(rng);
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        acc += w[k];
        if (u < acc) return k;
    }
    // rounding: fall back to the last index with positive weight
    for (int k = n - 1; k >= 0; --k) {
        if (w[k] > 0.0) return k;
    }
    return n - 1;
}

// One draw of X for component i with copula c, written into x.
void draw_component(const DMSpec& spec, int i, const CopulaSpec& copula, Rng& rng,
                    std::span<double> x) {
    const int d = spec.d();
    double v[64];
    copula_draw(copula, rng, std::span<double>(v, static_cast<std::size_t>(d)));
    for (int k = 0; k < d; ++k) {
        double u = spec.distortions.inverse(i, v[k]);
        u = std::clamp(u, 0x1.0p-60, 1.0 - 0x1.0p-53);
        x[k] = quantile(spec.marginals[static_cast<std::size_t>(k)], u);
    }
}

template <class Sink>
void mixture_draws(const DMSpec& spec, const GammaMatrix& gamma, std::size_t n,
                   std::uint64_t seed, Sink sink) {
    spec.validate();
    require(gamma.K() == spec.K() && gamma.m() == spec.m(),
            "gamma matrix dimensions do not match the DM specification");
    const int d = spec.d();
    const int m = spec.m();
    const int K = spec.K();
    const std::vector<double>& alpha = spec.distortions.weights();
    std::vector<double> cols(static_cast<std::size_t>(K * m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < K; ++j) cols[static_cast<std::size_t>(i * K + j)] = gamma(j, i);
    }
    parallel_chunks(n, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, kMixtureStream, chunk);
        double x[64];
        for (std::size_t r = begin; r < end; ++r) {
            const int z1 = draw_index(alpha.data(), m + 1, rng);
            const CopulaSpec* c = &spec.central;
            if (z1 != 0) {
                const int z2 = draw_index(cols.data() + (z1 - 1) * K, K, rng);
                c = &spec.candidates[static_cast<std::size_t>(z2)];
            }
            draw_component(spec, z1, *c, rng, std::span<double>(x, static_cast<std::size_t>(d)));
            sink(r, std::span<const double>(x, static_cast<std::size_t>(d)));
        }
    });
}

}  // namespace

double aggregate(const Aggregation& agg, std::span<const double> x) {
    return std::visit(Overloaded{
                          [&](const SumAggregation&) {
                              double s = 0.0;
                              for (double v : x) s += v;
                              return s;
                          },
                          [&](const ShiftedSumAggregation& a) {
                              double s = 0.0;
                              for (double v : x) s += v + a.shift;
                              return s;
                          },
                          [&](const ExcessOfLossAggregation& a) {
                              require(a.retention.size() == x.size(),
                                      "excess-of-loss retention length must equal d");
                              double s = 0.0;
                              for (std::size_t k = 0; k < x.size(); ++k) {
                                  s += std::max(x[k] - a.retention[k], 0.0);
                              }
                              return s;
                          },
                      },
                      agg);
}

std::string describe(const Aggregation& agg) {
    std::ostringstream os;
    std::visit(Overloaded{
                   [&](const SumAggregation&) { os << "sum"; },
                   [&](const ShiftedSumAggregation& a) { os << "sum_shifted(" << a.shift << ")"; },
                   [&](const ExcessOfLossAggregation& a) {
                       os << "excess_of_loss(";
                       for (std::size_t k = 0; k < a.retention.size(); ++k) {
                           os << (k ? ", " : "") << a.retention[k];
                       }
                       os << ")";
                   },
               },
               agg);
    return os.str();
}

GammaMatrix::GammaMatrix(Eigen::MatrixXd values) : g_(std::move(values)) {
    require(g_.rows() >= 1 && g_.cols() >= 1, "gamma matrix must be non-empty");
    for (Eigen::Index i = 0; i < g_.cols(); ++i) {
        for (Eigen::Index j = 0; j < g_.rows(); ++j) {
            require(g_(j, i) >= 0.0 && std::isfinite(g_(j, i)), "gamma entries must be nonnegative");
        }
        require(std::abs(g_.col(i).sum() - 1.0) <= 1e-12, "gamma columns must sum to 1");
    }
}

GammaMatrix GammaMatrix::uniform(int K, int m) {
    require(K >= 1 && m >= 1, "gamma matrix needs K >= 1 and m >= 1");
    return GammaMatrix(Eigen::MatrixXd::Constant(K, m, 1.0 / K));
}

GammaMatrix GammaMatrix::vertex(int K, int m, int j) {
    require(j >= 0 && j < K, "vertex index out of range");
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(K, m);
    g.row(j).setOnes();
    return GammaMatrix(g);
}

void GammaMatrix::set_column(int i, const Eigen::VectorXd& c) {
    require(i >= 0 && i < m() && c.size() == K(), "gamma column dimension mismatch");
    for (Eigen::Index j = 0; j < c.size(); ++j) require(c[j] >= 0.0, "gamma entries must be nonnegative");
    require(std::abs(c.sum() - 1.0) <= 1e-12, "gamma columns must sum to 1");
    g_.col(i) = c;
}

double GammaMatrix::l1_distance(const GammaMatrix& other) const {
    require(other.K() == K() && other.m() == m(), "gamma matrix dimension mismatch");
    return (g_ - other.g_).cwiseAbs().sum();
}

void DMSpec::validate() const {
    const int dd = d();
    require(dd >= 2 && dd <= 64, "DM specification needs 2 <= d <= 64 marginals");
    require(dimension(central) == dd, "central copula dimension does not match marginals");
    require(!candidates.empty(), "DM specification needs at least one candidate copula");
    for (const auto& c : candidates) {
        require(dimension(c) == dd, "candidate copula dimension does not match marginals");
    }
    require(candidate_names.empty() || candidate_names.size() == candidates.size(),
            "candidate names must match candidates");
    require(m() >= 1, "DM specification needs at least one tail component");
    if (const auto* xl = std::get_if<ExcessOfLossAggregation>(&aggregation)) {
        require(static_cast<int>(xl->retention.size()) == dd, "retention length must equal d");
    }
}

SampleMatrix dm_sample(const DMSpec& spec, const GammaMatrix& gamma, std::size_t n,
                       std::uint64_t seed) {
    require(n >= 1, "dm_sample: n must be at least 1");
    SampleMatrix out(static_cast<Eigen::Index>(n), spec.d());
    mixture_draws(spec, gamma, n, seed, [&](std::size_t r, std::span<const double> x) {
        for (std::size_t k = 0; k < x.size(); ++k) {
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = x[k];
        }
    });
    return out;
}

std::vector<double> dm_losses(const DMSpec& spec, const GammaMatrix& gamma, std::size_t n,
                              std::uint64_t seed) {
    require(n >= 1, "dm_losses: n must be at least 1");
    std::vector<double> out(n);
    mixture_draws(spec, gamma, n, seed, [&](std::size_t r, std::span<const double> x) {
        out[r] = aggregate(spec.aggregation, x);
    });
    return out;
}

std::vector<double> component_draws(const DMSpec& spec, int i, int j, std::size_t N,
                                    std::uint64_t seed) {
    spec.validate();
    require(i >= 0 && i <= spec.m(), "component index i out of range");
    require(i == 0 || (j >= 0 && j < spec.K()), "candidate index j out of range");
    const CopulaSpec& c = i == 0 ? spec.central : spec.candidates[static_cast<std::size_t>(j)];
    const std::uint64_t stream =
        kBankStream + (i == 0 ? 0 : 1 + static_cast<std::uint64_t>((i - 1) * spec.K() + j));
    const int d = spec.d();
    std::vector<double> out(N);
    parallel_chunks(N, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        Rng rng = make_rng(seed, stream, chunk);
        double x[64];
        for (std::size_t r = begin; r < end; ++r) {
            draw_component(spec, i, c, rng, std::span<double>(x, static_cast<std::size_t>(d)));
            out[r] = aggregate(spec.aggregation, std::span<const double>(x, static_cast<std::size_t>(d)));
        }
    });
    return out;
}

ComponentSampleBank component_losses(const DMSpec& spec, std::size_t N, std::uint64_t seed,
                                     const std::vector<int>& candidates) {
    require(N >= 1, "component_losses: N must be at least 1");
    spec.validate();
    ComponentSampleBank bank;
    bank.N = N;
    bank.seed = seed;
    bank.m = spec.m();
    bank.K = spec.K();
    std::vector<int> cols = candidates;
    if (cols.empty()) {
        for (int j = 0; j < spec.K(); ++j) cols.push_back(j);
    }
    bank.central = component_draws(spec, 0, 0, N, seed);
    bank.tails.resize(static_cast<std::size_t>(bank.m * bank.K));
    for (int i = 1; i <= bank.m; ++i) {
        for (int j : cols) {
            require(j >= 0 && j < bank.K, "candidate index out of range");
            bank.tails[static_cast<std::size_t>((i - 1) * bank.K + j)] = component_draws(spec, i, j, N, seed);
        }
    }
    return bank;
}

const std::vector<double>& ComponentSampleBank::tail(int i, int j) const {
    require(i >= 1 && i <= m && j >= 0 && j < K, "bank index out of range");
    const auto& v = tails[static_cast<std::size_t>((i - 1) * K + j)];
    if (v.empty()) throw StateError("bank array for this candidate was not drawn");
    return v;
}

bool ComponentSampleBank::has(int i, int j) const {
    return i >= 1 && i <= m && j >= 0 && j < K && !tails[static_cast<std::size_t>((i - 1) * K + j)].empty();
}

double mixture_cdf(const GammaMatrix& gamma, const ComponentSampleBank& bank,
                   std::span<const double> alpha, double s) {
    require(gamma.K() == bank.K && gamma.m() == bank.m, "gamma and bank dimensions differ");
    require(static_cast<int>(alpha.size()) == bank.m + 1, "alpha length must be m + 1");
    auto ecdf = [&](const std::vector<double>& v) {
        std::size_t c = 0;
        for (double x : v) c += x <= s;
        return static_cast<double>(c) / static_cast<double>(v.size());
    };
    double f = alpha[0] * ecdf(bank.central);
    for (int i = 1; i <= bank.m; ++i) {
        for (int j = 0; j < bank.K; ++j) {
            const double w = alpha[static_cast<std::size_t>(i)] * gamma(j, i - 1);
            if (w == 0.0) continue;
            f += w * ecdf(bank.tail(i, j));
        }
    }
    return f;
}

namespace {

void write_le(std::ofstream& out, const std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(v.data()),
                  static_cast<std::streamsize>(v.size() * sizeof(double)));
    } else {
        for (double x : v) {
            auto bits = std::bit_cast<std::uint64_t>(x);
            unsigned char b[8];
            for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
            out.write(reinterpret_cast<const char*>(b), 8);
        }
    }
}

void read_le(std::ifstream& in, std::vector<double>& v) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
    } else {
        for (double& x : v) {
            unsigned char b[8];
            in.read(reinterpret_cast<char*>(b), 8);
            std::uint64_t bits = 0;
            for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
            x = std::bit_cast<double>(bits);
        }
    }
    if (!in) throw DomainError("bank file is truncated");
}

}  // namespace

void save_bank(const ComponentSampleBank& bank, const std::string& prefix,
               const std::string& spec_hash) {
    std::ofstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw DomainError("cannot write " + prefix + ".bin");
    nlohmann::json arrays = nlohmann::json::array();
    write_le(bin, bank.central);
    arrays.push_back({{"i", 0}, {"j", -1}});
    for (int i = 1; i <= bank.m; ++i) {
        for (int j = 0; j < bank.K; ++j) {
            if (!bank.has(i, j)) continue;
            write_le(bin, bank.tail(i, j));
            arrays.push_back({{"i", i}, {"j", j}});
        }
    }
    nlohmann::json meta = {{"N", bank.N},        {"seed", bank.seed}, {"m", bank.m},
                           {"K", bank.K},        {"spec_hash", spec_hash},
                           {"dtype", "float64"}, {"byte_order", "little"},
                           {"arrays", arrays}};
    std::ofstream js(prefix + ".json");
    js << meta.dump(2) << "\n";
}

ComponentSampleBank load_bank(const std::string& prefix, std::string* spec_hash) {
    std::ifstream js(prefix + ".json");
    if (!js) throw DomainError("cannot read " + prefix + ".json");
    const nlohmann::json meta = nlohmann::json::parse(js);
    ComponentSampleBank bank;
    bank.N = meta.at("N").get<std::size_t>();
    bank.seed = meta.at("seed").get<std::uint64_t>();
    bank.m = meta.at("m").get<int>();
    bank.K = meta.at("K").get<int>();
    if (spec_hash) *spec_hash = meta.at("spec_hash").get<std::string>();
    bank.tails.resize(static_cast<std::size_t>(bank.m * bank.K));
    std::ifstream bin(prefix + ".bin", std::ios::binary);
    if (!bin) throw DomainError("cannot read " + prefix + ".bin");
    for (const auto& a : meta.at("arrays")) {
        std::vector<double> v(bank.N);
        read_le(bin, v);
        const int i = a.at("i").get<int>();
        const int j = a.at("j").get<int>();
        if (i == 0) {
            bank.central = std::move(v);
        } else {
            bank.tails.at(static_cast<std::size_t>((i - 1) * bank.K + j)) = std::move(v);
        }
    }
    return bank;
}

}  // namespace dmrisk
