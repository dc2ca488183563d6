#include "dmrisk/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "dmrisk/correlation.hpp"
#include "dmrisk/error.hpp"
#include "dmrisk/random.hpp"

namespace dmrisk {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json toml_to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        json o = json::object();
        for (const auto& [k, v] : *t) o[std::string(k.str())] = toml_to_json(v);
        return o;
    }
    if (const auto* a = node.as_array()) {
        json arr = json::array();
        for (const auto& v : *a) arr.push_back(toml_to_json(v));
        return arr;
    }
    if (const auto* s = node.as_string()) return s->get();
    if (const auto* i = node.as_integer()) return i->get();
    if (const auto* f = node.as_floating_point()) return f->get();
    if (const auto* b = node.as_boolean()) return b->get();
    throw InputError("unsupported TOML value (dates and times are not accepted)");
}

// Typed access to one JSON object; finish() rejects keys nobody asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw InputError("config: '" + name() + "' must be a table");
    }

    bool has(const std::string& k) {
        used_.insert(k);
        return j_.contains(k);
    }
    const json& raw(const std::string& k) {
        used_.insert(k);
        if (!j_.contains(k)) throw InputError("config: missing required key '" + key(k) + "'");
        return j_.at(k);
    }
    double number(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_number()) throw InputError("config: '" + key(k) + "' must be a number");
        return v.get<double>();
    }
    double number(const std::string& k, double def) { return has(k) ? number(k) : def; }
    std::int64_t integer(const std::string& k) {
        const json& v = raw(k);
        if (v.is_number_integer()) return v.get<std::int64_t>();
        if (v.is_number_float()) {
            const double x = v.get<double>();
            if (x == std::floor(x) && std::abs(x) < 9e15) return static_cast<std::int64_t>(x);
        }
        throw InputError("config: '" + key(k) + "' must be an integer");
    }
    std::int64_t integer(const std::string& k, std::int64_t def) { return has(k) ? integer(k) : def; }
    std::size_t count(const std::string& k, std::size_t def) {
        if (!has(k)) return def;
        const auto v = integer(k);
        if (v < 0) throw InputError("config: '" + key(k) + "' must be nonnegative");
        return static_cast<std::size_t>(v);
    }
    std::string string(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_string()) throw InputError("config: '" + key(k) + "' must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& k, const std::string& def) { return has(k) ? string(k) : def; }
    bool boolean(const std::string& k, bool def) {
        if (!has(k)) return def;
        const json& v = raw(k);
        if (!v.is_boolean()) throw InputError("config: '" + key(k) + "' must be true or false");
        return v.get<bool>();
    }
    std::vector<double> numbers(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_array()) throw InputError("config: '" + key(k) + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw InputError("config: '" + key(k) + "' must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    std::vector<std::string> strings(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_array()) throw InputError("config: '" + key(k) + "' must be an array of strings");
        std::vector<std::string> out;
        for (const auto& x : v) {
            if (!x.is_string()) throw InputError("config: '" + key(k) + "' must be an array of strings");
            out.push_back(x.get<std::string>());
        }
        return out;
    }
    Section sub(const std::string& k) { return Section(raw(k), key(k)); }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!used_.count(k)) throw InputError("config: unknown key '" + key(k) + "'");
        }
    }
    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
    std::string name() const { return path_.empty() ? "<root>" : path_; }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

void parse_sa(Section s, SAConfig& sa) {
    sa.a = s.number("a", sa.a);
    sa.samples = s.count("samples", sa.samples);
    sa.t_min = static_cast<int>(s.integer("t_min", sa.t_min));
    sa.t_max = static_cast<int>(s.integer("t_max", sa.t_max));
    sa.threshold = s.number("threshold", sa.threshold);
    sa.kde_points = s.count("kde_points", sa.kde_points);
    sa.kde_samples = s.count("kde_samples", sa.kde_samples);
    sa.kde_bandwidth = s.number("kde_bandwidth", sa.kde_bandwidth);
    s.finish();
}

void parse_saa(Section s, SAAConfig& saa, int& k_star) {
    saa.samples = s.count("samples", saa.samples);
    saa.h = s.number("h", saa.h);
    k_star = static_cast<int>(s.integer("k_star", k_star));
    saa.refinement_rounds = static_cast<int>(s.integer("refinement_rounds", saa.refinement_rounds));
    saa.shrink = s.number("shrink", saa.shrink);
    saa.epsilon = s.number("epsilon", saa.epsilon);
    saa.max_grid = s.count("max_grid", saa.max_grid);
    s.finish();
}

// Marginal and copula tables are validated here; construction happens in
// build_spec once the run seed is final.
void check_marginal(Section s) {
    const std::string type = s.string("type");
    auto take = [&](std::initializer_list<const char*> keys) {
        for (const char* k : keys) s.has(k);
    };
    if (type == "inverse_gaussian") {
        s.number("mu");
        s.number("lambda");
    } else if (type == "lognormal" || type == "normal") {
        s.number("mu");
        if (!s.has("sigma") && !s.has("variance")) throw InputError("config: '" + s.name() + "' needs sigma or variance");
    } else if (type == "student_t") {
        s.number("nu");
    } else if (type == "gamma") {
        s.number("shape");
        s.number("scale");
    } else if (type == "uniform") {
        take({"a", "b"});
    } else if (type == "compound") {
        take({"r", "p", "mu", "sigma", "variance", "fixture", "row", "sigma_is_variance", "severity_unit", "table_size"});
    } else if (type == "spliced") {
        take({"fixture", "row", "p_lower", "p_upper", "x_lower", "xi_lower", "scale_lower", "x_upper", "xi_upper",
              "scale_upper", "central", "central_points"});
    } else {
        throw InputError("config: '" + s.key("type") + "' has unknown marginal type '" + type + "'");
    }
    s.finish();
}

void check_copula(Section s) {
    const std::string family = s.string("family");
    static const std::set<std::string> known{"gaussian", "t", "grouped_t", "clayton", "gumbel", "frank", "independence"};
    if (!known.count(family)) throw InputError("config: '" + s.key("family") + "' has unknown family '" + family + "'");
    for (const char* k : {"correlation", "nu", "groups", "theta"}) s.has(k);
    s.finish();
}

}  // namespace

std::string resolve_path(const std::string& base_dir, const std::string& p) {
    const fs::path path(p);
    if (path.is_absolute() || base_dir.empty()) return path.string();
    return (fs::path(base_dir) / path).lexically_normal().string();
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

std::string file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return fnv1a_hex(ss.str());
}

RunConfig load_config(const std::string& path) {
    if (!fs::exists(path)) throw InputError("config file not found: " + path);
    json doc;
    if (fs::path(path).extension() == ".json") {
        std::ifstream in(path);
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw InputError(path + ": " + e.what());
        }
    } else {
        try {
            const toml::table t = toml::parse_file(path);
            doc = toml_to_json(t);
        } catch (const toml::parse_error& e) {
            std::ostringstream msg;
            msg << path << ":" << e.source().begin.line << ":" << e.source().begin.column << ": " << e.description();
            throw InputError(msg.str());
        }
    }
    const auto base = fs::absolute(path).parent_path().string();
    return parse_config(doc, base, path);
}

RunConfig parse_config(const json& doc, const std::string& base_dir, const std::string& source) {
    RunConfig cfg;
    cfg.source = source;
    cfg.base_dir = base_dir;
    cfg.doc = doc;
    cfg.hash = fnv1a_hex(doc.dump());

    Section root(doc, "");
    cfg.seed = static_cast<std::uint64_t>(root.integer("seed", 0));
    cfg.threads = static_cast<int>(root.integer("threads", 0));
    cfg.output = root.string("output", cfg.output);
    root.has("calibrate");  // consumed by the calibrate command

    if (root.has("problem")) {
        Section pr = root.sub("problem");
        cfg.p = pr.number("p", cfg.p);
        if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw InputError("config: 'problem.p' must lie in (0, 1)");
        {
            Section agg = pr.sub("aggregation");
            const auto type = agg.string("type");
            if (type == "shifted_sum") agg.number("shift", 1.0);
            else if (type == "excess_of_loss") agg.numbers("retention");
            else if (type != "sum") throw InputError("config: unknown aggregation type '" + type + "'");
            agg.finish();
        }
        {
            Section dist = pr.sub("distortion");
            const auto fam = dist.string("family");
            if (fam == "smooth") dist.number("a");
            else if (fam == "region" || fam == "identity") dist.numbers("weights");
            else throw InputError("config: unknown distortion family '" + fam + "'");
            dist.finish();
        }
        const json& margs = pr.raw("marginals");
        if (!margs.is_array() || margs.empty()) throw InputError("config: 'problem.marginals' must be a non-empty array");
        for (std::size_t i = 0; i < margs.size(); ++i) check_marginal(Section(margs[i], "problem.marginals[" + std::to_string(i) + "]"));
        const std::string central = pr.string("central");
        const auto cands = pr.strings("candidates");
        if (cands.empty()) throw InputError("config: 'problem.candidates' must not be empty");
        pr.finish();

        Section cops = root.sub("copulas");
        for (const auto& [name, v] : doc.at("copulas").items()) {
            cops.has(name);
            check_copula(Section(v, "copulas." + name));
        }
        cops.finish();
        auto known = [&](const std::string& n, const std::string& where) {
            if (!doc.at("copulas").contains(n)) throw InputError("config: '" + where + "' names unknown copula '" + n + "'");
        };
        known(central, "problem.central");
        for (const auto& c : cands) known(c, "problem.candidates");
    } else {
        root.has("copulas");
    }
    if (root.has("sa")) parse_sa(root.sub("sa"), cfg.sa);
    if (root.has("saa")) parse_saa(root.sub("saa"), cfg.saa, cfg.k_star);
    if (root.has("benchmark")) {
        Section b = root.sub("benchmark");
        BenchmarkConfig bc;
        bc.copula = b.string("copula");
        bc.samples = b.count("samples", bc.samples);
        bc.batches = static_cast<int>(b.integer("batches", bc.batches));
        if (bc.batches < 2) throw InputError("config: 'benchmark.batches' must be at least 2");
        b.finish();
        if (!doc.contains("copulas") || !doc.at("copulas").contains(bc.copula)) {
            throw InputError("config: 'benchmark.copula' names unknown copula '" + bc.copula + "'");
        }
        cfg.benchmark = bc;
    }
    if (root.has("is")) {
        Section s = root.sub("is");
        ISConfig ic;
        if (s.has("tilt")) ic.spec.tilt = s.numbers("tilt");
        if (s.has("shift")) {
            const auto v = s.numbers("shift");
            ic.spec.shift = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        }
        ic.spec.tilt_marginals = s.boolean("tilt_marginals", true);
        ic.spec.shift_central = s.boolean("shift_central", true);
        ic.samples = s.count("samples", ic.samples);
        ic.kde_samples = s.count("kde_samples", ic.kde_samples);
        ic.replications = static_cast<int>(s.integer("replications", ic.replications));
        if (ic.replications < 2) throw InputError("config: 'is.replications' must be at least 2");
        s.finish();
        cfg.is = ic;
    }
    root.finish();

    cfg.sa.p = cfg.p;
    cfg.saa.p = cfg.p;
    try {
        cfg.sa.validate();
        cfg.saa.validate();
    } catch (const DomainError& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    if (cfg.k_star < 1) throw InputError("config: 'saa.k_star' must be at least 1");
    return cfg;
}

void apply_overrides(RunConfig& cfg, std::optional<std::uint64_t> seed, std::optional<int> threads,
                     std::optional<std::string> output, std::optional<std::size_t> samples) {
    if (seed) cfg.seed = *seed;
    if (threads) cfg.threads = *threads;
    if (output) cfg.output = *output;
    if (samples) {
        if (*samples == 0) throw InputError("--samples must be positive");
        cfg.sa.samples = *samples;
        cfg.saa.samples = *samples;
        if (cfg.benchmark) cfg.benchmark->samples = *samples;
        if (cfg.is) cfg.is->samples = *samples;
    }
}

namespace {

// Row `row` (1-based, matched on the first column) of a numeric CSV with a
// header, as name -> value.
std::map<std::string, double> fixture_row(const std::string& path, int row) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open fixture " + path);
    std::string line;
    std::vector<std::string> header;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::vector<std::string> cells;
        for (std::string c; std::getline(ss, c, ',');) {
            while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
            cells.push_back(c);
        }
        if (header.empty()) {
            header = cells;
            continue;
        }
        if (cells.size() != header.size()) {
            throw InputError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(header.size()) + " fields");
        }
        std::map<std::string, double> out;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            try {
                out[header[k]] = std::stod(cells[k]);
            } catch (const std::exception&) {
                throw InputError(path + ":" + std::to_string(lineno) + ":" + std::to_string(k + 1) + ": not a number '" + cells[k] + "'");
            }
        }
        if (out.at(header[0]) == row) return out;
    }
    throw InputError(path + ": no row " + std::to_string(row));
}

double pick(const json& j, const std::map<std::string, double>& fx, const std::string& k, const std::string& where) {
    if (j.contains(k)) return j.at(k).get<double>();
    const auto it = fx.find(k);
    if (it == fx.end()) throw InputError("config: '" + where + "' lacks '" + k + "'");
    return it->second;
}

Distribution build_marginal(const RunConfig& cfg, const json& j, int index) {
    const std::string where = "problem.marginals[" + std::to_string(index) + "]";
    const std::string type = j.at("type").get<std::string>();
    auto num = [&](const char* k, double def) { return j.contains(k) ? j.at(k).get<double>() : def; };
    auto sd = [&]() { return j.contains("sigma") ? j.at("sigma").get<double>() : std::sqrt(j.at("variance").get<double>()); };
    try {
        if (type == "inverse_gaussian") return InverseGaussian(j.at("mu").get<double>(), j.at("lambda").get<double>());
        if (type == "lognormal") return Lognormal(j.at("mu").get<double>(), sd());
        if (type == "normal") return Normal(j.at("mu").get<double>(), sd());
        if (type == "student_t") return StudentT(j.at("nu").get<double>());
        if (type == "gamma") return GammaDist(j.at("shape").get<double>(), j.at("scale").get<double>());
        if (type == "uniform") return Uniform(num("a", 0.0), num("b", 1.0));
        std::map<std::string, double> fx;
        if (j.contains("fixture")) {
            if (!j.contains("row")) throw InputError("config: '" + where + "' has a fixture but no row");
            fx = fixture_row(resolve_path(cfg.base_dir, j.at("fixture").get<std::string>()), j.at("row").get<int>());
        }
        if (type == "compound") {
            const double r = pick(j, fx, "r", where), p = pick(j, fx, "p", where);
            const double mu = pick(j, fx, "mu", where);
            double sigma = 0.0;
            if (j.contains("variance")) sigma = std::sqrt(j.at("variance").get<double>());
            else {
                sigma = pick(j, fx, "sigma", where);
                if (j.value("sigma_is_variance", false)) sigma = std::sqrt(sigma);
            }
            const double unit = num("severity_unit", 1.0);
            if (!(unit > 0.0)) throw InputError("config: '" + where + ".severity_unit' must be positive");
            const auto size = static_cast<std::size_t>(num("table_size", 2'000'000));
            return CompoundMarginal(NegBinomial(r, p), Lognormal(mu - std::log(unit), sigma), size,
                                    derive_seed(cfg.seed, 0x636f6d70, static_cast<std::uint64_t>(index)));
        }
        if (type == "spliced") {
            const double pl = num("p_lower", 0.1), pu = num("p_upper", 0.1);
            const double xl = pick(j, fx, "x_lower", where), xu = pick(j, fx, "x_upper", where);
            const Gpd lower(pick(j, fx, "xi_lower", where), pick(j, fx, "scale_lower", where));
            const Gpd upper(pick(j, fx, "xi_upper", where), pick(j, fx, "scale_upper", where));
            std::vector<double> central;
            if (j.contains("central")) {
                central = j.at("central").get<std::vector<double>>();
            } else {
                // normal-shaped points with quantiles p_l and 1 - p_u at x_l and x_u
                const auto n = static_cast<std::size_t>(num("central_points", 2678));
                if (n < 2) throw InputError("config: '" + where + ".central_points' must be at least 2");
                const double zl = normal_quantile(pl), zu = normal_quantile(1.0 - pu);
                const double s = (xu - xl) / (zu - zl), m = xl - s * zl;
                for (std::size_t k = 0; k < n; ++k) {
                    const double q = pl + (1.0 - pl - pu) * static_cast<double>(k) / static_cast<double>(n - 1);
                    central.push_back(std::clamp(m + s * normal_quantile(q), xl, xu));
                }
            }
            return SplicedMarginal(pl, pu, xl, xu, lower, upper, std::move(central));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config: '" + where + "': " + e.what());
    } catch (const InputError&) {
        throw;
    } catch (const DomainError& e) {
        throw InputError("config: '" + where + "': " + e.what());
    }
    throw InputError("config: '" + where + "' has unknown type '" + type + "'");
}

CorrelationMatrix build_correlation(const RunConfig& cfg, const json& c, int d, const std::string& where) {
    if (!c.contains("correlation")) throw InputError("config: '" + where + "' needs a correlation");
    const json& v = c.at("correlation");
    if (v.is_number()) return CorrelationMatrix::exchangeable(d, v.get<double>());
    if (v.is_string()) {
        const auto m = load_matrix_csv(resolve_path(cfg.base_dir, v.get<std::string>()));
        return CorrelationMatrix(m);
    }
    if (v.is_array()) {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), static_cast<Eigen::Index>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_array() || v[i].size() != v.size()) throw InputError("config: '" + where + ".correlation' must be square");
            for (std::size_t k = 0; k < v.size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v[i][k].get<double>();
        }
        return CorrelationMatrix(m);
    }
    throw InputError("config: '" + where + ".correlation' must be a number, a file name or a matrix");
}

int problem_dimension(const RunConfig& cfg) {
    if (!cfg.doc.contains("problem")) throw InputError("config: missing [problem] section");
    return static_cast<int>(cfg.doc.at("problem").at("marginals").size());
}

}  // namespace

CopulaSpec build_copula(const RunConfig& cfg, const std::string& name) {
    const std::string where = "copulas." + name;
    if (!cfg.doc.contains("copulas") || !cfg.doc.at("copulas").contains(name)) {
        throw InputError("config: unknown copula '" + name + "'");
    }
    const json& c = cfg.doc.at("copulas").at(name);
    const int d = problem_dimension(cfg);
    const std::string family = c.at("family").get<std::string>();
    try {
        if (family == "gaussian") {
            auto P = build_correlation(cfg, c, d, where);
            if (P.dim() != d) throw InputError("config: '" + where + "' has dimension " + std::to_string(P.dim()) + ", expected " + std::to_string(d));
            return GaussianCopula(std::move(P));
        }
        if (family == "t") {
            auto P = build_correlation(cfg, c, d, where);
            return StudentTCopula(c.at("nu").get<double>(), std::move(P));
        }
        if (family == "grouped_t") {
            auto P = build_correlation(cfg, c, d, where);
            auto groups = c.at("groups").get<std::vector<int>>();
            for (int& g : groups) g -= 1;  // 1-based in the config
            return GroupedTCopula(std::move(groups), c.at("nu").get<std::vector<double>>(), std::move(P));
        }
        if (family == "clayton") return ClaytonCopula(c.at("theta").get<double>(), d);
        if (family == "gumbel") return GumbelCopula(c.at("theta").get<double>(), d);
        if (family == "frank") return FrankCopula(c.at("theta").get<double>(), d);
        if (family == "independence") return IndependenceCopula(d);
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config: '" + where + "': " + e.what());
    } catch (const InputError&) {
        throw;
    } catch (const DomainError& e) {
        throw InputError("config: '" + where + "': " + e.what());
    }
    throw InputError("config: '" + where + "' has unknown family '" + family + "'");
}

DMSpec build_spec(const RunConfig& cfg) {
    if (!cfg.doc.contains("problem")) throw InputError("config: missing [problem] section");
    const json& pr = cfg.doc.at("problem");
    const json& dist = pr.at("distortion");
    const std::string fam = dist.at("family").get<std::string>();
    std::optional<DistortionSet> ds;
    try {
        if (fam == "smooth") ds = DistortionSet::smooth(dist.at("a").get<double>());
        else if (fam == "region") ds = DistortionSet::region(dist.at("weights").get<std::vector<double>>());
        else ds = DistortionSet::identity(dist.at("weights").get<std::vector<double>>());
    } catch (const DomainError& e) {
        throw InputError(std::string("config: 'problem.distortion': ") + e.what());
    }

    const json& agg = pr.at("aggregation");
    const std::string at = agg.at("type").get<std::string>();
    Aggregation aggregation = SumAggregation{};
    if (at == "shifted_sum") aggregation = ShiftedSumAggregation{agg.value("shift", 1.0)};
    else if (at == "excess_of_loss") aggregation = ExcessOfLossAggregation{agg.at("retention").get<std::vector<double>>()};

    std::vector<Distribution> marginals;
    const json& margs = pr.at("marginals");
    for (std::size_t i = 0; i < margs.size(); ++i) marginals.push_back(build_marginal(cfg, margs[i], static_cast<int>(i)));

    std::vector<CopulaSpec> cands;
    std::vector<std::string> names;
    for (const auto& n : pr.at("candidates")) {
        names.push_back(n.get<std::string>());
        cands.push_back(build_copula(cfg, names.back()));
    }
    DMSpec spec{std::move(*ds), build_copula(cfg, pr.at("central").get<std::string>()), std::move(cands),
                std::move(names), std::move(marginals), std::move(aggregation)};
    try {
        spec.validate();
    } catch (const DomainError& e) {
        throw InputError(std::string("config: ") + e.what());
    }
    return spec;
}

std::vector<std::string> fixture_paths(const RunConfig& cfg) {
    std::set<std::string> out;
    if (cfg.doc.contains("problem")) {
        for (const auto& m : cfg.doc.at("problem").at("marginals")) {
            if (m.contains("fixture")) out.insert(resolve_path(cfg.base_dir, m.at("fixture").get<std::string>()));
        }
    }
    if (cfg.doc.contains("copulas")) {
        for (const auto& [name, c] : cfg.doc.at("copulas").items()) {
            if (c.contains("correlation") && c.at("correlation").is_string()) {
                out.insert(resolve_path(cfg.base_dir, c.at("correlation").get<std::string>()));
            }
        }
    }
    return {out.begin(), out.end()};
}

}  // namespace dmrisk
