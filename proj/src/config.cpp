#include "ermip/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ermip/rates.hpp"
#include "ermip/rng.hpp"
#include "ermip/simulate.hpp"

namespace ermip {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_real(const std::string& text, const std::string& key) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        throw ConfigError(key, "expected a number, got '" + text + "'");
    }
    return value;
}

long long parse_integer(const std::string& text, const std::string& key) {
    const double v = parse_real(text, key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError(key, "expected an integer, got '" + text + "'");
    return static_cast<long long>(v);
}

std::uint64_t parse_seed(const std::string& text, const std::string& key) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw ConfigError(key, "expected a nonnegative integer seed");
    return value;
}

double parse_power_token(const std::string& token, const std::string& key) {
    const auto caret = token.find('^');
    if (caret == std::string::npos) return parse_real(token, key);
    return std::pow(parse_real(trim(token.substr(0, caret)), key), parse_real(trim(token.substr(caret + 1)), key));
}

template <class Enum>
Enum parse_enum(const std::string& text, const std::string& key, std::initializer_list<std::pair<const char*, Enum>> options) {
    std::string allowed;
    for (const auto& [name, value] : options) {
        if (text == name) return value;
        allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(key, "unknown value '" + text + "' (expected one of: " + allowed + ")");
}

// "(1|0)=0.3, (2|1)=-0.1" or "(0)=1; (1)=0.5"
CoefVec parse_coefficients(const std::string& text, const std::string& key) {
    CoefVec out;
    std::string normalized = text;
    std::replace(normalized.begin(), normalized.end(), ';', '\n');
    // Commas also separate inside an index, so split on ')' boundaries instead.
    std::size_t pos = 0;
    while (pos < normalized.size()) {
        const auto open = normalized.find('(', pos);
        if (open == std::string::npos) {
            if (!trim(normalized.substr(pos)).empty() && trim(normalized.substr(pos)) != ",") {
                throw ConfigError(key, "malformed coefficient list");
            }
            break;
        }
        const auto close = normalized.find(')', open);
        const auto eq = normalized.find('=', close);
        if (close == std::string::npos || eq == std::string::npos) throw ConfigError(key, "malformed coefficient list");
        auto value_end = normalized.find_first_of(",\n", eq);
        if (value_end == std::string::npos) value_end = normalized.size();
        MultiIndex j;
        try {
            j = MultiIndex::parse(normalized.substr(open, close - open + 1));
        } catch (const Error& e) {
            throw ConfigError(key, e.what());
        }
        out.set(j, parse_real(trim(normalized.substr(eq + 1, value_end - eq - 1)), key));
        pos = value_end + 1;
    }
    if (out.empty()) throw ConfigError(key, "no coefficients given");
    return out;
}

// Indices of `basis` with |j| <= level, ordered by (|j|, index).
std::vector<MultiIndex> graded_indices(const BasisId& basis, int level) {
    auto all = index_box(basis, level);
    std::erase_if(all, [&](const MultiIndex& j) { return j.total() > level; });
    std::stable_sort(all.begin(), all.end(),
                     [](const MultiIndex& a, const MultiIndex& b) { return a.total() < b.total(); });
    return all;
}

int component_axis(const MultiIndex& j) {
    for (std::size_t i = 0; i < j.dim(); ++i) {
        if (j[i] != 0) return static_cast<int>(i);
    }
    return -1;
}

}  // namespace

std::vector<double> parse_number_list(std::string_view text, const std::string& key) {
    const std::string s = trim(text);
    if (s.empty()) throw ConfigError(key, "empty list");
    if (const auto dots = s.find(".."); dots != std::string::npos) {
        const std::string lo = trim(s.substr(0, dots));
        const std::string hi = trim(s.substr(dots + 2));
        const auto c1 = lo.find('^');
        const auto c2 = hi.find('^');
        if (c1 == std::string::npos || c2 == std::string::npos) {
            throw ConfigError(key, "ranges are written base^e1..base^e2");
        }
        const double base = parse_real(trim(lo.substr(0, c1)), key);
        if (base != parse_real(trim(hi.substr(0, c2)), key)) throw ConfigError(key, "range bases differ");
        const long long e1 = parse_integer(trim(lo.substr(c1 + 1)), key);
        const long long e2 = parse_integer(trim(hi.substr(c2 + 1)), key);
        if (e2 < e1) throw ConfigError(key, "range is decreasing");
        std::vector<double> out;
        for (long long e = e1; e <= e2; ++e) out.push_back(std::pow(base, static_cast<double>(e)));
        return out;
    }
    std::vector<double> out;
    for (const auto& token : split(s, ',')) out.push_back(parse_power_token(token, key));
    return out;
}

ExperimentConfig parse_config(std::string_view text) {
    static const std::map<std::string, std::set<std::string>> schema = {
        {"experiment", {"name", "model", "estimator"}},
        {"operator", {"kind", "q", "kernel"}},
        {"ellipsoid", {"d", "s", "L"}},
        {"additive", {"components", "L"}},
        {"truth", {"generator", "coefficients", "seed"}},
        {"sweep", {"n_grid", "replications", "base_seed", "delta_rule", "kappa", "delta", "slope_tolerance"}},
        {"bounds", {"xi", "C_tau", "c"}},
        {"scalings", {"delta_grid", "packing_seed"}},
    };

    std::map<std::string, std::string> values;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(line_no), "unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!schema.contains(section)) throw ConfigError(section, "unknown section");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string full = section + "." + key;
        if (section.empty()) throw ConfigError(key, "key outside any section");
        if (!schema.at(section).contains(key)) throw ConfigError(full, "unknown key");
        if (values.contains(full)) throw ConfigError(full, "duplicate key");
        values[full] = trim(t.substr(eq + 1));
    }

    auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        return it->second;
    };
    auto require = [&](const std::string& key) {
        auto v = get(key);
        if (!v) throw ConfigError(key, "missing required key");
        return *v;
    };

    ExperimentConfig cfg;
    if (auto v = get("experiment.name")) cfg.name = *v;
    if (auto v = get("experiment.model")) {
        cfg.model = parse_enum<StatModel>(*v, "experiment.model",
                                          {{"white_noise", StatModel::white_noise}, {"density", StatModel::density}});
    }
    if (auto v = get("experiment.estimator")) {
        cfg.estimator = parse_enum<EstimatorKind>(
            *v, "experiment.estimator",
            {{"net", EstimatorKind::net}, {"dense", EstimatorKind::dense}, {"additive", EstimatorKind::additive}});
    }

    if (cfg.estimator == EstimatorKind::additive) {
        const double L = get("additive.L") ? parse_real(*get("additive.L"), "additive.L") : 1.0;
        int axis = 0;
        for (const auto& token : split(require("additive.components"), ',')) {
            const auto colon = token.find(':');
            if (colon == std::string::npos) throw ConfigError("additive.components", "expected s:q pairs");
            AdditiveComponent comp;
            comp.axis = axis++;
            comp.spec = {1, parse_real(trim(token.substr(0, colon)), "additive.components"), L};
            comp.q = parse_real(trim(token.substr(colon + 1)), "additive.components");
            if (!(comp.spec.s > 0.0) || !(comp.q >= 0.0)) {
                throw ConfigError("additive.components", "need s > 0 and q >= 0");
            }
            if (!(L > 0.0)) throw ConfigError("additive.L", "must be > 0");
            cfg.components.push_back(comp);
        }
        if (cfg.components.size() > kMaxDim) throw ConfigError("additive.components", "at most 4 components");
        cfg.operator_kind = OperatorKind::convolution;
        if (cfg.model != StatModel::white_noise) throw ConfigError("experiment.model", "additive models are white noise only");
        for (const auto* key : {"operator.kind", "operator.q", "operator.kernel", "ellipsoid.d", "ellipsoid.s", "ellipsoid.L"}) {
            if (get(key)) throw ConfigError(key, "not used by the additive estimator");
        }
    } else {
        if (get("additive.components") || get("additive.L")) {
            throw ConfigError("additive.components", "only used with estimator = additive");
        }
        cfg.operator_kind = parse_enum<OperatorKind>(
            get("operator.kind").value_or("identity"), "operator.kind",
            {{"identity", OperatorKind::identity}, {"convolution", OperatorKind::convolution}, {"radon2d", OperatorKind::radon2d}});
        if (auto v = get("operator.q")) {
            if (cfg.operator_kind != OperatorKind::convolution) throw ConfigError("operator.q", "only convolution takes q");
            cfg.q = parse_real(*v, "operator.q");
            if (!(cfg.q >= 0.0)) throw ConfigError("operator.q", "must be >= 0");
        }
        if (auto v = get("operator.kernel")) {
            if (cfg.operator_kind != OperatorKind::convolution) throw ConfigError("operator.kernel", "only convolution takes a kernel");
            try {
                cfg.kernel = BasisId::fourier(1).canonical(parse_coefficients(*v, "operator.kernel"));
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                throw ConfigError("operator.kernel", e.what());
            }
        }
        if (cfg.operator_kind == OperatorKind::radon2d) cfg.q = 0.5;

        cfg.ellipsoid.d = static_cast<int>(parse_integer(get("ellipsoid.d").value_or("1"), "ellipsoid.d"));
        cfg.ellipsoid.s = parse_real(require("ellipsoid.s"), "ellipsoid.s");
        cfg.ellipsoid.L = parse_real(get("ellipsoid.L").value_or("1"), "ellipsoid.L");
        try {
            cfg.ellipsoid.validate();
        } catch (const Error& e) {
            throw ConfigError("ellipsoid", e.what());
        }
        if (cfg.operator_kind == OperatorKind::radon2d && cfg.ellipsoid.d != 2) {
            throw ConfigError("ellipsoid.d", "the Radon transform acts on the disk (d = 2)");
        }
        if (cfg.model == StatModel::density) {
            if (cfg.operator_kind == OperatorKind::radon2d) {
                throw ConfigError("operator.kind", "the density model needs an operator whose output basis is its input basis");
            }
            if (cfg.ellipsoid.d > 2) throw ConfigError("ellipsoid.d", "the density model supports d <= 2");
            if (cfg.estimator != EstimatorKind::net) throw ConfigError("experiment.estimator", "the density model uses the net estimator");
        }
    }

    if (auto v = get("truth.generator")) {
        cfg.truth_generator = parse_enum<TruthGenerator>(*v, "truth.generator",
                                                         {{"fixed_trig", TruthGenerator::fixed_trig},
                                                          {"boundary", TruthGenerator::boundary},
                                                          {"random_interior", TruthGenerator::random_interior},
                                                          {"explicit", TruthGenerator::explicit_coefficients}});
    }
    if (auto v = get("truth.coefficients")) {
        if (cfg.truth_generator != TruthGenerator::explicit_coefficients) {
            throw ConfigError("truth.coefficients", "only used with generator = explicit");
        }
        cfg.truth_coefficients = parse_coefficients(*v, "truth.coefficients");
    } else if (cfg.truth_generator == TruthGenerator::explicit_coefficients) {
        throw ConfigError("truth.coefficients", "missing required key");
    }
    if (auto v = get("truth.seed")) cfg.truth_seed = parse_seed(*v, "truth.seed");

    if (auto v = get("sweep.n_grid")) {
        cfg.n_grid = parse_number_list(*v, "sweep.n_grid");
        for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
            if (!(cfg.n_grid[i] > 1.0)) throw ConfigError("sweep.n_grid", "values must exceed 1");
            if (i > 0 && !(cfg.n_grid[i] > cfg.n_grid[i - 1])) throw ConfigError("sweep.n_grid", "must be strictly increasing");
            if (cfg.model == StatModel::density && cfg.n_grid[i] != std::floor(cfg.n_grid[i])) {
                throw ConfigError("sweep.n_grid", "density sample sizes must be integers");
            }
        }
    }
    if (auto v = get("sweep.replications")) {
        cfg.replications = static_cast<int>(parse_integer(*v, "sweep.replications"));
        if (cfg.replications < 1) throw ConfigError("sweep.replications", "must be >= 1");
    }
    if (auto v = get("sweep.base_seed")) cfg.base_seed = parse_seed(*v, "sweep.base_seed");
    if (auto v = get("sweep.delta_rule")) {
        cfg.delta_rule = parse_enum<DeltaRule>(*v, "sweep.delta_rule",
                                               {{"optimal", DeltaRule::optimal}, {"fixed", DeltaRule::fixed}});
    }
    if (auto v = get("sweep.kappa")) {
        cfg.kappa = parse_real(*v, "sweep.kappa");
        if (!(cfg.kappa > 0.0)) throw ConfigError("sweep.kappa", "must be > 0");
    }
    if (auto v = get("sweep.delta")) {
        cfg.delta = parse_real(*v, "sweep.delta");
        if (!(cfg.delta > 0.0)) throw ConfigError("sweep.delta", "must be > 0");
    }
    if (auto v = get("sweep.slope_tolerance")) {
        cfg.slope_tolerance = parse_real(*v, "sweep.slope_tolerance");
        if (!(cfg.slope_tolerance > 0.0)) throw ConfigError("sweep.slope_tolerance", "must be > 0");
    }

    if (auto v = get("bounds.xi")) cfg.xi = parse_real(*v, "bounds.xi");
    if (auto v = get("bounds.C_tau")) cfg.C_tau = parse_real(*v, "bounds.C_tau");
    if (auto v = get("bounds.c")) {
        cfg.orthogonality_c = parse_real(*v, "bounds.c");
        if (!(cfg.orthogonality_c > 0.0)) throw ConfigError("bounds.c", "must be > 0");
    }
    if (!(cfg.xi > 0.0 && cfg.xi < 0.5)) throw ConfigError("bounds.xi", "must lie in (0, 1/2)");
    if (!(cfg.C_tau > 0.0)) throw ConfigError("bounds.C_tau", "must be > 0");

    if (auto v = get("scalings.delta_grid")) {
        cfg.delta_grid = parse_number_list(*v, "scalings.delta_grid");
        for (double d : cfg.delta_grid) {
            if (!(d > 0.0)) throw ConfigError("scalings.delta_grid", "values must be > 0");
        }
    }
    if (auto v = get("scalings.packing_seed")) cfg.packing_seed = parse_seed(*v, "scalings.packing_seed");

    // Validate the truth and operator eagerly so errors name the config key.
    try {
        (void)cfg.make_operator();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("operator", e.what());
    }
    try {
        (void)cfg.truth();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("truth", e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

int ExperimentConfig::dim() const {
    return estimator == EstimatorKind::additive ? static_cast<int>(components.size()) : ellipsoid.d;
}

BasisId ExperimentConfig::basis() const {
    if (operator_kind == OperatorKind::radon2d) return BasisId::zernike();
    return BasisId::fourier(dim());
}

DiagonalOperator ExperimentConfig::make_operator() const {
    if (estimator == EstimatorKind::additive) {
        std::vector<double> qs;
        for (const auto& c : components) qs.push_back(c.q);
        return DiagonalOperator::additive_convolution(qs);
    }
    switch (operator_kind) {
        case OperatorKind::identity:
            return DiagonalOperator::identity(basis());
        case OperatorKind::radon2d:
            return DiagonalOperator::radon2d();
        case OperatorKind::convolution:
            break;
    }
    if (kernel) return DiagonalOperator::convolution_kernel(ellipsoid.d, *kernel);
    return DiagonalOperator::convolution(ellipsoid.d, q);
}

double ExperimentConfig::theory_mise_exponent() const {
    if (estimator == EstimatorKind::additive) {
        std::vector<std::pair<double, double>> pairs;
        for (const auto& c : components) pairs.emplace_back(c.spec.s, c.q);
        return rate_additive(pairs);
    }
    return 2.0 * ellipsoid.s / (2.0 * ellipsoid.s + 2.0 * q + ellipsoid.d);
}

CoefVec ExperimentConfig::truth() const {
    const BasisId b = estimator == EstimatorKind::additive ? BasisId::fourier(dim()) : basis();
    std::vector<MultiIndex> support;
    if (estimator == EstimatorKind::additive) {
        // Interleave the component index sets by level.
        for (int level = 1; level <= 32; ++level) {
            for (const auto& c : components) {
                std::vector<int> j(static_cast<std::size_t>(dim()), 0);
                j[static_cast<std::size_t>(c.axis)] = level;
                std::vector<int> k(j.size(), 0);
                support.emplace_back(std::span<const int>(j), std::span<const int>(k));
            }
        }
    } else {
        support = graded_indices(b, 32);
    }
    const int d = dim();
    auto coeff = [&](const MultiIndex& j) {
        if (estimator == EstimatorKind::additive) {
            return ell_coeff(components[static_cast<std::size_t>(component_axis(j))].spec, j);
        }
        return ell_coeff(ellipsoid, j);
    };
    auto decay = [&](const MultiIndex& j) {
        return 1.0 / (coeff(j) * std::pow(std::max(1, j.total()), 0.5 * (estimator == EstimatorKind::additive ? 1 : d) + 0.5));
    };
    const double L = estimator == EstimatorKind::additive ? components.front().spec.L : ellipsoid.L;

    CoefVec theta;
    double target = 0.0;
    switch (truth_generator) {
        case TruthGenerator::explicit_coefficients:
            theta = b.canonical(truth_coefficients);
            for (const auto& [j, v] : theta) {
                if (!b.admits(j)) throw ConfigError("truth.coefficients", "index " + j.to_string() + " is not in the " + b.name() + " basis");
            }
            break;
        case TruthGenerator::fixed_trig:
            for (std::size_t i = 0; i < 4 && i < support.size(); ++i) theta.set(support[i], 1.0 / coeff(support[i]));
            target = 0.9 * L;
            break;
        case TruthGenerator::boundary:
            for (const auto& j : support) theta.set(j, decay(j));
            target = L;
            break;
        case TruthGenerator::random_interior: {
            for (const auto& j : support) {
                if (j.total() > 8) continue;
                CounterRng rng(mix_seed({truth_seed, index_hash(j)}));
                theta.set(j, rng.normal() * decay(j));
            }
            target = 0.5 * L;
            break;
        }
    }
    if (truth_generator != TruthGenerator::explicit_coefficients) {
        double weighted = 0.0;
        if (estimator == EstimatorKind::additive) {
            for (const auto& [j, v] : theta) weighted += coeff(j) * coeff(j) * v * v;
        } else {
            weighted = ell_weighted_norm_sq(ellipsoid, theta);
        }
        theta *= target / std::sqrt(weighted);
        // Keep exact-boundary truths on the inside after rounding.
        if (truth_generator == TruthGenerator::boundary) theta *= 1.0 - 1e-15;
    }

    if (estimator == EstimatorKind::additive) {
        for (const auto& [j, v] : theta) {
            if (v != 0.0 && j.nonzero_count() != 1) {
                throw ConfigError("truth.coefficients", "additive truths live on single-axis indices");
            }
        }
        for (const auto& c : components) {
            CoefVec part;
            for (const auto& [j, v] : theta) {
                if (component_axis(j) == c.axis) part.set(j, v);
            }
            if (!in_ellipsoid(c.spec, part)) {
                throw ConfigError("truth", "component " + std::to_string(c.axis) + " lies outside its ellipsoid");
            }
        }
    } else if (!in_ellipsoid(ellipsoid, theta)) {
        throw ConfigError("truth", "weighted norm " + std::to_string(std::sqrt(ell_weighted_norm_sq(ellipsoid, theta))) +
                                       " exceeds L = " + std::to_string(ellipsoid.L));
    }
    return theta;
}

}  // namespace ermip
