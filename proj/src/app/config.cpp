#include "robreg/app/config.hpp"

#include <cctype>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "robreg/detail/overloaded.hpp"
#include "robreg/errors.hpp"

namespace robreg::app {

using detail::overloaded;

ConfigError::ConfigError(std::string message, int line, int column)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      message_(std::move(message)),
      line_(line),
      column_(column) {}

std::string ConfigError::anchored(const std::string& source) const {
    if (line_ <= 0) return source + ": " + message_;
    return source + ":" + std::to_string(line_) + ":" + std::to_string(column_) + ": " + message_;
}

namespace {

ConfigError error_at(const YAML::Node& node, const std::string& message) {
    const YAML::Mark m = node.Mark();
    if (m.is_null()) return ConfigError(message);
    return ConfigError(message, m.line + 1, m.column + 1);
}

void allow_keys(const YAML::Node& map, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!map.IsMap()) throw error_at(map, where + " must be a mapping");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!ok.count(key)) throw error_at(kv.first, "unknown key '" + key + "' in " + where);
    }
}

YAML::Node required(const YAML::Node& parent, const char* key, const std::string& where) {
    YAML::Node n = parent[key];
    if (!n) throw error_at(parent, "missing key '" + std::string(key) + "' in " + where);
    return n;
}

template <class T>
T as(const YAML::Node& n, const char* what) {
    if (!n.IsScalar()) throw error_at(n, std::string(what) + " must be a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw error_at(n, std::string("invalid value for ") + what + ": '" + n.Scalar() + "'");
    }
}

template <class T>
T get(const YAML::Node& parent, const char* key, const std::string& where) {
    return as<T>(required(parent, key, where), key);
}

template <class T>
std::optional<T> get_opt(const YAML::Node& parent, const char* key) {
    YAML::Node n = parent[key];
    if (!n || n.IsNull()) return std::nullopt;
    return as<T>(n, key);
}

std::vector<double> doubles(const YAML::Node& n, const char* what) {
    if (!n.IsSequence()) throw error_at(n, std::string(what) + " must be a list");
    std::vector<double> out;
    for (const auto& e : n) out.push_back(as<double>(e, what));
    return out;
}

Vector vec(const YAML::Node& n, const char* what) {
    const auto v = doubles(n, what);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix mat(const YAML::Node& n, const char* what) {
    if (!n.IsSequence() || n.size() == 0) throw error_at(n, std::string(what) + " must be a nonempty list of rows");
    const auto rows = static_cast<Eigen::Index>(n.size());
    Matrix m;
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Vector row = vec(n[i], what);
        if (i == 0) m.resize(rows, row.size());
        if (row.size() != m.cols()) throw error_at(n[i], std::string(what) + " has ragged rows");
        m.row(i) = row.transpose();
    }
    return m;
}

FeatureDistribution parse_feature(const YAML::Node& n, int d) {
    const std::string where = "spec.feature";
    const auto variant = get<std::string>(n, "variant", where);
    if (variant == "unit_box_negative" || variant == "signed_basis") {
        allow_keys(n, {"variant", "d"}, where);
        const int fd = get_opt<int>(n, "d").value_or(d);
        if (fd != d) throw error_at(n["d"], "feature d differs from spec.d");
        if (variant == "unit_box_negative") return UnitBoxNegative{fd};
        return SignedBasis{fd};
    }
    if (variant == "fixed_support") {
        allow_keys(n, {"variant", "points", "probs"}, where);
        FixedSupport s;
        const auto pts = required(n, "points", where);
        if (!pts.IsSequence()) throw error_at(pts, "points must be a list");
        for (const auto& p : pts) s.points.push_back(vec(p, "points"));
        s.probs = doubles(required(n, "probs", where), "probs");
        return s;
    }
    if (variant == "gaussian") {
        allow_keys(n, {"variant", "mean", "covariance"}, where);
        return GaussianFeatures{vec(required(n, "mean", where), "mean"),
                                mat(required(n, "covariance", where), "covariance")};
    }
    throw error_at(n["variant"], "unknown feature variant '" + variant + "'");
}

NoiseDistribution parse_noise(const YAML::Node& n) {
    const std::string where = "spec.noise";
    const auto variant = get<std::string>(n, "variant", where);
    if (variant == "zero") {
        allow_keys(n, {"variant"}, where);
        return ZeroNoise{};
    }
    if (variant == "uniform_symmetric") {
        allow_keys(n, {"variant", "sigma"}, where);
        return UniformNoise{get<double>(n, "sigma", where)};
    }
    if (variant == "gaussian") {
        allow_keys(n, {"variant", "sigma"}, where);
        return GaussianNoise{get<double>(n, "sigma", where)};
    }
    if (variant == "discrete_symmetric") {
        allow_keys(n, {"variant", "values", "probs"}, where);
        return DiscreteSymmetricNoise{doubles(required(n, "values", where), "values"),
                                      doubles(required(n, "probs", where), "probs")};
    }
    throw error_at(n["variant"], "unknown noise variant '" + variant + "'");
}

CorruptionConditional parse_conditional(const YAML::Node& n) {
    const std::string where = "spec.corruption.conditional";
    const auto variant = get<std::string>(n, "variant", where);
    if (variant == "point_mass") {
        allow_keys(n, {"variant", "M"}, where);
        return PointMass{get<double>(n, "M", where)};
    }
    if (variant == "scaled_point_mass") {
        allow_keys(n, {"variant", "C"}, where);
        return ScaledPointMass{get<double>(n, "C", where)};
    }
    if (variant == "sign_flip_of_clean") {
        allow_keys(n, {"variant", "scale"}, where);
        return SignFlipOfClean{get_opt<double>(n, "scale").value_or(2.0)};
    }
    if (variant == "gaussian") {
        allow_keys(n, {"variant", "s"}, where);
        return GaussianCorruption{get<double>(n, "s", where)};
    }
    throw error_at(n["variant"], "unknown corruption variant '" + variant + "'");
}

ProblemSpec parse_spec(const YAML::Node& n) {
    const std::string where = "spec";
    allow_keys(n, {"d", "D", "w_star", "w_star_seed", "feature", "noise", "corruption", "rho", "known_mean"}, where);
    ProblemSpec spec;
    spec.d = get<int>(n, "d", where);
    if (spec.d < 1) throw error_at(n["d"], "d must be >= 1");
    spec.D = get<double>(n, "D", where);
    if (!(spec.D > 0.0)) throw error_at(n["D"], "D must be positive");
    if (n["w_star"] && n["w_star_seed"]) throw error_at(n["w_star_seed"], "give either w_star or w_star_seed");
    if (n["w_star"]) {
        spec.w_star = vec(n["w_star"], "w_star");
    } else if (n["w_star_seed"]) {
        spec.w_star = sample_uniform_ball(spec.d, spec.D, as<std::uint64_t>(n["w_star_seed"], "w_star_seed"));
    } else {
        throw error_at(n, "missing key 'w_star' (or 'w_star_seed') in spec");
    }
    spec.feature = parse_feature(required(n, "feature", where), spec.d);
    spec.noise = n["noise"] ? parse_noise(n["noise"]) : NoiseDistribution{ZeroNoise{}};
    if (const auto c = n["corruption"]) {
        allow_keys(c, {"alpha", "conditional"}, "spec.corruption");
        spec.corruption.alpha = get_opt<double>(c, "alpha").value_or(0.0);
        spec.corruption.conditional = parse_conditional(required(c, "conditional", "spec.corruption"));
    }
    spec.rho = get_opt<double>(n, "rho").value_or(0.0);
    if (n["known_mean"]) spec.known_mean = vec(n["known_mean"], "known_mean");
    try {
        spec.validate();
    } catch (const ContractError& e) {
        throw error_at(n, e.what());
    }
    return spec;
}

AlgorithmTemplate parse_algorithm_template(const YAML::Node& n) {
    const std::string where = "algorithms entry";
    allow_keys(n, {"algorithm", "label", "huber", "ball", "lambda", "eta0", "trace_stride", "T"}, where);
    AlgorithmTemplate t;
    const auto name = get<std::string>(n, "algorithm", where);
    const auto alg = parse_algorithm(name);
    if (!alg) throw error_at(n["algorithm"], "unknown algorithm '" + name + "'");
    t.algorithm = *alg;
    t.label = get_opt<std::string>(n, "label").value_or(name);
    for (char ch : t.label) {
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) {
            throw error_at(n["label"], "label may contain only letters, digits, '_', '-' and '.'");
        }
    }
    if (const auto h = n["huber"]) {
        allow_keys(h, {"derivation", "radius", "kappa"}, "huber");
        const auto rule = get<std::string>(h, "derivation", "huber");
        if (rule == "bounded") {
            t.huber.rule = RadiusRule::bounded;
        } else if (rule == "subgaussian") {
            t.huber.rule = RadiusRule::subgaussian;
            t.huber.kappa = get<double>(h, "kappa", "huber");
            if (!(t.huber.kappa > 0.0)) throw error_at(h["kappa"], "kappa must be positive");
        } else if (rule == "explicit") {
            t.huber.rule = RadiusRule::explicit_radius;
            t.huber.radius = get<double>(h, "radius", "huber");
            if (!(t.huber.radius > 0.0)) throw error_at(h["radius"], "radius must be positive");
        } else {
            throw error_at(h["derivation"], "unknown radius derivation '" + rule + "'");
        }
    }
    if (const auto b = n["ball"]) {
        allow_keys(b, {"D"}, "ball");
        t.ball = get<double>(b, "D", "ball");
        if (!(*t.ball > 0.0)) throw error_at(b["D"], "ball D must be positive");
    }
    t.lambda = get_opt<double>(n, "lambda");
    if (t.lambda && !(*t.lambda > 0.0)) throw error_at(n["lambda"], "lambda must be positive");
    t.eta0 = get_opt<double>(n, "eta0");
    if (t.eta0 && !(*t.eta0 > 0.0)) throw error_at(n["eta0"], "eta0 must be positive");
    t.trace_stride = get_opt<std::size_t>(n, "trace_stride").value_or(0);
    if (n["T"]) throw error_at(n["T"], "T is set per grid cell from t_grid; remove it from the template");
    return t;
}

void emit_vector(YAML::Emitter& out, const Vector& v) {
    out << YAML::Flow << YAML::BeginSeq;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << v[i];
    out << YAML::EndSeq;
}

void emit_doubles(YAML::Emitter& out, const std::vector<double>& v) {
    out << YAML::Flow << YAML::BeginSeq;
    for (double x : v) out << x;
    out << YAML::EndSeq;
}

} // namespace

ExperimentConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    if (!root || !root.IsMap()) throw ConfigError("config must be a mapping at the top level", 1, 1);
    allow_keys(root, {"spec", "algorithms", "t_grid", "alphas", "repeats", "base_seed", "n_mc", "output_path"},
               "config");

    ExperimentConfig cfg;
    cfg.spec = parse_spec(required(root, "spec", "config"));

    const auto algs = required(root, "algorithms", "config");
    if (!algs.IsSequence() || algs.size() == 0) throw error_at(algs, "algorithms must be a nonempty list");
    for (const auto& a : algs) cfg.algorithms.push_back(parse_algorithm_template(a));

    const auto grid = required(root, "t_grid", "config");
    if (!grid.IsSequence() || grid.size() == 0) throw error_at(grid, "t_grid must be a nonempty list");
    for (const auto& t : grid) {
        const auto T = as<long long>(t, "t_grid");
        if (T < 1) throw error_at(t, "t_grid entries must be positive");
        if (!cfg.t_grid.empty() && static_cast<std::size_t>(T) <= cfg.t_grid.back()) {
            throw error_at(t, "t_grid must be strictly increasing");
        }
        cfg.t_grid.push_back(static_cast<std::size_t>(T));
    }

    if (const auto al = root["alphas"]) {
        cfg.alphas = doubles(al, "alphas");
        for (std::size_t i = 0; i < cfg.alphas.size(); ++i) {
            if (!(cfg.alphas[i] >= 0.0 && cfg.alphas[i] < 1.0)) throw error_at(al[i], "alphas must lie in [0, 1)");
        }
        if (cfg.alphas.empty()) throw error_at(al, "alphas must be nonempty");
    } else {
        cfg.alphas = {cfg.spec.corruption.alpha};
    }

    const auto repeats = get_opt<long long>(root, "repeats").value_or(1);
    if (repeats < 1) throw error_at(root["repeats"], "repeats must be >= 1");
    cfg.repeats = static_cast<std::size_t>(repeats);
    cfg.base_seed = get_opt<std::uint64_t>(root, "base_seed").value_or(0);
    const auto n_mc = get_opt<long long>(root, "n_mc").value_or(100000);
    if (n_mc < 1000) throw error_at(root["n_mc"], "n_mc must be >= 1000");
    cfg.n_mc = static_cast<std::size_t>(n_mc);
    cfg.output_path = get_opt<std::string>(root, "output_path").value_or("results.csv");

    // Every cell must resolve to a runnable optimizer.
    for (std::size_t i = 0; i < cfg.algorithms.size(); ++i) {
        for (double alpha : cfg.alphas) {
            for (std::size_t T : cfg.t_grid) {
                try {
                    resolve_optimizer(cfg.algorithms[i], cell_spec(cfg, alpha), T).validate();
                } catch (const ContractError& e) {
                    throw error_at(algs[i], e.what());
                }
            }
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    const ProblemSpec& s = cfg.spec;
    out << YAML::BeginMap;
    out << YAML::Key << "spec" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "d" << YAML::Value << s.d;
    out << YAML::Key << "D" << YAML::Value << s.D;
    out << YAML::Key << "w_star" << YAML::Value;
    emit_vector(out, s.w_star);

    out << YAML::Key << "feature" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "variant" << YAML::Value << feature_name(s.feature);
    std::visit(overloaded{
                   [&](const UnitBoxNegative&) {},
                   [&](const SignedBasis&) {},
                   [&](const FixedSupport& f) {
                       out << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
                       for (const auto& p : f.points) emit_vector(out, p);
                       out << YAML::EndSeq;
                       out << YAML::Key << "probs" << YAML::Value;
                       emit_doubles(out, f.probs);
                   },
                   [&](const GaussianFeatures& g) {
                       out << YAML::Key << "mean" << YAML::Value;
                       emit_vector(out, g.mean);
                       out << YAML::Key << "covariance" << YAML::Value << YAML::BeginSeq;
                       for (Eigen::Index i = 0; i < g.covariance.rows(); ++i) {
                           emit_vector(out, g.covariance.row(i).transpose());
                       }
                       out << YAML::EndSeq;
                   },
               },
               s.feature);
    out << YAML::EndMap;

    out << YAML::Key << "noise" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "variant" << YAML::Value << noise_name(s.noise);
    std::visit(overloaded{
                   [&](const ZeroNoise&) {},
                   [&](const UniformNoise& u) { out << YAML::Key << "sigma" << YAML::Value << u.sigma; },
                   [&](const GaussianNoise& g) { out << YAML::Key << "sigma" << YAML::Value << g.sigma; },
                   [&](const DiscreteSymmetricNoise& d) {
                       out << YAML::Key << "values" << YAML::Value;
                       emit_doubles(out, d.values);
                       out << YAML::Key << "probs" << YAML::Value;
                       emit_doubles(out, d.probs);
                   },
               },
               s.noise);
    out << YAML::EndMap;

    out << YAML::Key << "corruption" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "alpha" << YAML::Value << s.corruption.alpha;
    out << YAML::Key << "conditional" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "variant" << YAML::Value << corruption_name(s.corruption.conditional);
    std::visit(overloaded{
                   [&](const PointMass& p) { out << YAML::Key << "M" << YAML::Value << p.M; },
                   [&](const ScaledPointMass& p) { out << YAML::Key << "C" << YAML::Value << p.C; },
                   [&](const SignFlipOfClean& p) { out << YAML::Key << "scale" << YAML::Value << p.scale; },
                   [&](const GaussianCorruption& g) { out << YAML::Key << "s" << YAML::Value << g.s; },
               },
               s.corruption.conditional);
    out << YAML::EndMap << YAML::EndMap;

    out << YAML::Key << "rho" << YAML::Value << s.rho;
    if (s.known_mean) {
        out << YAML::Key << "known_mean" << YAML::Value;
        emit_vector(out, *s.known_mean);
    }
    out << YAML::EndMap;

    out << YAML::Key << "algorithms" << YAML::Value << YAML::BeginSeq;
    for (const auto& a : cfg.algorithms) {
        out << YAML::BeginMap;
        out << YAML::Key << "algorithm" << YAML::Value << std::string(algorithm_name(a.algorithm));
        out << YAML::Key << "label" << YAML::Value << a.label;
        out << YAML::Key << "huber" << YAML::Value << YAML::Flow << YAML::BeginMap;
        switch (a.huber.rule) {
        case RadiusRule::bounded:
            out << YAML::Key << "derivation" << YAML::Value << "bounded";
            break;
        case RadiusRule::subgaussian:
            out << YAML::Key << "derivation" << YAML::Value << "subgaussian";
            out << YAML::Key << "kappa" << YAML::Value << a.huber.kappa;
            break;
        case RadiusRule::explicit_radius:
            out << YAML::Key << "derivation" << YAML::Value << "explicit";
            out << YAML::Key << "radius" << YAML::Value << a.huber.radius;
            break;
        }
        out << YAML::EndMap;
        if (a.ball) out << YAML::Key << "ball" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "D"
                        << YAML::Value << *a.ball << YAML::EndMap;
        if (a.lambda) out << YAML::Key << "lambda" << YAML::Value << *a.lambda;
        if (a.eta0) out << YAML::Key << "eta0" << YAML::Value << *a.eta0;
        out << YAML::Key << "trace_stride" << YAML::Value << a.trace_stride;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "t_grid" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (auto T : cfg.t_grid) out << T;
    out << YAML::EndSeq;
    out << YAML::Key << "alphas" << YAML::Value;
    emit_doubles(out, cfg.alphas);
    out << YAML::Key << "repeats" << YAML::Value << cfg.repeats;
    out << YAML::Key << "base_seed" << YAML::Value << cfg.base_seed;
    out << YAML::Key << "n_mc" << YAML::Value << cfg.n_mc;
    out << YAML::Key << "output_path" << YAML::Value << cfg.output_path;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

ProblemSpec cell_spec(const ExperimentConfig& cfg, double alpha) {
    ProblemSpec spec = cfg.spec;
    spec.corruption.alpha = alpha;
    return spec;
}

OptimizerConfig resolve_optimizer(const AlgorithmTemplate& tmpl, const ProblemSpec& spec, std::size_t T) {
    OptimizerConfig c;
    c.algorithm = tmpl.algorithm;
    c.T = T;
    const double D = tmpl.ball.value_or(spec.D);
    c.ball = BallConstraint(D);
    switch (tmpl.huber.rule) {
    case RadiusRule::bounded:
        c.huber = radius_bounded(D, spec.sigma());
        break;
    case RadiusRule::subgaussian:
        c.huber = radius_subgaussian(D, spec.sigma(), tmpl.huber.kappa, spec.rho, static_cast<std::int64_t>(T));
        break;
    case RadiusRule::explicit_radius:
        c.huber = HuberParams::explicit_radius(tmpl.huber.radius);
        break;
    }
    c.lambda = tmpl.lambda.value_or((1.0 - spec.corruption.alpha) * spec.rho);
    c.eta0 = tmpl.eta0;
    c.trace_stride = tmpl.trace_stride;
    return c;
}

} // namespace robreg::app
