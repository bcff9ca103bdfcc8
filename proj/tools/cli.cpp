// cli.cpp
#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbl/agents_harness.hpp"
#include "cbl/bound_calculators.hpp"
#include "cbl/errors.hpp"
#include "cbl/info_lab.hpp"
#include "cbl/metric_nets.hpp"

namespace cbl {

namespace {

using nlohmann::json;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Logging

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

class Log {
public:
    explicit Log(std::ostream& err) : err_(err) {
        const char* env = std::getenv("CBL_LOG");
        const std::string v = env ? env : "error";
        level_ = v == "debug" ? LogLevel::Debug : v == "info" ? LogLevel::Info : LogLevel::Error;
    }
    void info(const std::string& msg) const { write(LogLevel::Info, "info", msg); }
    void debug(const std::string& msg) const { write(LogLevel::Debug, "debug", msg); }

private:
    void write(LogLevel at, const char* tag, const std::string& msg) const {
        if (level_ >= at) err_ << "[" << tag << "] " << msg << '\n';
    }
    std::ostream& err_;
    LogLevel level_{LogLevel::Error};
};

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
    std::string env_kind{"linear"};
    int d{2};
    std::string action_set{"ball"};
    std::size_t n_actions{200};
    std::string prior{"gaussian"};
    double sigma{1.0};
    std::size_t batch{2};
    std::uint64_t seed{0};
    std::size_t T{1000};
    std::size_t trials{100};
    double alpha{2.0};
    std::optional<int> k_max;
    bool unit_ball{false};
    std::string out{"-"};
    std::string format;
    unsigned jobs{1};
};

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw InputError(where + " must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) throw InputError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& into) {
    if (j.contains(key)) into = j.at(key).get<T>();
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config '" + path + "'");
    const json j = json::parse(in);
    ExperimentConfig c;
    reject_unknown(j, {"env", "agent", "run", "chain", "output"}, "config");
    if (j.contains("env")) {
        const auto& e = j["env"];
        reject_unknown(e, {"kind", "d", "action_set", "n_actions", "prior", "sigma"}, "env");
        read(e, "kind", c.env_kind);
        read(e, "d", c.d);
        read(e, "action_set", c.action_set);
        read(e, "n_actions", c.n_actions);
        read(e, "prior", c.prior);
        read(e, "sigma", c.sigma);
    }
    if (j.contains("agent")) {
        const auto& a = j["agent"];
        reject_unknown(a, {"batch", "seed"}, "agent");
        read(a, "batch", c.batch);
        read(a, "seed", c.seed);
    }
    if (j.contains("run")) {
        const auto& r = j["run"];
        reject_unknown(r, {"T", "trials"}, "run");
        read(r, "T", c.T);
        read(r, "trials", c.trials);
    }
    if (j.contains("chain")) {
        const auto& ch = j["chain"];
        reject_unknown(ch, {"alpha", "K_max", "unit_ball"}, "chain");
        read(ch, "alpha", c.alpha);
        if (ch.contains("K_max")) c.k_max = ch["K_max"].get<int>();
        read(ch, "unit_ball", c.unit_ball);
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        reject_unknown(o, {"path", "format"}, "output");
        read(o, "path", c.out);
        read(o, "format", c.format);
    }
    return c;
}

// Options bound to ExperimentConfig fields. Values given on the command line
// override the config file.
class Bindings {
public:
    explicit Bindings(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T ExperimentConfig::*field, const std::string& help) {
        auto* opt = app_->add_option(name, cfg.*field, help)->capture_default_str();
        copies_.push_back({opt, [field](const ExperimentConfig& from, ExperimentConfig& to) { to.*field = from.*field; }});
        return opt;
    }
    CLI::Option* flag(const std::string& name, bool ExperimentConfig::*field, const std::string& help) {
        auto* opt = app_->add_flag(name, cfg.*field, help);
        copies_.push_back({opt, [field](const ExperimentConfig& from, ExperimentConfig& to) { to.*field = from.*field; }});
        return opt;
    }
    CLI::Option* k_max(const std::string& help) {
        auto* opt = app_->add_option("--k-max", k_max_value_, help);
        copies_.push_back({opt, [this](const ExperimentConfig&, ExperimentConfig& to) { to.k_max = k_max_value_; }});
        return opt;
    }
    void shared() {
        add("--seed", &ExperimentConfig::seed, "master seed");
        add("--out", &ExperimentConfig::out, "output path, - for standard output");
        add("--format", &ExperimentConfig::format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        add("--jobs", &ExperimentConfig::jobs, "worker threads");
        app_->add_option("--config", config_path_, "experiment config (JSON)");
    }
    ExperimentConfig resolve(const std::string& default_format) const {
        ExperimentConfig c = config_path_.empty() ? ExperimentConfig{} : load_config(config_path_);
        for (const auto& [opt, copy] : copies_)
            if (opt->count() > 0 || config_path_.empty()) copy(cfg, c);
        if (config_path_.empty() && !k_max_given()) c.k_max.reset();
        if (c.format.empty()) c.format = default_format;
        if (c.format != "csv" && c.format != "json") throw InputError("format must be csv or json");
        if (c.jobs < 1) throw InputError("jobs must be at least 1");
        return c;
    }

    ExperimentConfig cfg;

private:
    bool k_max_given() const {
        for (const auto& [opt, copy] : copies_)
            if (opt->get_name() == "--k-max" && opt->count() > 0) return true;
        return false;
    }
    CLI::App* app_;
    std::string config_path_;
    int k_max_value_{0};
    std::vector<std::pair<CLI::Option*, std::function<void(const ExperimentConfig&, ExperimentConfig&)>>> copies_;
};

void emit(const ExperimentConfig& c, const std::string& text, std::ostream& out) {
    if (c.out == "-") {
        out << text;
        return;
    }
    std::ofstream file(c.out, std::ios::binary);
    if (!file || !(file << text)) throw InputError("cannot write '" + c.out + "'");
}

// ---------------------------------------------------------------------------
// Environments

constexpr std::uint64_t env_stream = ~std::uint64_t{0};

PointSet point_source(const ExperimentConfig& c, const std::string& points_file, std::size_t grid_n) {
    if (!points_file.empty()) {
        std::ifstream in(points_file);
        if (!in) throw InputError("cannot open points file '" + points_file + "'");
        return PointSet::from_rows(json::parse(in).get<std::vector<std::vector<double>>>());
    }
    if (c.d < 1) throw InputError("dimension must be at least 1");
    if (grid_n > 0) return grid(c.d, grid_n, -1.0, 1.0);
    if (c.n_actions < 1) throw InputError("n_actions must be at least 1");
    Rng rng = make_stream(c.seed, env_stream);
    return ball_sample(c.d, c.n_actions, rng);
}

Prior parse_prior(const std::string& p) {
    if (p == "gaussian") return Prior::Gaussian;
    if (p == "sphere") return Prior::Sphere;
    throw InputError("prior must be gaussian or sphere");
}

LinearGaussianSpec linear_spec(const ExperimentConfig& c, int d) {
    LinearGaussianSpec s;
    s.d = d;
    s.prior = parse_prior(c.prior);
    s.noise_sigma = c.sigma;
    if (c.action_set == "sample") {
        Rng rng = make_stream(c.seed, env_stream);
        s.actions = ball_sample(d, c.n_actions, rng);
    } else if (c.action_set != "ball") {
        throw InputError("action_set must be ball or sample");
    }
    s.validate();
    return s;
}

FiniteBanditSpec finite_spec(const ExperimentConfig& c) {
    if (c.env_kind == "circle") return circle_spec(8, 6);
    Rng rng = make_stream(c.seed, env_stream);
    RandomSpecShape shape;
    shape.d = c.d;
    return random_finite_spec(shape, rng);
}

QuantizationChain finite_chain(const FiniteBanditSpec& spec) {
    return build_quantization_chain(spec.actions(), 2.0, singleton_level(spec.actions(), 2.0));
}

// ---------------------------------------------------------------------------
// Subcommands

std::string net_command(const ExperimentConfig& c, const PointSet& pts, double epsilon) {
    const auto net = greedy_epsilon_net(pts, epsilon);
    if (c.format == "json") {
        json j{{"epsilon", epsilon},
               {"covering_radius", net.covering_radius(pts)},
               {"center_indices", net.center_indices},
               {"assignment", net.assignment},
               {"points", pts.to_rows()}};
        return j.dump(2) + "\n";
    }
    std::ostringstream o;
    o << "point,center,is_center";
    for (int i = 0; i < pts.dimension(); ++i) o << ",x" << i;
    o << '\n';
    for (std::size_t p = 0; p < pts.size(); ++p) {
        o << p << ',' << net.assignment[p] << ',' << (net.assignment[p] == p ? 1 : 0);
        for (int i = 0; i < pts.dimension(); ++i) o << ',' << num(pts.coords()(i, static_cast<Eigen::Index>(p)));
        o << '\n';
    }
    return o.str();
}

std::string chain_command(const ExperimentConfig& c, const PointSet& pts) {
    const Eigen::VectorXd origin = Eigen::VectorXd::Zero(pts.dimension());
    const int k0 = compute_k0(c.unit_ball && !pts.find(origin) ? pts.with_point(origin) : pts, c.alpha, c.unit_ball);
    const auto chain = build_quantization_chain(pts, c.alpha, c.k_max.value_or(k0 + 6), c.unit_ball);
    if (c.format == "json") return chain.to_json().dump(2) + "\n";
    std::ostringstream o;
    o << "k,point,center\n";
    for (int k = chain.k0(); k <= chain.k_max(); ++k)
        for (std::size_t p = 0; p < chain.space().size(); ++p) o << k << ',' << p << ',' << chain.quantize(p, k) << '\n';
    return o.str();
}

std::string curve_json(const RegretCurve& curve, const ExperimentConfig& c) {
    json j{{"T", curve.horizon},
           {"trials", curve.trials},
           {"batch_size", c.batch},
           {"seed", c.seed},
           {"mean_per_round", curve.per_round},
           {"mean_cumulative", curve.cumulative},
           {"stderr", curve.std_error},
           {"stderr_cumulative", curve.std_error_cumulative}};
    return j.dump(2) + "\n";
}

std::string simulate_command(const ExperimentConfig& c, const Log& log) {
    const AgentConfig agent{c.batch, c.seed};
    log.info("simulate env=" + c.env_kind + " T=" + std::to_string(c.T) + " trials=" + std::to_string(c.trials) +
             " m=" + std::to_string(c.batch));
    RegretCurve curve;
    if (c.env_kind == "linear") {
        curve = estimate_bayes_regret(linear_spec(c, c.d), agent, c.T, c.trials, c.seed, c.jobs);
    } else if (c.env_kind == "circle" || c.env_kind == "finite") {
        curve = estimate_bayes_regret(finite_spec(c), agent, c.T, c.trials, c.seed, c.jobs);
    } else {
        throw InputError("env kind must be linear, circle or finite");
    }
    log.info("final cumulative regret " + num(curve.cumulative.back()));
    return c.format == "json" ? curve_json(curve, c) : curve.to_csv();
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !is.eof()) throw InputError(std::string("bad entry '") + item + "' in " + what);
        out.push_back(v);
    }
    if (out.empty()) throw InputError(std::string(what) + " is empty");
    return out;
}

std::string scaling_command(const ExperimentConfig& c, const std::string& d_grid, const std::string& T_grid,
                            const Log& log) {
    const auto ds = parse_list<int>(d_grid, "--d-grid");
    const auto Ts = parse_list<std::size_t>(T_grid, "--T-grid");
    if (c.env_kind != "linear") throw InputError("scaling runs the linear environment only");
    auto family = [&](int d) { return linear_spec(c, d); };
    const auto table = scaling_experiment(family, AgentConfig{c.batch, c.seed}, ds, Ts, c.trials, c.seed, c.jobs);
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    log.info("log-log slope in T: " + (table.fit.slope_T ? num(*table.fit.slope_T) : std::string("n/a")));
    if (c.format == "csv") return table.to_csv();
    json cells = json::array();
    for (const auto& cell : table.cells)
        cells.push_back({{"d", cell.d},
                         {"T", cell.T},
                         {"final_cumulative_regret", cell.final_regret},
                         {"stderr", cell.std_error},
                         {"ratio", cell.ratio}});
    json j{{"cells", cells},
           {"fit", {{"slope_T", opt(table.fit.slope_T)}, {"slope_d", opt(table.fit.slope_d)}, {"intercept", table.fit.intercept}}}};
    return j.dump(2) + "\n";
}

json report_json(const BoundReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"k", row.k}, {"gamma_bar", row.gamma_bar}, {"H_k_nats", row.entropy}, {"term", row.term}});
    return {{"formula_id", r.formula_id}, {"rows", rows}, {"total", r.total}, {"tail_bound", r.tail_bound}};
}

struct BoundsOptions {
    std::size_t points{2000};
    std::size_t samples{20000};
    double series_alpha{20.0};
};

std::string bounds_command(const ExperimentConfig& c, const BoundsOptions& o, const Log& log) {
    if (c.d < 1) throw InputError("dimension must be at least 1");
    const double T = static_cast<double>(c.T);
    const auto spec = linear_spec(c, c.d);
    Rng rng = make_stream(c.seed, env_stream);
    const auto pts = ball_sample(c.d, o.points, rng);
    const int k0 = c.unit_ball ? 0 : compute_k0(pts, 2.0, false);
    const int K = c.k_max.value_or(k0 + 6);
    const auto chain = build_quantization_chain(pts, 2.0, K, c.unit_ball);
    log.info("chain k0=" + std::to_string(chain.k0()) + " K=" + std::to_string(K) + " over " +
             std::to_string(chain.space().size()) + " points");
    const auto all_h = empirical_quantized_entropies(chain, spec, o.samples, derive_stream_seed(c.seed, 1));
    const std::vector<double> h(all_h.begin() + 1, all_h.end());

    const auto convention = c.unit_ball ? LinkConvention::BallRoot : LinkConvention::Generic;
    std::vector<ChainRow> rows;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const int k = chain.k0() + 1 + static_cast<int>(i);
        const double gb = (c.unit_ball && i == 0) ? gamma_bar_from_radius(1.0, c.d) : gamma_bar_linear(k, c.d);
        rows.push_back({k, gb, h[i]});
    }
    const auto chained = chained_bound(T, rows);
    const auto smooth = smooth_linear_bound(c.d, T, chain.k0(), h, convention);
    const int d = c.d;
    const double integral =
        entropy_integral_bound(d, T, [d](double eps) { return unit_ball_log_covering(d, eps); }, 2.0, {1.0});
    const double ball = unit_ball_bound(d, T);
    const auto series = alpha_series_constant(o.series_alpha);

    if (c.format == "json") {
        json reports = json::array();
        reports.push_back(report_json(chained));
        reports.push_back(report_json(smooth));
        reports.push_back({{"formula_id", "entropy_integral"}, {"total", integral}});
        reports.push_back({{"formula_id", "unit_ball"}, {"total", ball}});
        reports.push_back({{"formula_id", "alpha_series"},
                           {"alpha", o.series_alpha},
                           {"partial_sum", series.partial_sum},
                           {"tail_bound", series.tail_bound},
                           {"total", series.upper()},
                           {"ceiling", std::ceil(series.upper())}});
        json j{{"d", d}, {"T", c.T}, {"unit_ball", c.unit_ball}, {"seed", c.seed}, {"reports", reports}};
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "formula,k,gamma_bar,H_k_nats,term\n";
    for (const auto* r : {&chained, &smooth}) {
        for (const auto& row : r->rows)
            out << r->formula_id << ',' << row.k << ',' << num(row.gamma_bar) << ',' << num(row.entropy) << ','
                << num(row.term) << '\n';
        out << r->formula_id << ",TOTAL,,," << num(r->total) << '\n';
    }
    out << "entropy_integral,TOTAL,,," << num(integral) << '\n';
    out << "unit_ball,TOTAL,,," << num(ball) << '\n';
    out << "alpha_series,TOTAL,,," << num(series.upper()) << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// verify

struct SuiteResult {
    std::string suite;
    json rows = json::array();
    std::size_t failures{0};
};

FiniteHistory verify_history(const FiniteBanditSpec& spec, std::size_t i, Rng& rng) {
    return rollout_history(spec, 2 * (i % 4), 2, rng);
}

SuiteResult suite_lemma(std::uint64_t seed, std::size_t n) {
    SuiteResult r{"lemma"};
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = make_stream(seed, i);
        const auto inst = random_two_point_instance(12, 10.0, rng);
        bool ok = false;
        json row{{"instance", i}, {"size", inst.Q.size()}};
        try {
            const auto t = two_point_reduction(inst.Q, inst.f, inst.g);
            ok = satisfies_two_point(inst.Q, inst.f, inst.g, t);
            row["a1"] = t.a1;
            row["a2"] = t.a2;
            row["q"] = t.q;
        } catch (const InvariantViolation& e) {
            row["error"] = e.what();
        }
        row["passed"] = ok;
        r.failures += ok ? 0 : 1;
        r.rows.push_back(row);
    }
    return r;
}

SuiteResult suite_construction(std::uint64_t seed, std::size_t n, bool telescoping_only) {
    SuiteResult r{telescoping_only ? "telescoping" : "construction"};
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = make_stream(seed, i);
        const auto spec = random_finite_spec(RandomSpecShape{}, rng);
        const auto history = verify_history(spec, i, rng);
        json row{{"instance", i}, {"actions", spec.num_actions()}, {"parameters", spec.num_parameters()}};
        bool ok = false;
        try {
            const auto chain = finite_chain(spec);
            const auto fam = build_sampling_functions(spec, chain, history);
            double links = 0.0;
            for (int k = chain.k0() + 1; k <= chain.k_max(); ++k)
                links += level_regret_term(spec, chain, fam, history, k) - level_regret_term(spec, chain, fam, history, k - 1);
            const double gap = std::abs(links - thompson_regret(spec, history));
            row["telescoping_gap"] = gap;
            ok = gap <= 1e-12;
            if (!telescoping_only) {
                double slack = -INFINITY;
                for (const auto& chk : fam.checks)
                    slack = std::max({slack, chk.link_lhs - chk.link_rhs, chk.copy_lhs - chk.copy_rhs});
                row["root_regret_difference"] = fam.root_regret_difference;
                row["max_inequality_excess"] = slack;
                ok = ok && fam.root_regret_difference == 0.0 && slack <= 1e-9;
            }
        } catch (const InvariantViolation& e) {
            row["error"] = e.what();
        }
        row["passed"] = ok;
        r.failures += ok ? 0 : 1;
        r.rows.push_back(row);
    }
    return r;
}

SuiteResult suite_chain_link(std::uint64_t seed, std::size_t n) {
    SuiteResult r{"chain-link"};
    const auto spec = circle_spec(8, 6);
    const auto chain = finite_chain(spec);
    for (std::size_t i = 0; i < n; ++i) {
        Rng rng = make_stream(seed, i);
        const auto history = verify_history(spec, i, rng);
        const auto fam = build_sampling_functions(spec, chain, history);
        for (int k = chain.k0() + 1; k <= chain.k_max(); ++k) {
            const auto rep = chain_link_ratio(spec, chain, fam, history, k);
            auto row = rep.to_json();
            row["instance"] = i;
            const bool ok = !rep.gamma || *rep.gamma <= rep.bound;
            row["passed"] = ok;
            r.failures += ok ? 0 : 1;
            r.rows.push_back(row);
        }
    }
    return r;
}

std::string verify_command(const ExperimentConfig& c, const std::string& suite, std::optional<std::size_t> instances,
                           std::size_t* failures, const Log& log) {
    std::vector<SuiteResult> results;
    auto n = [&](std::size_t dflt) { return instances.value_or(dflt); };
    const bool all = suite == "all";
    if (all || suite == "lemma") results.push_back(suite_lemma(c.seed, n(1000)));
    if (all || suite == "construction") results.push_back(suite_construction(c.seed, n(50), false));
    if (all || suite == "chain-link") results.push_back(suite_chain_link(c.seed, n(20)));
    if (all || suite == "telescoping") results.push_back(suite_construction(c.seed, n(50), true));
    if (results.empty()) throw InputError("suite must be lemma, construction, chain-link, telescoping or all");

    *failures = 0;
    for (const auto& r : results) {
        *failures += r.failures;
        log.info("verify " + r.suite + ": " + std::to_string(r.rows.size() - r.failures) + "/" +
                 std::to_string(r.rows.size()) + " passed");
    }
    if (c.format == "json") {
        json j = json::array();
        for (const auto& r : results)
            j.push_back({{"suite", r.suite}, {"seed", c.seed}, {"failures", r.failures}, {"rows", r.rows}});
        return j.dump(2) + "\n";
    }
    std::ostringstream o;
    o << "suite,row,passed,detail\n";
    for (const auto& r : results)
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            json detail = r.rows[i];
            detail.erase("passed");
            std::string text = detail.dump();
            std::string quoted;
            for (const char ch : text) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            o << r.suite << ',' << i << ',' << (r.rows[i]["passed"].get<bool>() ? 1 : 0) << ",\"" << quoted << "\"\n";
        }
    return o.str();
}

// ---------------------------------------------------------------------------
// Errors

std::string escape(const std::string& s) { return json(s).dump(); }

int fail(std::ostream& err, const char* kind, const std::string& msg, int code) {
    err << "{\"error\":\"" << kind << "\",\"exit\":" << code << ",\"message\":" << escape(msg) << "}\n";
    return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const Log log(err);
    CLI::App app{"chained bandit lab: nets, Thompson sampling simulation, regret bounds, exact verification"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string points_file;
    std::size_t grid_n = 0;
    double epsilon = 0.5;
    auto* net = app.add_subcommand("net", "greedy epsilon-net of a point set");
    Bindings net_b(net);
    net_b.shared();
    net_b.add("--d", &ExperimentConfig::d, "dimension");
    net_b.add("--n", &ExperimentConfig::n_actions, "points sampled from the unit ball");
    net->add_option("--epsilon", epsilon, "net radius")->capture_default_str();
    net->add_option("--points", points_file, "JSON file with a list of points");
    net->add_option("--grid", grid_n, "use a grid with this many points per axis on [-1,1]^d");

    auto* chain = app.add_subcommand("chain", "nested quantization chain of a point set");
    Bindings chain_b(chain);
    chain_b.shared();
    chain_b.add("--d", &ExperimentConfig::d, "dimension");
    chain_b.add("--n", &ExperimentConfig::n_actions, "points sampled from the unit ball");
    chain_b.add("--alpha", &ExperimentConfig::alpha, "scale ratio between levels");
    chain_b.k_max("finest level (default k0 + 6)");
    chain_b.flag("--unit-ball", &ExperimentConfig::unit_ball, "root the chain at the origin");
    chain->add_option("--points", points_file, "JSON file with a list of points");
    chain->add_option("--grid", grid_n, "use a grid with this many points per axis on [-1,1]^d");

    auto* sim = app.add_subcommand("simulate", "Bayesian regret curve of batched Thompson sampling");
    Bindings sim_b(sim);
    sim_b.shared();
    sim_b.add("--env", &ExperimentConfig::env_kind, "linear, circle or finite");
    sim_b.add("--d", &ExperimentConfig::d, "dimension");
    sim_b.add("--action-set", &ExperimentConfig::action_set, "ball or sample");
    sim_b.add("--n-actions", &ExperimentConfig::n_actions, "size of a sampled action set");
    sim_b.add("--prior", &ExperimentConfig::prior, "gaussian or sphere");
    sim_b.add("--sigma", &ExperimentConfig::sigma, "reward noise standard deviation");
    sim_b.add("--m", &ExperimentConfig::batch, "batch size (2 for the two-step variant)");
    sim_b.add("--T", &ExperimentConfig::T, "horizon");
    sim_b.add("--trials", &ExperimentConfig::trials, "Monte-Carlo episodes");

    std::string d_grid = "2,4,8", T_grid = "250,500,1000,2000";
    auto* scaling = app.add_subcommand("scaling", "final regret over a (d, T) grid with a log-log fit");
    Bindings scaling_b(scaling);
    scaling_b.shared();
    scaling_b.add("--sigma", &ExperimentConfig::sigma, "reward noise standard deviation");
    scaling_b.add("--m", &ExperimentConfig::batch, "batch size");
    scaling_b.add("--trials", &ExperimentConfig::trials, "Monte-Carlo episodes per cell");
    scaling->add_option("--d-grid", d_grid, "comma-separated dimensions")->capture_default_str();
    scaling->add_option("--T-grid", T_grid, "comma-separated horizons")->capture_default_str();

    BoundsOptions bo;
    auto* bounds = app.add_subcommand("bounds", "regret bounds for linear bandits on the unit ball");
    Bindings bounds_b(bounds);
    bounds_b.shared();
    bounds_b.add("--d", &ExperimentConfig::d, "dimension");
    bounds_b.add("--T", &ExperimentConfig::T, "horizon");
    bounds_b.k_max("finest level for empirical entropies (default k0 + 6)");
    bounds_b.flag("--unit-ball", &ExperimentConfig::unit_ball, "root the chain at the origin (k0 = 0)");
    bounds->add_option("--points", bo.points, "discretization size for empirical entropies")->capture_default_str();
    bounds->add_option("--entropy-samples", bo.samples, "prior draws per entropy estimate")->capture_default_str();
    bounds->add_option("--series-alpha", bo.series_alpha, "alpha of the series constant")->capture_default_str();

    std::string suite = "all";
    std::optional<std::size_t> instances;
    auto* verify = app.add_subcommand("verify", "exact checks of the chaining construction");
    Bindings verify_b(verify);
    verify_b.shared();
    verify->add_option("--suite", suite, "lemma, construction, chain-link, telescoping or all")->capture_default_str();
    verify->add_option("--instances", instances, "instances per suite");

    std::vector<std::string> argv_store{"cbl"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            return fail(err, "input", e.what(), 1);
        }

        if (net->parsed()) {
            const auto c = net_b.resolve("csv");
            emit(c, net_command(c, point_source(c, points_file, grid_n), epsilon), out);
        } else if (chain->parsed()) {
            const auto c = chain_b.resolve("json");
            emit(c, chain_command(c, point_source(c, points_file, grid_n)), out);
        } else if (sim->parsed()) {
            const auto c = sim_b.resolve("csv");
            emit(c, simulate_command(c, log), out);
        } else if (scaling->parsed()) {
            const auto c = scaling_b.resolve("csv");
            emit(c, scaling_command(c, d_grid, T_grid, log), out);
        } else if (bounds->parsed()) {
            const auto c = bounds_b.resolve("json");
            emit(c, bounds_command(c, bo, log), out);
        } else if (verify->parsed()) {
            const auto c = verify_b.resolve("json");
            std::size_t failures = 0;
            emit(c, verify_command(c, suite, instances, &failures, log), out);
            if (failures > 0) return fail(err, "invariant", std::to_string(failures) + " verification rows failed", 2);
        }
        return 0;
    } catch (const InputError& e) {
        return fail(err, "input", e.what(), 1);
    } catch (const Unsupported& e) {
        return fail(err, "unsupported", e.what(), 1);
    } catch (const ImpossibleObservation& e) {
        return fail(err, "impossible_observation", e.what(), 1);
    } catch (const nlohmann::json::exception& e) {
        return fail(err, "input", e.what(), 1);
    } catch (const InvariantViolation& e) {
        return fail(err, "invariant", e.what(), 2);
    } catch (const NumericalError& e) {
        return fail(err, "numerical", e.what(), 2);
    } catch (const std::exception& e) {
        return fail(err, "internal", e.what(), 2);
    }
}

}  // namespace cbl
