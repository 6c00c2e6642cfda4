#include "mcascade/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcascade/cascade.hpp"
#include "mcascade/errors.hpp"
#include "mcascade/estimate.hpp"
#include "mcascade/fit.hpp"
#include "mcascade/model_io.hpp"
#include "mcascade/predict.hpp"

namespace mcascade {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string num(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// CSV field, quoted when it holds a separator or quote
std::string field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c == '"' ? "\"\"" : std::string(1, c);
    }
    return q + '"';
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        parts.push_back(item);
    }
    return parts;
}

double to_double(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw ConfigError("not a number: '" + s + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("not a number: '" + s + "'");
    }
}

int to_int(const std::string& s) {
    const double v = to_double(s);
    if (v != std::floor(v)) {
        throw ConfigError("not an integer: '" + s + "'");
    }
    return static_cast<int>(v);
}

std::pair<int, int> parse_range(const std::string& s, const char* what) {
    const auto p = split(s, ':');
    if (p.size() != 2) {
        throw ConfigError(std::string(what) + " must look like lo:hi");
    }
    return {to_int(p[0]), to_int(p[1])};
}

// "65" (uniform grid on [0,1]), "lo:hi:count", or "v1,v2,...".
std::vector<double> parse_grid(const std::string& s) {
    if (s.find(',') != std::string::npos) {
        std::vector<double> v;
        for (const auto& t : split(s, ',')) {
            v.push_back(to_double(t));
        }
        return v;
    }
    const auto p = split(s, ':');
    if (p.size() == 1) {
        return unit_grid(to_int(p[0]));
    }
    if (p.size() == 3) {
        const double lo = to_double(p[0]);
        const double hi = to_double(p[1]);
        const int n = to_int(p[2]);
        if (n < 2) {
            throw ConfigError("grid needs at least two points");
        }
        std::vector<double> v;
        for (int i = 0; i < n; ++i) {
            v.push_back(lo + (hi - lo) * i / (n - 1));
        }
        return v;
    }
    throw ConfigError("bad grid '" + s + "'");
}

std::array<double, 2> parse_q(const std::string& s) {
    const auto p = split(s, ',');
    if (p.size() != 2) {
        throw ConfigError("q must look like q1,q2");
    }
    return {to_double(p[0]), to_double(p[1])};
}

// "full", "digits:0,2", or "blocks:R:v1,v2,..."
TestSet parse_set(const std::string& s, int base) {
    if (s == "full") {
        std::vector<int> all(static_cast<std::size_t>(base));
        for (int d = 0; d < base; ++d) {
            all[static_cast<std::size_t>(d)] = d;
        }
        return cantor_set(base, all, 0);
    }
    const auto p = split(s, ':');
    if (p.size() == 2 && p[0] == "digits") {
        std::vector<int> keep;
        for (const auto& t : split(p[1], ',')) {
            keep.push_back(to_int(t));
        }
        return cantor_set(base, keep, 1);
    }
    if (p.size() == 3 && p[0] == "blocks") {
        std::vector<std::uint64_t> blocks;
        for (const auto& t : split(p[2], ',')) {
            const int v = to_int(t);
            if (v < 0) {
                throw ConfigError("negative block value");
            }
            blocks.push_back(static_cast<std::uint64_t>(v));
        }
        return TestSet(base, to_int(p[1]), std::move(blocks), 1);
    }
    throw ConfigError("bad test set '" + s + "' (full | digits:d,... | blocks:R:v,...)");
}

struct Options {
    std::string model_path;
    std::uint64_t seed = 1;
    int seeds = 1;
    int depth = 0;  // 0: default for the base
    std::string xi0_grid = "65";
    std::vector<std::string> q;
    std::string out = ".";
    bool force = false;
    std::string scales;
    std::string cache;
    std::vector<std::string> sets;
    double xi0 = 1.0;
    int level = -1;
    int paths = 100;
    std::string window;
    std::string tilt = "node";
    int k = 1;
    std::vector<double> y;
    int levels = 16;
    int bins = 64;
};

class Run {
public:
    Run(std::string command, const Options& opt, std::vector<std::string> args, std::ostream& out)
        : command_(std::move(command)), opt_(opt), args_(std::move(args)), out_(out),
          start_(std::chrono::steady_clock::now()) {
        fs::create_directories(opt_.out);
    }

    const WeightModel& model() {
        if (!model_) {
            if (opt_.model_path.empty()) {
                throw ConfigError("--model is required");
            }
            model_ = load_model(opt_.model_path);
        }
        return *model_;
    }

    // Refuses models that fail (A0)-(A2) unless --force.
    const WeightModel& checked_model() {
        const WeightModel& m = model();
        if (!opt_.force) {
            const AssumptionReport rep = check_assumptions(m);
            if (!rep.ok()) {
                throw AssumptionError("model fails the standing assumptions (" + rep.notes +
                                      "); rerun with --force to proceed");
            }
        }
        return m;
    }

    int depth() { return opt_.depth > 0 ? opt_.depth : default_depth(model().base()); }

    std::vector<std::uint64_t> seeds() const {
        if (opt_.seeds < 1) {
            throw ConfigError("--seeds must be >= 1");
        }
        std::vector<std::uint64_t> s;
        for (int i = 0; i < opt_.seeds; ++i) {
            s.push_back(opt_.seed + static_cast<std::uint64_t>(i));
        }
        return s;
    }

    CascadeRealization realization(std::uint64_t seed) {
        const WeightModel& m = model();
        const int n = depth();
        if (opt_.cache.empty()) {
            return build(m, seed, n);
        }
        const fs::path path = fs::path(opt_.cache) / cache_file_name(m, seed, n);
        if (fs::exists(path)) {
            return load_realization(path, m);
        }
        CascadeRealization real = build(m, seed, n);
        fs::create_directories(opt_.cache);
        save_realization(real, path);
        return real;
    }

    std::ofstream table(const std::string& name) {
        const fs::path path = fs::path(opt_.out) / name;
        std::ofstream f(path);
        if (!f) {
            throw ConfigError("cannot write " + path.string());
        }
        outputs_.push_back(name);
        return f;
    }

    json& config() { return config_; }
    std::ostream& out() { return out_; }
    const Options& opt() const { return opt_; }

    void finish(const std::vector<std::uint64_t>& used_seeds) {
        json m;
        m["command"] = command_;
        m["args"] = args_;
        m["config"] = config_;
        if (model_) {
            m["model_digest"] = model_digest(*model_);
            m["model_text"] = to_text(*model_);
        }
        m["seeds"] = used_seeds;
        m["outputs"] = outputs_;
        m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream f(fs::path(opt_.out) / (command_ + ".manifest.json"));
        f << m.dump(2) << '\n';
    }

private:
    std::string command_;
    Options opt_;
    std::vector<std::string> args_;
    std::ostream& out_;
    std::chrono::steady_clock::time_point start_;
    std::optional<WeightModel> model_;
    json config_ = json::object();
    std::vector<std::string> outputs_;
};

json report_json(const AssumptionReport& r) {
    json j;
    j["a0_ok"] = r.a0_ok;
    j["a1_ok"] = r.a1_ok;
    j["a1_witness"] = std::isnan(r.a1_witness) ? json(nullptr) : json(r.a1_witness);
    j["a2_ok"] = r.a2_ok;
    j["a2_witness"] = std::isnan(r.a2_witness) ? json(nullptr) : json(r.a2_witness);
    j["mean_w1"] = r.means[0];
    j["mean_w2"] = r.means[1];
    j["a1_closed_form"] = r.a1_closed_form ? json(*r.a1_closed_form) : json(nullptr);
    j["a1_scan"] = r.a1_scan;
    j["notes"] = r.notes;
    j["ok"] = r.ok();
    return j;
}

int cmd_check_model(Run& run) {
    const AssumptionReport rep = check_assumptions(run.model());
    const json j = report_json(rep);
    auto f = run.table("check-model.csv");
    f << "field,value\n";
    for (const auto& [key, value] : j.items()) {
        f << key << ',' << field(value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
    run.config()["model"] = run.opt().model_path;
    run.out() << j.dump(2) << '\n';
    run.finish({});
    return rep.ok() ? kExitOk : kExitAssumption;
}

int cmd_predict(Run& run) {
    const WeightModel& m = run.checked_model();
    const std::vector<double> grid = parse_grid(run.opt().xi0_grid);
    const auto rows = kpz_curve(m, grid);
    auto f = run.table("predict.csv");
    f << "xi0,xi,zeta,xistar,predicted_dim,branch\n";
    for (const auto& r : rows) {
        f << num(r.xi0) << ',' << num(r.xi) << ',' << num(r.zeta) << ',' << num(r.xi_star) << ','
          << num(r.predicted) << ',' << to_string(r.branch) << '\n';
    }
    run.config()["xi0_grid"] = grid;
    run.out() << rows.size() << " rows, xi_* = " << num(rows.front().xi_star) << '\n';
    run.finish({});
    return kExitOk;
}

std::vector<std::array<double, 2>> q_list(const Options& opt, std::vector<std::array<double, 2>> fallback) {
    if (opt.q.empty()) {
        return fallback;
    }
    std::vector<std::array<double, 2>> qs;
    for (const auto& s : opt.q) {
        qs.push_back(parse_q(s));
    }
    return qs;
}

int cmd_spectrum_predict(Run& run) {
    const WeightModel& m = run.checked_model();
    const double xi0 = run.opt().xi0;
    std::vector<std::array<double, 2>> qs;
    if (run.opt().q.empty()) {
        for (const auto& c : spectrum_candidates(m, xi0)) {
            qs.push_back(c.point.q);
        }
    } else {
        qs = q_list(run.opt(), {});
    }
    auto f = run.table("spectrum-predict.csv");
    f << "q1,q2,alpha1,alpha2,dim_level_set,in_J\n";
    for (const auto& q : qs) {
        const LegendrePoint p = legendre_point(m, q[0], q[1], xi0);
        f << num(q[0]) << ',' << num(q[1]) << ',' << num(p.alpha[0]) << ',' << num(p.alpha[1]) << ','
          << num(p.dim_level_set) << ',' << (p.in_j ? 1 : 0) << '\n';
    }
    run.config()["xi0"] = xi0;
    run.config()["q"] = qs;
    run.out() << qs.size() << " spectrum points\n";
    run.finish({});
    return kExitOk;
}

int cmd_simulate(Run& run) {
    run.checked_model();
    const int n = run.depth();
    const int level = run.opt().level < 0 ? n : run.opt().level;
    const auto seeds = run.seeds();
    for (std::uint64_t s : seeds) {
        const CascadeRealization real = run.realization(s);
        auto f = run.table("simulate_seed" + std::to_string(s) + ".csv");
        export_level_csv(real, level, f);
        run.out() << "seed " << s << ": F1(1) = " << num(real.grid(1).back()) << ", F2(1) = "
                  << num(real.grid(2).back()) << '\n';
    }
    run.config()["depth"] = n;
    run.config()["level"] = level;
    run.config()["cache"] = run.opt().cache;
    run.finish(seeds);
    return kExitOk;
}

BoxCountOptions box_options(const Options& opt) {
    BoxCountOptions b;
    if (!opt.scales.empty()) {
        b.scales = parse_range(opt.scales, "--scales");
    }
    return b;
}

void write_counts(Run& run, const std::string& name, const DimensionEstimate& e) {
    auto f = run.table(name);
    f << "scale_j,box_count\n";
    for (const auto& [j, c] : e.counts) {
        f << j << ',' << num(c) << '\n';
    }
}

int cmd_image_dim(Run& run) {
    const WeightModel& m = run.checked_model();
    const std::string set_spec = run.opt().sets.empty() ? "full" : run.opt().sets.front();
    const TestSet k = parse_set(set_spec, m.base());
    const BoxCountOptions bo = box_options(run.opt());
    const auto seeds = run.seeds();
    auto summary = run.table("image-dim.csv");
    summary << "estimate,stderr,r2,j_min,j_max,seed,model_digest\n";
    double total = 0.0;
    for (std::uint64_t s : seeds) {
        const CascadeRealization real = run.realization(s);
        const DimensionEstimate e = image_box_dim(real, k, bo);
        write_counts(run, "image-dim_counts_seed" + std::to_string(s) + ".csv", e);
        summary << num(e.value) << ',' << num(e.stderr_) << ',' << num(e.r_squared) << ',' << e.scale_range.first
                << ',' << e.scale_range.second << ',' << s << ',' << model_digest(m) << '\n';
        total += e.value;
    }
    run.config()["depth"] = run.depth();
    run.config()["set"] = set_spec;
    run.config()["set_dimension"] = k.dimension();
    run.config()["scales"] = run.opt().scales;
    run.out() << "mean estimate " << num(total / static_cast<double>(seeds.size())) << " over " << seeds.size()
              << " seed(s); set dimension " << num(k.dimension()) << '\n';
    run.finish(seeds);
    return kExitOk;
}

int cmd_partition(Run& run) {
    const WeightModel& m = run.checked_model();
    const int n = run.depth();
    const auto [m_lo, m_hi] = run.opt().window.empty() ? std::pair{3, n - 4} : parse_range(run.opt().window, "--window");
    if (m_lo < 0 || m_hi > n || m_hi - m_lo < 1) {
        throw DomainError("partition window must satisfy 0 <= lo < hi <= depth");
    }
    const auto qs = q_list(run.opt(), {{0.5, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
    const auto seeds = run.seeds();
    // ensemble mean of O1^q1 O2^q2 per (q, level)
    std::vector<std::vector<double>> mean(qs.size(), std::vector<double>(static_cast<std::size_t>(m_hi + 1), 0.0));
    for (std::uint64_t s : seeds) {
        const CascadeRealization real = run.realization(s);
        for (std::size_t a = 0; a < qs.size(); ++a) {
            for (int l = m_lo; l <= m_hi; ++l) {
                mean[a][static_cast<std::size_t>(l)] +=
                    std::pow(static_cast<double>(m.base()), log_mean_oscillation_moment(real, qs[a][0], qs[a][1], l)) /
                    static_cast<double>(seeds.size());
            }
        }
    }
    auto f = run.table("partition.csv");
    f << "q1,q2,slope,stderr,r2,predicted,m_lo,m_hi,seeds\n";
    for (std::size_t a = 0; a < qs.size(); ++a) {
        std::vector<double> x, y;
        for (int l = m_lo; l <= m_hi; ++l) {
            x.push_back(l);
            // log_b S_m = m + log_b mean
            y.push_back(l + std::log(mean[a][static_cast<std::size_t>(l)]) / std::log(static_cast<double>(m.base())));
        }
        const LineFit fit = fit_line(x, y);
        f << num(qs[a][0]) << ',' << num(qs[a][1]) << ',' << num(fit.slope) << ',' << num(fit.slope_stderr) << ','
          << num(fit.r_squared) << ',' << num(1.0 - phi(m, qs[a][0], qs[a][1])) << ',' << m_lo << ',' << m_hi << ','
          << seeds.size() << '\n';
    }
    run.config()["depth"] = n;
    run.config()["window"] = {m_lo, m_hi};
    run.config()["q"] = qs;
    run.out() << qs.size() << " partition slopes over " << seeds.size() << " seed(s)\n";
    run.finish(seeds);
    return kExitOk;
}

int cmd_holder(Run& run) {
    const WeightModel& m = run.checked_model();
    const int n = run.depth();
    const auto [n1, n2] = run.opt().window.empty() ? std::pair{2, std::max(3, n - 8)}
                                                   : parse_range(run.opt().window, "--window");
    const auto q = run.opt().q.empty() ? std::array<double, 2>{1.0, 1.0} : parse_q(run.opt().q.front());
    TiltMode mode;
    if (run.opt().tilt == "node") {
        mode = TiltMode::NodeNormalized;
    } else if (run.opt().tilt == "subtree") {
        mode = TiltMode::SubtreeMass;
    } else {
        throw ConfigError("--tilt must be node or subtree");
    }
    if (run.opt().paths < 1) {
        throw ConfigError("--paths must be >= 1");
    }
    const auto seeds = run.seeds();
    auto f = run.table("holder.csv");
    f << "seed,path,word,h1,h2\n";
    double h1 = 0.0, h2 = 0.0;
    int count = 0;
    for (std::uint64_t s : seeds) {
        const CascadeRealization real = run.realization(s);
        const TiltedSampler sampler(real, q[0], q[1], mode);
        RandomStream stream(s, 1);
        for (int p = 0; p < run.opt().paths; ++p) {
            const Word w = sampler.sample(n, stream);
            const auto h = holder_exponent(real, w, n1, n2);
            f << s << ',' << p << ',' << w.to_string() << ',' << num(h[0]) << ',' << num(h[1]) << '\n';
            h1 += h[0];
            h2 += h[1];
            ++count;
        }
    }
    const auto g = grad_phi(m, q[0], q[1]);
    run.config()["depth"] = n;
    run.config()["window"] = {n1, n2};
    run.config()["q"] = q;
    run.config()["tilt"] = run.opt().tilt;
    run.config()["paths"] = run.opt().paths;
    run.out() << "mean Hoelder (" << num(h1 / count) << ", " << num(h2 / count) << "), grad Phi (" << num(g[0])
              << ", " << num(g[1]) << ")\n";
    run.finish(seeds);
    return kExitOk;
}

int cmd_levelset(Run& run) {
    run.checked_model();
    const int n = run.depth();
    const int k = run.opt().k;
    const int level = run.opt().level < 0 ? n - 4 : run.opt().level;
    LevelSetOptions lo;
    if (!run.opt().window.empty()) {
        std::tie(lo.m_lo, lo.m_hi) = parse_range(run.opt().window, "--window");
    }
    const auto seeds = run.seeds();
    auto f = run.table("levelset.csv");
    f << "seed,k,y,crossings,dimension,stderr,r2,m_lo,m_hi,empty\n";
    double total = 0.0;
    int count = 0;
    for (std::uint64_t s : seeds) {
        const CascadeRealization real = run.realization(s);
        std::vector<double> ys = run.opt().y;
        if (ys.empty()) {
            const OccupationHistogram h = occupation_histogram(real, k, run.opt().bins);
            RandomStream stream(s, 2);
            for (int i = 0; i < run.opt().levels; ++i) {
                ys.push_back(h.sample(stream));
            }
        }
        for (double y : ys) {
            const LevelSet ls = level_set(real, k, y, level, lo);
            const DimensionEstimate& d = ls.dimension;
            f << s << ',' << k << ',' << num(y) << ',' << ls.words.size() << ',' << num(d.value) << ','
              << num(d.stderr_) << ',' << num(d.r_squared) << ',' << d.scale_range.first << ','
              << d.scale_range.second << ',' << (d.empty ? 1 : 0) << '\n';
            total += d.value;
            ++count;
        }
    }
    run.config()["depth"] = n;
    run.config()["k"] = k;
    run.config()["level"] = level;
    run.config()["y"] = run.opt().y;
    run.config()["levels"] = run.opt().levels;
    run.config()["bins"] = run.opt().bins;
    run.config()["window"] = run.opt().window;
    run.out() << "mean level-set dimension " << num(total / count) << " over " << count << " level(s)\n";
    run.finish(seeds);
    return kExitOk;
}

int cmd_uniform_sweep(Run& run) {
    const WeightModel& m = run.checked_model();
    if (run.opt().sets.empty()) {
        throw ConfigError("uniform-sweep needs at least one --set");
    }
    std::vector<TestSet> sets;
    for (const auto& s : run.opt().sets) {
        sets.push_back(parse_set(s, m.base()));
    }
    const BoxCountOptions bo = box_options(run.opt());
    const auto seeds = run.seeds();
    auto f = run.table("uniform-sweep.csv");
    f << "seed,set,xi0,estimate,stderr,r2,j_min,j_max,prediction\n";
    for (std::uint64_t s : seeds) {
        const CascadeRealization real = run.realization(s);
        const auto rows = uniform_sweep(real, sets, bo);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& r = rows[i];
            f << s << ',' << field(run.opt().sets[i]) << ',' << num(r.xi0) << ',' << num(r.estimate.value) << ','
              << num(r.estimate.stderr_) << ',' << num(r.estimate.r_squared) << ',' << r.estimate.scale_range.first
              << ',' << r.estimate.scale_range.second << ',' << num(r.prediction) << '\n';
        }
    }
    run.config()["depth"] = run.depth();
    run.config()["sets"] = run.opt().sets;
    run.config()["scales"] = run.opt().scales;
    run.out() << sets.size() << " set(s) over " << seeds.size() << " seed(s)\n";
    run.finish(seeds);
    return kExitOk;
}

const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Assumption: return "assumption";
        case ErrorKind::Numeric: return "numeric";
        case ErrorKind::Resource: return "resource";
    }
    return "unknown";
}

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Config: return kExitConfig;
        case ErrorKind::Assumption: return kExitAssumption;
        case ErrorKind::Numeric: return kExitNumeric;
        case ErrorKind::Resource: return kExitResource;
    }
    return 1;
}

int error_record(std::ostream& err, const std::string& kind, const std::string& code, const std::string& message,
                 int status) {
    json j;
    j["status"] = "error";
    j["kind"] = kind;
    j["code"] = code;
    j["message"] = message;
    j["exit_code"] = status;
    err << j.dump() << '\n';
    return status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Signed multiplicative cascades: predictions and estimates", "mcascade"};
    app.require_subcommand(1);
    Options opt;

    const auto common = [&](CLI::App* sub) {
        sub->add_option("--model", opt.model_path, "Model file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "Output directory");
        sub->add_flag("--force", opt.force, "Proceed even if the model fails the standing assumptions");
    };
    const auto simulation = [&](CLI::App* sub) {
        common(sub);
        sub->add_option("--seed", opt.seed, "First seed");
        sub->add_option("--seeds", opt.seeds, "Number of consecutive seeds");
        sub->add_option("--depth", opt.depth, "Tree depth (default per base)");
        sub->add_option("--cache", opt.cache, "Realization cache directory");
    };

    std::vector<std::pair<CLI::App*, int (*)(Run&)>> commands;
    auto* check = app.add_subcommand("check-model", "Print the assumption report of a model");
    common(check);
    commands.emplace_back(check, cmd_check_model);

    auto* predict = app.add_subcommand("predict", "xi, zeta, xi_* and the predicted image dimension");
    common(predict);
    predict->add_option("--xi0-grid", opt.xi0_grid, "N | lo:hi:N | v1,v2,...");
    commands.emplace_back(predict, cmd_predict);

    auto* spectrum = app.add_subcommand("spectrum-predict", "Legendre points of Phi");
    common(spectrum);
    spectrum->add_option("--q", opt.q, "q1,q2 (repeatable; default: the four candidate shapes)");
    spectrum->add_option("--xi0", opt.xi0, "Dimension of the test set");
    commands.emplace_back(spectrum, cmd_spectrum_predict);

    auto* simulate = app.add_subcommand("simulate", "Build realizations and export one level");
    simulation(simulate);
    simulate->add_option("--level", opt.level, "Exported level (default: depth)");
    commands.emplace_back(simulate, cmd_simulate);

    auto* image = app.add_subcommand("image-dim", "Box-counting dimension of F(K)");
    simulation(image);
    image->add_option("--set", opt.sets, "full | digits:d,... | blocks:R:v,...");
    image->add_option("--scales", opt.scales, "Regression window j_min:j_max");
    commands.emplace_back(image, cmd_image_dim);

    auto* partition = app.add_subcommand("partition", "Oscillation partition-function slopes");
    simulation(partition);
    partition->add_option("--q", opt.q, "q1,q2 (repeatable)");
    partition->add_option("--window", opt.window, "Levels lo:hi (default 3:depth-4)");
    commands.emplace_back(partition, cmd_partition);

    auto* holder = app.add_subcommand("holder", "Hoelder vectors along tilted paths");
    simulation(holder);
    holder->add_option("--q", opt.q, "Tilt q1,q2 (default 1,1)");
    holder->add_option("--paths", opt.paths, "Paths per seed");
    holder->add_option("--window", opt.window, "Levels n1:n2 (default 2:depth-8)");
    holder->add_option("--tilt", opt.tilt, "node (per-node normalization) | subtree (exact tilted measure)");
    commands.emplace_back(holder, cmd_holder);

    auto* levelset = app.add_subcommand("levelset", "Level sets of one coordinate");
    simulation(levelset);
    levelset->add_option("--k", opt.k, "Coordinate (1 or 2)");
    levelset->add_option("--y", opt.y, "Levels (repeatable; default: sampled from the occupation histogram)");
    levelset->add_option("--levels", opt.levels, "Number of sampled levels");
    levelset->add_option("--bins", opt.bins, "Occupation histogram bins");
    levelset->add_option("--level", opt.level, "Word level of the returned intervals (default depth-4)");
    levelset->add_option("--window", opt.window, "Counting levels lo:hi (default 3:depth-4)");
    commands.emplace_back(levelset, cmd_levelset);

    auto* sweep = app.add_subcommand("uniform-sweep", "Image dimension of several sets on one realization");
    simulation(sweep);
    sweep->add_option("--set", opt.sets, "full | digits:d,... | blocks:R:v,... (repeatable)");
    sweep->add_option("--scales", opt.scales, "Regression window j_min:j_max");
    commands.emplace_back(sweep, cmd_uniform_sweep);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        return error_record(err, "config", "usage", e.what(), kExitConfig);
    }

    try {
        for (const auto& [sub, fn] : commands) {
            if (sub->parsed()) {
                Run run(sub->get_name(), opt, args, out);
                return fn(run);
            }
        }
        return error_record(err, "config", "usage", "no subcommand", kExitConfig);
    } catch (const Error& e) {
        return error_record(err, kind_name(e.kind()), e.code(), e.what(), exit_code(e.kind()));
    } catch (const fs::filesystem_error& e) {
        return error_record(err, "config", "io", e.what(), kExitConfig);
    } catch (const std::bad_alloc&) {
        return error_record(err, "resource", "memory-budget", "out of memory", kExitResource);
    }
}

}  // namespace mcascade
