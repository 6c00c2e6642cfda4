#include "mcascade/model_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "mcascade/errors.hpp"

namespace mcascade {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> numbers(std::string_view value, int line) {
    std::vector<double> out;
    std::istringstream in{std::string(value)};
    std::string tok;
    while (in >> tok) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0') {
            throw ConfigError("line " + std::to_string(line) + ": '" + tok + "' is not a number");
        }
        out.push_back(v);
    }
    return out;
}

struct Entry {
    std::string value;
    int line = 0;
};

class Fields {
public:
    void add(std::string key, std::string value, int line) {
        if (key == "atom") {
            atoms_.push_back({std::move(value), line});
            return;
        }
        if (map_.count(key) != 0) {
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'");
        }
        map_[std::move(key)] = {std::move(value), line};
    }

    bool has(const std::string& key) const { return map_.count(key) != 0; }

    std::string text(const std::string& key) {
        used_.push_back(key);
        const auto it = map_.find(key);
        if (it == map_.end()) {
            throw ConfigError("missing key '" + key + "'");
        }
        return it->second.value;
    }

    double number(const std::string& key) {
        const std::string v = text(key);
        const auto n = numbers(v, map_.at(key).line);
        if (n.size() != 1) {
            throw ConfigError("line " + std::to_string(map_.at(key).line) + ": '" + key +
                              "' takes one number");
        }
        return n[0];
    }

    std::vector<double> list(const std::string& key) {
        const std::string v = text(key);
        return numbers(v, map_.at(key).line);
    }

    const std::vector<Entry>& atoms() const { return atoms_; }

    void check_all_used() const {
        for (const auto& [key, entry] : map_) {
            if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
                throw ConfigError("line " + std::to_string(entry.line) + ": unexpected key '" + key +
                                  "' for this model kind");
            }
        }
    }

private:
    std::map<std::string, Entry> map_;
    std::vector<Entry> atoms_;
    std::vector<std::string> used_;
};

SignTable read_signs(Fields& f, int base, double alpha1, double alpha2) {
    const std::string mode = f.has("signs") ? f.text("signs") : std::string("independent");
    if (mode == "independent") {
        return SignTable::independent(default_plus_probability(base, alpha1),
                                      default_plus_probability(base, alpha2));
    }
    if (mode == "identical") {
        if (alpha1 != alpha2) {
            throw ConfigError("identical signs need equal alphas for the default marginals");
        }
        return SignTable::identical(default_plus_probability(base, alpha1));
    }
    if (mode == "table") {
        const auto v = f.list("sign_table");
        if (v.size() != 4) {
            throw ConfigError("sign_table takes four probabilities: P(++) P(+-) P(-+) P(--)");
        }
        return SignTable{{v[0], v[1], v[2], v[3]}};
    }
    throw ConfigError("signs must be independent, identical or table");
}

double read_sigma(Fields& f, int base) {
    const bool has_sigma = f.has("sigma");
    const bool has_beta = f.has("beta");
    if (has_sigma == has_beta) {
        throw ConfigError("give exactly one of 'sigma' or 'beta'");
    }
    if (has_sigma) {
        return f.number("sigma");
    }
    const double beta = f.number("beta");
    if (!(beta >= 0.0)) {
        throw ConfigError("beta must be >= 0");
    }
    return std::sqrt(2.0 * beta * std::log(static_cast<double>(base)));
}

}  // namespace

WeightModel parse_model(std::string_view text) {
    Fields f;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
        }
        f.add(std::string(key), std::string(value), line_no);
    }

    const std::string kind = f.text("kind");
    const double base_real = f.number("base");
    if (base_real != std::floor(base_real) || base_real < 2 || base_real > 36) {
        throw ConfigError("base must be an integer in [2, 36]");
    }
    const int base = static_cast<int>(base_real);

    if (!f.atoms().empty() && kind != "discrete") {
        throw ConfigError("'atom' lines are only valid for kind = discrete");
    }

    std::optional<WeightModel> model;
    if (kind == "fractional") {
        double a1, a2;
        if (f.has("alpha")) {
            a1 = a2 = f.number("alpha");
        } else {
            a1 = f.number("alpha1");
            a2 = f.number("alpha2");
        }
        const SignTable signs = read_signs(f, base, a1, a2);
        model.emplace(base, Fractional{a1, a2, signs});
    } else if (kind == "lognormal") {
        const double alpha = f.number("alpha");
        const double sigma = read_sigma(f, base);
        const SignTable signs = read_signs(f, base, alpha, alpha);
        model.emplace(base, LognormalSigned{alpha, sigma, signs});
    } else if (kind == "mixed") {
        const double alpha = f.number("alpha");
        const double sigma = read_sigma(f, base);
        const double plus = f.has("sign_plus") ? f.number("sign_plus") : default_plus_probability(base, alpha);
        model.emplace(base, Mixed{alpha, sigma, plus});
    } else if (kind == "discrete") {
        std::vector<Atom> atoms;
        for (const Entry& e : f.atoms()) {
            const auto v = numbers(e.value, e.line);
            if (v.size() != 3) {
                throw ConfigError("line " + std::to_string(e.line) + ": atom takes 'w1 w2 p'");
            }
            atoms.push_back({v[0], v[1], v[2]});
        }
        model.emplace(base, DiscreteTable{std::move(atoms)});
    } else {
        throw ConfigError("unknown model kind '" + kind + "'");
    }
    f.check_all_used();
    return *model;
}

WeightModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open model file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str());
}

std::string to_text(const WeightModel& model) {
    std::ostringstream out;
    out << "kind = " << model.kind_name() << "\n";
    out << "base = " << model.base() << "\n";
    const auto table = [&](const SignTable& s) {
        out << "signs = table\n";
        out << "sign_table = " << fmt(s.p[0]) << " " << fmt(s.p[1]) << " " << fmt(s.p[2]) << " "
            << fmt(s.p[3]) << "\n";
    };
    if (const auto* f = std::get_if<Fractional>(&model.kind())) {
        out << "alpha1 = " << fmt(f->alpha1) << "\n";
        out << "alpha2 = " << fmt(f->alpha2) << "\n";
        table(f->signs);
    } else if (const auto* l = std::get_if<LognormalSigned>(&model.kind())) {
        out << "alpha = " << fmt(l->alpha) << "\n";
        out << "sigma = " << fmt(l->sigma) << "\n";
        table(l->signs);
    } else if (const auto* m = std::get_if<Mixed>(&model.kind())) {
        out << "alpha = " << fmt(m->alpha) << "\n";
        out << "sigma = " << fmt(m->sigma) << "\n";
        out << "sign_plus = " << fmt(m->sign_plus) << "\n";
    } else {
        for (const Atom& a : std::get<DiscreteTable>(model.kind()).atoms) {
            out << "atom = " << fmt(a.w1) << " " << fmt(a.w2) << " " << fmt(a.p) << "\n";
        }
    }
    return out.str();
}

std::string model_digest(const WeightModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : to_text(model)) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace mcascade
