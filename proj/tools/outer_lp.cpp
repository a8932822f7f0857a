#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "outer_lp/io.hpp"
#include "outer_lp/suites.hpp"

using namespace olp;
using io::json;

namespace {

struct Common {
    std::string setting, function, out, format = "json";
    double p = 1, r = 1;
    std::optional<double> q, psi;
    unsigned seed = 1;
    std::size_t budget = 100;
    int exact_limit = kDefaultExactLimit;
};

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out);
    if (!f) throw input_error("cannot write " + c.out);
    f << text;
}

io::LoadedSetting load_setting(const Common& c) {
    if (c.setting.empty()) throw input_error("--setting is required");
    return io::setting_from_json(io::read_file(c.setting), c.exact_limit);
}

Function load_function(const Common& c, const io::LoadedSetting& s) {
    if (c.function.empty()) return random_function(s.setting.space.size(), c.seed);
    return io::function_from_json(io::read_file(c.function), s, c.r);
}

SizeExpr size_of(const Common& c) { return c.q ? SizeExpr::outer(*c.q, c.r) : SizeExpr::inner(c.r); }

int cmd_norm(const Common& c) {
    auto s = load_setting(c);
    auto f = load_function(c, s);
    Evaluator ev(s.setting.space, c.exact_limit);
    auto res = ev.norm(f, c.p, size_of(c));
    if (c.format == "csv") {
        std::string t = "lambda_from,measure,set\n";
        for (std::size_t i = 0; i < res.profile.plateaus.size(); ++i)
            t += suites::fmt(i ? res.profile.breakpoints[i - 1] : 0.0) + "," + io::rat_str(res.profile.plateaus[i]) + "," +
                 io::hex(res.profile.sets[i]) + "\n";
        t += "value," + suites::fmt(res.value) + ",\n";
        emit(c, t);
    } else {
        json j{{"setting", s.setting.kind}, {"n", s.setting.space.size()}, {"p", c.p}, {"r", c.r}, {"seed", c.seed},
               {"f", f}, {"result", io::to_json(res)}};
        if (c.q) j["q"] = *c.q;
        emit(c, j.dump(2) + "\n");
    }
    return 0;
}

int cmd_counterexample(const Common& c, const std::string& family, int m_min, int m_max) {
    if (family != "first" && family != "second") throw input_error("family must be first or second");
    if (m_min < 1 || m_max < m_min) throw input_error("need 1 <= m-min <= m-max");
    const double q = c.q.value_or(1);
    std::vector<std::string> header{"m", "single", "double", "ref_single", "ref_double", "ratio", "norm_pqr"};
    std::vector<std::vector<std::string>> rows;
    std::vector<double> xs, ys;
    for (int m = m_min; m <= m_max; ++m) {
        auto st = family == "first" ? make_counterexample_first(m) : make_counterexample_second(m, c.r);
        Evaluator ev(st.space);
        Function f(m, 1.0);
        const double single = ev.norm(f, 1, SizeExpr::inner(c.r)).value;
        const double dbl = ev.norm(f, 1, SizeExpr::outer(1, c.r)).value;
        const double gen = ev.norm(f, c.p, SizeExpr::outer(q, c.r)).value;
        std::string ref_single, ref_double;
        if (family == "first") {
            auto refs = first_family_refs(m, q, c.r);
            ref_single = suites::fmt(refs.single);
            if (c.r >= 1) ref_double = suites::fmt(refs.dbl);
        } else {
            auto refs = second_family_refs(m, c.r);
            ref_single = suites::fmt(refs.single);
            ref_double = suites::fmt(refs.dbl);
        }
        rows.push_back({std::to_string(m), suites::fmt(single), suites::fmt(dbl), ref_single, ref_double,
                        suites::fmt(dbl / single), suites::fmt(gen)});
        if (m >= 2) {
            xs.push_back(std::log(m));
            ys.push_back(std::log(gen));
        }
    }
    double slope = std::nan("");
    if (xs.size() >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
        mx /= xs.size();
        my /= ys.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
        slope = sxy / sxx;
    }
    if (c.format == "csv") {
        std::string t;
        for (std::size_t i = 0; i < header.size(); ++i) t += (i ? "," : "") + header[i];
        t += "\n";
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) t += (i ? "," : "") + r[i];
            t += "\n";
        }
        emit(c, t);
        std::cerr << "slope of log norm_pqr over log m (m >= 2): " << suites::fmt(slope) << "\n";
    } else {
        json rs = json::array();
        for (const auto& r : rows) {
            json o;
            for (std::size_t i = 0; i < header.size(); ++i) o[header[i]] = r[i];
            rs.push_back(o);
        }
        emit(c, json{{"family", family}, {"p", c.p}, {"q", q}, {"r", c.r}, {"rows", rs}, {"slope", io::num(slope)},
                     {"expectedSlope", 1 / c.p - 1 / q + 1 / c.r}}
                        .dump(2) +
                    "\n");
    }
    return 0;
}

int cmd_decompose(const Common& c, const std::string& variant) {
    auto s = load_setting(c);
    auto f = load_function(c, s);
    Evaluator ev(s.setting.space, c.exact_limit);
    const double q = c.q.value_or(1);
    Decomposition d;
    if (variant == "interior") {
        d = interior_decompose(ev, f, q, c.r);
    } else {
        Variant v = variant == "canopy" ? Variant::canopy
                  : variant == "qGeqR"  ? Variant::qGeqR
                  : variant == "psi"    ? Variant::psi
                                        : throw input_error("unknown variant '" + variant + "'");
        d = exterior_decompose(ev, f, c.p, q, c.r, s.setting.spec, v, s.setting.k, c.psi.value_or(0));
    }
    auto rep = verify_decomposition(ev, f, d, s.setting.spec);
    emit(c, io::to_json(d, &rep).dump(2) + "\n");
    return rep.pass ? 0 : 1;
}

int cmd_dual(const Common& c) {
    auto s = load_setting(c);
    auto f = load_function(c, s);
    Evaluator ev(s.setting.space, c.exact_limit);
    if (!c.q) throw input_error("--q is required");
    auto w = build_dual(ev, f, c.p, *c.q, c.r, s.setting.spec, s.setting.k);
    auto rep = verify_duality(ev, f, w, suites::kDualUpperEnvelope);
    json j = io::to_json(rep);
    j["g"] = w.g;
    j["M"] = w.m;
    emit(c, j.dump(2) + "\n");
    return rep.holds_within_envelope ? 0 : 1;
}

int cmd_verify(const Common& c, const std::string& suite) {
    suites::CorpusConfig cfg;
    cfg.seed = c.seed;
    cfg.instances = c.budget;
    suites::SuiteResult r;
    if (suite == "collapse") r = suites::collapse_suite(cfg);
    else if (suite == "holder") r = suites::holder_suite(cfg);
    else if (suite == "triangle") r = suites::triangle_suite(cfg);
    else if (suite == "decompose") r = suites::decompose_suite(cfg);
    else if (suite == "dyadic-geometry") r = suites::dyadic_suite(cfg);
    else throw input_error("unknown suite '" + suite + "'");
    if (c.format == "csv") {
        emit(c, r.csv());
        std::cerr << r.name << ": " << r.instances << " instances, " << r.violations << " violations\n";
        if (!r.pass()) std::cerr << r.witnesses.dump(2) << "\n";
    } else {
        emit(c, r.to_json().dump(2) + "\n");
    }
    return r.pass() ? 0 : 1;
}

void add_common(CLI::App* app, Common& c, bool with_function) {
    app->add_option("--setting", c.setting, "setting descriptor file");
    if (with_function) app->add_option("--function", c.function, "function file (default: random from --seed)");
    app->add_option("--p", c.p, "outer exponent");
    app->add_option("--q", c.q, "middle exponent (omit for the single-iterated norm)");
    app->add_option("--r", c.r, "inner exponent");
    app->add_option("--psi", c.psi, "level base of the psi variant");
    app->add_option("--seed", c.seed, "seed");
    app->add_option("--budget", c.budget, "corpus size");
    app->add_option("--exact-limit", c.exact_limit, "largest exact-mode point count");
    app->add_option("--out", c.out, "output file (default: stdout)");
    app->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterated outer L^p norms on finite outer-measure spaces"};
    app.require_subcommand(1);
    Common c;
    std::string family = "first", variant = "canopy", suite;
    int m_min = 1, m_max = 8;

    auto* norm = app.add_subcommand("norm", "norm of a function with its super-level profile");
    add_common(norm, c, true);
    auto* ce = app.add_subcommand("counterexample", "growth tables for the two counterexample families");
    add_common(ce, c, false);
    ce->add_option("--family", family, "first or second");
    ce->add_option("--m-min", m_min);
    ce->add_option("--m-max", m_max);
    auto* dec = app.add_subcommand("decompose", "level decomposition with its property report");
    add_common(dec, c, true);
    dec->add_option("--variant", variant, "interior, canopy, qGeqR or psi");
    auto* dual = app.add_subcommand("dual", "dualizing function and pairing bounds");
    add_common(dual, c, true);
    auto* ver = app.add_subcommand("verify", "run a seeded property suite");
    add_common(ver, c, false);
    ver->add_option("suite", suite, "collapse, holder, triangle, decompose or dyadic-geometry")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        if (*norm) return cmd_norm(c);
        if (*ce) return cmd_counterexample(c, family, m_min, m_max);
        if (*dec) return cmd_decompose(c, variant);
        if (*dual) return cmd_dual(c);
        if (*ver) return cmd_verify(c, suite);
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const capacity_error& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
