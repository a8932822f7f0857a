#ifndef OUTER_LP_IO_HPP
#define OUTER_LP_IO_HPP

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "conditions.hpp"
#include "decompose.hpp"
#include "duality.hpp"
#include "dyadic.hpp"
#include "norms.hpp"
#include "settings.hpp"

// JSON grammar: docs/formats.md

namespace olp::io {

using json = nlohmann::json;

inline std::string hex(Mask m) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(m));
    return buf;
}

inline Mask parse_mask(const json& j) {
    if (j.is_number_unsigned()) return j.get<Mask>();
    if (!j.is_string()) throw input_error("mask must be a hex string");
    std::string s = j.get<std::string>();
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
    if (s.empty() || s.size() > 16 || s.find_first_not_of("0123456789abcdefABCDEF") != std::string::npos)
        throw input_error("bad hex mask '" + j.get<std::string>() + "'");
    return std::stoull(s, nullptr, 16);
}

inline std::string rat_str(const Rat& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rat parse_rat(const json& j) {
    if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
    if (!j.is_string()) throw input_error("rational must be an integer or a string \"a/b\"");
    const std::string s = j.get<std::string>();
    try {
        std::size_t pos = 0;
        const auto slash = s.find('/');
        std::int64_t a = std::stoll(s.substr(0, slash), &pos);
        if (pos != (slash == std::string::npos ? s.size() : slash)) throw input_error("");
        std::int64_t b = 1;
        if (slash != std::string::npos) {
            b = std::stoll(s.substr(slash + 1), &pos);
            if (pos != s.size() - slash - 1) throw input_error("");
        }
        if (b == 0) throw input_error("");
        return Rat(a, b);
    } catch (const std::exception&) {
        throw input_error("bad rational '" + s + "'");
    }
}

inline json masks(const std::vector<Mask>& ms) {
    json a = json::array();
    for (Mask m : ms) a.push_back(hex(m));
    return a;
}

inline json parse_text(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // e.what() carries line and column
        throw input_error(what + ": " + e.what());
    }
}

inline json read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw input_error(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw input_error(std::string("field '") + key + "' has the wrong type");
    }
}

// spaces

inline json to_json(const FiniteSpace& s) {
    json j;
    j["points"] = s.points;
    json w = json::array();
    for (const auto& x : s.omega) w.push_back(rat_str(x));
    j["omega"] = w;
    for (auto [key, wkey, which] : {std::tuple{"muGen", "sigma", Which::mu}, std::tuple{"nuGen", "tau", Which::nu}}) {
        json g = json::array();
        for (const auto& x : s.gens(which)) g.push_back({{"mask", hex(x.mask)}, {wkey, rat_str(x.weight)}});
        j[key] = g;
    }
    return j;
}

inline FiniteSpace space_from_json(const json& j) {
    FiniteSpace s;
    if (!j.contains("points")) throw input_error("missing field 'points'");
    if (j["points"].is_number_integer()) {
        s.points = numbered_points(j["points"].get<int>());
    } else {
        s.points = field<std::vector<std::string>>(j, "points");
    }
    if (!j.contains("omega")) throw input_error("missing field 'omega'");
    for (const auto& x : j["omega"]) s.omega.push_back(parse_rat(x));
    for (auto [key, wkey, which] : {std::tuple{"muGen", "sigma", Which::mu}, std::tuple{"nuGen", "tau", Which::nu}}) {
        if (!j.contains(key)) throw input_error(std::string("missing field '") + key + "'");
        auto& out = which == Which::mu ? s.mu_gen : s.nu_gen;
        for (const auto& g : j[key]) {
            if (!g.contains("mask") || !g.contains(wkey)) throw input_error(std::string(key) + " entries need mask and " + wkey);
            out.push_back({parse_mask(g["mask"]), parse_rat(g[wkey])});
        }
    }
    s.validate();
    return s;
}

// covering specs

inline json to_json(const CoveringFunctionSpec& c) {
    return {{"family", masks(c.family)}, {"assignRule", c.rule}, {"phi", rat_str(c.phi)}};
}

/** assignRule identity | powerset | explicit; dyadicMNQ comes with a dyadic setting. */
inline CoveringFunctionSpec spec_from_json(const json& j, int n) {
    const std::string rule = j.value("assignRule", "identity");
    if (rule == "identity") return singleton_spec(n);
    if (rule == "powerset") return power_set_spec(n);
    if (rule == "dyadicMNQ") return dyadic::Setting(field<int>(j, "j")).covering_spec();
    if (rule != "explicit") throw input_error("unknown assignRule '" + rule + "'");
    if (n > 16) throw capacity_error("explicit assignment needs n <= 16");
    std::vector<Mask> family;
    for (const auto& x : field<json>(j, "family")) family.push_back(parse_mask(x));
    std::vector<std::vector<Mask>> table(std::size_t{1} << n);
    std::vector<bool> seen(table.size(), false);
    seen[0] = true;
    for (const auto& e : field<json>(j, "explicit")) {
        Mask a = parse_mask(field<json>(e, "set"));
        if (a > full_mask(n)) throw input_error("explicit set out of range");
        for (const auto& c : field<json>(e, "cover")) table[a].push_back(parse_mask(c));
        seen[a] = true;
    }
    for (std::size_t a = 0; a < seen.size(); ++a)
        if (!seen[a]) throw input_error("explicit assignment misses set " + hex(a));
    return explicit_spec(n, std::move(family), std::move(table), j.contains("phi") ? parse_rat(j["phi"]) : Rat(1));
}

// settings

struct LoadedSetting {
    Setting setting;
    std::optional<dyadic::Setting> dyadic;  // kind "dyadic" only
};

/**
 * {"kind": "threeMeasures", "n", "seed"} | {"kind": "cartesian", "sizes": [a,b,c], "weights"?, "seed"}
 * | {"kind": "random", "n", "seed"} | {"kind": "ce1", "m"} | {"kind": "ce2", "m", "r"} | {"kind": "dyadic", "j"}
 * | {"kind": "space", "space": {...}, "spec"?: {...}, "k"?}
 */
inline LoadedSetting setting_from_json(const json& j, int limit = kDefaultExactLimit) {
    const std::string kind = field<std::string>(j, "kind");
    LoadedSetting out;
    if (kind == "threeMeasures") {
        out.setting = make_three_measures(field<int>(j, "n"), j.value("seed", 1u), limit);
    } else if (kind == "cartesian") {
        auto sz = field<std::vector<int>>(j, "sizes");
        if (sz.size() != 3) throw input_error("cartesian sizes need three entries");
        std::vector<std::vector<Rat>> w;
        if (j.contains("weights"))
            for (const auto& row : j["weights"]) {
                w.emplace_back();
                for (const auto& x : row) w.back().push_back(parse_rat(x));
            }
        out.setting = make_cartesian({sz[0], sz[1], sz[2]}, w, j.value("seed", 1u), limit);
    } else if (kind == "random") {
        out.setting = make_random_space(field<int>(j, "n"), j.value("seed", 1u), limit);
    } else if (kind == "ce1") {
        out.setting = make_counterexample_first(field<int>(j, "m"));
    } else if (kind == "ce2") {
        out.setting = make_counterexample_second(field<int>(j, "m"), field<double>(j, "r"));
    } else if (kind == "dyadic") {
        out.dyadic.emplace(field<int>(j, "j"));
        out.setting.kind = "dyadic";
        out.setting.space = out.dyadic->finite_space();
        out.setting.spec = out.dyadic->covering_spec();
        out.setting.k = Rat(2);
    } else if (kind == "space") {
        out.setting.kind = "space";
        out.setting.space = space_from_json(field<json>(j, "space"));
        const int n = out.setting.space.size();
        if (n > limit) throw capacity_error("space exceeds the exact limit");
        out.setting.spec = j.contains("spec") ? spec_from_json(j["spec"], n) : singleton_spec(n);
        out.setting.k = j.contains("k") ? parse_rat(j["k"]) : Rat(1);
    } else {
        throw input_error("unknown setting kind '" + kind + "'");
    }
    return out;
}

// functions

/** An array aligned with the points, or for dyadic settings a map "m,l,n" -> tile value. */
inline Function function_from_json(const json& j, const LoadedSetting& s, double r) {
    const int n = s.setting.space.size();
    Function f;
    if (j.is_array()) {
        for (const auto& x : j) {
            if (!x.is_number()) throw input_error("function values must be numbers");
            f.push_back(x.get<double>());
        }
        if (static_cast<int>(f.size()) != n) throw input_error("function length differs from point count");
    } else if (j.is_object()) {
        if (!s.dyadic) throw input_error("tile maps need a dyadic setting");
        std::vector<double> v(n, 0.0);
        for (const auto& [key, val] : j.items()) {
            dyadic::Index idx;
            char c1 = 0, c2 = 0;
            std::istringstream in(key);
            if (!(in >> idx.m >> c1 >> idx.l >> c2 >> idx.n) || c1 != ',' || c2 != ',' || !in.eof())
                throw input_error("bad tile key '" + key + "'");
            auto at = s.dyadic->find(idx);
            if (!at) throw input_error("tile " + key + " lies outside X'_J");
            v[*at] = val.get<double>();
        }
        f = dyadic::tile_map(*s.dyadic, v, r);
    } else {
        throw input_error("function must be an array or a tile map");
    }
    for (double x : f)
        if (!(x >= 0) || std::isinf(x)) throw input_error("function values must be finite and nonnegative");
    return f;
}

// results

inline json num(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

inline json to_json(const NormResult& r) {
    json b = json::array(), p = json::array();
    for (double x : r.profile.breakpoints) b.push_back(num(x));
    for (const auto& x : r.profile.plateaus) p.push_back(rat_str(x));
    return {{"value", num(r.value)}, {"breakpoints", b}, {"plateaus", p}, {"sets", masks(r.profile.sets)}};
}

inline json to_json(const ConditionVerdict& v) {
    json j{{"status", v.holds ? "holds" : "fails"}, {"checkedExhaustively", v.exhaustive}, {"checked", v.checked}};
    if (!v.holds)
        j["witness"] = {{"property", v.property}, {"collection", masks(v.collection)}, {"set", hex(v.set)},
                        {"other", hex(v.other)}};
    return j;
}

inline json to_json(const CaratheodoryVerdict& v) {
    json j{{"status", v.holds ? "holds" : "fails"}, {"checkedExhaustively", v.exhaustive}};
    if (!v.holds) j["witness"] = {{"u", hex(v.witness)}, {"lhs", rat_str(v.lhs)}, {"rhs", rat_str(v.rhs)}};
    return j;
}

/** Empty levels are left out; properties carry the checks recorded at that level. */
inline json to_json(const Decomposition& d, const DecompositionReport* rep = nullptr) {
    json j{{"variant", variant_name(d.variant)}, {"p", d.p}, {"q", d.q}, {"r", d.r}};
    if (d.variant == Variant::psi) j["psiBase"] = d.base;
    json lv = json::array();
    for (const auto& l : d.levels) {
        if (!l.e && !l.e1 && !l.e2) continue;
        json x{{"k", l.k}, {"E", hex(l.e)}, {"F", hex(l.f)}};
        if (d.variant == Variant::psi) {
            x["E1"] = hex(l.e1);
            x["E2"] = hex(l.e2);
        }
        if (l.fallback) x["fallback"] = true;
        json props = json::object();
        if (rep)
            for (const auto& c : rep->checks)
                if (c.k == l.k) {
                    json one{{"pass", c.pass}, {"lhs", num(c.lhs)}, {"rhs", num(c.rhs)}};
                    if (c.rhs > 0 && std::isfinite(c.rhs)) one["ratio"] = num(c.lhs / c.rhs);
                    props[c.name] = one;
                }
        x["properties"] = props;
        lv.push_back(x);
    }
    j["levels"] = lv;
    if (rep) {
        j["pass"] = rep->pass;
        j["constants"] = {{"cSup", rep->constants.c_sup}, {"cOpt", rep->constants.c_opt}, {"COpt", rep->constants.C_opt}};
        j["normPower"] = num(rep->norm_power);
        j["singleSum"] = num(rep->single_sum);
        j["doubleSum"] = num(rep->double_sum);
        if (d.variant == Variant::psi) j["tildeSum"] = num(rep->tilde_sum);
    }
    return j;
}

inline json to_json(const DualityReport& r) {
    return {{"pairing", num(r.pairing)},
            {"lhs", num(r.lhs)},
            {"dualNorm", num(r.dual_norm)},
            {"cLower", num(r.c_lower)},
            {"cLowerTraced", num(r.c_lower_traced)},
            {"CUpper", num(r.C_upper)},
            {"holder", num(r.holder)},
            {"worstBlock", num(r.worst_block)},
            {"lowerOk", r.lower_ok},
            {"blocksOk", r.blocks_ok},
            {"cropOk", r.crop_ok},
            {"holdsWithinEnvelope", r.holds_within_envelope}};
}

}  // namespace olp::io

#endif
