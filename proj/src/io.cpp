#include "maxlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace maxlab::io {

namespace {

double number(const Json& v, const char* what) {
    if (!v.is_number()) throw std::invalid_argument(std::string(what) + ": expected a number");
    return v.get<double>();
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

PiecewiseLinear function_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("segments") || !j["segments"].is_array())
        throw std::invalid_argument("function: expected {\"segments\": [[a, b, ya, yb], ...]}");
    std::vector<Segment> segs;
    for (const auto& s : j["segments"]) {
        if (!s.is_array() || s.size() != 4) throw std::invalid_argument("function: each segment is [a, b, ya, yb]");
        segs.push_back({number(s[0], "a"), number(s[1], "b"), number(s[2], "ya"), number(s[3], "yb")});
    }
    return PiecewiseLinear(std::move(segs));
}

Json to_json(const PiecewiseLinear& f) {
    Json segs = Json::array();
    for (const auto& s : f.segments()) segs.push_back({s.a, s.b, s.ya, s.yb});
    return Json{{"segments", segs}};
}

IntervalSet intervals_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("intervals") || !j["intervals"].is_array())
        throw std::invalid_argument("intervals: expected {\"intervals\": [[lo, hi], ...]}");
    std::vector<Interval> ivs;
    for (const auto& iv : j["intervals"]) {
        if (!iv.is_array() || iv.size() != 2) throw std::invalid_argument("intervals: each interval is [lo, hi]");
        ivs.push_back({number(iv[0], "lo"), number(iv[1], "hi")});
    }
    return IntervalSet(std::move(ivs));
}

Json to_json(const IntervalSet& e) {
    Json ivs = Json::array();
    for (const auto& iv : e.intervals()) ivs.push_back({iv.lo, iv.hi});
    return Json{{"intervals", ivs}};
}

MaximalConfig config_from_json(const Json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: expected an object");
    MaximalConfig cfg;
    for (const auto& [key, v] : j.items()) {
        if (key == "refine_factor")
            cfg.refine_factor = static_cast<int>(number(v, "refine_factor"));
        else if (key == "tail_grid_ratio")
            cfg.tail_grid_ratio = number(v, "tail_grid_ratio");
        else if (key == "tail_tol")
            cfg.tail_tol = number(v, "tail_tol");
        else if (key == "simplify_tol")
            cfg.simplify_tol = number(v, "simplify_tol");
        else if (key == "max_tail_points")
            cfg.max_tail_points = static_cast<std::size_t>(number(v, "max_tail_points"));
        else if (key == "quad_rel_tol")
            cfg.quad_rel_tol = number(v, "quad_rel_tol");
        else if (key == "integrate_window") {
            if (!v.is_boolean()) throw std::invalid_argument("integrate_window: expected a boolean");
            cfg.integrate_window = v.get<bool>();
        } else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    cfg.validate();
    return cfg;
}

Json to_json(const MaximalConfig& cfg) {
    return Json{{"refine_factor", cfg.refine_factor},     {"tail_grid_ratio", cfg.tail_grid_ratio},
                {"tail_tol", cfg.tail_tol},               {"simplify_tol", cfg.simplify_tol},
                {"max_tail_points", cfg.max_tail_points}, {"integrate_window", cfg.integrate_window},
                {"quad_rel_tol", cfg.quad_rel_tol}};
}

Json to_json(const CheckReport& r) {
    return Json{{"name", r.name},   {"lhs", r.lhs},   {"rhs", r.rhs},         {"slack", r.slack},
                {"tolerance", r.tolerance}, {"pass", r.pass}, {"details", r.details}};
}

Json to_json(const GrowthReport& r) {
    Json j{{"p", r.p},
           {"norms", r.norms},
           {"roots", r.roots},
           {"raw_roots", r.raw_roots},
           {"ratios", r.ratios},
           {"lower_bracket", r.lower_bracket},
           {"upper_bracket", r.upper_bracket},
           {"truncation_error_bound_p", r.truncation_error_bound_p}};
    Json flags = Json::array();
    for (const bool b : r.in_bracket) flags.push_back(b);
    j["in_bracket"] = flags;
    j["tail_min_root"] = r.tail_min_root;
    j["tail_max_root"] = r.tail_max_root;
    return j;
}

Json to_json(const ApSolution& a) {
    return Json{{"p", a.p}, {"a_p", a.a_p}, {"maximizing_radius", a.maximizing_radius},
                {"method_tolerance", a.method_tolerance}};
}

Json to_json(const SearchResult& s) {
    Json trend = Json::array();
    for (const auto& [radius, ratio] : s.trend) trend.push_back({radius, ratio});
    return Json{{"p", s.p},           {"family", s.family},           {"dof", s.dof},
                {"budget", s.budget}, {"seed", s.seed},               {"best_ratio", s.best_ratio},
                {"best_params", s.best_params}, {"evaluations", s.evaluations}, {"trend", trend}};
}

std::string growth_csv(const GrowthReport& r) {
    std::ostringstream out;
    out << "k,norm,root,ratio,err_bound\n";
    for (std::size_t k = 0; k < r.norms.size(); ++k) {
        const double ratio = k + 1 < r.norms.size() ? r.ratios[k] : 0.0;
        out << k << ',' << fmt(r.norms[k]) << ',' << fmt(r.roots[k]) << ',' << (k + 1 < r.norms.size() ? fmt(ratio) : "")
            << ',' << fmt(r.truncation_error_bound_p) << '\n';
    }
    return out.str();
}

std::string summary_csv(const std::vector<CheckReport>& reports) {
    std::ostringstream out;
    out << "name,lhs,rhs,slack,pass\n";
    for (const auto& r : reports)
        out << r.name << ',' << fmt(r.lhs) << ',' << fmt(r.rhs) << ',' << fmt(r.slack) << ',' << (r.pass ? 1 : 0) << '\n';
    return out.str();
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("short write on " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace maxlab::io
