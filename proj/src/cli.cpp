#include "parabolica/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "parabolica/annulus.hpp"
#include "parabolica/circle.hpp"
#include "parabolica/germ.hpp"
#include "parabolica/io.hpp"
#include "parabolica/numerics.hpp"
#include "parabolica/realization.hpp"
#include "parabolica/unfolding.hpp"

namespace parabolica::cli {

using io::Json;

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::IO:
        return 1;
    case ErrorKind::Numerical:
        return 2;
    case ErrorKind::Invariant:
        return 3;
    }
    return 3;
}

namespace {

template <class T>
std::pair<T, T> parse_range(const std::string& text, const std::string& flag) {
    auto bad = [&]() -> std::pair<T, T> {
        throw Error(Errc::ParseError, flag + ": expected lo..hi, got \"" + text + "\"");
    };
    auto number = [&](const std::string& s) -> T {
        std::size_t used = 0;
        T v{};
        try {
            if constexpr (std::is_integral_v<T>) {
                v = static_cast<T>(std::stoll(s, &used));
            } else {
                v = static_cast<T>(std::stod(s, &used));
            }
        } catch (const std::exception&) {
            bad();
        }
        if (used != s.size()) bad();
        return v;
    };
    auto dots = text.find("..");
    if (dots == std::string::npos) {
        T v = number(text);
        return {v, v};
    }
    T lo = number(text.substr(0, dots));
    T hi = number(text.substr(dots + 2));
    if (!(lo <= hi)) bad();
    return {lo, hi};
}

double wrap_half(double x) { return x - std::round(x); }

Json index_pair(const circle::PairIndex& p) { return Json::array({p.k + 1, p.m + 1}); }

Json sync_json(const circle::CharacteristicPair& pair, double tol) {
    auto d = circle::is_non_synchronized(pair, tol);
    Json j{{"non_synchronized", d.non_synchronized}, {"min_gap", d.min_gap}};
    if (d.witness) {
        j["witness"] = Json::array({index_pair(d.witness->first), index_pair(d.witness->second)});
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

Json equivalence_json(const circle::CharacteristicPair& a, const circle::CharacteristicPair& b,
                      const circle::EquivalenceOptions& options) {
    Json j{{"equivalent", false}, {"shift", nullptr}};
    if (a.K() != b.K() || a.M() != b.M()) {
        j["reason"] = "size";
        return j;
    }
    if (!circle::is_non_synchronized(a, options.tolerance).non_synchronized ||
        !circle::is_non_synchronized(b, options.tolerance).non_synchronized) {
        j["reason"] = "synchronized";
        return j;
    }
    auto r = circle::are_equivalent(a, b, options);
    j["equivalent"] = r.equivalent;
    if (r.shift) j["shift"] = *r.shift;
    if (r.exact_shift) {
        std::ostringstream s;
        s << *r.exact_shift;
        j["exact_shift"] = s.str();
    }
    if (r.renumbering) {
        j["renumbering"] = {{"plus_rotation", r.renumbering->plus_rotation},
                            {"minus_rotation", r.renumbering->minus_rotation}};
    }
    if (!r.equivalent) j["reason"] = "order";
    return j;
}

void csv_preamble(std::ostream& out, const Json& config, const char* header) {
    out << "# config: " << io::dump(config, -1) << '\n' << header << '\n';
}

std::string csv_number(double v) { return io::format_number(v); }

// Loop angles realizing the constants the scenario actually used (after any
// ZeroTau shift of A^-).
annulus::LoopAngles scenario_loops(const unfolding::Scenario& s) {
    auto loops = annulus::loop_angles(s.pair);
    if (s.pair.K() == 0 || s.pair.M() == 0) return loops;
    const auto table = circle::difference_table(s.pair);
    double delta = wrap_half(s.tau0[0] - table(0, 0));
    for (double& th : loops.minus) {
        th = th + delta - std::floor(th + delta);
    }
    return loops;
}

struct Comparison {
    std::size_t k = 0, m = 0;
    long n = 0;
    std::optional<double> detected;
    std::optional<double> analytic;
    double rel_err() const {
        if (!detected || !analytic) return INFINITY;
        return std::abs(*detected - *analytic) / std::abs(*analytic);
    }
};

std::vector<Comparison> compare(const std::vector<unfolding::BifurcationEvent>& analytic,
                                const std::vector<annulus::SimulatedEvent>& detected) {
    std::map<std::tuple<std::size_t, std::size_t, long>, Comparison> rows;
    for (const auto& e : analytic) {
        auto& r = rows[{e.k, e.m, e.n}];
        r.k = e.k;
        r.m = e.m;
        r.n = e.n;
        r.analytic = e.epsilon;
    }
    for (const auto& e : detected) {
        auto& r = rows[{e.k, e.m, e.n}];
        r.k = e.k;
        r.m = e.m;
        r.n = e.n;
        r.detected = e.epsilon;
    }
    std::vector<Comparison> out;
    for (auto& [key, r] : rows) out.push_back(r);
    auto eps = [](const Comparison& c) { return c.analytic ? *c.analytic : *c.detected; };
    std::stable_sort(out.begin(), out.end(), [&](const auto& x, const auto& y) { return eps(x) > eps(y); });
    return out;
}

struct ComparisonSummary {
    std::size_t matched = 0;
    std::size_t missing = 0;
    std::size_t unexpected = 0;
    double max_rel_err = 0.0;
};

ComparisonSummary summarize(const std::vector<Comparison>& rows) {
    ComparisonSummary s;
    for (const auto& r : rows) {
        if (r.detected && r.analytic) {
            ++s.matched;
            s.max_rel_err = std::max(s.max_rel_err, r.rel_err());
        } else if (r.analytic) {
            ++s.missing;
        } else {
            ++s.unexpected;
        }
    }
    return s;
}

Json comparison_row(const Comparison& r) {
    Json j{{"k", r.k + 1}, {"m", r.m + 1}, {"n", r.n}};
    j["epsilon_detected"] = r.detected ? Json(*r.detected) : Json(nullptr);
    j["epsilon_analytic"] = r.analytic ? Json(*r.analytic) : Json(nullptr);
    j["rel_err"] = (r.detected && r.analytic) ? Json(r.rel_err()) : Json(nullptr);
    return j;
}

Json events_json(const std::vector<unfolding::BifurcationEvent>& events) {
    Json a = Json::array();
    for (const auto& e : events) {
        a.push_back({{"k", e.k + 1}, {"m", e.m + 1}, {"n", e.n}, {"epsilon", e.epsilon}});
    }
    return a;
}

Json order_json(const unfolding::OrderReport& r) {
    return Json{{"max_residual", r.max_residual},
                {"interleaving_violations", r.interleaving_violations},
                {"order_violations", r.order_violations},
                {"ok", r.ok()}};
}

struct RealizationVerdict {
    Json json;
    bool ok = true;
};

RealizationVerdict check_realization(const circle::CharacteristicPair& pair,
                                     const realization::SphereRealization& sphere) {
    RealizationVerdict v;
    auto side = [&](const realization::SkeletonGraph& g, const circle::MarkedSet& expected) {
        auto report = realization::validate_skeleton(g);
        bool same = false;
        try {
            same = realization::same_marked_set(realization::read_back(g), expected);
        } catch (const Error&) {
            same = false;
        }
        Json j = io::to_json(report);
        j["read_back_matches"] = same;
        j["saddles"] = g.count(realization::VertexKind::Saddle);
        j["attractors"] = g.count(realization::VertexKind::Attractor);
        j["repellers"] = g.count(realization::VertexKind::Repeller);
        v.ok = v.ok && report.ok() && same;
        return j;
    };
    v.json = Json{{"disc_minus", side(sphere.disc_minus, pair.minus)},
                  {"disc_plus", side(sphere.disc_plus, pair.plus)}};
    v.json["ok"] = v.ok;
    return v;
}

annulus::LoopPoint parse_loop_point(const std::string& text) {
    auto colon = text.find(':');
    std::string loop = text.substr(0, colon);
    if (colon == std::string::npos || (loop != "C-" && loop != "C+")) {
        throw Error(Errc::ParseError, "--from: expected C-:angle or C+:angle, got \"" + text + "\"");
    }
    double angle = 0.0;
    try {
        std::size_t used = 0;
        angle = std::stod(text.substr(colon + 1), &used);
        if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw Error(Errc::ParseError, "--from: bad angle in \"" + text + "\"");
    }
    return annulus::LoopPoint::on(loop == "C-" ? annulus::Loop::Minus : annulus::Loop::Plus, angle);
}

Json load_spec(const std::string& spec) {
    auto first = spec.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && spec[first] == '{') return io::parse_json(spec, "--spec");
    return io::parse_json(io::read_file(spec), spec);
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Sparkling saddle connections: classification, scenarios, simulation and realization",
                 "parabolica"};
    app.require_subcommand(1);
    app.fallthrough();
    std::int64_t seed = 0;
    app.add_option("--seed", seed, "Seed for randomized runs")->capture_default_str();

    double tolerance = 0.0;
    bool search_renumberings = false;

    auto* classify = app.add_subcommand("classify", "Non-synchronization and equivalence of two pairs");
    std::vector<std::string> classify_files;
    classify->add_option("pairs", classify_files, "Two pair JSON files")->required()->expected(2);
    classify->add_option("--tolerance", tolerance, "Coincidence tolerance")->capture_default_str();
    classify->add_flag("--search-renumberings", search_renumberings,
                       "Experimental: also try cyclic renumberings of the second pair");

    auto* check_sync = app.add_subcommand("check-sync", "Non-synchronization check of one or two pairs");
    std::vector<std::string> sync_files;
    check_sync->add_option("pairs", sync_files, "One or two pair JSON files")->required()->expected(1, 2);
    check_sync->add_option("--tolerance", tolerance, "Coincidence tolerance")->capture_default_str();

    std::string pair_file;
    double a_coeff = 0.0;
    double b_minus = -1.0;
    double b_plus = 1.0;

    auto* bifurcations = app.add_subcommand("bifurcations", "Roots of the connection equation");
    std::string n_range = "5..30";
    std::string summary_file;
    bifurcations->add_option("--pair", pair_file, "Pair JSON file")->required();
    bifurcations->add_option("--n", n_range, "Winding range lo..hi")->capture_default_str();
    bifurcations->add_option("--a-coeff", a_coeff, "Coefficient a of the model unfolding")->capture_default_str();
    bifurcations->add_option("--b-minus", b_minus, "Base point on the negative side")->capture_default_str();
    bifurcations->add_option("--b-plus", b_plus, "Base point on the positive side")->capture_default_str();
    bifurcations->add_option("--summary", summary_file, "Write the JSON summary here instead of a trailer");

    auto* simulate = app.add_subcommand("simulate", "Follow one orbit across the annulus");
    double epsilon = 0.01;
    std::string from = "C-:0.3";
    simulate->add_option("--epsilon", epsilon, "Parameter value")->capture_default_str();
    simulate->add_option("--from", from, "Start point C-:angle or C+:angle (angle in turns)")->capture_default_str();
    simulate->add_option("--a-coeff", a_coeff, "Coefficient a")->capture_default_str();

    auto* detect = app.add_subcommand("detect", "Locate sparkling connections by simulation");
    std::string eps_range = "1e-4..0.1";
    std::size_t grid = 4096;
    double max_rel_err = 1e-6;
    detect->add_option("--pair", pair_file, "Pair JSON file")->required();
    detect->add_option("--eps", eps_range, "Parameter range lo..hi")->capture_default_str();
    detect->add_option("--grid", grid, "Geometric grid size")->capture_default_str();
    detect->add_option("--a-coeff", a_coeff, "Coefficient a")->capture_default_str();
    detect->add_option("--max-rel-err", max_rel_err, "Accepted relative error")->capture_default_str();

    auto* germ_cmd = app.add_subcommand("germ", "Recover the generating field of a parabolic germ");
    std::string spec;
    double tol = 1e-8;
    std::vector<double> domain{0.02, 0.2};
    std::size_t samples = 32;
    germ_cmd->add_option("--spec", spec, "Germ spec: JSON file or inline JSON")->required();
    germ_cmd->add_option("--tol", tol, "Target accuracy")->capture_default_str();
    germ_cmd->add_option("--domain", domain, "Annulus r1 r2")->expected(2)->capture_default_str();
    germ_cmd->add_option("--samples", samples, "Samples per side")->capture_default_str();

    auto* realize = app.add_subcommand("realize", "Separatrix skeletons on the sphere");
    std::string svg_file;
    std::string json_file;
    realize->add_option("--pair", pair_file, "Pair JSON file")->required();
    realize->add_option("--svg", svg_file, "SVG output");
    realize->add_option("--json", json_file, "Skeleton JSON output");

    auto* pipeline = app.add_subcommand("pipeline", "Scenario, realization, simulation and cross-checks");
    std::string pipeline_n = "8..12";
    pipeline->add_option("--pair", pair_file, "Pair JSON file")->required();
    pipeline->add_option("--n", pipeline_n, "Winding range lo..hi")->capture_default_str();
    pipeline->add_option("--grid", grid, "Geometric grid size")->capture_default_str();
    pipeline->add_option("--a-coeff", a_coeff, "Coefficient a")->capture_default_str();
    pipeline->add_option("--max-rel-err", max_rel_err, "Accepted relative error")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? 0 : 1;
    }

    Json config{{"seed", seed}, {"threads", numerics::worker_count()}};
    auto with = [&](const char* name, const char* format, Json fields) {
        Json c{{"subcommand", name}, {"format", format}};
        for (auto it = fields.begin(); it != fields.end(); ++it) c[it.key()] = it.value();
        for (auto it = config.begin(); it != config.end(); ++it) c[it.key()] = it.value();
        return c;
    };

    try {
        if (classify->parsed()) {
            Json c = with("classify", "json",
                          {{"pairs", classify_files},
                           {"tolerance", tolerance},
                           {"search_renumberings", search_renumberings}});
            auto a = io::load_pair(classify_files[0]);
            auto b = io::load_pair(classify_files[1]);
            Json result{{"config", c}};
            result["non_synchronized"] = {circle::is_non_synchronized(a, tolerance).non_synchronized,
                                          circle::is_non_synchronized(b, tolerance).non_synchronized};
            circle::EquivalenceOptions options;
            options.tolerance = tolerance;
            options.search_cyclic_renumberings = search_renumberings;
            Json verdict = equivalence_json(a, b, options);
            for (auto& [k, v] : verdict.items()) result[k] = v;
            out << io::dump(result) << '\n';
            return 0;
        }

        if (check_sync->parsed()) {
            Json c = with("check-sync", "json", {{"pairs", sync_files}, {"tolerance", tolerance}});
            std::vector<circle::CharacteristicPair> pairs;
            for (const auto& f : sync_files) pairs.push_back(io::load_pair(f));
            Json result{{"config", c}};
            Json flags = Json::array();
            Json details = Json::array();
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                Json d = sync_json(pairs[i], tolerance);
                flags.push_back(d["non_synchronized"]);
                d["file"] = sync_files[i];
                details.push_back(d);
            }
            result["non_synchronized"] = flags;
            result["pairs"] = details;
            if (pairs.size() == 2) {
                circle::EquivalenceOptions options;
                options.tolerance = tolerance;
                Json verdict = equivalence_json(pairs[0], pairs[1], options);
                for (auto& [k, v] : verdict.items()) result[k] = v;
            }
            out << io::dump(result) << '\n';
            return 0;
        }

        if (bifurcations->parsed()) {
            auto [n_lo, n_hi] = parse_range<long>(n_range, "--n");
            Json c = with("bifurcations", "csv",
                          {{"pair", pair_file},
                           {"n", {n_lo, n_hi}},
                           {"a_coeff", a_coeff},
                           {"b_minus", b_minus},
                           {"b_plus", b_plus}});
            auto pair = io::load_pair(pair_file);
            auto model = unfolding::ModelUnfolding::standard(a_coeff, b_minus, b_plus);
            unfolding::ScenarioOptions options;
            options.verify = false;
            auto s = unfolding::scenario(model, pair, n_lo, n_hi, options);
            auto order = unfolding::check_order(model, s);

            csv_preamble(out, c, "k,m,n,epsilon");
            for (const auto& e : s.events) {
                out << e.k + 1 << ',' << e.m + 1 << ',' << e.n << ',' << csv_number(e.epsilon) << '\n';
            }
            Json summary{{"events", s.events.size()},
                         {"eps_max", s.eps_max},
                         {"minus_shift", s.minus_shift},
                         {"order", order_json(order)}};
            if (summary_file.empty()) {
                out << "# summary: " << io::dump(summary, -1) << '\n';
            } else {
                Json doc{{"config", c}, {"summary", summary}};
                realization::write_text_file(summary_file, io::dump(doc) + "\n");
            }
            return order.ok() ? 0 : 3;
        }

        if (simulate->parsed()) {
            auto start = parse_loop_point(from);
            Json c = with("simulate", "json", {{"epsilon", epsilon}, {"from", from}, {"a_coeff", a_coeff}});
            annulus::AnnulusField field;
            field.epsilon = epsilon;
            field.a_coeff = a_coeff;
            Json result{{"config", c}};
            result["start"] = {{"loop", start.loop == annulus::Loop::Minus ? "C-" : "C+"}, {"angle", start.angle}};
            result["first_hit_x"] = annulus::first_hit(field, start);
            double phi_start = annulus::canonical_coordinate(field, start).phi.value();
            result["phi_start"] = phi_start;
            bool ok = true;
            if (start.loop == annulus::Loop::Minus) {
                auto transit = annulus::transition_map(field, start);
                double phi_landing = annulus::canonical_coordinate(field, transit.landing).phi.value();
                double tau = unfolding::tau(unfolding::ModelUnfolding::standard(a_coeff), epsilon);
                double residual = std::abs(wrap_half(phi_landing - phi_start + tau));
                ok = residual < 1e-7;
                result["landing"] = {{"loop", "C+"}, {"angle", transit.landing.angle}};
                result["turns"] = transit.turns;
                result["phi_landing"] = phi_landing;
                result["tau"] = tau;
                result["rotation_check"] = {{"residual", residual}, {"tolerance", 1e-7}, {"ok", ok}};
            }
            out << io::dump(result) << '\n';
            return ok ? 0 : 3;
        }

        if (detect->parsed()) {
            auto [lo, hi] = parse_range<double>(eps_range, "--eps");
            if (!(lo > 0.0) || !(lo < hi)) {
                throw Error(Errc::ParseError, "--eps: need 0 < lo < hi");
            }
            Json c = with("detect", "csv",
                          {{"pair", pair_file},
                           {"eps", {lo, hi}},
                           {"grid", grid},
                           {"a_coeff", a_coeff},
                           {"max_rel_err", max_rel_err}});
            auto pair = io::load_pair(pair_file);
            annulus::AnnulusField field;
            field.a_coeff = a_coeff;
            annulus::DetectOptions options;
            options.grid = grid;
            auto detected = annulus::detect_scenario(field, annulus::loop_angles(pair), lo, hi, options);

            auto model = unfolding::ModelUnfolding::standard(a_coeff);
            const auto table = circle::difference_table(pair);
            const double tau_lo = unfolding::tau(model, lo);
            const double tau_hi = unfolding::tau(model, hi);
            std::vector<unfolding::BifurcationEvent> analytic;
            for (std::size_t k = 0; k < pair.K(); ++k) {
                for (std::size_t m = 0; m < pair.M(); ++m) {
                    double t = table(k, m);
                    auto n_first = static_cast<long>(std::ceil(t + tau_hi));
                    auto n_last = static_cast<long>(std::floor(t + tau_lo));
                    for (long n = n_first; n <= n_last; ++n) {
                        double root = unfolding::solve_connection(model, [t](double) { return t; }, n, hi);
                        analytic.push_back({k, m, n, root});
                    }
                }
            }
            auto rows = compare(analytic, detected);
            auto s = summarize(rows);
            bool pass = s.missing == 0 && s.unexpected == 0 && s.max_rel_err < max_rel_err;

            csv_preamble(out, c, "k,m,n,epsilon_detected,epsilon_analytic,rel_err");
            for (const auto& r : rows) {
                out << r.k + 1 << ',' << r.m + 1 << ',' << r.n << ','
                    << (r.detected ? csv_number(*r.detected) : "") << ','
                    << (r.analytic ? csv_number(*r.analytic) : "") << ','
                    << (r.detected && r.analytic ? csv_number(r.rel_err()) : "") << '\n';
            }
            Json summary{{"analytic", analytic.size()}, {"detected", detected.size()}, {"matched", s.matched},
                         {"missing", s.missing},        {"unexpected", s.unexpected},  {"max_rel_err", s.max_rel_err},
                         {"pass", pass}};
            out << "# summary: " << io::dump(summary, -1) << '\n';
            return pass ? 0 : 3;
        }

        if (germ_cmd->parsed()) {
            Json spec_json = load_spec(spec);
            Json c = with("germ", "csv",
                          {{"spec", spec_json}, {"tol", tol}, {"domain", domain}, {"samples", samples}});
            if (!(domain[0] > 0.0 && domain[0] < domain[1]) || samples < 2) {
                throw Error(Errc::ParseError, "--domain: need 0 < r1 < r2 and --samples >= 2");
            }
            auto P = io::germ_from_json(spec_json);
            germ::GeneratorOptions options;
            options.r1 = domain[0];
            options.r2 = domain[1];
            auto u = germ::generator(P, tol, options);

            csv_preamble(out, c, "x,u");
            std::vector<double> xs(2 * samples);
            for (std::size_t i = 0; i < samples; ++i) {
                double x = domain[0] + (domain[1] - domain[0]) * static_cast<double>(i) / (samples - 1);
                xs[samples + i] = x;
                xs[samples - 1 - i] = -x;
            }
            for (double x : xs) out << csv_number(x) << ',' << csv_number(u(x)) << '\n';
            Json summary{{"normal_coefficient", u.normal_coefficient()}, {"flow_defect", u.flow_defect()}};
            out << "# summary: " << io::dump(summary, -1) << '\n';
            return 0;
        }

        if (realize->parsed()) {
            Json c = with("realize", "json", {{"pair", pair_file}, {"svg", svg_file}, {"json", json_file}});
            auto pair = io::load_pair(pair_file);
            auto sphere = realization::realize_sphere(pair);
            auto verdict = check_realization(pair, sphere);
            if (!svg_file.empty()) realization::write_text_file(svg_file, realization::render_svg(sphere));
            if (!json_file.empty()) {
                Json doc = io::to_json(sphere);
                doc["config"] = c;
                realization::write_text_file(json_file, io::dump(doc) + "\n");
            }
            Json result{{"config", c}, {"validation", verdict.json}};
            out << io::dump(result) << '\n';
            return verdict.ok ? 0 : 3;
        }

        if (pipeline->parsed()) {
            auto [n_lo, n_hi] = parse_range<long>(pipeline_n, "--n");
            Json c = with("pipeline", "json",
                          {{"pair", pair_file},
                           {"n", {n_lo, n_hi}},
                           {"grid", grid},
                           {"a_coeff", a_coeff},
                           {"max_rel_err", max_rel_err}});
            auto pair = io::load_pair(pair_file);
            auto model = unfolding::ModelUnfolding::standard(a_coeff);
            unfolding::ScenarioOptions options;
            options.verify = false;
            auto s = unfolding::scenario(model, pair, n_lo, n_hi, options);
            auto order = unfolding::check_order(model, s);
            auto sphere = realization::realize_sphere(pair);
            auto verdict = check_realization(pair, sphere);

            std::vector<annulus::SimulatedEvent> detected;
            if (!s.events.empty()) {
                double eps_hi = s.events.front().epsilon * 1.25;
                double eps_lo = s.events.back().epsilon * 0.8;
                annulus::AnnulusField field;
                field.a_coeff = a_coeff;
                annulus::DetectOptions detect_options;
                detect_options.grid = grid;
                for (const auto& e : annulus::detect_scenario(field, scenario_loops(s), eps_lo, eps_hi, detect_options)) {
                    if (e.n >= n_lo && e.n <= n_hi) detected.push_back(e);
                }
            }
            auto rows = compare(s.events, detected);
            auto summary = summarize(rows);
            bool detection_ok = summary.missing == 0 && summary.unexpected == 0;
            bool err_ok = summary.max_rel_err < max_rel_err;
            bool pass = order.ok() && verdict.ok && detection_ok && err_ok;

            Json cross = Json::array();
            for (const auto& r : rows) cross.push_back(comparison_row(r));
            Json result{{"config", c}};
            result["scenario"] = {{"events", events_json(s.events)},
                                  {"eps_max", s.eps_max},
                                  {"minus_shift", s.minus_shift}};
            result["simulation"] = {{"comparisons", cross},
                                    {"matched", summary.matched},
                                    {"missing", summary.missing},
                                    {"unexpected", summary.unexpected}};
            result["max_rel_err"] = summary.max_rel_err;
            result["checks"] = {{"order", order_json(order)},
                                {"realization", verdict.json},
                                {"detection_complete", detection_ok},
                                {"relative_error", err_ok}};
            result["pass"] = pass;
            out << io::dump(result) << '\n';
            return pass ? 0 : 3;
        }
    } catch (const Error& e) {
        Json j{{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.message()}}}};
        err << io::dump(j) << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        Json j{{"error", {{"code", "InvariantViolation"}, {"message", e.what()}}}};
        err << io::dump(j) << '\n';
        return 3;
    }
    return 1;
}

} // namespace parabolica::cli
