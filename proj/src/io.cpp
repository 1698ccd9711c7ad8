#include "parabolica/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "parabolica/error.hpp"

namespace parabolica::io {

std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write(std::ostringstream& out, const Json& j, int indent, int depth) {
    auto newline = [&](int d) {
        if (indent >= 0) {
            out << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
        }
    };
    const char* colon = indent >= 0 ? ": " : ":";
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) {
            out << "{}";
            return;
        }
        out << '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) out << ',';
            first = false;
            newline(depth + 1);
            out << Json(it.key()).dump() << colon;
            write(out, it.value(), indent, depth + 1);
        }
        newline(depth);
        out << '}';
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) {
            out << "[]";
            return;
        }
        // flat arrays of scalars stay on one line
        bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
        out << '[';
        bool first = true;
        for (const auto& e : j) {
            if (!first) out << (flat ? ", " : ",");
            first = false;
            if (!flat) newline(depth + 1);
            write(out, e, indent, depth + 1);
        }
        if (!flat) newline(depth);
        out << ']';
        return;
    }
    case Json::value_t::number_float: {
        double v = j.get<double>();
        out << (std::isfinite(v) ? format_number(v) : "null");
        return;
    }
    default:
        out << j.dump();
    }
}

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw Error(Errc::ParseError, where + ": " + what);
}

circle::CirclePoint point_from_json(const Json& v, const std::string& where) {
    if (v.is_number()) {
        return circle::CirclePoint::from_double(v.get<double>());
    }
    if (v.is_string()) {
        try {
            return circle::CirclePoint::parse(v.get<std::string>());
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            schema_error(where, "cannot read point \"" + v.get<std::string>() + "\"");
        }
    }
    schema_error(where, "points must be numbers or strings");
}

} // namespace

std::string dump(const Json& j, int indent) {
    std::ostringstream out;
    write(out, j, indent, 0);
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        throw Error(Errc::IOError, "cannot open " + path);
    }
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

Json parse_json(const std::string& text, const std::string& origin) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Errc::ParseError, origin + " at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

circle::MarkedSet marked_set_from_json(const Json& j, const std::string& where) {
    if (!j.is_object()) schema_error(where, "expected an object with \"points\"");
    if (!j.contains("points") || !j["points"].is_array()) schema_error(where, "missing array \"points\"");
    std::vector<circle::CirclePoint> points;
    for (std::size_t i = 0; i < j["points"].size(); ++i) {
        points.push_back(point_from_json(j["points"][i], where + ".points[" + std::to_string(i) + "]"));
    }
    circle::Partition classes;
    if (j.contains("classes")) {
        if (!j["classes"].is_array()) schema_error(where, "\"classes\" must be an array of arrays");
        for (std::size_t c = 0; c < j["classes"].size(); ++c) {
            const auto& block = j["classes"][c];
            std::string here = where + ".classes[" + std::to_string(c) + "]";
            if (!block.is_array()) schema_error(here, "expected an array of 1-based indices");
            std::vector<std::size_t> b;
            for (const auto& idx : block) {
                if (!idx.is_number_integer() || idx.get<long long>() < 1) {
                    schema_error(here, "indices are 1-based positive integers");
                }
                b.push_back(static_cast<std::size_t>(idx.get<long long>() - 1));
            }
            classes.push_back(std::move(b));
        }
    }
    try {
        return circle::validate_marked_set(std::span<const circle::CirclePoint>(points), classes);
    } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.message());
    }
}

circle::CharacteristicPair pair_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("plus") || !j.contains("minus")) {
        schema_error("pair", "expected an object with \"plus\" and \"minus\"");
    }
    return {marked_set_from_json(j["plus"], "plus"), marked_set_from_json(j["minus"], "minus")};
}

circle::CharacteristicPair load_pair(const std::string& path) {
    Json j = parse_json(read_file(path), path);
    try {
        return pair_from_json(j);
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.message());
    }
}

Json to_json(const circle::MarkedSet& set) {
    Json points = Json::array();
    for (const auto& p : set.points()) {
        if (p.is_exact()) {
            std::ostringstream s;
            s << *p.exact();
            points.push_back(s.str());
        } else {
            points.push_back(p.value());
        }
    }
    Json classes = Json::array();
    for (const auto& block : set.classes()) {
        Json b = Json::array();
        for (auto i : block) b.push_back(i + 1);
        classes.push_back(b);
    }
    return Json{{"points", points}, {"classes", classes}};
}

Json to_json(const circle::CharacteristicPair& pair) {
    return Json{{"plus", to_json(pair.plus)}, {"minus", to_json(pair.minus)}};
}

Json to_json(const realization::SkeletonGraph& g) {
    Json vertices = Json::array();
    for (const auto& v : g.vertices) {
        Json jv{{"id", v.id}, {"kind", realization::to_string(v.kind)}};
        if (v.kind == realization::VertexKind::BoundaryMark) {
            jv["coordinate"] = v.coordinate;
            jv["boundary_index"] = v.boundary_index;
        }
        if (v.position) jv["position"] = {(*v.position)[0], (*v.position)[1]};
        vertices.push_back(jv);
    }
    Json edges = Json::array();
    for (const auto& e : g.edges) {
        edges.push_back({{"id", e.id}, {"kind", realization::to_string(e.kind)}, {"from", e.from}, {"to", e.to}});
    }
    Json faces = Json::array();
    for (const auto& f : g.faces) faces.push_back(f);
    Json rotation = Json::array();
    for (const auto& rot : g.rotation) {
        Json r = Json::array();
        for (const auto& h : rot) r.push_back({h.edge, h.side});
        rotation.push_back(r);
    }
    return Json{{"time_reversed", g.time_reversed}, {"vertices", vertices}, {"edges", edges},
                {"faces", faces},                   {"rotation", rotation}};
}

Json to_json(const realization::SphereRealization& s) {
    return Json{{"disc_minus", to_json(s.disc_minus)},
                {"disc_plus", to_json(s.disc_plus)},
                {"annulus", {{"minus_angles", s.annulus.minus}, {"plus_angles", s.annulus.plus}}}};
}

Json to_json(const realization::ValidationReport& r) {
    Json checks = Json::object();
    for (const auto& c : r.checks) {
        checks[c.name] = {{"pass", c.pass}, {"counterexamples", c.counterexamples}};
    }
    return Json{{"ok", r.ok()}, {"checks", checks}};
}

germ::ParabolicGerm germ_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
        schema_error("germ", "expected an object with a string \"kind\"");
    }
    const std::string kind = j["kind"].get<std::string>();
    germ::ParabolicGerm P;
    if (kind == "moebius") {
        P = germ::moebius_germ();
    } else if (kind == "flow") {
        if (j.contains("field") && j["field"] != "x^2/(1-a x)") {
            schema_error("germ.field", "only the field \"x^2/(1-a x)\" is built in");
        }
        if (!j.contains("a") || !j["a"].is_number()) schema_error("germ", "flow germs need a number \"a\"");
        P = germ::model_flow_germ(j["a"].get<double>());
    } else {
        schema_error("germ.kind", "unknown kind \"" + kind + "\" (expected moebius or flow)");
    }
    if (j.contains("perturbation")) {
        if (!j["perturbation"].is_number()) schema_error("germ.perturbation", "expected a number");
        P = germ::quartic_perturbation(P, j["perturbation"].get<double>());
    }
    return P;
}

} // namespace parabolica::io
