#pragma once

// JSON and CSV plumbing shared by the command-line tool and the tests.
//
// Pair files: {"plus": {"points": [...], "classes": [[1, 2], [3]]}, "minus": {...}}
// with points given as numbers or exact strings ("3/7", "0.25") and 1-based
// class indices; omitted classes mean all singletons.

#include <string>

#include "json.hpp"
#include "parabolica/circle.hpp"
#include "parabolica/germ.hpp"
#include "parabolica/realization.hpp"

namespace parabolica::io {

using Json = nlohmann::ordered_json;

/// "%.17g".
std::string format_number(double v);

/// Serializes with every floating-point number at 17 significant digits.
std::string dump(const Json& j, int indent = 2);

/// Throws IOError.
std::string read_file(const std::string& path);

/// Throws ParseError (with the byte offset) on malformed JSON.
Json parse_json(const std::string& text, const std::string& origin = "input");

/// Throws ParseError on schema problems and the MarkedSet validation errors.
circle::MarkedSet marked_set_from_json(const Json& j, const std::string& where = "set");
circle::CharacteristicPair pair_from_json(const Json& j);
circle::CharacteristicPair load_pair(const std::string& path);

Json to_json(const circle::MarkedSet& set);
Json to_json(const circle::CharacteristicPair& pair);

/// {vertices:[{id,kind}], edges:[{id,kind,from,to}], faces:[[edgeId,...]]} plus rotation and hints.
Json to_json(const realization::SkeletonGraph& g);
Json to_json(const realization::SphereRealization& s);
Json to_json(const realization::ValidationReport& r);

/// {"kind":"moebius"}, {"kind":"flow","a":0.4} (field x^2/(1-a x)), optional
/// "perturbation": delta adding delta x^4. Throws ParseError.
germ::ParabolicGerm germ_from_json(const Json& j);

} // namespace parabolica::io
