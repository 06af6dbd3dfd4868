#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "dtrace/algebra.hpp"
#include "dtrace/homology.hpp"
#include "dtrace/waldhausen.hpp"

namespace dtrace {

using Json = nlohmann::ordered_json;

enum class InputKind { algebra, group, category };

/// Reads a JSON input file; ParseError names the file and byte offset.
Json read_json_file(const std::string& path);
/// "algebra", "group" or "category" from the "type" field.
InputKind input_kind(const Json& doc, const std::string& where);

// A spec is either a path to a JSON file or a built-in name (see docs/formats.md).

/// Built-ins: integers, rationals, ground, truncated:N, cyclic:N, matrix:N[:<spec>].
/// ring replaces the base ring (structure constants are reduced into it).
Algebra parse_algebra(const Json& doc, const std::string& where, const std::optional<BaseRing>& ring = {});
Algebra load_algebra(const std::string& spec, const std::optional<BaseRing>& ring = {});

/// Built-ins: trivial, cyclic:N.
FiniteGroup parse_group(const Json& doc, const std::string& where);
FiniteGroup load_group(const std::string& spec);

/// Built-ins: trivial, vect_gf(q,B), pointed_sets(B), finite_modules(m,B);
/// bound overrides B.
FiniteWaldhausenCategory parse_category(const Json& doc, const std::string& where,
                                        const std::optional<std::size_t>& bound = {});
FiniteWaldhausenCategory load_category(const std::string& spec, const std::optional<std::size_t>& bound = {});
/// Whether spec names a built-in category rather than a file.
bool is_builtin_category(const std::string& spec);

/// Matrix literal "[[a, b], [c, d]]" with entries in A's element syntax;
/// returns n and the element of M_n(A).
std::pair<std::size_t, Vector> parse_matrix_literal(const Algebra& a, const std::string& text);

// -- structured output

Json group_to_json(const FPAbelianGroup& g);
/// Inverse of group_to_json (uses the "ring" and "text" fields, checks the rest).
FPAbelianGroup group_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

}  // namespace dtrace
