#pragma once

#include <string>
#include <string_view>

// IRIs used across the knowledge base. Model vocabulary lives under the
// sism namespace; `:` in fixtures and rule files defaults to it as well.
namespace fluentkb::vocab {

inline constexpr std::string_view rdf_ns = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view rdfs_ns = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view owl_ns = "http://www.w3.org/2002/07/owl#";
inline constexpr std::string_view xsd_ns = "http://www.w3.org/2001/XMLSchema#";
inline constexpr std::string_view skos_ns = "http://www.w3.org/2004/02/skos/core#";
inline constexpr std::string_view time_ns = "http://www.w3.org/2006/time#";
inline constexpr std::string_view sism_ns = "https://w3id.org/sism#";

inline std::string rdf(std::string_view local) { return std::string(rdf_ns) + std::string(local); }
inline std::string rdfs(std::string_view local) { return std::string(rdfs_ns) + std::string(local); }
inline std::string owl(std::string_view local) { return std::string(owl_ns) + std::string(local); }
inline std::string xsd(std::string_view local) { return std::string(xsd_ns) + std::string(local); }
inline std::string skos(std::string_view local) { return std::string(skos_ns) + std::string(local); }
inline std::string time(std::string_view local) { return std::string(time_ns) + std::string(local); }
inline std::string sism(std::string_view local) { return std::string(sism_ns) + std::string(local); }

inline const std::string rdf_type = rdf("type");
inline const std::string rdf_lang_string = rdf("langString");
inline const std::string rdfs_sub_class_of = rdfs("subClassOf");
inline const std::string rdfs_sub_property_of = rdfs("subPropertyOf");
inline const std::string rdfs_label = rdfs("label");
inline const std::string xsd_string = xsd("string");
inline const std::string xsd_date = xsd("date");
inline const std::string xsd_date_time = xsd("dateTime");
inline const std::string xsd_g_year = xsd("gYear");
inline const std::string xsd_integer = xsd("integer");
inline const std::string xsd_decimal = xsd("decimal");
inline const std::string xsd_double = xsd("double");
inline const std::string xsd_boolean = xsd("boolean");

// System graphs.
inline const std::string graph_schema = "sys:schema";
inline const std::string graph_fluents = "sys:fluents";
inline const std::string graph_index = "sys:index";
inline const std::string graph_alignments = "sys:alignments";
inline const std::string graph_inferred = "sys:inferred";
inline const std::string graph_documents = "sys:documents";
inline const std::string graph_rules = "sys:rules";
inline const std::string graph_default_data = "urn:fluentkb:data";

inline const std::string skolem_prefix = "urn:skolem:";

}  // namespace fluentkb::vocab
