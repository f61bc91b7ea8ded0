/**
 * @file certificate_io.hpp
 * @brief Text log and JSON form of a Certificate.
 */
#pragma once

#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "maxterm/certify.hpp"
#include "maxterm/dyadic.hpp"
#include "maxterm/rational.hpp"

namespace maxterm {

enum class LogFormat { Text, Json };

namespace detail {

inline nlohmann::json dyadic_to_json(const Dyadic& d, Rounding mode) {
    return {{"decimal", d.to_decimal(40, mode)},
            {"mantissa", d.mantissa().get_str()},
            {"exponent", d.exponent()}};
}

inline Dyadic dyadic_from_json(const nlohmann::json& j) {
    try {
        return Dyadic(mpz_class(j.at("mantissa").get<std::string>(), 10), j.at("exponent").get<std::int64_t>());
    } catch (const std::invalid_argument&) {
        throw ParseError("dyadic mantissa is not an integer");
    }
}

inline const char* truth(bool b) { return b ? "True" : "False"; }

/// 25 significant digits with trailing zeros dropped, e.g. "1.70919".
inline std::string short_decimal(const Rational& q) {
    std::string s = to_decimal(q, 25);
    if (s.find('.') != std::string::npos && s.find('e') == std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

} // namespace detail

inline nlohmann::json to_json(const Certificate& c) {
    using detail::dyadic_to_json;
    return {
        {"params", {{"K", c.params.K.str()}, {"alpha", c.params.alpha.str()}, {"N", c.params.N}}},
        {"mesh",
         {{"M", c.mesh.M},
          {"precision_digits", c.mesh.precision_digits},
          {"workers", c.mesh.workers},
          {"chunk_size", c.mesh.chunk_size}}},
        {"mesh_max_upper", dyadic_to_json(c.mesh_max_upper, Rounding::Ceil)},
        {"argmax_index", c.argmax_index},
        {"lipschitz", c.lipschitz.str()},
        {"strict_replication", c.strict_replication},
        {"mesh_slack", dyadic_to_json(c.mesh_slack, Rounding::Ceil)},
        {"tail", c.tail.str()},
        {"A_upper", dyadic_to_json(c.A_upper, Rounding::Ceil)},
        {"beta_lower", dyadic_to_json(c.beta_lower, Rounding::Floor)},
        {"target_mesh", c.target_mesh.str()},
        {"target_A", c.target_A.str()},
        {"target_beta", c.target_beta.str()},
        {"passed_mesh", c.passed_mesh},
        {"passed_A", c.passed_A},
        {"passed_beta", c.passed_beta},
        {"software_version", c.software_version},
        {"wall_time_seconds", c.wall_time_seconds},
    };
}

inline Certificate certificate_from_json(const nlohmann::json& j) {
    try {
        Certificate c;
        const auto& params = j.at("params");
        c.params.K = Rational::parse(params.at("K").get<std::string>());
        c.params.alpha = Rational::parse(params.at("alpha").get<std::string>());
        c.params.N = params.at("N").get<int>();
        const auto& mesh = j.at("mesh");
        c.mesh.M = mesh.at("M").get<std::int64_t>();
        c.mesh.precision_digits = mesh.at("precision_digits").get<int>();
        c.mesh.workers = mesh.at("workers").get<int>();
        c.mesh.chunk_size = mesh.at("chunk_size").get<std::int64_t>();
        c.mesh_max_upper = detail::dyadic_from_json(j.at("mesh_max_upper"));
        c.argmax_index = j.at("argmax_index").get<std::int64_t>();
        c.lipschitz = Rational::parse(j.at("lipschitz").get<std::string>());
        c.strict_replication = j.at("strict_replication").get<bool>();
        c.mesh_slack = detail::dyadic_from_json(j.at("mesh_slack"));
        c.tail = Rational::parse(j.at("tail").get<std::string>());
        c.A_upper = detail::dyadic_from_json(j.at("A_upper"));
        c.beta_lower = detail::dyadic_from_json(j.at("beta_lower"));
        c.target_mesh = Rational::parse(j.at("target_mesh").get<std::string>());
        c.target_A = Rational::parse(j.at("target_A").get<std::string>());
        c.target_beta = Rational::parse(j.at("target_beta").get<std::string>());
        c.passed_mesh = j.at("passed_mesh").get<bool>();
        c.passed_A = j.at("passed_A").get<bool>();
        c.passed_beta = j.at("passed_beta").get<bool>();
        c.software_version = j.at("software_version").get<std::string>();
        c.wall_time_seconds = j.at("wall_time_seconds").get<double>();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed certificate: ") + e.what());
    }
}

/// The five-line mesh log, then the A/beta bounds, a version footer and the
/// overall verdict as the final line.
inline void write_text_log(std::ostream& os, const Certificate& c) {
    os << "=== Dyadic-ball-certified mesh bound ===\n";
    os << "M = " << c.mesh.M << ", dps = " << c.mesh.precision_digits << ", workers = " << c.mesh.workers << "\n";
    os << "mesh_max_upper = " << c.mesh_max_upper.to_decimal(25) << " (attained at j = " << c.argmax_index << " )\n";
    os << "Target bound   = " << to_decimal(c.target_mesh, 25) << "\n";
    os << "Certified mesh_max_upper <= bound : " << detail::truth(c.passed_mesh) << "\n";
    os << "Lipschitz L    = " << to_decimal(c.lipschitz, 25, Rounding::Ceil)
       << (c.strict_replication ? " (strict replication)" : "") << "\n";
    os << "mesh slack     = " << c.mesh_slack.to_decimal(25, Rounding::Ceil) << "\n";
    os << "tail bound     = " << to_decimal(c.tail, 25, Rounding::Ceil) << "\n";
    os << "A_upper        = " << c.A_upper.to_decimal(25, Rounding::Ceil) << "\n";
    os << "Certified A_upper < " << detail::short_decimal(c.target_A) << " : " << detail::truth(c.passed_A) << "\n";
    os << "beta_lower     = " << c.beta_lower.to_decimal(25, Rounding::Floor) << "\n";
    os << "Certified beta_lower > " << detail::short_decimal(c.target_beta) << " : " << detail::truth(c.passed_beta) << "\n";
    char wall[64];
    std::snprintf(wall, sizeof wall, "%.2f", c.wall_time_seconds);
    os << "maxterm " << c.software_version << ", wall time " << wall << " s\n";
    os << "Certified all targets : " << detail::truth(c.passed()) << "\n";
}

inline std::string emit_log(const Certificate& c, LogFormat format) {
    if (format == LogFormat::Json) return to_json(c).dump(2) + "\n";
    std::ostringstream os;
    write_text_log(os, c);
    return os.str();
}

/// Consistency audit of a JSON certificate: the decimal renderings must match
/// the stored dyadics, and recheck() must find nothing.
inline std::vector<std::string> audit_certificate(const nlohmann::json& j) {
    std::vector<std::string> issues;
    const std::pair<const char*, Rounding> dyadics[] = {{"mesh_max_upper", Rounding::Ceil},
                                                        {"mesh_slack", Rounding::Ceil},
                                                        {"A_upper", Rounding::Ceil},
                                                        {"beta_lower", Rounding::Floor}};
    for (const auto& [key, mode] : dyadics) {
        const auto& field = j.at(key);
        if (field.at("decimal").get<std::string>() != detail::dyadic_from_json(field).to_decimal(40, mode))
            issues.emplace_back(std::string(key) + " decimal rendering does not match its mantissa and exponent");
    }
    for (auto& issue : recheck(certificate_from_json(j))) issues.push_back(std::move(issue));
    return issues;
}

inline Certificate parse_certificate(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("certificate is not valid JSON: ") + e.what());
    }
    return certificate_from_json(j);
}

} // namespace maxterm
