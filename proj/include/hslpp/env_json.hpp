#pragma once

// JSON form of EnvironmentSpec: {kind, params, N, seed, coupling_group}.
// Infinite rates are written as the string "inf".

#include <cmath>
#include <string>

#include <json.hpp>

#include "env.hpp"

namespace hslpp {

namespace detail {

inline nlohmann::json real_to_json(double x)
{
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

inline double real_from_json(const nlohmann::json& j, const char* key)
{
    if (!j.contains(key)) throw domain_error(std::string("environment JSON: missing param '") + key + "'");
    const auto& v = j.at(key);
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw domain_error(std::string("environment JSON: param '") + key + "' is not a number");
    }
    return v.get<double>();
}

} // namespace detail

inline nlohmann::json to_json(const EnvironmentSpec& spec)
{
    using detail::real_to_json;
    nlohmann::json params = nlohmann::json::object();
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, StationaryRho>) {
                params["rho"] = real_to_json(k.rho);
            } else if constexpr (std::is_same_v<K, PointToPoint>) {
                params["alpha"] = real_to_json(k.alpha);
            } else if constexpr (std::is_same_v<K, PointToPointRate>) {
                params["rho"] = real_to_json(k.rho);
            } else if constexpr (std::is_same_v<K, ZeroDiagonal>) {
                params["rho_minus"] = real_to_json(k.rho_minus);
            } else if constexpr (std::is_same_v<K, AlphaBeta>) {
                params["alpha"] = real_to_json(k.alpha);
                params["beta"] = real_to_json(k.beta);
            } else if constexpr (std::is_same_v<K, Tilted>) {
                params["rho"] = real_to_json(k.base.rho);
                params["tau"] = real_to_json(k.tau);
                params["m1"] = real_to_json(k.m1);
            }
        },
        spec.kind);
    return {{"kind", kind_name(spec.kind)},
            {"params", params},
            {"N", spec.N},
            {"seed", spec.seed},
            {"coupling_group", spec.coupling_group}};
}

inline EnvironmentSpec environment_from_json(const nlohmann::json& j)
{
    using detail::real_from_json;
    EnvironmentSpec spec;
    const auto kind = j.at("kind").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    if (kind == "stationary") {
        spec.kind = StationaryRho{real_from_json(params, "rho")};
    } else if (kind == "point_to_point") {
        spec.kind = PointToPoint{real_from_json(params, "alpha")};
    } else if (kind == "point_to_point_rate") {
        spec.kind = PointToPointRate{real_from_json(params, "rho")};
    } else if (kind == "zero_diagonal") {
        spec.kind = ZeroDiagonal{real_from_json(params, "rho_minus")};
    } else if (kind == "alpha_beta") {
        spec.kind = AlphaBeta{real_from_json(params, "alpha"), real_from_json(params, "beta")};
    } else if (kind == "full_space_square") {
        spec.kind = FullSpaceSquare{};
    } else if (kind == "tilted") {
        spec.kind = Tilted{StationaryRho{real_from_json(params, "rho")}, real_from_json(params, "tau"),
                           real_from_json(params, "m1")};
    } else {
        throw domain_error("environment JSON: unknown kind '" + kind + "'");
    }
    spec.N = j.at("N").get<std::int64_t>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.coupling_group = j.at("coupling_group").get<std::uint64_t>();
    validate(spec);
    return spec;
}

} // namespace hslpp
