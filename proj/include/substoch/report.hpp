#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "json.hpp"

#include "substoch/identities.hpp"
#include "substoch/montecarlo.hpp"
#include "substoch/substochastic.hpp"

namespace substoch::report {

using Json = nlohmann::ordered_json;

/// Exact values serialize as "p/q" strings, float values as JSON numbers
/// (non-finite floats as strings, which JSON cannot carry).
template <Scalar T>
Json scalar(const T& x)
{
    if constexpr (ScalarTraits<T>::is_exact) {
        return ScalarTraits<T>::to_string(x);
    } else {
        if (std::isfinite(x)) {
            return x;
        }
        return ScalarTraits<T>::to_string(x);
    }
}

inline Json optional_index(std::optional<Index> i)
{
    return i ? Json(*i) : Json(nullptr);
}

template <Scalar T>
Json matrix(const Matrix<T>& m)
{
    Json rows = Json::array();
    for (Index i = 1; i <= m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 1; j <= m.cols(); ++j) {
            row.push_back(scalar(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

template <Scalar T>
Json identity(const IdentityReport<T>& r)
{
    Json j;
    j["kind"] = "identity";
    j["identity"] = identity_name(r.id);
    j["m"] = optional_index(r.m);
    j["l"] = optional_index(r.l);
    j["lhs"] = scalar(r.lhs);
    j["rhs"] = scalar(r.rhs);
    j["residual"] = scalar(r.residual);
    j["passed"] = r.passed;
    j["error"] = r.error ? Json(*r.error) : Json(nullptr);
    return j;
}

template <Scalar T>
Json maximality(const MaximalityReport<T>& r)
{
    Json j;
    j["kind"] = "maximality";
    j["passed"] = r.holds;
    if (r.witness) {
        j["witness"] = {{"row", r.witness->row},
                        {"col", r.witness->col},
                        {"diagonal", scalar(r.witness->diagonal)},
                        {"offending", scalar(r.witness->offending)}};
    } else {
        j["witness"] = nullptr;
    }
    j["fundamental_transposed"] = matrix(r.c);
    return j;
}

inline Json walk(const WalkStatistics& w)
{
    Json j;
    j["kind"] = "walk";
    j["start_state"] = w.start_state;
    j["trials"] = w.trials;
    j["seed"] = w.seed;
    j["mean_visits"] = w.mean_visits;
    j["ci_halfwidth"] = w.ci_halfwidth;
    j["cap_exceeded"] = w.cap_exceeded;
    return j;
}

inline Json crosscheck(const FundamentalCrosscheck& c)
{
    Json j;
    j["kind"] = "crosscheck";
    j["sigma"] = c.sigma;
    j["passed"] = c.passed();
    j["exact"] = matrix(c.exact);
    Json flags = Json::array();
    for (const auto& f : c.flags) {
        flags.push_back({{"start", f.start},
                         {"state", f.state},
                         {"estimate", f.estimate},
                         {"exact", f.exact},
                         {"halfwidth", f.halfwidth}});
    }
    j["flags"] = std::move(flags);
    Json dom = Json::array();
    for (const auto& [l, m] : c.dominance_violations) {
        dom.push_back({{"from", l}, {"state", m}});
    }
    j["dominance_violations"] = std::move(dom);
    Json walks = Json::array();
    for (const auto& w : c.rows) {
        walks.push_back(walk(w));
    }
    j["walks"] = std::move(walks);
    return j;
}

/// Top-level record of one CLI invocation. Field set and order are fixed;
/// wall time is null unless timing was requested, which keeps repeated runs
/// byte-identical.
struct RunReport {
    std::string command;
    std::string input_digest;
    std::string backend;
    Json reports = Json::array();
    bool passed = true;
    std::optional<double> wall_time_ms;

    void add(Json entry)
    {
        if (entry.contains("passed") && entry["passed"].is_boolean() && !entry["passed"].get<bool>()) {
            passed = false;
        }
        reports.push_back(std::move(entry));
    }

    Json to_json() const
    {
        Json j;
        j["command"] = command;
        j["input_digest"] = input_digest;
        j["backend"] = backend;
        j["reports"] = reports;
        j["passed"] = passed;
        j["wall_time_ms"] = wall_time_ms ? Json(*wall_time_ms) : Json(nullptr);
        return j;
    }
};

} // namespace substoch::report
