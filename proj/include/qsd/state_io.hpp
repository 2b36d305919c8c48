#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qsd/errors.hpp"
#include "qsd/gaussian_state.hpp"

namespace qsd {

// State-set file format (JSON):
//   {
//     "n_modes": 1,
//     "states": [ { "gamma": [[...], ...], "d": [...] }, ... ],
//     "weights": [[...], ...],      // optional, one row per hypothesis
//     "pair_priors": [[...], ...]   // optional, for comparison problems
//   }
// gamma is the 2n x 2n covariance as an array of rows, d the length-2n
// displacement. Every number must be finite; states are validated on load
// with the usual symmetry and uncertainty tolerances.
struct StateSet {
    int n_modes = 0;
    std::vector<GaussianState> states;
    std::vector<std::vector<double>> weights;  // empty when absent
    std::optional<Eigen::MatrixXd> pair_priors;
};

namespace detail {

inline double finite_number(const nlohmann::json& j, const std::string& where) {
    if (!j.is_number()) throw validation_error("state set: " + where + " is not a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw validation_error("state set: " + where + " is not finite");
    return v;
}

inline Eigen::MatrixXd parse_matrix(const nlohmann::json& j, Eigen::Index rows,
                                    Eigen::Index cols, const std::string& where) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw validation_error("state set: " + where + " must have " + std::to_string(rows) +
                               " rows");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw validation_error("state set: " + where + " row " + std::to_string(r) +
                                   " must have " + std::to_string(cols) + " entries");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = finite_number(row[static_cast<std::size_t>(c)],
                                    where + "[" + std::to_string(r) + "][" + std::to_string(c) +
                                        "]");
    }
    return m;
}

}  // namespace detail

inline StateSet parse_state_set(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw validation_error(std::string("state set: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw validation_error("state set: top level must be an object");
    if (!j.contains("n_modes") || !j["n_modes"].is_number_integer())
        throw validation_error("state set: missing integer n_modes");
    const int n = j["n_modes"].get<int>();
    if (n < 1) throw validation_error("state set: n_modes must be positive");
    if (!j.contains("states") || !j["states"].is_array() || j["states"].empty())
        throw validation_error("state set: missing nonempty states array");

    StateSet set;
    set.n_modes = n;
    const Eigen::Index dim = 2 * n;
    for (std::size_t k = 0; k < j["states"].size(); ++k) {
        const auto& js = j["states"][k];
        const std::string where = "states[" + std::to_string(k) + "]";
        if (!js.is_object() || !js.contains("gamma") || !js.contains("d"))
            throw validation_error("state set: " + where + " needs gamma and d");
        Eigen::MatrixXd gamma = detail::parse_matrix(js["gamma"], dim, dim, where + ".gamma");
        const auto& jd = js["d"];
        if (!jd.is_array() || static_cast<Eigen::Index>(jd.size()) != dim)
            throw validation_error("state set: " + where + ".d must have length 2n");
        Eigen::VectorXd d(dim);
        for (Eigen::Index r = 0; r < dim; ++r)
            d(r) = detail::finite_number(jd[static_cast<std::size_t>(r)],
                                         where + ".d[" + std::to_string(r) + "]");
        try {
            set.states.push_back(make_gaussian_state(n, std::move(gamma), std::move(d)));
        } catch (const validation_error& e) {
            throw validation_error("state set: " + where + ": " + e.what());
        }
    }

    if (j.contains("weights")) {
        const auto& jw = j["weights"];
        if (!jw.is_array()) throw validation_error("state set: weights must be an array of rows");
        for (std::size_t h = 0; h < jw.size(); ++h) {
            const auto& row = jw[h];
            if (!row.is_array() || row.size() != set.states.size())
                throw validation_error(
                    "state set: weights row " + std::to_string(h) +
                    " must have one entry per state");
            std::vector<double> w;
            for (std::size_t c = 0; c < row.size(); ++c)
                w.push_back(detail::finite_number(
                    row[c], "weights[" + std::to_string(h) + "][" + std::to_string(c) + "]"));
            set.weights.push_back(std::move(w));
        }
    }

    if (j.contains("pair_priors")) {
        const auto m = static_cast<Eigen::Index>(set.states.size());
        set.pair_priors = detail::parse_matrix(j["pair_priors"], m, m, "pair_priors");
    }
    return set;
}

inline StateSet load_state_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open state-set file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_state_set(buf.str());
}

// Serialization round-trips exactly: doubles are emitted in shortest
// round-trip form, so a dumped set parses back to identical states.
inline std::string dump_state_set(const StateSet& set) {
    nlohmann::ordered_json j;
    j["n_modes"] = set.n_modes;
    j["states"] = nlohmann::ordered_json::array();
    for (const GaussianState& s : set.states) {
        nlohmann::ordered_json js;
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < s.gamma.rows(); ++r) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < s.gamma.cols(); ++c) row.push_back(s.gamma(r, c));
            rows.push_back(std::move(row));
        }
        js["gamma"] = std::move(rows);
        auto d = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < s.d.size(); ++r) d.push_back(s.d(r));
        js["d"] = std::move(d);
        j["states"].push_back(std::move(js));
    }
    if (!set.weights.empty()) j["weights"] = set.weights;
    if (set.pair_priors) {
        auto rows = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < set.pair_priors->rows(); ++r) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < set.pair_priors->cols(); ++c)
                row.push_back((*set.pair_priors)(r, c));
            rows.push_back(std::move(row));
        }
        j["pair_priors"] = std::move(rows);
    }
    return j.dump(2) + "\n";
}

// Hypothesis h as a mixture. With explicit weight rows the mixture runs over
// the whole state list; without them state h alone is the hypothesis.
inline GaussianMixture mixture_from_state_set(const StateSet& set, std::size_t hypothesis) {
    if (!set.weights.empty()) {
        if (hypothesis >= set.weights.size())
            throw validation_error("state set: no weights row for this hypothesis");
        return make_gaussian_mixture(set.weights[hypothesis], set.states);
    }
    if (hypothesis >= set.states.size())
        throw validation_error("state set: fewer states than hypotheses and no weights given");
    return as_mixture(set.states[hypothesis]);
}

}  // namespace qsd
