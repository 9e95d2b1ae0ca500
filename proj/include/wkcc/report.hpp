#ifndef WKCC_REPORT_HPP
#define WKCC_REPORT_HPP

// Result documents for clustering runs. Everything except
// metadata.timestamp is a function of the inputs and the configuration.

#include <chrono>
#include <ctime>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wkcc/clustering.hpp"
#include "wkcc/io.hpp"

namespace wkcc {

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
inline std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Labels (1-based), per-cluster Frechet means and, when the state carries
/// models, directions, member scores and EV curves.
inline nlohmann::json cluster_state_json(const ClusterState& state, std::span<const GridDistribution> ds,
                                         const std::vector<std::string>& ids, std::size_t K)
{
    using nlohmann::json;
    if (state.labels.size() != ds.size() || ids.size() != ds.size())
        fail(ErrorCode::LengthMismatch, "labels, ids and data differ in length");
    json doc;
    json labels = json::array();
    for (int l : state.labels)
        labels.push_back(l + 1);
    doc["ids"] = ids;
    doc["labels"] = std::move(labels);
    doc["iteration"] = state.iteration;
    doc["objective"] = state.objective;

    const auto members = detail::members_of(state.labels, K);
    json clusters = json::array();
    for (std::size_t c = 0; c < K; ++c) {
        json cl;
        cl["label"] = c + 1;
        cl["size"] = members[c].size();
        if (!members[c].empty()) {
            std::vector<GridDistribution> sub;
            for (std::size_t i : members[c])
                sub.push_back(ds[i]);
            cl["frechet_mean"] = vector_json(frechet_mean(sub).quantiles());
        } else {
            cl["frechet_mean"] = nullptr;
        }
        if (c < state.models.size()) {
            const ConvexPcaModel& model = state.models[c].model;
            json dirs = json::array();
            for (const TangentVector& d : model.directions())
                dirs.push_back(vector_json(d.values()));
            cl["dimension"] = model.dimension();
            cl["directions"] = std::move(dirs);
            cl["ev_curve"] = model.explained_variation_curve();
            cl["total_variation"] = model.total_variation();
            json scores = json::object();
            const Matrix& s = model.training_scores();
            for (std::size_t r = 0; r < members[c].size() && static_cast<Eigen::Index>(r) < s.rows(); ++r)
                scores[ids[members[c][r]]] = vector_json(s.row(static_cast<Eigen::Index>(r)).transpose());
            cl["scores"] = std::move(scores);
        }
        clusters.push_back(std::move(cl));
    }
    doc["clusters"] = std::move(clusters);
    return doc;
}

/// Writes the state document with `extra` merged at the top level (config
/// echo, metrics, metadata).
inline void write_result_json(const ClusterState& state, std::span<const GridDistribution> ds,
                              const std::vector<std::string>& ids, std::size_t K, const nlohmann::json& extra,
                              const std::string& path)
{
    nlohmann::json doc = cluster_state_json(state, ds, ids, K);
    for (const auto& [key, value] : extra.items())
        doc[key] = value;
    write_json(path, doc);
}

}  // namespace wkcc

#endif  // WKCC_REPORT_HPP
