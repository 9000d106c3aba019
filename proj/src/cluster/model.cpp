#include "gridshed/cluster/model.hpp"

#include <set>

#include "gridshed/core/errors.hpp"

namespace gridshed::cluster {

const char* algorithm_name(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::KMeans: return "kmeans";
        case Algorithm::MiniBatch: return "minibatch";
        case Algorithm::Hierarchical: return "hierarchical";
        case Algorithm::Dbscan: return "dbscan";
        case Algorithm::Gmm: return "gmm";
        case Algorithm::Spectral: return "spectral";
    }
    return "?";
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "kmeans") return Algorithm::KMeans;
    if (name == "minibatch") return Algorithm::MiniBatch;
    if (name == "hierarchical") return Algorithm::Hierarchical;
    if (name == "dbscan") return Algorithm::Dbscan;
    if (name == "gmm") return Algorithm::Gmm;
    if (name == "spectral") return Algorithm::Spectral;
    throw ArgumentError("unknown clustering algorithm '" + name + "'");
}

int ClusterModel::n_clusters() const {
    std::set<int> distinct;
    for (int label : labels) {
        if (label >= 0) distinct.insert(label);
    }
    return static_cast<int>(distinct.size());
}

bool ClusterModel::has_noise() const {
    for (int label : labels) {
        if (label < 0) return true;
    }
    return false;
}

}  // namespace gridshed::cluster
