#pragma once
// K-means over the 4-dim user-feature space, PCA projection for plotting,
// adjusted Rand index for cluster-recovery checks, and centroid-rule naming
// of the four collaboration styles.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coact/features.hpp"

namespace coact {

inline constexpr int kFeatureDims = 4;
using FeatureRow = std::array<double, kFeatureDims>;

struct FeatureMatrix {
    std::vector<std::string> ids;   // row labels (user ids), same length as rows
    std::vector<FeatureRow> rows;
    // Populated by standardize(); absent on raw matrices.
    std::optional<FeatureRow> column_means;
    std::optional<FeatureRow> column_stds;
};

FeatureMatrix to_matrix(const std::vector<UserFeatureVector>& features);

// Column-wise z-scoring with population std. Zero-variance columns map to
// all-zeros (their std is recorded as 0). Throws TooFewRowsError below 2 rows.
FeatureMatrix standardize(const FeatureMatrix& m);

struct ClusterModel {
    int k = 0;
    std::vector<FeatureRow> centroids;     // in the space of the input matrix
    std::map<std::string, int> assignments;  // user id -> cluster in [0, k)
    double objective = 0.0;                // sum of squared distances
    std::uint64_t seed = 0;
    std::vector<double> objective_history;  // one entry per Lloyd iteration
};

// Seeded k-means++ init, then Lloyd iterations until assignments stabilize
// (at most 100). Nearest-centroid ties break toward the lowest cluster
// index; an emptied cluster is reseeded on the point farthest from its
// assigned centroid. Deterministic given (m, k, seed); the recorded
// objective history is non-increasing.
ClusterModel kmeans(const FeatureMatrix& m, int k, std::uint64_t seed);

struct ProjectionModel {
    std::vector<FeatureRow> components;   // orthonormal; first nonzero entry positive
    std::vector<double> explained_variance;  // descending, one per component
    FeatureRow mean{};
};

// Top-`dims` eigenvectors of the mean-centered (population) covariance;
// projected row = components . (row - mean).
std::pair<ProjectionModel, std::vector<std::vector<double>>> pca_project(const FeatureMatrix& m,
                                                                         int dims);

// Chance-corrected partition agreement in [-1, 1]; 1.0 for identical
// partitions up to relabeling. Throws KeyMismatchError on differing key sets.
double adjusted_rand_index(const std::map<std::string, int>& a,
                           const std::map<std::string, int>& b);

// Deterministic naming of a k=4 model from de-standardized centroids,
// evaluated in order: lowest frequency+intensity is Hands-off; of the rest
// the highest handback is Collaborative; of the remaining two the lower
// handback is Takeover and the last is Hands-on. Ties resolve toward the
// lower cluster index. Throws WrongKError when k != 4.
std::map<int, std::string> name_clusters(const ClusterModel& model, const FeatureMatrix& m);

// CSV exports: `user_id,cluster,style` and `user_id,pc1,pc2`.
void write_cluster_csv(const ClusterModel& model, const std::map<int, std::string>& names,
                       std::ostream& out);
void write_projection_csv(const FeatureMatrix& m, const std::vector<std::vector<double>>& projected,
                          std::ostream& out);

}  // namespace coact
