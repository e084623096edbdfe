#include "coact/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "coact/errors.hpp"
#include "coact/rng.hpp"
#include "coact/styles.hpp"

namespace coact {

namespace {

double dist2(const FeatureRow& a, const FeatureRow& b) {
    double d = 0.0;
    for (int j = 0; j < kFeatureDims; ++j) {
        const double diff = a[j] - b[j];
        d += diff * diff;
    }
    return d;
}

}  // namespace

FeatureMatrix to_matrix(const std::vector<UserFeatureVector>& features) {
    FeatureMatrix m;
    for (const UserFeatureVector& f : features) {
        m.ids.push_back(f.user_id);
        m.rows.push_back(f.as_array());
    }
    return m;
}

FeatureMatrix standardize(const FeatureMatrix& m) {
    const std::size_t n = m.rows.size();
    if (n < 2) throw TooFewRowsError("standardize needs at least 2 rows");

    FeatureRow mean{}, std{};
    for (const FeatureRow& r : m.rows)
        for (int j = 0; j < kFeatureDims; ++j) mean[j] += r[j];
    for (int j = 0; j < kFeatureDims; ++j) mean[j] /= static_cast<double>(n);
    for (const FeatureRow& r : m.rows)
        for (int j = 0; j < kFeatureDims; ++j) {
            const double d = r[j] - mean[j];
            std[j] += d * d;
        }
    for (int j = 0; j < kFeatureDims; ++j) std[j] = std::sqrt(std[j] / static_cast<double>(n));

    FeatureMatrix out;
    out.ids = m.ids;
    out.rows.reserve(n);
    for (const FeatureRow& r : m.rows) {
        FeatureRow z{};
        for (int j = 0; j < kFeatureDims; ++j) z[j] = std[j] > 0.0 ? (r[j] - mean[j]) / std[j] : 0.0;
        out.rows.push_back(z);
    }
    out.column_means = mean;
    out.column_stds = std;
    return out;
}

ClusterModel kmeans(const FeatureMatrix& m, int k, std::uint64_t seed) {
    const std::size_t n = m.rows.size();
    if (k < 1) throw TooFewRowsError("k must be positive");
    if (n < static_cast<std::size_t>(k)) throw TooFewRowsError("fewer rows than clusters");

    SplitMix64 rng(seed);
    const auto& rows = m.rows;

    // k-means++: first centroid uniform, the rest proportional to squared
    // distance from the nearest chosen centroid.
    std::vector<FeatureRow> centroids;
    std::set<std::size_t> picked;
    {
        const std::size_t first = static_cast<std::size_t>(rng.next_below(n));
        centroids.push_back(rows[first]);
        picked.insert(first);
    }
    std::vector<double> d2(n);
    while (centroids.size() < static_cast<std::size_t>(k)) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = dist2(rows[i], centroids[0]);
            for (std::size_t c = 1; c < centroids.size(); ++c)
                best = std::min(best, dist2(rows[i], centroids[c]));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double r = rng.next_double() * total;
            double cum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                cum += d2[i];
                if (r < cum) {
                    pick = i;
                    break;
                }
            }
        } else {
            // All remaining mass is zero (duplicate points); take the lowest
            // index not yet used so the centroid count still reaches k.
            while (picked.contains(pick)) ++pick;
            pick = std::min(pick, n - 1);
        }
        centroids.push_back(rows[pick]);
        picked.insert(pick);
    }

    std::vector<int> assign(n, -1), prev(n, -2);
    std::vector<double> history;
    const int max_iterations = 100;

    for (int iter = 0; iter < max_iterations; ++iter) {
        // Assignment step; ties go to the lowest cluster index.
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = dist2(rows[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = dist2(rows[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            assign[i] = best;
        }

        // Reseed emptied clusters on the point farthest from its assigned
        // centroid; the centroid moves onto the point, so the objective can
        // only drop. Singleton clusters are never robbed.
        std::vector<int> sizes(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) ++sizes[static_cast<std::size_t>(assign[i])];
        for (int c = 0; c < k; ++c) {
            if (sizes[static_cast<std::size_t>(c)] > 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[static_cast<std::size_t>(assign[i])] < 2) continue;
                const double d = dist2(rows[i], centroids[static_cast<std::size_t>(assign[i])]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) continue;  // nothing can move without emptying another cluster
            --sizes[static_cast<std::size_t>(assign[far])];
            assign[far] = c;
            ++sizes[static_cast<std::size_t>(c)];
            centroids[static_cast<std::size_t>(c)] = rows[far];
        }

        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            objective += dist2(rows[i], centroids[static_cast<std::size_t>(assign[i])]);
        if (!history.empty() && objective > history.back() + 1e-9)
            throw Error("kmeans objective increased; internal invariant broken");
        history.push_back(objective);

        if (assign == prev) break;
        prev = assign;

        // Update step: centroids become the mean of their members.
        std::vector<FeatureRow> sums(static_cast<std::size_t>(k), FeatureRow{});
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assign[i]);
            for (int j = 0; j < kFeatureDims; ++j) sums[c][j] += rows[i][j];
            ++counts[c];
        }
        for (int c = 0; c < k; ++c)
            if (counts[static_cast<std::size_t>(c)] > 0)
                for (int j = 0; j < kFeatureDims; ++j)
                    centroids[static_cast<std::size_t>(c)][j] =
                        sums[static_cast<std::size_t>(c)][j] /
                        counts[static_cast<std::size_t>(c)];
    }

    ClusterModel model;
    model.k = k;
    model.centroids = centroids;
    model.seed = seed;
    model.objective_history = std::move(history);
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        model.assignments[m.ids[i]] = assign[i];
        objective += dist2(rows[i], centroids[static_cast<std::size_t>(assign[i])]);
    }
    model.objective = objective;
    return model;
}

namespace {

// Cyclic Jacobi on a 4x4 symmetric matrix. More than enough accuracy for
// covariance matrices this small.
void jacobi_eigen(std::array<std::array<double, 4>, 4> a, FeatureRow& values,
                  std::array<FeatureRow, 4>& vectors) {
    std::array<std::array<double, 4>, 4> v{};
    for (int i = 0; i < 4; ++i) v[i][i] = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;

        for (int p = 0; p < 4; ++p)
            for (int q = p + 1; q < 4; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double sign = theta >= 0.0 ? 1.0 : -1.0;
                const double t = sign / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < 4; ++i) {
                    const double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (int i = 0; i < 4; ++i) {
                    const double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (int i = 0; i < 4; ++i) {
                    const double vip = v[i][p], viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
    }

    std::array<int, 4> order = {0, 1, 2, 3};
    std::sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] > a[y][y]; });
    for (int r = 0; r < 4; ++r) {
        values[r] = a[order[r]][order[r]];
        for (int i = 0; i < 4; ++i) vectors[r][i] = v[i][order[r]];
    }
}

}  // namespace

std::pair<ProjectionModel, std::vector<std::vector<double>>> pca_project(const FeatureMatrix& m,
                                                                         int dims) {
    const std::size_t n = m.rows.size();
    if (n < 2) throw TooFewRowsError("pca needs at least 2 rows");
    if (dims < 1 || dims > kFeatureDims) throw TooFewRowsError("dims must be in [1, 4]");

    ProjectionModel model;
    for (const FeatureRow& r : m.rows)
        for (int j = 0; j < kFeatureDims; ++j) model.mean[j] += r[j];
    for (int j = 0; j < kFeatureDims; ++j) model.mean[j] /= static_cast<double>(n);

    std::array<std::array<double, 4>, 4> cov{};
    for (const FeatureRow& r : m.rows)
        for (int p = 0; p < 4; ++p)
            for (int q = 0; q < 4; ++q)
                cov[p][q] += (r[p] - model.mean[p]) * (r[q] - model.mean[q]);
    for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) cov[p][q] /= static_cast<double>(n);

    FeatureRow values{};
    std::array<FeatureRow, 4> vectors{};
    jacobi_eigen(cov, values, vectors);

    for (int d = 0; d < dims; ++d) {
        FeatureRow comp = vectors[d];
        // Sign convention: first entry of non-negligible magnitude positive.
        for (int j = 0; j < kFeatureDims; ++j) {
            if (std::abs(comp[j]) > 1e-12) {
                if (comp[j] < 0.0)
                    for (int i = 0; i < kFeatureDims; ++i) comp[i] = -comp[i];
                break;
            }
        }
        model.components.push_back(comp);
        model.explained_variance.push_back(std::max(values[d], 0.0));
    }

    std::vector<std::vector<double>> projected(n, std::vector<double>(static_cast<std::size_t>(dims)));
    for (std::size_t i = 0; i < n; ++i)
        for (int d = 0; d < dims; ++d) {
            double dot = 0.0;
            for (int j = 0; j < kFeatureDims; ++j)
                dot += model.components[static_cast<std::size_t>(d)][j] *
                       (m.rows[i][j] - model.mean[j]);
            projected[i][static_cast<std::size_t>(d)] = dot;
        }
    return {std::move(model), std::move(projected)};
}

double adjusted_rand_index(const std::map<std::string, int>& a,
                           const std::map<std::string, int>& b) {
    if (a.size() != b.size()) throw KeyMismatchError("partitions cover different key sets");
    for (const auto& [key, cluster] : a) {
        (void)cluster;
        if (!b.contains(key)) throw KeyMismatchError("partitions cover different key sets");
    }

    const auto comb2 = [](double x) { return x * (x - 1.0) / 2.0; };
    std::map<std::pair<int, int>, long long> contingency;
    std::map<int, long long> row_sums, col_sums;
    for (const auto& [key, ca] : a) {
        const int cb = b.at(key);
        ++contingency[{ca, cb}];
        ++row_sums[ca];
        ++col_sums[cb];
    }

    double index = 0.0, rows = 0.0, cols = 0.0;
    for (const auto& [cell, count] : contingency) {
        (void)cell;
        index += comb2(static_cast<double>(count));
    }
    for (const auto& [c, count] : row_sums) {
        (void)c;
        rows += comb2(static_cast<double>(count));
    }
    for (const auto& [c, count] : col_sums) {
        (void)c;
        cols += comb2(static_cast<double>(count));
    }
    const double total = comb2(static_cast<double>(a.size()));
    const double expected = total > 0.0 ? rows * cols / total : 0.0;
    const double max_index = (rows + cols) / 2.0;
    const double denom = max_index - expected;
    if (std::abs(denom) < 1e-12) return 1.0;  // both partitions degenerate and equal
    return (index - expected) / denom;
}

std::map<int, std::string> name_clusters(const ClusterModel& model, const FeatureMatrix& m) {
    if (model.k != 4) throw WrongKError("style naming requires k = 4");

    // De-standardize so the rules compare raw feature scales.
    std::vector<FeatureRow> centroids = model.centroids;
    if (m.column_means && m.column_stds)
        for (FeatureRow& c : centroids)
            for (int j = 0; j < kFeatureDims; ++j)
                c[j] = c[j] * (*m.column_stds)[j] + (*m.column_means)[j];

    // Column order matches UserFeatureVector::as_array.
    constexpr int kFrequency = 0, kIntensity = 1, kHandback = 3;

    std::vector<int> remaining = {0, 1, 2, 3};
    const auto take = [&](auto&& better) {
        int best = remaining.front();
        for (int c : remaining)
            if (better(c, best)) best = c;
        remaining.erase(std::find(remaining.begin(), remaining.end(), best));
        return best;
    };

    std::map<int, std::string> names;
    const int hands_off = take([&](int x, int y) {
        const double fx = centroids[static_cast<std::size_t>(x)][kFrequency] +
                          centroids[static_cast<std::size_t>(x)][kIntensity];
        const double fy = centroids[static_cast<std::size_t>(y)][kFrequency] +
                          centroids[static_cast<std::size_t>(y)][kIntensity];
        return fx < fy;
    });
    names[hands_off] = styles::kHandsOff;

    const int collaborative = take([&](int x, int y) {
        return centroids[static_cast<std::size_t>(x)][kHandback] >
               centroids[static_cast<std::size_t>(y)][kHandback];
    });
    names[collaborative] = styles::kCollaborative;

    const int takeover = take([&](int x, int y) {
        return centroids[static_cast<std::size_t>(x)][kHandback] <
               centroids[static_cast<std::size_t>(y)][kHandback];
    });
    names[takeover] = styles::kTakeover;

    names[remaining.front()] = styles::kHandsOn;
    return names;
}

void write_cluster_csv(const ClusterModel& model, const std::map<int, std::string>& names,
                       std::ostream& out) {
    out << "user_id,cluster,style\n";
    for (const auto& [user, cluster] : model.assignments) {
        auto it = names.find(cluster);
        out << user << ',' << cluster << ',' << (it != names.end() ? it->second : "") << '\n';
    }
    if (!out) throw IoError("failed writing cluster CSV");
}

void write_projection_csv(const FeatureMatrix& m, const std::vector<std::vector<double>>& projected,
                          std::ostream& out) {
    out << "user_id,pc1,pc2\n";
    char buf[96];
    for (std::size_t i = 0; i < m.ids.size(); ++i) {
        const double pc1 = projected[i].size() > 0 ? projected[i][0] : 0.0;
        const double pc2 = projected[i].size() > 1 ? projected[i][1] : 0.0;
        std::snprintf(buf, sizeof(buf), ",%.6f,%.6f\n", pc1, pc2);
        out << m.ids[i] << buf;
    }
    if (!out) throw IoError("failed writing projection CSV");
}

}  // namespace coact
