#include "mckm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

namespace mckm::oracle {

std::vector<int> nearest_assign(const Matrix& points, const Matrix& centers) {
    std::vector<int> out(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        int best = 0;
        double best_d = -1.0;
        for (std::size_t c = 0; c < centers.rows(); ++c) {
            double d = 0.0;
            for (std::size_t j = 0; j < points.cols(); ++j) {
                const double diff = points(i, j) - centers(c, j);
                d += diff * diff;
            }
            if (best_d < 0 || d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        out[i] = best + 1;
    }
    return out;
}

namespace {

// joint counts keyed by (truth label, predicted label)
std::map<std::pair<int, int>, long long> joint_counts(const std::vector<int>& truth,
                                                      const std::vector<int>& pred) {
    if (truth.size() != pred.size() || truth.empty())
        throw std::invalid_argument("oracle: label vectors must be non-empty and equal-sized");
    std::map<std::pair<int, int>, long long> joint;
    for (std::size_t i = 0; i < truth.size(); ++i) joint[{truth[i], pred[i]}]++;
    return joint;
}

std::map<int, long long> marginal(const std::vector<int>& labels) {
    std::map<int, long long> m;
    for (int l : labels) m[l]++;
    return m;
}

bool relabeling(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (ab.count(a[i]) && ab[a[i]] != b[i]) return false;
        if (ba.count(b[i]) && ba[b[i]] != a[i]) return false;
        ab[a[i]] = b[i];
        ba[b[i]] = a[i];
    }
    return true;
}

}  // namespace

double f_star(const std::vector<int>& truth, const std::vector<int>& pred) {
    const auto joint = joint_counts(truth, pred);
    const auto classes = marginal(truth);
    const auto clusters = marginal(pred);
    const double n = static_cast<double>(truth.size());
    double total = 0.0;
    for (const auto& [l, nl] : classes) {
        double best = 0.0;
        for (const auto& [i, ni] : clusters) {
            const auto it = joint.find({l, i});
            const long long overlap = it == joint.end() ? 0 : it->second;
            // harmonic mean of precision overlap/ni and recall overlap/nl
            if (overlap > 0) {
                const double prec = static_cast<double>(overlap) / static_cast<double>(ni);
                const double rec = static_cast<double>(overlap) / static_cast<double>(nl);
                best = std::max(best, 2.0 * prec * rec / (prec + rec));
            }
        }
        total += static_cast<double>(nl) / n * best;
    }
    return total;
}

double nmi(const std::vector<int>& truth, const std::vector<int>& pred) {
    const auto joint = joint_counts(truth, pred);
    const auto classes = marginal(truth);
    const auto clusters = marginal(pred);
    const double n = static_cast<double>(truth.size());
    double mi = 0.0;
    for (const auto& [key, c] : joint) {
        const double pxy = static_cast<double>(c) / n;
        const double px = static_cast<double>(classes.at(key.first)) / n;
        const double py = static_cast<double>(clusters.at(key.second)) / n;
        mi += pxy * std::log(pxy / (px * py));
    }
    double hx = 0.0, hy = 0.0;
    for (const auto& [_, c] : classes) {
        const double p = static_cast<double>(c) / n;
        hx -= p * std::log(p);
    }
    for (const auto& [_, c] : clusters) {
        const double p = static_cast<double>(c) / n;
        hy -= p * std::log(p);
    }
    if (hx <= 0.0 || hy <= 0.0) return relabeling(truth, pred) ? 1.0 : 0.0;
    return mi / std::sqrt(hx * hy);
}

double ari(const std::vector<int>& truth, const std::vector<int>& pred) {
    const std::size_t n = truth.size();
    if (pred.size() != n || n == 0)
        throw std::invalid_argument("oracle: label vectors must be non-empty and equal-sized");
    // count agreeing pairs directly
    long long both = 0, same_truth = 0, same_pred = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool st = truth[i] == truth[j];
            const bool sp = pred[i] == pred[j];
            both += st && sp;
            same_truth += st;
            same_pred += sp;
            ++total;
        }
    }
    const double expected = total > 0
                                ? static_cast<double>(same_truth) * static_cast<double>(same_pred) /
                                      static_cast<double>(total)
                                : 0.0;
    const double max_index =
        (static_cast<double>(same_truth) + static_cast<double>(same_pred)) / 2.0 - expected;
    if (total == 0 || std::abs(max_index) < 1e-12) return relabeling(truth, pred) ? 1.0 : 0.0;
    return (static_cast<double>(both) - expected) / max_index;
}

double merge_objective(const Matrix& v, const std::vector<int>& pair_a,
                       const std::vector<int>& pair_b, const std::vector<double>& w, double gamma,
                       const Matrix& mu) {
    double fid = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) {
        for (std::size_t j = 0; j < v.cols(); ++j) {
            const double d = mu(i, j) - v(i, j);
            fid += d * d;
        }
    }
    double pen = 0.0;
    for (std::size_t l = 0; l < pair_a.size(); ++l) {
        if (w[l] <= 0.0) continue;
        double d2 = 0.0;
        for (std::size_t j = 0; j < v.cols(); ++j) {
            const double d = mu(static_cast<std::size_t>(pair_a[l]), j) -
                             mu(static_cast<std::size_t>(pair_b[l]), j);
            d2 += d * d;
        }
        pen += w[l] * std::sqrt(d2);
    }
    return 0.5 * fid + gamma * pen;
}

SubgradientResult merge_subgradient(const Matrix& v, const std::vector<int>& pair_a,
                                    const std::vector<int>& pair_b, const std::vector<double>& w,
                                    double gamma, long iterations) {
    const std::size_t m = v.rows(), p = v.cols();
    Matrix mu = v;
    SubgradientResult best{mu, merge_objective(v, pair_a, pair_b, w, gamma, mu)};
    Matrix grad(m, p);
    for (long t = 1; t <= iterations; ++t) {
        // subgradient: (mu_i - v_i) + gamma * sum over incident pairs of the
        // unit difference vector (0 at kinks)
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < p; ++j) grad(i, j) = mu(i, j) - v(i, j);
        for (std::size_t l = 0; l < pair_a.size(); ++l) {
            if (w[l] <= 0.0) continue;
            const std::size_t a = static_cast<std::size_t>(pair_a[l]);
            const std::size_t b = static_cast<std::size_t>(pair_b[l]);
            double d2 = 0.0;
            for (std::size_t j = 0; j < p; ++j) {
                const double d = mu(a, j) - mu(b, j);
                d2 += d * d;
            }
            const double norm = std::sqrt(d2);
            if (norm <= 0.0) continue;
            const double c = gamma * w[l] / norm;
            for (std::size_t j = 0; j < p; ++j) {
                const double d = mu(a, j) - mu(b, j);
                grad(a, j) += c * d;
                grad(b, j) -= c * d;
            }
        }
        // step rule for 1-strongly-convex objectives
        const double step = 2.0 / (static_cast<double>(t) + 1.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < p; ++j) mu(i, j) -= step * grad(i, j);
        const double obj = merge_objective(v, pair_a, pair_b, w, gamma, mu);
        if (obj < best.objective) {
            best.objective = obj;
            best.mu = mu;
        }
    }
    return best;
}

}  // namespace mckm::oracle
