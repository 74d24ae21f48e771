#include "motionforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "motionforge/kernels.hpp"

namespace mforge {

double frame_distance(const Pose& a, const Pose& b, const Skeleton& skeleton) {
    if (a.joint_angles.size() != b.joint_angles.size() ||
        static_cast<int>(a.joint_angles.size()) != skeleton.angle_count())
        throw std::runtime_error("frame_distance: pose width mismatch");
    // root rotation occupies the first angle triple; skip it along with the
    // root translation
    std::size_t n = a.joint_angles.size();
    if (n <= 3) return 0.0;
    return std::sqrt(
        kernels::sum_sq_wrapped_diff(a.joint_angles.data() + 3, b.joint_angles.data() + 3, n - 3));
}

DistanceMatrix distance_matrix(const Motion& a, const Motion& b, const Skeleton& skeleton) {
    DistanceMatrix m;
    m.rows = a.frame_count();
    m.cols = b.frame_count();
    m.values.resize(static_cast<std::size_t>(m.rows) * m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            m.values[i * m.cols + j] = frame_distance(a.frames[i], b.frames[j], skeleton);
    return m;
}

double dtw(const Motion& a, const Motion& b, const Skeleton& skeleton) {
    if (a.frames.empty() || b.frames.empty())
        throw std::runtime_error("dtw requires non-empty motions");

    DistanceMatrix cost = distance_matrix(a, b, skeleton);
    int n = cost.rows, m = cost.cols;
    const double inf = std::numeric_limits<double>::infinity();

    // rolling rows of the cumulative-cost table
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (int j = 1; j <= m; ++j)
            cur[j] = cost(i - 1, j - 1) + std::min({prev[j - 1], prev[j], cur[j - 1]});
        std::swap(prev, cur);
    }
    return prev[m];
}

MinDtwResult min_dtw(const std::vector<Motion>& test_set, const std::vector<Motion>& synth_set,
                     const Skeleton& skeleton) {
    if (test_set.empty() || synth_set.empty())
        throw std::runtime_error("min_dtw requires non-empty sets");

    MinDtwResult result;
    result.per_test.reserve(test_set.size());
    result.nearest.reserve(test_set.size());
    double total = 0.0;
    for (const Motion& t : test_set) {
        double best = std::numeric_limits<double>::infinity();
        int best_idx = 0;
        for (std::size_t s = 0; s < synth_set.size(); ++s) {
            double d = dtw(t, synth_set[s], skeleton);
            if (d < best) {
                best = d;
                best_idx = static_cast<int>(s);
            }
        }
        result.per_test.push_back(best);
        result.nearest.push_back(best_idx);
        total += best;
    }
    result.mean = total / static_cast<double>(test_set.size());
    return result;
}

double mmd(const std::vector<Motion>& set_a, const std::vector<Motion>& set_b,
           const Skeleton& skeleton, std::optional<double> bandwidth) {
    if (set_a.empty() || set_b.empty())
        throw std::runtime_error("mmd requires non-empty sets");

    int m = static_cast<int>(set_a.size());
    int n = static_cast<int>(set_b.size());

    // pooled pairwise DTW table
    std::vector<const Motion*> pool;
    pool.reserve(m + n);
    for (const Motion& x : set_a) pool.push_back(&x);
    for (const Motion& x : set_b) pool.push_back(&x);
    int p = m + n;
    std::vector<double> d(static_cast<std::size_t>(p) * p, 0.0);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            double v = dtw(*pool[i], *pool[j], skeleton);
            d[i * p + j] = v;
            d[j * p + i] = v;
        }

    double sigma;
    if (bandwidth) {
        sigma = *bandwidth;
        if (!(sigma > 0.0)) throw std::runtime_error("mmd bandwidth must be positive");
    } else {
        std::vector<double> off;
        off.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j) off.push_back(d[i * p + j]);
        std::nth_element(off.begin(), off.begin() + off.size() / 2, off.end());
        sigma = off.empty() ? 0.0 : off[off.size() / 2];
        if (!(sigma > 0.0))
            throw std::runtime_error(
                "median-heuristic bandwidth is degenerate (all pairwise distances zero); "
                "pass an explicit bandwidth");
    }

    auto kernel = [&](int i, int j) {
        double v = d[i * p + j];
        return std::exp(-(v * v) / (2.0 * sigma * sigma));
    };

    double kaa = 0.0, kbb = 0.0, kab = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) kaa += kernel(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) kbb += kernel(m + i, m + j);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) kab += kernel(i, m + j);

    double est = kaa / (static_cast<double>(m) * m) + kbb / (static_cast<double>(n) * n) -
                 2.0 * kab / (static_cast<double>(m) * n);
    return std::max(est, 0.0);
}

MetricReport score_sets(const std::vector<Motion>& test_set,
                        const std::vector<Motion>& candidate_set, const Skeleton& skeleton,
                        std::optional<double> bandwidth) {
    MinDtwResult md = min_dtw(test_set, candidate_set, skeleton);
    MetricReport report;
    report.min_dtw = md.mean;
    report.per_test = std::move(md.per_test);
    report.nearest = std::move(md.nearest);
    report.mmd = mmd(test_set, candidate_set, skeleton, bandwidth);
    return report;
}

std::vector<double> prediction_error(const Motion& predicted, const Motion& ground_truth,
                                     const Skeleton& skeleton,
                                     const std::vector<double>& horizons_ms) {
    if (predicted.frames.size() != ground_truth.frames.size())
        throw std::runtime_error("prediction_error: frame counts differ");
    if (std::fabs(predicted.frame_time - ground_truth.frame_time) > 1e-12)
        throw std::runtime_error("prediction_error: frame times differ");

    int T = predicted.frame_count();
    std::vector<double> per_frame(T);
    for (int t = 0; t < T; ++t)
        per_frame[t] = frame_distance(predicted.frames[t], ground_truth.frames[t], skeleton);

    std::vector<double> out;
    out.reserve(horizons_ms.size());
    for (double h : horizons_ms) {
        int frames = static_cast<int>(std::lround(h / 1000.0 / predicted.frame_time));
        if (frames < 1 || frames > T)
            throw std::runtime_error("horizon " + std::to_string(h) +
                                     " ms is outside the motion duration");
        double sum = 0.0;
        for (int t = 0; t < frames; ++t) sum += per_frame[t];
        out.push_back(sum / frames);
    }
    return out;
}

}  // namespace mforge
