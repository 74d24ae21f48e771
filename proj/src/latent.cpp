#include "motionforge/latent.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "motionforge/kernels.hpp"

namespace mforge {

using nlohmann::json;

void validate_embeddings(const std::vector<LatentEmbedding>& embeddings) {
    if (embeddings.empty()) throw std::runtime_error("embedding set is empty");
    std::size_t d = embeddings.front().mu.size();
    for (const LatentEmbedding& e : embeddings) {
        if (e.mu.size() != d || e.sigma2.size() != d)
            throw std::runtime_error("embedding '" + e.motion_id + "' has mismatched dimension");
        for (double m : e.mu)
            if (!std::isfinite(m))
                throw std::runtime_error("embedding '" + e.motion_id + "' has non-finite mu");
        for (double s : e.sigma2)
            if (!(s > 0.0) || !std::isfinite(s))
                throw std::runtime_error("embedding '" + e.motion_id + "' has non-positive variance");
    }
}

std::vector<LatentEmbedding> load_embeddings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embeddings file '" + path + "'");
    json doc = json::parse(in);
    if (!doc.is_array()) throw std::runtime_error("embeddings file must be a JSON array");

    std::vector<LatentEmbedding> out;
    out.reserve(doc.size());
    for (const json& rec : doc) {
        LatentEmbedding e;
        e.motion_id = rec.at("motion_id").get<std::string>();
        e.mu = rec.at("mu").get<std::vector<double>>();
        e.sigma2 = rec.at("sigma2").get<std::vector<double>>();
        out.push_back(std::move(e));
    }
    validate_embeddings(out);
    return out;
}

void save_embeddings(const std::string& path, const std::vector<LatentEmbedding>& embeddings) {
    json doc = json::array();
    for (const LatentEmbedding& e : embeddings)
        doc.push_back({{"motion_id", e.motion_id}, {"mu", e.mu}, {"sigma2", e.sigma2}});
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write embeddings file '" + path + "'");
    out << doc.dump(2) << "\n";
}

std::vector<int> ClusterModel::members_of(int cluster) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == cluster) out.push_back(static_cast<int>(i));
    return out;
}

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    return kernels::sum_sq_diff(a.data(), b.data(), a.size());
}

int nearest_centroid(const std::vector<double>& x, const std::vector<std::vector<double>>& centroids) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        double d = sq_dist(x, centroids[c]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(c);
        }
    }
    return best;
}

}  // namespace

ClusterModel kmeans_fit(const std::vector<LatentEmbedding>& embeddings, int n_c,
                        std::uint64_t seed) {
    validate_embeddings(embeddings);
    int n = static_cast<int>(embeddings.size());
    if (n_c < 1 || n_c > n)
        throw std::runtime_error("cluster count must lie in [1, number of embeddings]");

    std::size_t d = embeddings.front().mu.size();
    Rng rng(seed);

    ClusterModel model;
    model.dim = d;

    // k-means++ seeding
    model.centroids.push_back(embeddings[rng.uniform_index(n)].mu);
    std::vector<double> min_d2(n);
    while (static_cast<int>(model.centroids.size()) < n_c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : model.centroids)
                best = std::min(best, sq_dist(embeddings[i].mu, c));
            min_d2[i] = best;
            total += best;
        }
        int pick;
        if (total <= 0.0) {
            pick = static_cast<int>(rng.uniform_index(n));  // all points coincide
        } else {
            double u = rng.uniform01() * total;
            double acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += min_d2[i];
                if (u < acc) {
                    pick = i;
                    break;
                }
            }
        }
        model.centroids.push_back(embeddings[pick].mu);
    }

    // Lloyd iterations
    model.assignments.assign(n, -1);
    const int max_iters = 300;
    for (int iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int a = nearest_centroid(embeddings[i].mu, model.centroids);
            if (a != model.assignments[i]) {
                model.assignments[i] = a;
                changed = true;
            }
        }

        // re-seed empty clusters to the point farthest from its centroid
        for (int c = 0; c < n_c; ++c) {
            bool empty = true;
            for (int a : model.assignments)
                if (a == c) { empty = false; break; }
            if (!empty) continue;
            int far = 0;
            double far_d = -1.0;
            for (int i = 0; i < n; ++i) {
                double dd = sq_dist(embeddings[i].mu, model.centroids[model.assignments[i]]);
                if (dd > far_d) {
                    far_d = dd;
                    far = i;
                }
            }
            model.centroids[c] = embeddings[far].mu;
            model.assignments[far] = c;
            changed = true;
        }

        // centroid update
        std::vector<std::vector<double>> sums(n_c, std::vector<double>(d, 0.0));
        std::vector<int> counts(n_c, 0);
        for (int i = 0; i < n; ++i) {
            kernels::axpy(1.0, embeddings[i].mu.data(), sums[model.assignments[i]].data(), d);
            ++counts[model.assignments[i]];
        }
        for (int c = 0; c < n_c; ++c)
            if (counts[c] > 0)
                for (std::size_t k = 0; k < d; ++k)
                    model.centroids[c][k] = sums[c][k] / counts[c];

        double sse = 0.0;
        for (int i = 0; i < n; ++i)
            sse += sq_dist(embeddings[i].mu, model.centroids[model.assignments[i]]);
        model.sse_trace.push_back(sse);

        if (!changed) break;
    }
    return model;
}

std::vector<double> sample_from_cluster(const std::vector<LatentEmbedding>& embeddings,
                                        const ClusterModel& model, int cluster, int n_s,
                                        Rng& rng) {
    if (n_s < 1) throw std::runtime_error("n_s must be at least 1");
    std::vector<int> members = model.members_of(cluster);
    if (members.empty()) throw std::runtime_error("cluster has no members");

    std::vector<int> chosen;
    chosen.reserve(n_s);
    if (static_cast<int>(members.size()) < n_s) {
        for (int i = 0; i < n_s; ++i)
            chosen.push_back(members[rng.uniform_index(members.size())]);
    } else {
        // partial Fisher-Yates: first n_s entries are a uniform subset
        std::vector<int> pool = members;
        for (int i = 0; i < n_s; ++i) {
            std::size_t j = i + rng.uniform_index(pool.size() - i);
            std::swap(pool[i], pool[j]);
            chosen.push_back(pool[i]);
        }
    }

    std::size_t d = model.dim;
    std::vector<double> mu_bar(d, 0.0), var_bar(d, 0.0);
    for (int idx : chosen) {
        kernels::axpy(1.0, embeddings[idx].mu.data(), mu_bar.data(), d);
        kernels::axpy(1.0, embeddings[idx].sigma2.data(), var_bar.data(), d);
    }
    std::vector<double> z(d);
    for (std::size_t k = 0; k < d; ++k) {
        double m = mu_bar[k] / n_s;
        double v = var_bar[k] / n_s;
        z[k] = m + std::sqrt(v) * rng.normal();
    }
    return z;
}

SnsDraw sample_near_samples(const std::vector<LatentEmbedding>& embeddings,
                            const ClusterModel& model, int n_s, Rng& rng) {
    if (embeddings.empty()) throw std::runtime_error("embedding set is empty");
    int cluster = static_cast<int>(rng.uniform_index(model.cluster_count()));
    return {sample_from_cluster(embeddings, model, cluster, n_s, rng), cluster};
}

LinearMotionDecoder::LinearMotionDecoder(double frame_time, std::size_t pose_dim,
                                         std::size_t latent_dim,
                                         std::vector<std::vector<double>> base_frames,
                                         std::vector<double> weight)
    : frame_time_(frame_time),
      pose_dim_(pose_dim),
      latent_dim_(latent_dim),
      base_frames_(std::move(base_frames)),
      weight_(std::move(weight)) {
    if (pose_dim_ < 3) throw std::runtime_error("decoder pose dimension must include root translation");
    if (base_frames_.empty()) throw std::runtime_error("decoder needs at least one base frame");
    for (const auto& f : base_frames_)
        if (f.size() != pose_dim_) throw std::runtime_error("decoder base frame width mismatch");
    if (weight_.size() != pose_dim_ * latent_dim_)
        throw std::runtime_error("decoder weight shape mismatch");
}

Motion LinearMotionDecoder::decode(std::span<const double> z) const {
    if (z.size() != latent_dim_)
        throw std::runtime_error("latent dimension mismatch: decoder expects " +
                                 std::to_string(latent_dim_) + ", got " + std::to_string(z.size()));
    Motion motion;
    motion.frame_time = frame_time_;
    motion.frames.reserve(base_frames_.size());
    for (const auto& base : base_frames_) {
        std::vector<double> vec = base;
        for (std::size_t i = 0; i < pose_dim_; ++i)
            vec[i] += kernels::dot(&weight_[i * latent_dim_], z.data(), latent_dim_);
        Pose pose;
        pose.root_translation = {vec[0], vec[1], vec[2]};
        pose.joint_angles.assign(vec.begin() + 3, vec.end());
        motion.frames.push_back(std::move(pose));
    }
    return motion;
}

LinearMotionDecoder LinearMotionDecoder::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open decoder file '" + path + "'");
    json doc = json::parse(in);
    return LinearMotionDecoder(doc.at("frame_time").get<double>(),
                               doc.at("pose_dim").get<std::size_t>(),
                               doc.at("latent_dim").get<std::size_t>(),
                               doc.at("base_frames").get<std::vector<std::vector<double>>>(),
                               doc.at("weight").get<std::vector<double>>());
}

void LinearMotionDecoder::save(const std::string& path) const {
    json doc{{"frame_time", frame_time_},
             {"pose_dim", pose_dim_},
             {"latent_dim", latent_dim_},
             {"base_frames", base_frames_},
             {"weight", weight_}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write decoder file '" + path + "'");
    out << doc.dump(2) << "\n";
}

std::vector<Motion> generate_batch(const std::vector<LatentEmbedding>& embeddings,
                                   const MotionDecoder& decoder, int n_c, int n_s, int count,
                                   std::uint64_t seed, bool reuse_moments) {
    if (count < 0) throw std::runtime_error("batch count must be non-negative");
    if (count == 0) return {};
    validate_embeddings(embeddings);
    if (decoder.latent_dim() != embeddings.front().mu.size())
        throw std::runtime_error("decoder latent dimension does not match embeddings");

    ClusterModel model = kmeans_fit(embeddings, n_c, derive_seed(seed, 0));
    std::size_t d = embeddings.front().mu.size();

    // one member subset per cluster, shared by all draws
    std::vector<std::vector<double>> shared_mu(model.cluster_count());
    std::vector<std::vector<double>> shared_sigma(model.cluster_count());
    if (reuse_moments) {
        Rng rng(derive_seed(seed, 0xF1));
        for (int c = 0; c < model.cluster_count(); ++c) {
            std::vector<int> members = model.members_of(c);
            std::vector<double> mu_bar(d, 0.0), var_bar(d, 0.0);
            std::vector<int> chosen;
            if (static_cast<int>(members.size()) < n_s) {
                for (int i = 0; i < n_s; ++i)
                    chosen.push_back(members[rng.uniform_index(members.size())]);
            } else {
                std::vector<int> pool = members;
                for (int i = 0; i < n_s; ++i) {
                    std::size_t j = i + rng.uniform_index(pool.size() - i);
                    std::swap(pool[i], pool[j]);
                    chosen.push_back(pool[i]);
                }
            }
            for (int idx : chosen) {
                kernels::axpy(1.0, embeddings[idx].mu.data(), mu_bar.data(), d);
                kernels::axpy(1.0, embeddings[idx].sigma2.data(), var_bar.data(), d);
            }
            for (std::size_t k = 0; k < d; ++k) {
                mu_bar[k] /= n_s;
                var_bar[k] = std::sqrt(var_bar[k] / n_s);
            }
            shared_mu[c] = std::move(mu_bar);
            shared_sigma[c] = std::move(var_bar);
        }
    }

    std::vector<Motion> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Rng rng(derive_seed(seed, 1 + static_cast<std::uint64_t>(i)));
        if (reuse_moments) {
            int cluster = static_cast<int>(rng.uniform_index(model.cluster_count()));
            std::vector<double> z(d);
            for (std::size_t k = 0; k < d; ++k)
                z[k] = rng.normal(shared_mu[cluster][k], shared_sigma[cluster][k]);
            out.push_back(decoder.decode(z));
        } else {
            SnsDraw draw = sample_near_samples(embeddings, model, n_s, rng);
            out.push_back(decoder.decode(draw.z));
        }
    }
    return out;
}

}  // namespace mforge
