#include "motionforge/debias.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "motionforge/kernels.hpp"
#include "motionforge/rng.hpp"

namespace mforge {

using nlohmann::json;

std::vector<double> pose_to_vector(const Pose& pose) {
    std::vector<double> v;
    v.reserve(3 + pose.joint_angles.size());
    v.push_back(pose.root_translation.x);
    v.push_back(pose.root_translation.y);
    v.push_back(pose.root_translation.z);
    v.insert(v.end(), pose.joint_angles.begin(), pose.joint_angles.end());
    return v;
}

Pose vector_to_pose(std::span<const double> v) {
    if (v.size() < 3) throw std::runtime_error("pose vector must have at least 3 entries");
    Pose p;
    p.root_translation = {v[0], v[1], v[2]};
    p.joint_angles.assign(v.begin() + 3, v.end());
    return p;
}

namespace {

// In-place Cholesky factorization of an SPD matrix (row-major), then solves
// for each right-hand-side column of B (n x m). Throws on a non-positive
// pivot (rank-deficient normal equations; raise lambda).
void cholesky_solve(std::vector<double>& a, int n, std::vector<double>& b, int m) {
    for (int k = 0; k < n; ++k) {
        double diag = a[k * n + k];
        for (int j = 0; j < k; ++j) diag -= a[k * n + j] * a[k * n + j];
        if (!(diag > 1e-300))
            throw std::runtime_error("normal equations are rank-deficient; increase lambda");
        double lkk = std::sqrt(diag);
        a[k * n + k] = lkk;
        for (int i = k + 1; i < n; ++i) {
            double s = a[i * n + k];
            for (int j = 0; j < k; ++j) s -= a[i * n + j] * a[k * n + j];
            a[i * n + k] = s / lkk;
        }
    }
    // forward then backward substitution per column
    for (int c = 0; c < m; ++c) {
        for (int i = 0; i < n; ++i) {
            double s = b[i * m + c];
            for (int j = 0; j < i; ++j) s -= a[i * n + j] * b[j * m + c];
            b[i * m + c] = s / a[i * n + i];
        }
        for (int i = n - 1; i >= 0; --i) {
            double s = b[i * m + c];
            for (int j = i + 1; j < n; ++j) s -= a[j * n + i] * b[j * m + c];
            b[i * m + c] = s / a[i * n + i];
        }
    }
}

struct FrameTable {
    std::vector<std::vector<double>> x, y;
    std::size_t dim = 0;
};

FrameTable collect_frames(const std::vector<TrainingPair>& pairs) {
    if (pairs.empty()) throw std::runtime_error("fit_debias requires at least one pair");
    FrameTable t;
    for (const TrainingPair& pair : pairs) {
        if (pair.biased.frames.size() != pair.unbiased.frames.size())
            throw std::runtime_error("training pair frame counts differ");
        for (std::size_t f = 0; f < pair.biased.frames.size(); ++f) {
            std::vector<double> xv = pose_to_vector(pair.biased.frames[f]);
            std::vector<double> yv = pose_to_vector(pair.unbiased.frames[f]);
            if (t.dim == 0) t.dim = xv.size();
            if (xv.size() != t.dim || yv.size() != t.dim)
                throw std::runtime_error("training pair pose dimensions differ");
            for (double v : xv)
                if (!std::isfinite(v)) throw std::runtime_error("non-finite biased frame");
            for (double v : yv)
                if (!std::isfinite(v)) throw std::runtime_error("non-finite unbiased frame");
            t.x.push_back(std::move(xv));
            t.y.push_back(std::move(yv));
        }
    }
    if (t.x.empty()) throw std::runtime_error("fit_debias requires at least one frame");
    return t;
}

std::vector<double> column_mean(const std::vector<std::vector<double>>& rows, std::size_t dim) {
    std::vector<double> mean(dim, 0.0);
    for (const auto& r : rows) kernels::axpy(1.0, r.data(), mean.data(), dim);
    for (double& m : mean) m /= static_cast<double>(rows.size());
    return mean;
}

DebiasModel fit_affine(const FrameTable& t, double lambda) {
    int d = static_cast<int>(t.dim);
    int n = static_cast<int>(t.x.size());

    std::vector<double> x_mean = column_mean(t.x, t.dim);
    std::vector<double> y_mean = column_mean(t.y, t.dim);

    // G = Xc^T Xc + lambda*I,  C = Xc^T Yc
    std::vector<double> gram(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> cross(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> xc(d), yc(d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) {
            xc[j] = t.x[i][j] - x_mean[j];
            yc[j] = t.y[i][j] - y_mean[j];
        }
        for (int j = 0; j < d; ++j) {
            kernels::axpy(xc[j], xc.data(), &gram[static_cast<std::size_t>(j) * d], d);
            kernels::axpy(xc[j], yc.data(), &cross[static_cast<std::size_t>(j) * d], d);
        }
    }
    for (int j = 0; j < d; ++j) gram[static_cast<std::size_t>(j) * d + j] += lambda;

    cholesky_solve(gram, d, cross, d);  // cross now holds B with Yc ~ Xc B

    DebiasModel model;
    model.kind = DebiasKind::affine;
    model.dim = t.dim;
    model.training_lambda = lambda;
    model.weight.resize(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)  // weight = B^T so that y = weight * x + bias
        for (int j = 0; j < d; ++j)
            model.weight[static_cast<std::size_t>(i) * d + j] = cross[static_cast<std::size_t>(j) * d + i];
    model.bias.resize(d);
    for (int i = 0; i < d; ++i)
        model.bias[i] =
            y_mean[i] - kernels::dot(&model.weight[static_cast<std::size_t>(i) * d], x_mean.data(), d);
    return model;
}

std::vector<double>& param_vector(DebiasModel& m, std::vector<double>& flat) {
    flat.clear();
    flat.insert(flat.end(), m.w1.begin(), m.w1.end());
    flat.insert(flat.end(), m.b1.begin(), m.b1.end());
    flat.insert(flat.end(), m.w2.begin(), m.w2.end());
    flat.insert(flat.end(), m.b2.begin(), m.b2.end());
    return flat;
}

void load_params(DebiasModel& m, const std::vector<double>& flat) {
    std::size_t o = 0;
    std::copy_n(flat.begin() + o, m.w1.size(), m.w1.begin());
    o += m.w1.size();
    std::copy_n(flat.begin() + o, m.b1.size(), m.b1.begin());
    o += m.b1.size();
    std::copy_n(flat.begin() + o, m.w2.size(), m.w2.begin());
    o += m.w2.size();
    std::copy_n(flat.begin() + o, m.b2.size(), m.b2.begin());
}

}  // namespace

double hidden_layer_loss(const DebiasModel& model, const std::vector<std::vector<double>>& x,
                         const std::vector<std::vector<double>>& y,
                         std::vector<double>* gradient) {
    if (model.kind != DebiasKind::one_hidden_layer)
        throw std::runtime_error("hidden_layer_loss requires a one-hidden-layer model");
    std::size_t d = model.dim, h = model.hidden, n = x.size();
    if (n == 0 || y.size() != n) throw std::runtime_error("hidden_layer_loss: bad frame sets");

    std::size_t gw1 = 0, gb1 = h * d, gw2 = gb1 + h, gb2 = gw2 + d * h;
    if (gradient) gradient->assign(gb2 + d, 0.0);

    std::vector<double> xs(d), ys(d), pre(h), act(h), out(d), err(d), dh(h);
    double loss = 0.0;
    double scale = 2.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            xs[j] = (x[i][j] - model.x_mean[j]) / model.x_std[j];
            ys[j] = (y[i][j] - model.y_mean[j]) / model.y_std[j];
        }
        for (std::size_t k = 0; k < h; ++k) {
            pre[k] = model.b1[k] + kernels::dot(&model.w1[k * d], xs.data(), d);
            act[k] = pre[k] > 0.0 ? pre[k] : 0.0;
        }
        for (std::size_t j = 0; j < d; ++j) {
            out[j] = model.b2[j] + kernels::dot(&model.w2[j * h], act.data(), h);
            err[j] = out[j] - ys[j];
            loss += err[j] * err[j];
        }
        if (gradient) {
            std::vector<double>& g = *gradient;
            for (std::size_t j = 0; j < d; ++j) {
                double e = scale * err[j];
                g[gb2 + j] += e;
                kernels::axpy(e, act.data(), &g[gw2 + j * h], h);
            }
            for (std::size_t k = 0; k < h; ++k) {
                double s = 0.0;
                for (std::size_t j = 0; j < d; ++j) s += model.w2[j * h + k] * scale * err[j];
                dh[k] = pre[k] > 0.0 ? s : 0.0;
            }
            for (std::size_t k = 0; k < h; ++k) {
                g[gb1 + k] += dh[k];
                kernels::axpy(dh[k], xs.data(), &g[gw1 + k * d], d);
            }
        }
    }
    return loss / static_cast<double>(n);
}

namespace {

DebiasFitResult fit_hidden(const FrameTable& t, const DebiasFitOptions& options) {
    std::size_t d = t.dim, h = options.hidden;
    if (h == 0) throw std::runtime_error("hidden width must be positive");

    DebiasModel model;
    model.kind = DebiasKind::one_hidden_layer;
    model.dim = d;
    model.hidden = h;
    model.training_lambda = options.lambda;

    model.x_mean = column_mean(t.x, d);
    model.y_mean = column_mean(t.y, d);
    auto column_std = [&](const std::vector<std::vector<double>>& rows,
                          const std::vector<double>& mean) {
        std::vector<double> s(d, 0.0);
        for (const auto& r : rows)
            for (std::size_t j = 0; j < d; ++j) {
                double c = r[j] - mean[j];
                s[j] += c * c;
            }
        for (std::size_t j = 0; j < d; ++j)
            s[j] = std::max(std::sqrt(s[j] / static_cast<double>(rows.size())), 1e-8);
        return s;
    };
    model.x_std = column_std(t.x, model.x_mean);
    model.y_std = column_std(t.y, model.y_mean);

    Rng rng(options.seed);
    model.w1.resize(h * d);
    model.b1.assign(h, 0.0);
    model.w2.resize(d * h);
    model.b2.assign(d, 0.0);
    double s1 = 1.0 / std::sqrt(static_cast<double>(d));
    double s2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (double& w : model.w1) w = s1 * rng.normal();
    for (double& w : model.w2) w = s2 * rng.normal();

    DebiasFitResult result;
    std::vector<double> params, grad, trial_params;
    param_vector(model, params);

    double loss = hidden_layer_loss(model, t.x, t.y, &grad);
    result.loss_trace.push_back(loss);
    double step = options.initial_step;

    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        bool accepted = false;
        for (int tries = 0; tries < 40; ++tries) {
            trial_params = params;
            for (std::size_t i = 0; i < trial_params.size(); ++i)
                trial_params[i] -= step * grad[i];
            load_params(model, trial_params);
            double trial_loss = hidden_layer_loss(model, t.x, t.y, nullptr);
            if (trial_loss <= loss) {
                params = trial_params;
                loss = trial_loss;
                result.loss_trace.push_back(loss);
                step *= 1.2;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent direction left at any step size
        load_params(model, params);
        hidden_layer_loss(model, t.x, t.y, &grad);
    }
    load_params(model, params);
    result.model = std::move(model);
    return result;
}

}  // namespace

DebiasFitResult fit_debias(const std::vector<TrainingPair>& pairs,
                           const DebiasFitOptions& options) {
    if (options.lambda < 0.0) throw std::runtime_error("lambda must be non-negative");
    FrameTable table = collect_frames(pairs);
    if (options.kind == DebiasKind::affine) {
        DebiasFitResult result;
        result.model = fit_affine(table, options.lambda);
        return result;
    }
    return fit_hidden(table, options);
}

std::vector<double> DebiasModel::apply(std::span<const double> x) const {
    if (x.size() != dim) throw std::runtime_error("debias model dimension mismatch");
    std::vector<double> y(dim);
    if (kind == DebiasKind::affine) {
        for (std::size_t i = 0; i < dim; ++i)
            y[i] = bias[i] + kernels::dot(&weight[i * dim], x.data(), dim);
        return y;
    }
    std::vector<double> xs(dim), act(hidden);
    for (std::size_t j = 0; j < dim; ++j) xs[j] = (x[j] - x_mean[j]) / x_std[j];
    for (std::size_t k = 0; k < hidden; ++k) {
        double pre = b1[k] + kernels::dot(&w1[k * dim], xs.data(), dim);
        act[k] = pre > 0.0 ? pre : 0.0;
    }
    for (std::size_t i = 0; i < dim; ++i)
        y[i] = y_mean[i] + y_std[i] * (b2[i] + kernels::dot(&w2[i * hidden], act.data(), hidden));
    return y;
}

Motion apply_debias(const DebiasModel& model, const Motion& motion) {
    Motion out;
    out.frame_time = motion.frame_time;
    out.action_label = motion.action_label;
    out.frames.reserve(motion.frames.size());
    for (const Pose& frame : motion.frames) {
        std::vector<double> x = pose_to_vector(frame);
        if (x.size() != model.dim)
            throw std::runtime_error("motion pose dimension " + std::to_string(x.size()) +
                                     " does not match debias model dimension " +
                                     std::to_string(model.dim));
        out.frames.push_back(vector_to_pose(model.apply(x)));
    }
    return out;
}

double gradient_check(const DebiasModel& model, const std::vector<std::vector<double>>& x,
                      const std::vector<std::vector<double>>& y) {
    DebiasModel probe = model;
    std::vector<double> params, analytic;
    param_vector(probe, params);
    hidden_layer_loss(probe, x, y, &analytic);

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        double saved = params[i];
        params[i] = saved + h;
        load_params(probe, params);
        double lp = hidden_layer_loss(probe, x, y, nullptr);
        params[i] = saved - h;
        load_params(probe, params);
        double lm = hidden_layer_loss(probe, x, y, nullptr);
        params[i] = saved;

        double numeric = (lp - lm) / (2.0 * h);
        double rel = std::fabs(analytic[i] - numeric) /
                     std::max({1.0, std::fabs(analytic[i]), std::fabs(numeric)});
        worst = std::max(worst, rel);
    }
    load_params(probe, params);
    return worst;
}

// ---------------------------------------------------------------------------
// serialization

namespace {
const char* kind_name(DebiasKind k) {
    return k == DebiasKind::affine ? "affine" : "one_hidden_layer";
}
DebiasKind kind_from_name(const std::string& s) {
    if (s == "affine") return DebiasKind::affine;
    if (s == "one_hidden_layer") return DebiasKind::one_hidden_layer;
    throw std::runtime_error("unknown debias kind '" + s + "'");
}
}  // namespace

void DebiasModel::save(const std::string& path) const {
    json doc{{"kind", kind_name(kind)},
             {"dim", dim},
             {"hidden", hidden},
             {"lambda", training_lambda}};
    if (kind == DebiasKind::affine) {
        doc["weight"] = weight;
        doc["bias"] = bias;
    } else {
        doc["w1"] = w1;
        doc["b1"] = b1;
        doc["w2"] = w2;
        doc["b2"] = b2;
        doc["x_mean"] = x_mean;
        doc["x_std"] = x_std;
        doc["y_mean"] = y_mean;
        doc["y_std"] = y_std;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file '" + path + "'");
    out << doc.dump(2) << "\n";
}

DebiasModel DebiasModel::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    json doc = json::parse(in);

    DebiasModel m;
    m.kind = kind_from_name(doc.at("kind").get<std::string>());
    m.dim = doc.at("dim").get<std::size_t>();
    m.hidden = doc.at("hidden").get<std::size_t>();
    m.training_lambda = doc.at("lambda").get<double>();
    auto vec = [&](const char* key) { return doc.at(key).get<std::vector<double>>(); };
    if (m.kind == DebiasKind::affine) {
        m.weight = vec("weight");
        m.bias = vec("bias");
        if (m.weight.size() != m.dim * m.dim || m.bias.size() != m.dim)
            throw std::runtime_error("affine model shapes inconsistent in '" + path + "'");
    } else {
        m.w1 = vec("w1");
        m.b1 = vec("b1");
        m.w2 = vec("w2");
        m.b2 = vec("b2");
        m.x_mean = vec("x_mean");
        m.x_std = vec("x_std");
        m.y_mean = vec("y_mean");
        m.y_std = vec("y_std");
        if (m.w1.size() != m.hidden * m.dim || m.w2.size() != m.dim * m.hidden ||
            m.b1.size() != m.hidden || m.b2.size() != m.dim || m.x_mean.size() != m.dim ||
            m.x_std.size() != m.dim || m.y_mean.size() != m.dim || m.y_std.size() != m.dim)
            throw std::runtime_error("hidden-layer model shapes inconsistent in '" + path + "'");
    }
    return m;
}

}  // namespace mforge
