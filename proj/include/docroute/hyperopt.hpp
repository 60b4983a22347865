#ifndef DOCROUTE_HYPEROPT_HPP_
#define DOCROUTE_HYPEROPT_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "classifiers/spec.hpp"
#include "error.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace docroute {

enum class Scale { linear, log };

struct ContinuousParam {
    double lo = 0.0;
    double hi = 1.0;
    Scale scale = Scale::linear;
};

struct IntegerParam {
    long long lo = 0;
    long long hi = 1;
    Scale scale = Scale::linear;
};

struct CategoricalParam {
    std::vector<std::string> options;
};

struct ParamDef {
    std::string name;
    std::variant<ContinuousParam, IntegerParam, CategoricalParam> domain;
};

using ParamValue = std::variant<double, long long, std::string>;
using Assignment = std::map<std::string, ParamValue>;

struct SearchSpace {
    std::vector<ParamDef> params;

    void validate() const {
        if (params.empty()) throw InvalidArgument("search space has no parameters");
        std::set<std::string> names;
        for (const auto& p : params) {
            if (!names.insert(p.name).second) throw InvalidArgument("duplicate parameter " + p.name);
            std::visit(
                [&](const auto& d) {
                    using D = std::decay_t<decltype(d)>;
                    if constexpr (std::is_same_v<D, CategoricalParam>) {
                        if (d.options.empty()) throw InvalidArgument(p.name + ": no options");
                    } else {
                        if (!(d.lo < d.hi)) throw InvalidArgument(p.name + ": lower bound must be below upper bound");
                        if (d.scale == Scale::log && !(d.lo > 0))
                            throw InvalidArgument(p.name + ": log scale needs a positive lower bound");
                    }
                },
                p.domain);
        }
    }

    /// Width of the encoded vector: one coordinate per numeric parameter,
    /// one per option for categoricals.
    std::size_t encoded_dim() const {
        std::size_t d = 0;
        for (const auto& p : params)
            d += std::holds_alternative<CategoricalParam>(p.domain) ? std::get<CategoricalParam>(p.domain).options.size()
                                                                     : 1;
        return d;
    }
};

inline double as_double(const ParamValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    if (const auto* i = std::get_if<long long>(&v)) return static_cast<double>(*i);
    throw InvalidArgument("parameter is categorical, not numeric");
}

inline long long as_integer(const ParamValue& v) {
    if (const auto* i = std::get_if<long long>(&v)) return *i;
    throw InvalidArgument("parameter is not an integer");
}

inline const std::string& as_string(const ParamValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    throw InvalidArgument("parameter is not categorical");
}

/// True when every parameter is present and within its bounds or options.
inline bool within_bounds(const SearchSpace& space, const Assignment& a) {
    for (const auto& p : space.params) {
        const auto it = a.find(p.name);
        if (it == a.end()) return false;
        const bool ok = std::visit(
            [&](const auto& d) {
                using D = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<D, ContinuousParam>) {
                    const auto* v = std::get_if<double>(&it->second);
                    return v && *v >= d.lo && *v <= d.hi;
                } else if constexpr (std::is_same_v<D, IntegerParam>) {
                    const auto* v = std::get_if<long long>(&it->second);
                    return v && *v >= d.lo && *v <= d.hi;
                } else {
                    const auto* v = std::get_if<std::string>(&it->second);
                    return v && std::find(d.options.begin(), d.options.end(), *v) != d.options.end();
                }
            },
            p.domain);
        if (!ok) return false;
    }
    return true;
}

namespace detail {

inline double to_unit(double v, double lo, double hi, Scale s) {
    if (s == Scale::log) return (std::log(v) - std::log(lo)) / (std::log(hi) - std::log(lo));
    return (v - lo) / (hi - lo);
}

inline double from_unit(double u, double lo, double hi, Scale s) {
    u = std::clamp(u, 0.0, 1.0);
    if (s == Scale::log) return std::clamp(std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo))), lo, hi);
    return std::clamp(lo + u * (hi - lo), lo, hi);
}

}  // namespace detail

/// Encoded point in [0,1]^D: numeric parameters scaled to the unit interval
/// (log scale where marked), categoricals one-hot.
inline Eigen::VectorXd encode(const SearchSpace& space, const Assignment& a) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(space.encoded_dim()));
    Eigen::Index k = 0;
    for (const auto& p : space.params) {
        const auto& v = a.at(p.name);
        std::visit(
            [&](const auto& d) {
                using D = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<D, CategoricalParam>) {
                    for (const auto& o : d.options) x[k++] = o == as_string(v) ? 1.0 : 0.0;
                } else {
                    x[k++] = detail::to_unit(as_double(v), static_cast<double>(d.lo), static_cast<double>(d.hi), d.scale);
                }
            },
            p.domain);
    }
    return x;
}

/// Inverse of encode: integers are rounded, categoricals take the largest coordinate.
inline Assignment decode(const SearchSpace& space, const Eigen::VectorXd& x) {
    Assignment a;
    Eigen::Index k = 0;
    for (const auto& p : space.params) {
        std::visit(
            [&](const auto& d) {
                using D = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<D, ContinuousParam>) {
                    a[p.name] = detail::from_unit(x[k++], d.lo, d.hi, d.scale);
                } else if constexpr (std::is_same_v<D, IntegerParam>) {
                    const double r = detail::from_unit(x[k++], static_cast<double>(d.lo), static_cast<double>(d.hi), d.scale);
                    a[p.name] = std::clamp(static_cast<long long>(std::llround(r)), d.lo, d.hi);
                } else {
                    std::size_t best = 0;
                    for (std::size_t o = 1; o < d.options.size(); ++o)
                        if (x[k + static_cast<Eigen::Index>(o)] > x[k + static_cast<Eigen::Index>(best)]) best = o;
                    a[p.name] = d.options[best];
                    k += static_cast<Eigen::Index>(d.options.size());
                }
            },
            p.domain);
    }
    return a;
}

/// Uniform draw over the space: log-uniform on log-scaled parameters.
inline Assignment sample_uniform(const SearchSpace& space, Rng& rng) {
    Assignment a;
    for (const auto& p : space.params) {
        std::visit(
            [&](const auto& d) {
                using D = std::decay_t<decltype(d)>;
                if constexpr (std::is_same_v<D, ContinuousParam>) {
                    a[p.name] = detail::from_unit(rng.uniform(), d.lo, d.hi, d.scale);
                } else if constexpr (std::is_same_v<D, IntegerParam>) {
                    if (d.scale == Scale::linear) {
                        a[p.name] = rng.integer(d.lo, d.hi);
                    } else {
                        // Log-uniform over [lo - 0.5, hi + 0.5) so the end points keep their share.
                        const double lo = static_cast<double>(d.lo) - 0.5 + 1e-9;
                        const double hi = static_cast<double>(d.hi) + 0.5 - 1e-9;
                        const double r = std::exp(std::log(std::max(lo, 1e-9)) + rng.uniform() * (std::log(hi) - std::log(std::max(lo, 1e-9))));
                        a[p.name] = std::clamp(static_cast<long long>(std::llround(r)), d.lo, d.hi);
                    }
                } else {
                    a[p.name] = d.options[rng.index(d.options.size())];
                }
            },
            p.domain);
    }
    return a;
}

inline nlohmann::ordered_json to_json(const Assignment& a) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : a) std::visit([&](const auto& x) { j[k] = x; }, v);
    return j;
}

inline Assignment assignment_from_json(const nlohmann::json& j) {
    Assignment a;
    for (const auto& [k, v] : j.items()) {
        if (v.is_string()) a[k] = v.get<std::string>();
        else if (v.is_number_integer()) a[k] = v.get<long long>();
        else a[k] = v.get<double>();
    }
    return a;
}

// ---------------------------------------------------------------------------
// Gaussian-process surrogate

/// Zero-mean GP on standardized targets with a squared-exponential kernel
/// exp(-|a - b|^2 / (2 l^2)). l is the median pairwise distance of the
/// observed points; the observation noise is fixed.
class GaussianProcess {
public:
    static constexpr double kNoise = 1e-6;

    GaussianProcess(std::vector<Eigen::VectorXd> x, const std::vector<double>& y) : x_(std::move(x)) {
        const auto n = static_cast<Eigen::Index>(x_.size());
        if (n == 0) throw InvalidArgument("GP needs at least one observation");
        double mean = 0.0;
        for (double v : y) mean += v;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (double v : y) var += (v - mean) * (v - mean);
        var /= static_cast<double>(n);
        mean_ = mean;
        scale_ = var > 0 ? std::sqrt(var) : 1.0;
        y_.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) y_[i] = (y[static_cast<std::size_t>(i)] - mean_) / scale_;

        std::vector<double> dists;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < i; ++j) {
                const double d = (x_[static_cast<std::size_t>(i)] - x_[static_cast<std::size_t>(j)]).norm();
                if (d > 0) dists.push_back(d);
            }
        if (!dists.empty()) {
            std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(dists.size() / 2), dists.end());
            length_ = dists[dists.size() / 2];
        }

        Eigen::MatrixXd k(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(x_[static_cast<std::size_t>(i)], x_[static_cast<std::size_t>(j)]);
        // Duplicate points make K singular; grow the jitter until it factors.
        for (double jitter = kNoise;; jitter *= 10.0) {
            chol_.compute(k + jitter * Eigen::MatrixXd::Identity(n, n));
            if (chol_.info() == Eigen::Success) break;
            if (jitter > 1.0) throw Error("GP kernel matrix is not positive definite");
        }
        alpha_ = chol_.solve(y_);
    }

    double kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
        return std::exp(-(a - b).squaredNorm() / (2.0 * length_ * length_));
    }

    double length_scale() const { return length_; }

    /// Posterior mean and standard deviation in standardized units.
    std::pair<double, double> predict(const Eigen::VectorXd& x) const {
        const auto n = static_cast<Eigen::Index>(x_.size());
        Eigen::VectorXd ks(n);
        for (Eigen::Index i = 0; i < n; ++i) ks[i] = kernel(x, x_[static_cast<std::size_t>(i)]);
        const double mu = ks.dot(alpha_);
        const Eigen::VectorXd v = chol_.matrixL().solve(ks);
        const double var = std::max(1.0 - v.squaredNorm(), 0.0);
        return {mu, std::sqrt(var)};
    }

    double standardize(double y) const { return (y - mean_) / scale_; }

private:
    std::vector<Eigen::VectorXd> x_;
    Eigen::VectorXd y_;
    double mean_ = 0.0;
    double scale_ = 1.0;
    double length_ = 1.0;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_;
};

/// Expected improvement over `best` for a maximization problem.
inline double expected_improvement(double mu, double sigma, double best) {
    if (sigma <= 1e-12) return std::max(mu - best, 0.0);
    const double z = (mu - best) / sigma;
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
    return (mu - best) * cdf + sigma * pdf;
}

// ---------------------------------------------------------------------------
// Search

struct Trial {
    int index = 0;
    Assignment assignment;
    double value = 0.0;
    double duration_s = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
};

struct SearchResult {
    Trial best;
    std::vector<Trial> history;
    SearchSpace space;
};

struct SearchOptions {
    int budget = 50;
    std::uint64_t seed = 0;
    int batch = 1;             // proposals per round (constant liar when > 1)
    int candidates = 1024;     // random acquisition candidates
    int initial = -1;          // random initial design; -1 means max(5, budget / 5)
    std::size_t workers = 1;   // parallel objective calls within a batch
    std::function<void(const Trial&)> on_trial;  // called in trial order
};

/// Objective value for an assignment; the seed is derived per trial.
using Objective = std::function<double(const Assignment&, std::uint64_t seed)>;

inline int initial_design_size(int budget) { return std::max(5, budget / 5); }

namespace detail {

inline std::string assignment_key(const Assignment& a) { return to_json(a).dump(); }

// Best-EI point among random candidates, refined by coordinate perturbation.
inline Assignment propose_ei(const SearchSpace& space, const GaussianProcess& gp, double best,
                             const std::set<std::string>& seen, int n_candidates, Rng& rng) {
    struct Scored {
        double ei;
        Eigen::VectorXd x;
    };
    std::vector<Scored> pool;
    pool.reserve(static_cast<std::size_t>(n_candidates));
    auto score = [&](const Eigen::VectorXd& x) {
        const auto [mu, sd] = gp.predict(x);
        return expected_improvement(mu, sd, best);
    };
    for (int c = 0; c < n_candidates; ++c) {
        const auto x = encode(space, sample_uniform(space, rng));
        pool.push_back({score(x), x});
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) { return a.ei > b.ei; });

    // Local refinement of the top candidates: Gaussian steps on numeric
    // coordinates with a shrinking radius, re-encoded so points stay valid.
    const std::size_t top = std::min<std::size_t>(5, pool.size());
    for (std::size_t t = 0; t < top; ++t) {
        for (double radius : {0.1, 0.05, 0.02, 0.01, 0.005}) {
            for (int step = 0; step < 8; ++step) {
                Eigen::VectorXd x = pool[t].x;
                Eigen::Index k = 0;
                for (const auto& p : space.params) {
                    if (const auto* cat = std::get_if<CategoricalParam>(&p.domain)) {
                        k += static_cast<Eigen::Index>(cat->options.size());
                    } else {
                        x[k] = std::clamp(x[k] + radius * rng.normal(), 0.0, 1.0);
                        ++k;
                    }
                }
                x = encode(space, decode(space, x));
                const double s = score(x);
                if (s > pool[t].ei) pool[t] = {s, x};
            }
        }
    }
    std::stable_sort(pool.begin(), pool.end(), [](const Scored& a, const Scored& b) { return a.ei > b.ei; });
    for (const auto& s : pool) {
        auto a = decode(space, s.x);
        if (!seen.count(assignment_key(a))) return a;
    }
    return decode(space, pool.front().x);
}

// Random point not yet seen, if one is found within a bounded number of draws.
inline Assignment propose_random(const SearchSpace& space, const std::set<std::string>& seen, Rng& rng) {
    Assignment a = sample_uniform(space, rng);
    for (int attempt = 0; attempt < 256 && seen.count(assignment_key(a)); ++attempt) a = sample_uniform(space, rng);
    return a;
}

}  // namespace detail

/// Sequential Bayesian optimization (maximization). The first
/// initial_design_size(budget) trials are uniform random; later trials
/// maximize expected improvement under the GP surrogate. Already evaluated
/// assignments are skipped while unseen candidates remain. A throwing
/// objective scores 0. With batch > 1, each round proposes `batch` points,
/// feeding the current best value back as a placeholder for pending ones.
inline SearchResult bayes_search(const Objective& objective, const SearchSpace& space, const SearchOptions& opt) {
    space.validate();
    if (opt.budget < 1) throw InvalidArgument("search budget must be >= 1");
    if (opt.batch < 1 || opt.candidates < 1) throw InvalidArgument("batch and candidate counts must be >= 1");
    const int n_init = opt.initial >= 0 ? std::min(opt.initial, opt.budget) : std::min(initial_design_size(opt.budget), opt.budget);

    SearchResult result;
    result.space = space;
    Rng rng(derive_seed(opt.seed, 0x5ea4c4));
    std::set<std::string> seen;
    std::vector<Eigen::VectorXd> xs;
    std::vector<double> ys;

    while (static_cast<int>(result.history.size()) < opt.budget) {
        const int done = static_cast<int>(result.history.size());
        const int q = done < n_init ? n_init - done : std::min(opt.batch, opt.budget - done);
        std::vector<Assignment> proposals;
        std::vector<Eigen::VectorXd> lie_x = xs;
        std::vector<double> lie_y = ys;
        for (int j = 0; j < q; ++j) {
            Assignment a;
            if (done < n_init) {
                a = detail::propose_random(space, seen, rng);
            } else {
                const GaussianProcess gp(lie_x, lie_y);
                const double best = gp.standardize(*std::max_element(lie_y.begin(), lie_y.end()));
                a = detail::propose_ei(space, gp, best, seen, opt.candidates, rng);
                lie_x.push_back(encode(space, a));
                lie_y.push_back(*std::max_element(lie_y.begin(), lie_y.end()));
            }
            seen.insert(detail::assignment_key(a));
            proposals.push_back(std::move(a));
        }

        std::vector<Trial> trials(proposals.size());
        parallel_for(proposals.size(), opt.workers, [&](std::size_t j) {
            Trial& t = trials[j];
            t.index = done + static_cast<int>(j);
            t.assignment = proposals[j];
            t.seed = derive_seed(opt.seed, static_cast<std::uint64_t>(t.index) + 1);
            const auto start = std::chrono::steady_clock::now();
            try {
                t.value = objective(t.assignment, t.seed);
                if (!std::isfinite(t.value)) throw Error("objective returned a non-finite value");
            } catch (const std::exception& e) {
                t.value = 0.0;
                t.failed = true;
                t.error = e.what();
            }
            t.duration_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        });
        for (auto& t : trials) {
            xs.push_back(encode(space, t.assignment));
            ys.push_back(t.value);
            if (opt.on_trial) opt.on_trial(t);
            if (result.history.empty() || t.value > result.best.value) result.best = t;
            result.history.push_back(std::move(t));
        }
    }
    return result;
}

/// Uniform random search with the same trial bookkeeping (the degenerate
/// mode of bayes_search with an initial design covering the whole budget).
inline SearchResult random_search(const Objective& objective, const SearchSpace& space, SearchOptions opt) {
    opt.initial = opt.budget;
    return bayes_search(objective, space, opt);
}

inline nlohmann::ordered_json to_json(const Trial& t) {
    nlohmann::ordered_json j;
    j["index"] = t.index;
    j["assignment"] = to_json(t.assignment);
    j["value"] = t.value;
    j["duration_s"] = t.duration_s;
    j["seed"] = t.seed;
    j["failed"] = t.failed;
    if (t.failed) j["error"] = t.error;
    return j;
}

inline Trial trial_from_json(const nlohmann::json& j) {
    Trial t;
    t.index = j.at("index").get<int>();
    t.assignment = assignment_from_json(j.at("assignment"));
    t.value = j.at("value").get<double>();
    t.duration_s = j.value("duration_s", 0.0);
    t.seed = j.at("seed").get<std::uint64_t>();
    t.failed = j.value("failed", false);
    t.error = j.value("error", std::string());
    return t;
}

/// Append-only trial log, one JSON object per line.
class TrialLog {
public:
    explicit TrialLog(const std::string& path) : out_(path, std::ios::app) {
        if (!out_) throw Error("cannot open trial log " + path);
    }
    void append(const Trial& t) {
        out_ << to_json(t).dump() << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

inline std::vector<Trial> read_trial_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trial log " + path);
    std::vector<Trial> out;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (line.empty()) continue;
        try {
            out.push_back(trial_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid trial record: ") + e.what(), no);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Classifier search spaces

enum class Base { segment, document };

inline const char* to_string(Base b) { return b == Base::segment ? "segment" : "document"; }

inline Base base_from_string(const std::string& s) {
    if (s == "segment" || s == "seg") return Base::segment;
    if (s == "document" || s == "doc") return Base::document;
    throw InvalidArgument("unknown base \"" + s + "\"");
}

/// Hyperparameter ranges per classifier. Ranges spanning three or more
/// orders of magnitude are searched on a log scale. The spaces are the same
/// for both bases.
inline SearchSpace space_for(ClassifierKind kind, Base /*base*/) {
    const ContinuousParam tol{1e-6, 1e-2, Scale::log};
    SearchSpace s;
    switch (kind) {
        case ClassifierKind::LR:
            s.params = {{"C", ContinuousParam{1e-6, 100, Scale::log}},
                        {"penalty", CategoricalParam{{"l1", "l2", "elasticnet", "none"}}},
                        {"l1_ratio", ContinuousParam{0, 1, Scale::linear}},
                        {"tol", tol}};
            break;
        case ClassifierKind::NN:
            s.params = {{"layers", IntegerParam{1, 3, Scale::linear}},
                        {"size1", IntegerParam{1, 500, Scale::linear}},
                        {"size2", IntegerParam{1, 500, Scale::linear}},
                        {"size3", IntegerParam{1, 500, Scale::linear}},
                        {"activation", CategoricalParam{{"logistic", "tanh", "relu"}}},
                        {"learning_rate", ContinuousParam{1e-6, 1e-2, Scale::log}},
                        {"tol", tol},
                        {"patience", IntegerParam{1, 100, Scale::linear}}};
            break;
        case ClassifierKind::RF:
            s.params = {{"n_trees", IntegerParam{1, 1000, Scale::log}}, {"max_depth", IntegerParam{1, 1000, Scale::log}}};
            break;
        case ClassifierKind::SVM:
            s.params = {{"C", ContinuousParam{1e-6, 100, Scale::log}},
                        {"kernel", CategoricalParam{{"rbf", "linear"}}},
                        {"gamma", ContinuousParam{1e-6, 1e-2, Scale::log}},
                        {"tol", tol}};
            break;
        case ClassifierKind::SVAE:
            s.params = {{"layers", IntegerParam{1, 3, Scale::linear}},
                        {"first_size", IntegerParam{10, 500, Scale::linear}},
                        {"ratio2", ContinuousParam{0.001, 0.9, Scale::linear}},
                        {"ratio3", ContinuousParam{0.001, 0.9, Scale::linear}},
                        {"latent_ratio", ContinuousParam{0.001, 0.9, Scale::linear}},
                        {"weight_vae", ContinuousParam{1, 10, Scale::linear}},
                        {"weight_clf", ContinuousParam{1, 10, Scale::linear}},
                        {"activation", CategoricalParam{{"logistic", "relu", "tanh", "sigmoid"}}},
                        {"tol", tol},
                        {"patience", IntegerParam{1, 100, Scale::linear}},
                        {"max_epochs", IntegerParam{1, 100, Scale::linear}}};
            break;
    }
    return s;
}

/// Classifier spec for an assignment of space_for(kind, ·). Inactive
/// parameters (l1_ratio without elastic net, sizes beyond the layer count,
/// gamma of a linear kernel) are carried but have no effect.
inline ClassifierSpec spec_from_assignment(ClassifierKind kind, const Assignment& a) {
    auto spec = ClassifierSpec::defaults(kind);
    auto num = [&](const char* k) { return as_double(a.at(k)); };
    auto integer = [&](const char* k) { return static_cast<int>(as_integer(a.at(k))); };
    auto str = [&](const char* k) { return as_string(a.at(k)); };
    std::visit(
        [&](auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, LrParams>) {
                p.C = num("C");
                p.penalty = penalty_from_string(str("penalty"));
                p.l1_ratio = num("l1_ratio");
                p.tol = num("tol");
            } else if constexpr (std::is_same_v<P, NnParams>) {
                const int layers = integer("layers");
                const int sizes[] = {integer("size1"), integer("size2"), integer("size3")};
                p.hidden.assign(sizes, sizes + layers);
                p.activation = activation_from_string(str("activation"));
                p.learning_rate = num("learning_rate");
                p.tol = num("tol");
                p.patience = integer("patience");
            } else if constexpr (std::is_same_v<P, RfParams>) {
                p.n_trees = integer("n_trees");
                p.max_depth = integer("max_depth");
            } else if constexpr (std::is_same_v<P, SvmParams>) {
                p.C = num("C");
                p.kernel = kernel_from_string(str("kernel"));
                p.gamma = num("gamma");
                p.tol = num("tol");
            } else {
                p.layers = integer("layers");
                p.first_size = integer("first_size");
                p.ratios = {num("ratio2"), num("ratio3")};
                p.latent_ratio = num("latent_ratio");
                p.weight_vae = num("weight_vae");
                p.weight_clf = num("weight_clf");
                p.activation = activation_from_string(str("activation"));
                p.tol = num("tol");
                p.patience = integer("patience");
                p.max_epochs = integer("max_epochs");
            }
        },
        spec.params);
    return spec;
}

}  // namespace docroute

#endif  // DOCROUTE_HYPEROPT_HPP_
