#include "curvlab/campaign.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "curvlab/parallel.hpp"

namespace curvlab::campaign {

using symfunc::ConeSampler;
using symfunc::PrincipalCurvatures;
using symfunc::sigma;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<double> gaussian_xi(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (double& v : xi) v = g(rng);
    return xi;
}

/// Eigenvector of the smallest eigenvalue of a symmetric matrix, with a random sign.
std::vector<double> most_negative_direction(const Eigen::MatrixXd& m, std::mt19937_64& rng) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    Eigen::VectorXd v = es.eigenvectors().col(0);
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 1) v = -v;
    return {v.data(), v.data() + v.size()};
}

void keep_tightest(std::vector<Violation>& pool, const Violation& v) {
    pool.push_back(v);
    if (pool.size() > 4 * kTightestKept) {
        std::stable_sort(pool.begin(), pool.end(), [](const Violation& a, const Violation& b) { return a.gap < b.gap; });
        pool.resize(kTightestKept);
    }
}

void finalize_tightest(std::vector<Violation>& pool) {
    std::stable_sort(pool.begin(), pool.end(), [](const Violation& a, const Violation& b) { return a.gap < b.gap; });
    if (pool.size() > kTightestKept) pool.resize(kTightestKept);
}

void fill_from_tally(ConcavityReport& report, Tally&& tally) {
    report.samples_tested = tally.samples;
    report.violation_count = tally.violation_count;
    report.violations = std::move(tally.violations);
    report.tightest = std::move(tally.tightest);
}

ConcavityReport make_report(std::string name, int n, int k, std::size_t budget, const CampaignOptions& opts) {
    ConcavityReport r;
    r.campaign = std::move(name);
    r.params = {{"n", n}, {"k", k}};
    r.seed = opts.seed;
    r.budget = budget;
    return r;
}

std::size_t chunk_count(std::size_t budget) { return (budget + kChunkSize - 1) / kChunkSize; }

std::uint64_t campaign_salt(const std::string& name, int n, int k, int extra = 0) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : name) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
    h = splitmix64(h ^ static_cast<std::uint64_t>(n));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k));
    return splitmix64(h ^ static_cast<std::uint64_t>(extra));
}

void require_dims(int n, int k, const char* who) {
    if (n < 1 || k < 1 || k > n) throw DomainError(std::string(who) + ": need 1 <= k <= n");
}

}  // namespace

Tally run_samples(std::size_t budget, const CampaignOptions& opts, std::uint64_t stream_salt,
                  const GeneratorFactory& factory) {
    const std::size_t chunks = chunk_count(budget);
    std::vector<Tally> partial(chunks);
    parallel_for(chunks, opts.threads, [&](std::size_t c) {
        auto rng = stream_rng(opts.seed ^ stream_salt, c);
        auto generate = factory();
        Tally& t = partial[c];
        const std::size_t count = std::min(kChunkSize, budget - c * kChunkSize);
        for (std::size_t i = 0; i < count; ++i) {
            Evaluation e = generate(rng);
            ++t.samples;
            if (e.statistic) t.statistic_max = std::max(t.statistic_max.value_or(*e.statistic), *e.statistic);
            if (!e.holds) {
                ++t.violation_count;
                if (t.violations.size() < kMaxStoredViolations) t.violations.push_back(std::move(e.record));
            } else {
                keep_tightest(t.tightest, e.record);
            }
        }
    });

    Tally total;
    for (auto& t : partial) {
        total.samples += t.samples;
        total.violation_count += t.violation_count;
        for (auto& v : t.violations)
            if (total.violations.size() < kMaxStoredViolations) total.violations.push_back(std::move(v));
        for (auto& v : t.tightest) keep_tightest(total.tightest, v);
        if (t.statistic_max)
            total.statistic_max = std::max(total.statistic_max.value_or(*t.statistic_max), *t.statistic_max);
    }
    finalize_tightest(total.tightest);
    return total;
}

// ---------------------------------------------------------------------------
// Lemma campaigns

ConcavityReport campaign_sigma_identities(int n, int k, std::size_t budget, const CampaignOptions& opts) {
    require_dims(n, k, "campaign_sigma_identities");
    const auto start = Clock::now();
    auto report = make_report("sigma-identities", n, k, budget, opts);
    report.params["identity_rel_tol"] = 1e-12;
    report.params["gradient_abs_tol"] = 1e-6;
    report.params["hessian_abs_tol"] = 1e-5;
    report.constant_name = "max error/tolerance";

    auto factory = [n, k]() -> SampleGenerator {
        return [n, k](std::mt19937_64& rng) {
            std::normal_distribution<double> g(0.0, 1.0);
            std::vector<double> x(static_cast<std::size_t>(n));
            for (double& v : x) v = 0.5 + g(rng);
            std::vector<double> absx(x);
            for (double& v : absx) v = std::abs(v);

            // Errors are normalized by their tolerance; the sample passes when every ratio is <= 1.
            double worst = 0.0;
            auto track = [&worst](double err, double tol) { worst = std::max(worst, err / tol); };

            const double sk = sigma(x, k);
            const double mag_k = std::max(sigma(absx, k), 1e-300);
            const Eigen::VectorXd grad = symfunc::sigma_grad(x, k);
            double euler = 0.0;
            for (int i = 0; i < n; ++i) {
                const std::size_t ex[] = {static_cast<std::size_t>(i)};
                const double rest = k <= n - 1 ? symfunc::sigma_restricted<double>(x, k, ex) : 0.0;
                const double xi = x[static_cast<std::size_t>(i)];
                track(std::abs(sk - (xi * grad(i) + rest)), 1e-12 * mag_k);
                euler += xi * grad(i);
            }
            track(std::abs(euler - k * sk), 1e-12 * k * mag_k);
            track(std::abs(grad.sum() - (n - k + 1) * sigma(x, k - 1)),
                  1e-12 * (n - k + 1) * std::max(sigma(absx, k - 1), 1e-300));

            std::vector<double> y(x);
            const double hg = 1e-6;
            for (int i = 0; i < n; ++i) {
                const auto ui = static_cast<std::size_t>(i);
                y[ui] = x[ui] + hg;
                const double fp = sigma(y, k);
                y[ui] = x[ui] - hg;
                const double fm = sigma(y, k);
                y[ui] = x[ui];
                track(std::abs((fp - fm) / (2 * hg) - grad(i)), 1e-6);
            }
            if (k >= 2) {
                const Eigen::MatrixXd hess = symfunc::sigma_hess(x, k);
                const double hh = 1e-3;
                for (int p = 0; p < n; ++p) {
                    for (int q = p + 1; q < n; ++q) {
                        const auto up = static_cast<std::size_t>(p);
                        const auto uq = static_cast<std::size_t>(q);
                        auto at = [&](double sp, double sq) {
                            y[up] = x[up] + sp * hh;
                            y[uq] = x[uq] + sq * hh;
                            const double v = sigma(y, k);
                            y[up] = x[up];
                            y[uq] = x[uq];
                            return v;
                        };
                        const double fd = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hh * hh);
                        track(std::abs(fd - hess(p, q)), 1e-5);
                    }
                }
            }
            Evaluation e;
            e.record.kappa = std::move(x);
            e.record.lhs = worst;
            e.record.rhs = 1.0;
            e.record.gap = 1.0 - worst;
            e.holds = worst <= 1.0;
            e.statistic = worst;
            return e;
        };
    };
    auto tally = run_samples(budget, opts, campaign_salt(report.campaign, n, k), factory);
    report.found_constant = tally.statistic_max;
    fill_from_tally(report, std::move(tally));
    report.wall_time = seconds_since(start);
    return report;
}

namespace {

using ConeCheck = std::function<Evaluation(const PrincipalCurvatures&, std::mt19937_64&)>;

ConcavityReport cone_campaign(std::string name, int n, int k, int sample_k, std::size_t budget,
                              const CampaignOptions& opts, ConeCheck check) {
    const auto start = Clock::now();
    auto report = make_report(std::move(name), n, k, budget, opts);
    report.params["sampler"] = {{"cone", sample_k}, {"scale", 1.0}, {"shift", 0.5}};
    auto factory = [n, sample_k, check]() -> SampleGenerator {
        auto sampler = std::make_shared<ConeSampler>(n, sample_k, 1.0);
        return [sampler, check](std::mt19937_64& rng) {
            const PrincipalCurvatures kappa = sampler->draw(rng);
            Evaluation e = check(kappa, rng);
            e.record.kappa = to_vector(kappa.values());
            return e;
        };
    };
    auto tally = run_samples(budget, opts, campaign_salt(report.campaign, n, k), factory);
    const auto stat = tally.statistic_max;
    fill_from_tally(report, std::move(tally));
    if (stat) report.found_constant = *stat;
    report.wall_time = seconds_since(start);
    return report;
}

}  // namespace

ConcavityReport campaign_sigma_l_dominance(int n, int k, std::size_t budget, const CampaignOptions& opts) {
    require_dims(n, k, "campaign_sigma_l_dominance");
    if (k < 2) throw DomainError("campaign_sigma_l_dominance: need k >= 2");
    auto report = cone_campaign("sigma-l-dominance", n, k, k, budget, opts,
                                [k](const PrincipalCurvatures& kappa, std::mt19937_64&) {
                                    Evaluation e;
                                    e.record.gap = std::numeric_limits<double>::max();
                                    for (int l = 1; l < k; ++l) {
                                        const auto r = symfunc::check_sigma_l_dominance(kappa, k, l);
                                        if (r.slack < e.record.gap) {
                                            e.record.gap = r.slack;
                                            e.record.lhs = r.slack + [&] {
                                                double p = 1.0;
                                                for (int i = 0; i < l; ++i) p *= kappa[static_cast<std::size_t>(i)];
                                                return p;
                                            }();
                                            e.record.rhs = e.record.lhs - r.slack;
                                        }
                                        e.holds = e.holds && r.holds;
                                        e.statistic = r.constant_ratio;
                                    }
                                    return e;
                                });
    report.constant_name = "max sigma_k/(kappa_1...kappa_k)";
    return report;
}

ConcavityReport campaign_negative_kappa(int n, int k, std::size_t budget, const CampaignOptions& opts) {
    require_dims(n, k, "campaign_negative_kappa");
    return cone_campaign("negative-kappa", n, k, k, budget, opts,
                         [n, k](const PrincipalCurvatures& kappa, std::mt19937_64&) {
                             const auto r = symfunc::check_negative_kappa(kappa, k);
                             Evaluation e;
                             e.holds = r.holds;
                             e.record.rhs = static_cast<double>(n - k) / k * kappa.largest();
                             e.record.lhs = r.worst_margin.unbounded ? 0.0 : e.record.rhs - r.worst_margin.value;
                             // an all-positive sample has no constraint; its slack is the full bound
                             e.record.gap = r.worst_margin.unbounded ? e.record.rhs : r.worst_margin.value;
                             return e;
                         });
}

ConcavityReport campaign_kappa_sq_trace(int n, int k, std::size_t budget, const CampaignOptions& opts) {
    require_dims(n, k, "campaign_kappa_sq_trace");
    return cone_campaign("kappa-sq-trace", n, k, k, budget, opts,
                         [k](const PrincipalCurvatures& kappa, std::mt19937_64&) {
                             const auto r = symfunc::check_kappa_sq_trace(kappa, k);
                             Evaluation e;
                             e.holds = r.holds;
                             e.record.lhs = r.lhs;
                             e.record.rhs = r.rhs;
                             e.record.gap = r.lhs - r.rhs;
                             return e;
                         });
}

ConcavityReport campaign_quotient_concavity(int n, int k, std::size_t budget, const CampaignOptions& opts) {
    require_dims(n, k, "campaign_quotient_concavity");
    return cone_campaign("quotient-concavity", n, k, k, budget, opts,
                         [n, k](const PrincipalCurvatures& kappa, std::mt19937_64& rng) {
                             std::vector<double> xi = gaussian_xi(rng, n);
                             const auto r = concavity::check_quotient_concavity(kappa, xi, k);
                             Evaluation e;
                             e.holds = r.holds;
                             e.record.lhs = r.lhs;
                             e.record.rhs = r.rhs;
                             e.record.gap = r.gap;
                             e.record.xi = std::move(xi);
                             return e;
                         });
}

ConcavityReport campaign_semiconvexity(int n, int k, std::size_t budget, const CampaignOptions& opts) {
    require_dims(n, k, "campaign_semiconvexity");
    if (k + 1 > n) throw DomainError("campaign_semiconvexity: Gamma_{k+1} needs k < n");
    auto report = cone_campaign("semiconvexity", n, k, k + 1, budget, opts,
                                [k](const PrincipalCurvatures& kappa, std::mt19937_64&) {
                                    const double psi_sup = sigma(kappa, k);
                                    const auto r = concavity::check_semiconvexity_implication(kappa, k, psi_sup);
                                    Evaluation e;
                                    e.holds = r.holds;
                                    // the binding constraint is kappa_n >= -eta
                                    e.record.lhs = kappa.smallest();
                                    e.record.rhs = -r.eta;
                                    e.record.gap = std::min(kappa.smallest() + r.eta,
                                                            r.eta / kappa.n() - kappa[static_cast<std::size_t>(k - 1)]);
                                    return e;
                                });
    report.params["psi_sup"] = "sigma_k(kappa)";
    return report;
}

// ---------------------------------------------------------------------------
// Ren-Wang

RenWangSampler::RenWangSampler(int n, int k, double sigma_lower, double sigma_upper, double kappa1_threshold)
    : n_(n),
      k_(k),
      sigma_lower_(sigma_lower),
      sigma_upper_(sigma_upper),
      threshold_(kappa1_threshold),
      tail_(n - 1, std::max(1, k - 1), 1.0) {
    if (!((k == n - 1 && n >= 3) || (k == n - 2 && n >= 5)))
        throw DomainError("RenWangSampler: (n,k) outside the Ren-Wang range");
    if (!(sigma_lower > 0.0 && sigma_lower <= sigma_upper)) throw DomainError("RenWangSampler: need 0 < N0 <= N1");
    if (!(kappa1_threshold > 0.0)) throw DomainError("RenWangSampler: threshold must be positive");
}

PrincipalCurvatures RenWangSampler::draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (;;) {
        if (window_attempts_ == symfunc::ConeSampler::kWindow) {
            if (window_accepted_ * 1000 < window_attempts_)
                throw SamplerStarvationError("Ren-Wang sampler starved", attempts_, window_accepted_);
            window_attempts_ = window_accepted_ = 0;
        }
        ++attempts_;
        ++window_attempts_;

        const double k1 = threshold_ * std::pow(10.0, unit(rng));
        const auto mu = tail_.draw(rng);
        const double target = sigma_lower_ + (sigma_upper_ - sigma_lower_) * unit(rng);

        x[0] = k1;
        auto value_at = [&](double t) {
            for (int i = 1; i < n_; ++i) x[static_cast<std::size_t>(i)] = t * mu[static_cast<std::size_t>(i - 1)];
            return sigma(x, k_) - target;
        };
        double lo = 0.0;
        double hi = 1.0;
        while (value_at(hi) < 0.0 && hi < 1e6) hi *= 2.0;
        if (value_at(hi) < 0.0) continue;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (value_at(mid) < 0.0 ? lo : hi) = mid;
        }
        value_at(hi);
        PrincipalCurvatures kappa(x);
        if (kappa.largest() != k1) continue;
        if (k1 - kappa[1] < concavity::kDegenerateGap * k1) continue;
        if (!symfunc::in_cone(kappa, k_)) continue;
        const double sk = sigma(kappa, k_);
        if (sk < sigma_lower_ || sk > sigma_upper_) continue;
        ++window_accepted_;
        return kappa;
    }
}

namespace {

struct RenWangSample {
    std::vector<double> kappa;
    std::vector<double> xi;
    concavity::RenWangParts parts;
};

Eigen::MatrixXd renwang_remainder_matrix(const PrincipalCurvatures& kappa, int k) {
    const int n = kappa.n();
    const double k1 = kappa.largest();
    const Eigen::VectorXd g = symfunc::sigma_grad(kappa, k);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    if (k >= 2) b = -k1 * symfunc::sigma_hess(kappa, k);
    b(0, 0) -= g(0);
    for (int i = 1; i < n; ++i) b(i, i) += 2.0 * k1 / (k1 - kappa[static_cast<std::size_t>(i)]) * g(i);
    return b;
}

Violation to_violation(const RenWangSample& s, double beta) {
    Violation v;
    v.kappa = s.kappa;
    v.xi = s.xi;
    v.lhs = s.parts.value(beta);
    v.rhs = 0.0;
    v.gap = v.lhs;
    return v;
}

}  // namespace

ConcavityReport find_beta(int n, int k, double sigma_lower, double sigma_upper, double kappa1_threshold,
                          std::size_t budget, const CampaignOptions& opts) {
    const auto start = Clock::now();
    auto report = make_report("renwang", n, k, budget, opts);
    report.params["sigma_bounds"] = {sigma_lower, sigma_upper};
    report.params["kappa1_threshold"] = kappa1_threshold;
    report.params["beta_grid"] = "2^e, e in [-20, 20]";
    report.constant_name = "beta";
    RenWangSampler probe(n, k, sigma_lower, sigma_upper, kappa1_threshold);  // validates parameters

    // xi rotates through: Gaussian; most negative direction of the beta-free
    // part; most negative direction of that part restricted to the null space
    // of the beta term (where no beta can help).
    const std::size_t chunks = chunk_count(budget);
    std::vector<std::vector<RenWangSample>> chunk_samples(chunks);
    const std::uint64_t salt = campaign_salt("renwang", n, k, static_cast<int>(std::lround(std::log10(kappa1_threshold) * 1000)));
    parallel_for(chunks, opts.threads, [&](std::size_t c) {
        auto rng = stream_rng(opts.seed ^ salt, c);
        RenWangSampler sampler(n, k, sigma_lower, sigma_upper, kappa1_threshold);
        const std::size_t count = std::min(kChunkSize, budget - c * kChunkSize);
        auto& out = chunk_samples[c];
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            const auto kappa = sampler.draw(rng);
            std::vector<double> xi;
            switch ((c * kChunkSize + i) % 3) {
                case 0:
                    xi = gaussian_xi(rng, n);
                    break;
                case 1:
                    xi = most_negative_direction(renwang_remainder_matrix(kappa, k), rng);
                    break;
                default: {
                    const Eigen::VectorXd g = symfunc::sigma_grad(kappa, k);
                    const Eigen::MatrixXd proj =
                        Eigen::MatrixXd::Identity(n, n) - g * g.transpose() / g.squaredNorm();
                    xi = most_negative_direction(proj * renwang_remainder_matrix(kappa, k) * proj, rng);
                    break;
                }
            }
            auto parts = concavity::renwang_parts(kappa, xi, k);
            out.push_back({to_vector(kappa.values()), std::move(xi), parts});
        }
    });
    std::vector<RenWangSample> samples;
    samples.reserve(budget);
    for (auto& cs : chunk_samples)
        for (auto& s : cs) samples.push_back(std::move(s));
    report.samples_tested = samples.size();

    if (samples.empty()) {
        report.wall_time = seconds_since(start);
        return report;
    }

    auto passes = [&](int e) {
        const double beta = std::ldexp(1.0, e);
        return std::all_of(samples.begin(), samples.end(), [beta](const RenWangSample& s) { return s.parts.holds(beta); });
    };

    constexpr int kLo = -20;
    constexpr int kHi = 20;
    if (!passes(kHi)) {
        const double beta = std::ldexp(1.0, kHi);
        for (const auto& s : samples) {
            if (s.parts.holds(beta)) continue;
            ++report.violation_count;
            if (report.violations.size() < kMaxStoredViolations) report.violations.push_back(to_violation(s, beta));
        }
        std::stable_sort(report.violations.begin(), report.violations.end(),
                         [](const Violation& a, const Violation& b) { return a.gap < b.gap; });
        report.wall_time = seconds_since(start);
        return report;
    }
    int lo = kLo - 1;  // invariant: passes(hi) and (lo < kLo or !passes(lo))
    int hi = kHi;
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        (passes(mid) ? hi : lo) = mid;
    }
    const double beta = std::ldexp(1.0, hi);
    report.found_constant = beta;
    for (const auto& s : samples) keep_tightest(report.tightest, to_violation(s, beta));
    finalize_tightest(report.tightest);
    report.wall_time = seconds_since(start);
    return report;
}

// ---------------------------------------------------------------------------
// Lu

LuSampler::LuSampler(int n, int k, int l, double delta, double delta_prime)
    : n_(n), k_(k), l_(l), delta_(delta), delta_prime_(delta_prime) {
    if (!(1 <= l && l < k && k <= n)) throw DomainError("LuSampler: need 1 <= l < k <= n");
    if (!(delta > 0.0 && delta < 1.0 && delta_prime > 0.0 && delta_prime < 1.0))
        throw DomainError("LuSampler: delta and delta' must lie in (0,1)");
}

PrincipalCurvatures LuSampler::draw(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (;;) {
        if (window_attempts_ == symfunc::ConeSampler::kWindow) {
            if (window_accepted_ * 1000 < window_attempts_)
                throw SamplerStarvationError("Lu sampler starved", attempts_, window_accepted_);
            window_attempts_ = window_accepted_ = 0;
        }
        ++attempts_;
        ++window_attempts_;

        const double k1 = std::pow(10.0, unit(rng));
        const double top = delta_prime_ * k1;
        const double c = static_cast<double>(n_ - k_) / (k_ - l_) * top;
        x[0] = k1;
        for (int i = 1; i < l_; ++i) x[static_cast<std::size_t>(i)] = k1 * (delta_ + (1.0 - delta_) * unit(rng));
        for (int i = l_; i < n_; ++i) x[static_cast<std::size_t>(i)] = -c + (top + c) * unit(rng);

        PrincipalCurvatures kappa(x);
        const double lead = kappa.largest();
        if (kappa[static_cast<std::size_t>(l_ - 1)] < delta_ * lead) continue;
        if (kappa[static_cast<std::size_t>(l_)] > delta_prime_ * lead) continue;
        if (!symfunc::in_cone(kappa, k_)) continue;
        ++window_accepted_;
        return kappa;
    }
}

ConcavityReport find_delta_prime(int n, int k, int l, double eps, double delta, double delta0, std::size_t budget,
                                 const CampaignOptions& opts) {
    const auto start = Clock::now();
    auto report = make_report("lu", n, k, budget, opts);
    report.params["l"] = l;
    report.params["eps"] = eps;
    report.params["delta"] = delta;
    report.params["delta0"] = delta0;
    report.params["delta_prime_grid"] = "2^-e, e = 1..30";
    report.constant_name = "delta_prime";
    if (!(eps > 0.0 && eps < 1.0 && delta0 > 0.0 && delta0 < 1.0))
        throw DomainError("find_delta_prime: eps and delta0 must lie in (0,1)");
    LuSampler probe(n, k, l, delta, 0.5);  // validates (n,k,l,delta)
    if (budget == 0) {
        report.wall_time = seconds_since(start);
        return report;
    }

    Tally last;
    int levels = 0;
    for (int e = 1; e <= 30; ++e) {
        ++levels;
        const double delta_prime = std::ldexp(1.0, -e);
        auto factory = [=]() -> SampleGenerator {
            auto sampler = std::make_shared<LuSampler>(n, k, l, delta, delta_prime);
            auto parity = std::make_shared<std::size_t>(0);
            return [=](std::mt19937_64& rng) {
                const auto kappa = sampler->draw(rng);
                std::vector<double> xi = ((*parity)++ % 2 == 0)
                                             ? gaussian_xi(rng, n)
                                             : most_negative_direction(
                                                   concavity::lu_difference_matrix(kappa, k, l, eps, delta0), rng);
                const auto q = concavity::LuQuery::make(k, l, kappa, xi, eps, delta, delta0, delta_prime);
                const auto r = concavity::lu_form(q);
                Evaluation ev;
                ev.holds = r.holds;
                ev.record.kappa = to_vector(kappa.values());
                ev.record.xi = std::move(xi);
                ev.record.lhs = r.lhs;
                ev.record.rhs = r.rhs;
                ev.record.gap = r.lhs - r.rhs;
                return ev;
            };
        };
        last = run_samples(budget, opts, campaign_salt("lu", n, k, 100 * l + e), factory);
        if (last.violation_count == 0) {
            report.found_constant = delta_prime;
            break;
        }
    }
    report.params["levels_tried"] = levels;
    fill_from_tally(report, std::move(last));
    report.wall_time = seconds_since(start);
    return report;
}

}  // namespace curvlab::campaign
