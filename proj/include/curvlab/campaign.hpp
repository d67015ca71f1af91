#pragma once

// Randomized verification campaigns. A campaign draws `budget` samples in
// fixed-size chunks, each chunk from its own RNG stream derived from
// (seed, chunk index), and merges chunk results in index order. Results are
// therefore identical for any thread count.
//
// A passing campaign certifies "no counterexample among the sampled points";
// it is not a proof over the continuum.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "curvlab/concavity.hpp"

namespace curvlab::campaign {

struct Violation {
    std::vector<double> kappa;
    std::vector<double> xi;  // empty for checks without a test vector
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;  // signed slack; negative means the inequality failed
};

struct ConcavityReport {
    std::string campaign;
    nlohmann::json params = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::size_t budget = 0;
    std::size_t samples_tested = 0;
    std::size_t violation_count = 0;
    std::vector<Violation> violations;  // first kMaxStoredViolations, in sample order
    std::vector<Violation> tightest;    // smallest-gap passing samples: the certificate's boundary
    std::optional<double> found_constant;
    std::string constant_name;
    double wall_time = 0.0;  // seconds; serialized only to the timing sidecar

    bool passed() const noexcept { return violation_count == 0; }
};

inline constexpr std::size_t kMaxStoredViolations = 100;
inline constexpr std::size_t kTightestKept = 16;
inline constexpr std::size_t kChunkSize = 1024;

struct CampaignOptions {
    std::uint64_t seed = 20240430;
    unsigned threads = 1;
};

/// One evaluated sample. `statistic` is folded with max across the campaign.
struct Evaluation {
    Violation record;
    bool holds = true;
    std::optional<double> statistic;
};

/// Produces one evaluated sample from a chunk-local RNG. A fresh generator is
/// built for every chunk so samplers may keep per-chunk state.
using SampleGenerator = std::function<Evaluation(std::mt19937_64&)>;
using GeneratorFactory = std::function<SampleGenerator()>;

struct Tally {
    std::size_t samples = 0;
    std::size_t violation_count = 0;
    std::vector<Violation> violations;
    std::vector<Violation> tightest;
    std::optional<double> statistic_max;
};

Tally run_samples(std::size_t budget, const CampaignOptions& opts, std::uint64_t stream_salt,
                  const GeneratorFactory& factory);

// Lemma campaigns over Gamma_k samples (unit-scale cone sampler).
ConcavityReport campaign_sigma_identities(int n, int k, std::size_t budget, const CampaignOptions& opts = {});
ConcavityReport campaign_sigma_l_dominance(int n, int k, std::size_t budget, const CampaignOptions& opts = {});
ConcavityReport campaign_negative_kappa(int n, int k, std::size_t budget, const CampaignOptions& opts = {});
ConcavityReport campaign_kappa_sq_trace(int n, int k, std::size_t budget, const CampaignOptions& opts = {});
ConcavityReport campaign_quotient_concavity(int n, int k, std::size_t budget, const CampaignOptions& opts = {});
/// Samples Gamma_{k+1} (so requires k < n) with psi_sup = sigma_k(kappa).
ConcavityReport campaign_semiconvexity(int n, int k, std::size_t budget, const CampaignOptions& opts = {});

/// Constrained sampler for the Ren-Wang hypotheses: kappa_1 log-uniform in
/// [threshold, 10 threshold], sigma_k uniform in [N0, N1], kappa in Gamma_k,
/// kappa_1 separated from kappa_2.
class RenWangSampler {
public:
    RenWangSampler(int n, int k, double sigma_lower, double sigma_upper, double kappa1_threshold);
    symfunc::PrincipalCurvatures draw(std::mt19937_64& rng);

private:
    int n_;
    int k_;
    double sigma_lower_;
    double sigma_upper_;
    double threshold_;
    symfunc::ConeSampler tail_;
    std::size_t window_attempts_ = 0;
    std::size_t window_accepted_ = 0;
    std::size_t attempts_ = 0;
};

/// Constrained sampler for the Lu hypotheses: kappa_1 log-uniform in [1,10],
/// kappa_2..kappa_l uniform in [delta kappa_1, kappa_1], the remaining entries
/// uniform in [-c, delta' kappa_1] with c = (n-k)/(k-l) delta' kappa_1, then
/// rejected unless kappa is in Gamma_k and satisfies both slab constraints.
class LuSampler {
public:
    LuSampler(int n, int k, int l, double delta, double delta_prime);
    symfunc::PrincipalCurvatures draw(std::mt19937_64& rng);

private:
    int n_;
    int k_;
    int l_;
    double delta_;
    double delta_prime_;
    std::size_t window_attempts_ = 0;
    std::size_t window_accepted_ = 0;
    std::size_t attempts_ = 0;
};

/// Dyadic bisection over beta in [2^-20, 2^20] for the smallest beta with no
/// violated Ren-Wang sample. The sample set is drawn once and reused.
ConcavityReport find_beta(int n, int k, double sigma_lower, double sigma_upper, double kappa1_threshold,
                          std::size_t budget, const CampaignOptions& opts = {});

/// Decreasing sweep delta' = 2^-1, ..., 2^-30; returns the first (largest)
/// delta' whose constrained campaign has no violation.
ConcavityReport find_delta_prime(int n, int k, int l, double eps, double delta, double delta0, std::size_t budget,
                                 const CampaignOptions& opts = {});

}  // namespace curvlab::campaign
