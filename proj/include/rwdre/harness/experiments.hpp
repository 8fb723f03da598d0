#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "rwdre/dynamics.hpp"
#include "rwdre/harness/config.hpp"
#include "rwdre/harness/report.hpp"
#include "rwdre/hydro.hpp"
#include "rwdre/rate_breakdown.hpp"

namespace rwdre {

/// Stream purposes; every replica draws from stream_id(purpose, n, replica).
enum class Purpose : std::uint64_t { velocity = 1, lln = 2, perturbed = 3, entropy = 4, naive = 5, importance = 6,
                                     martingale = 7, replacement = 8, energy = 9 };

Stream replica_stream(std::uint64_t seed, Purpose purpose, int n, int replica);

/// Calls f(replica) for replica = 0 .. count-1 on up to `threads` workers.
/// Results are stored by replica index, so the output never depends on
/// scheduling.
template <class R, class F>
std::vector<R> run_replicas(int count, int threads, F&& f) {
  std::vector<R> out(static_cast<std::size_t>(count));
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int r = 0; r < count; ++r) out[static_cast<std::size_t>(r)] = f(r);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) {
        try {
          out[static_cast<std::size_t>(r)] = f(r);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

/// Hydrodynamic grid derived from the run block.
SpaceTimeGrid hydro_grid(const ExperimentConfig& cfg);

/// Equilibrium drift: x_T / T against the mean-field velocity of the mean of u0.
ExperimentReport run_velocity_experiment(const ExperimentConfig& cfg);
/// Null-tilt law of large numbers for pi, pi-hat and the walker.
ExperimentReport run_lln_experiment(const ExperimentConfig& cfg);
/// Same distances under the tilted law against solve_perturbed.
ExperimentReport run_perturbed_lln_experiment(const ExperimentConfig& cfg);
/// (1/n) relative entropy of the tilted law against h + J + j.
ExperimentReport run_entropy_experiment(const ExperimentConfig& cfg);
/// Naive and importance-sampled probability of the tube around the tilt's limit.
ExperimentReport run_importance_sampling(const ExperimentConfig& cfg);
/// E exp(n (log M_a + log M_H)) = 1 under the reference law.
ExperimentReport run_martingale_check(const ExperimentConfig& cfg);
/// Replacement errors, ensembles table, energy norms and the martingale check.
ExperimentReport run_diagnostics(const ExperimentConfig& cfg);

struct EnsembleRow {
  int ell = 0;
  Rational sup_gap;       // sup_k |f(k; ell) - (k/ell)^2|
  bool matches_closed_form = false;
};
/// Exact canonical averages of xi(1) xi(2) for ell = 2 .. max_ell.
std::vector<EnsembleRow> ensembles_table(int max_ell);

}  // namespace rwdre
