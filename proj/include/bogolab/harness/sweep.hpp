#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <thread>
#include <tuple>
#include <vector>

#include "bogolab/harness/config.hpp"
#include "bogolab/harness/record.hpp"

namespace bogolab::harness {

struct SweepPoint {
  std::size_t ladder = 0;  // index into the sorted ladder
  double beta, mu, mu0, nu;
};

// Parameter points in (L, n_cap, beta, mu, mu0, nu) order. Duplicate grid
// values collapse.
inline std::vector<SweepPoint> sweep_points(const SweepConfig& c, std::vector<LadderEntry>& ladder_out) {
  ladder_out = c.size_ladder;
  std::sort(ladder_out.begin(), ladder_out.end(),
            [](const LadderEntry& a, const LadderEntry& b) { return std::tie(a.L, a.n_cap) < std::tie(b.L, b.n_cap); });
  ladder_out.erase(std::unique(ladder_out.begin(), ladder_out.end()), ladder_out.end());
  auto sorted = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  std::vector<SweepPoint> pts;
  for (std::size_t li = 0; li < ladder_out.size(); ++li) {
    for (double b : sorted(c.beta)) {
      for (double mu : sorted(c.mu)) {
        for (double mu0 : sorted(c.mu0_values(mu))) {
          for (double nu : sorted(c.nu)) pts.push_back({li, b, mu, mu0, nu});
        }
      }
    }
  }
  return pts;
}

// Runs every parameter point on a work queue of width c.parallelism. Results
// land in parameter order whatever the execution order. The dimension guard is
// enforced by validate() before anything is built.
inline std::vector<SweepRecord> run_sweep(const SweepConfig& c,
                                          const std::function<void(std::size_t, std::size_t)>& progress = {}) {
  c.validate();
  std::vector<LadderEntry> ladder;
  const std::vector<SweepPoint> pts = sweep_points(c, ladder);
  std::vector<double> mus = c.mu;
  std::sort(mus.begin(), mus.end());
  mus.erase(std::unique(mus.begin(), mus.end()), mus.end());

  std::vector<SweepRecord> out(pts.size());
  std::size_t done = 0;
  for (std::size_t li = 0; li < ladder.size(); ++li) {
    // One ladder entry at a time keeps only its operators in memory.
    std::vector<std::size_t> mine;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (pts[i].ladder == li) mine.push_back(i);
    }
    std::unique_ptr<LadderContext> ctx;
    try {
      ctx = std::make_unique<LadderContext>(LadderContext::build(c, ladder[li], mus));
    } catch (const Error& e) {
      for (std::size_t i : mine) {
        SweepRecord r;
        r.L = ladder[li].L;
        r.n_cap = ladder[li].n_cap;
        r.beta = pts[i].beta;
        r.mu = pts[i].mu;
        r.mu0 = pts[i].mu0;
        r.nu = pts[i].nu;
        std::string msg = std::string("failed: ") + e.what();
        for (char& ch : msg) {
          if (ch == ',' || ch == '\n' || ch == '"') ch = ';';
        }
        r.status = msg;
        out[i] = r;
      }
      done += mine.size();
      if (progress) progress(done, pts.size());
      continue;
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t k = next.fetch_add(1);
        if (k >= mine.size()) return;
        const SweepPoint& p = pts[mine[k]];
        out[mine[k]] = compute_record(c, *ctx, p.beta, p.mu, p.mu0, p.nu);
      }
    };
    const int width = std::max(1, std::min<int>(c.parallelism, static_cast<int>(mine.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < width; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    done += mine.size();
    if (progress) progress(done, pts.size());
  }
  return out;
}

}  // namespace bogolab::harness
