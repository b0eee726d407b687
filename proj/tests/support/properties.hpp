#pragma once

// Randomised invariant checks shared by the unit tests and the acceptance
// runner. Each check runs at least `cases` random cases and reports the
// first failure it sees.

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ntb/dt_training.hpp"
#include "ntb/evaluation.hpp"
#include "ntb/io.hpp"
#include "ntb/transmission_network.hpp"

namespace props {

struct Outcome {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  void fail(const std::string& what) {
    if (failures++ == 0) first_failure = what;
  }
  [[nodiscard]] bool ok() const { return failures == 0; }
};

inline ntb::Cell random_cell(std::mt19937_64& rng, int span) {
  std::uniform_int_distribution<int> d(-span, span);
  return {d(rng), d(rng)};
}

inline int ring(ntb::Cell c, int max_ring) {
  return std::min(std::max(std::abs(c.dx), std::abs(c.dy)), max_ring);
}

/// ENR over any closed cell walk is zero.
inline Outcome enr_closed_loop(std::size_t cases, std::uint64_t seed) {
  Outcome o{"ENR closed loop"};
  std::mt19937_64 rng(seed);
  for (; o.cases < cases; ++o.cases) {
    ntb::RelativeNetworkSpec spec;
    spec.max_ring = 1 + static_cast<int>(rng() % 15);
    ntb::RelativeCellRoute r;
    r.max_ring = spec.max_ring;
    const std::size_t len = 2 + rng() % 30;
    for (std::size_t k = 0; k < len; ++k) r.cells.push_back(random_cell(rng, 20));
    r.cells.push_back(r.cells.front());
    const double e = ntb::total_enr(r, spec);
    if (e != 0.0) o.fail("closed walk of " + std::to_string(len) + " cells gave " + std::to_string(e));
  }
  return o;
}

/// ENR telescopes to ring(start) - ring(end).
inline Outcome enr_telescoping(std::size_t cases, std::uint64_t seed) {
  Outcome o{"ENR telescoping"};
  std::mt19937_64 rng(seed);
  for (; o.cases < cases; ++o.cases) {
    ntb::RelativeNetworkSpec spec;
    spec.max_ring = 1 + static_cast<int>(rng() % 15);
    ntb::RelativeCellRoute r;
    r.max_ring = spec.max_ring;
    const std::size_t len = 1 + rng() % 30;
    for (std::size_t k = 0; k < len; ++k) r.cells.push_back(random_cell(rng, 20));
    const double want = ring(r.cells.front(), spec.max_ring) - ring(r.cells.back(), spec.max_ring);
    if (ntb::total_enr(r, spec) != want) o.fail("telescoping broke on a walk of " + std::to_string(len));
  }
  return o;
}

/// Route energy is additive under concatenation and matches the running
/// totals. Energies are multiples of 1/8 so every sum is exact.
inline Outcome energy_additivity(std::size_t cases, std::uint64_t seed) {
  Outcome o{"energy additivity"};
  std::mt19937_64 rng(seed);
  for (; o.cases < cases; ++o.cases) {
    const std::size_t n = 2 + rng() % 10;
    ntb::TransmissionNetwork net(n, rng() % 2 == 0, 1e6);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) net.set(i, j, static_cast<double>(rng() % 64) / 8.0);
      }
    }
    auto walk = [&] {
      ntb::PatchRoute r;
      const std::size_t len = 1 + rng() % 12;
      for (std::size_t k = 0; k < len; ++k) r.append(rng() % n);
      return r;
    };
    const ntb::PatchRoute a = walk(), b = walk();
    ntb::PatchRoute ab = a;
    for (auto p : b.patches()) ab.append(p);
    const double joined = a.last() == b.start() ? 0.0 : net.energy(a.last(), b.start());
    const double want = ntb::total_energy(a, net) + joined + ntb::total_energy(b, net);
    if (ntb::total_energy(ab, net) != want) o.fail("concatenation is not additive");
    const auto cum = ntb::cumulative_energy(ab, net);
    if (cum.size() != ab.size() || cum.back() != ntb::total_energy(ab, net) || cum.front() != 0.0) {
      o.fail("running totals disagree with the total");
    }
  }
  return o;
}

/// Random labelled walks on a small grid for training checks.
inline std::vector<ntb::TrainingSample> random_samples(std::mt19937_64& rng,
                                                       const ntb::SceneConfig& scene) {
  std::vector<ntb::TrainingSample> out;
  const std::size_t count = 4 + rng() % 10;
  const auto rows = static_cast<long>(scene.rows()), cols = static_cast<long>(scene.columns());
  for (std::size_t k = 0; k < count; ++k) {
    ntb::TrainingSample s;
    s.track_id = static_cast<ntb::TrackId>(k + 1);
    long r = 0, c = 0;
    s.route.append(0);
    const std::size_t len = 1 + rng() % 8;
    for (std::size_t step = 0; step < len; ++step) {
      r = std::clamp<long>(r + static_cast<long>(rng() % 3) - 1, 0, rows - 1);
      c = std::clamp<long>(c + static_cast<long>(rng() % 3) - 1, 0, cols - 1);
      s.route.append(scene.index_of(static_cast<std::size_t>(r), static_cast<std::size_t>(c)));
    }
    s.label = rng() % 3 == 0 ? ntb::Label::type_ii : ntb::Label::normal;
    out.push_back(std::move(s));
  }
  return out;
}

/// After every training iteration: weights finite and at least epsilon,
/// correlations non-negative, energies in (0, L] off the diagonal with
/// e = min(1/AC, L) and e = L exactly where AC < epsilon.
inline Outcome training_ranges(std::size_t cases, std::uint64_t seed) {
  Outcome o{"training ranges"};
  std::mt19937_64 rng(seed);
  while (o.cases < cases) {
    ntb::SceneConfig scene;
    scene.patch_size = 48;
    scene.image_width = 48.0 * static_cast<double>(2 + rng() % 3);
    scene.image_height = 48.0 * static_cast<double>(1 + rng() % 3);
    scene.entrance_patches = {0};
    const auto samples = random_samples(rng, scene);
    ntb::TrainingConfig cfg;
    cfg.max_iterations = 25;
    const double L = cfg.large_value;
    auto check = [&](const ntb::IterationRecord& rec, const ntb::WeightState& ws) {
      ++o.cases;
      const std::string at = "iteration " + std::to_string(rec.iteration) + ": ";
      for (const auto& per : ws.weights.per_sample) {
        for (const auto& [edge, w] : per) {
          if (!std::isfinite(w) || w < cfg.epsilon) o.fail(at + "weight out of range");
        }
      }
      const std::size_t n = ws.network.node_count();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          const double ac = ws.correlation[i * n + j];
          const double e = ws.network.energy(i, j);
          if (i == j) {
            if (e != 0.0) o.fail(at + "non-zero diagonal");
            continue;
          }
          if (!(ac >= 0.0) || !std::isfinite(ac)) o.fail(at + "correlation out of range");
          if (!(e > 0.0) || e > L) o.fail(at + "energy out of range");
          const double want = ac >= cfg.epsilon ? std::min(1.0 / ac, L) : L;
          if (e != want) o.fail(at + "energy is not the clamped reciprocal");
        }
      }
      if (rec.err_fa < 0 || rec.err_fa > 1 || rec.err_miss < 0 || rec.err_miss > 1) {
        o.fail(at + "error rate out of range");
      }
    };
    (void)ntb::train(samples, scene, cfg, check);
  }
  return o;
}

/// Model documents survive a text round trip bit for bit.
inline Outcome model_round_trip(std::size_t cases, std::uint64_t seed) {
  Outcome o{"save/load round trip"};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1e-6, 50.0);
  for (; o.cases < cases; ++o.cases) {
    ntb::TrainedAbnormalityModel m;
    m.scene.patch_size = 48;
    m.scene.image_width = 48.0 * static_cast<double>(1 + rng() % 4);
    m.scene.image_height = 48.0 * static_cast<double>(1 + rng() % 3);
    const std::size_t n = m.scene.node_count();
    m.scene.entrance_patches = {rng() % n};
    m.network = ntb::TransmissionNetwork(n, false, 1e6);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) m.network.set(i, j, rng() % 4 == 0 ? 1e6 : u(rng));
    }
    m.thresholds = {u(rng), 1.0 + static_cast<double>(rng() % 91) / 10.0};
    const std::size_t iters = rng() % 4;
    for (std::size_t k = 0; k < iters; ++k) {
      m.log.push_back({k + 1, m.thresholds, u(rng) / 50, u(rng) / 50, u(rng)});
    }
    m.converged = rng() % 2 == 0;
    m.refresh_route_maps();
    const std::string text = ntb::io::model_to_json(m, nlohmann::json::object()).dump();
    const auto back = ntb::io::model_from_json(ntb::io::parse_json(text, "model"));
    if (!(back.network == m.network) || !(back.thresholds == m.thresholds) || back.log != m.log ||
        back.converged != m.converged) {
      o.fail("model changed across save/load");
    }
    if (ntb::io::model_to_json(back, nlohmann::json::object()).dump() != text) {
      o.fail("re-saved model differs");
    }
  }
  return o;
}

/// FP + FN = wrong, TER = (FA * negatives + Miss * positives) / total, and
/// confusion totals match.
inline Outcome metric_identities(std::size_t cases, std::uint64_t seed) {
  Outcome o{"metric identities"};
  std::mt19937_64 rng(seed);
  const ntb::Label all[] = {ntb::Label::normal, ntb::Label::type_i, ntb::Label::type_ii,
                            ntb::Label::type_iii};
  for (; o.cases < cases; ++o.cases) {
    const std::size_t n = 1 + rng() % 60;
    std::vector<ntb::Label> p(n), t(n);
    for (std::size_t k = 0; k < n; ++k) {
      p[k] = all[rng() % 4];
      t[k] = all[rng() % 4];
    }
    const ntb::EvalReport r = ntb::abnormality_metrics(p, t);
    if (r.false_positives + r.false_negatives != r.wrong) o.fail("FP + FN != wrong");
    if (r.positives + r.negatives != r.total || r.total != n) o.fail("class totals");
    const double rebuilt = (r.fa_rate.value_or(0) * static_cast<double>(r.negatives) +
                            r.miss_rate.value_or(0) * static_cast<double>(r.positives)) /
                           static_cast<double>(r.total);
    if (std::abs(rebuilt - r.ter) > 1e-12) o.fail("TER is not the weighted FA/Miss mix");
    std::size_t sum = 0;
    for (const auto& row : r.confusion) {
      for (std::size_t c : row) sum += c;
    }
    if (sum != n) o.fail("confusion does not sum to the total");

    const std::vector<std::string> classes{"a", "b", "c"};
    std::vector<std::string> gp(n), gt(n);
    for (std::size_t k = 0; k < n; ++k) {
      gp[k] = classes[rng() % 3];
      gt[k] = classes[rng() % 3];
    }
    const ntb::EvalReport g = ntb::group_metrics(gp, gt, classes);
    std::size_t diag = 0;
    for (std::size_t i = 0; i < 3; ++i) diag += g.confusion[i][i];
    if (diag + g.wrong != n) o.fail("confusion diagonal + wrong != total");
  }
  return o;
}

inline std::vector<Outcome> run_all(std::size_t cases, std::uint64_t seed) {
  return {enr_closed_loop(cases, seed),   enr_telescoping(cases, seed + 1),
          energy_additivity(cases, seed + 2), training_ranges(cases, seed + 3),
          model_round_trip(cases, seed + 4), metric_identities(cases, seed + 5)};
}

}  // namespace props
