// Class-aware single-response selection tests: the cost ladder (new class vs
// open class), the flat-vs-aware savings identity, the forward-backward
// guarantee, and the streamwise variant.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mdlsel/errors.hpp"
#include "mdlsel/rng.hpp"
#include "mdlsel/synth.hpp"
#include "mdlsel/tpc.hpp"

using namespace mdlsel;

namespace {

// n rows, m features in K equal classes, single response driven by the
// features listed in `signal` (all from data the caller wires up).
Dataset classed_dataset(int n, int m, int num_classes, std::uint64_t seed) {
  Dataset d;
  d.n = n;
  d.m = m;
  d.h = 1;
  Rng rng(seed);
  d.x.resize(static_cast<std::size_t>(n) * m);
  for (double& v : d.x) v = rng.normal();
  d.y.resize(static_cast<std::size_t>(n));
  for (double& v : d.y) v = rng.normal();
  for (int j = 0; j < m; ++j) d.feature_names.push_back("f" + std::to_string(j));
  d.task_names.push_back("y0");
  assign_contiguous_classes(&d, num_classes);
  return d;
}

void drive_response(Dataset* d, const std::vector<int>& signal, double coef,
                    double noise_sd, std::uint64_t seed) {
  Rng rng(seed);
  for (int r = 0; r < d->n; ++r) {
    double v = 0.0;
    for (int j : signal) v += coef * d->col_x(j)[r];
    d->y[static_cast<std::size_t>(r)] = v + noise_sd * rng.normal();
  }
}

}  // namespace

TEST_CASE("model bits: new class then open class then free repeat") {
  // m = 200 features, K = 10 classes of 20: first addition pays
  // log2 10 + log2 20 + 2; a second feature from the same class pays
  // log2 Q + log2 20 + 2 with Q = 1, i.e. zero class bits.
  Dataset d = classed_dataset(30, 200, 10, 1);
  TpcState state(d);

  const CodeCosts first = tpc_model_bits(state, 0, 2.0);  // class c0 is new
  CHECK(first.l_h == doctest::Approx(std::log2(10.0)).epsilon(1e-12));  // class bits
  CHECK(first.l_i == doctest::Approx(std::log2(20.0)).epsilon(1e-12));  // slot bits
  CHECK(first.l_theta_total == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(first.total() ==
        doctest::Approx(std::log2(10.0) + std::log2(20.0) + 2.0).epsilon(1e-12));

  CHECK(state.accept(0));  // opens c0
  CHECK(state.open_classes() == 1);

  // same class again: Q = 1 so class bits are log2 1 = 0
  const CodeCosts second = tpc_model_bits(state, 1, 2.0);
  CHECK(second.l_h == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(second.total() == doctest::Approx(std::log2(20.0) + 2.0).epsilon(1e-12));

  // a different class is new again: back to log2 K
  const CodeCosts other = tpc_model_bits(state, 21, 2.0);
  CHECK(other.l_h == doctest::Approx(std::log2(10.0)).epsilon(1e-12));

  CHECK_FALSE(state.accept(1));  // same class: no new class opened
  CHECK(state.accept(21));       // new class
  CHECK(state.open_classes() == 2);

  // now an open-class addition pays log2 Q = log2 2 with Q counted BEFORE
  // the addition
  const CodeCosts third = tpc_model_bits(state, 2, 2.0);
  CHECK(third.l_h == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("tpc needs a class map; plain run falls back to flat costs") {
  Dataset with = classed_dataset(40, 60, 6, 3);
  TpcState state(with);
  CHECK_NOTHROW(tpc_model_bits(state, 0, 2.0));

  Dataset without = with;
  without.class_of.clear();
  without.class_names.clear();
  without.class_sizes.clear();
  TpcState bare(without);
  CHECK_THROWS_AS(tpc_model_bits(bare, 0, 2.0), NoClassMap);

  // run_tpc on the bare dataset uses flat log2 m + l_theta costs, which is
  // the single-response ric cost: supports must match a ric run
  drive_response(&with, {0, 25}, 1.6, 0.4, 4);
  Dataset bare2 = with;
  bare2.class_of.clear();
  bare2.class_names.clear();
  bare2.class_sizes.clear();

  TpcConfig cfg;
  const SelectionModel flat = run_tpc(bare2, cfg);
  REQUIRE_FALSE(flat.empty());
  for (const LedgerEntry& e : flat.ledger) {
    CHECK(e.d_sm == doctest::Approx(std::log2(60.0) + 2.0).epsilon(1e-12));
    CHECK_FALSE(e.new_class);
  }
}

TEST_CASE("clustered signal is cheaper under class-aware costs") {
  // True features all in one class: after the first hit the class bits
  // vanish, so tpc accepts clustered features that flat costing would
  // reject at the margin.  Here we just verify the recorded costs.
  Dataset d = classed_dataset(80, 100, 10, 7);
  drive_response(&d, {0, 1, 2}, 1.2, 0.5, 8);  // all in class c0
  TpcConfig cfg;
  const SelectionModel model = run_tpc(d, cfg);
  REQUIRE(model.ledger.size() >= 2);
  CHECK(model.ledger[0].new_class);
  CHECK(model.ledger[0].costs.l_h == doctest::Approx(std::log2(10.0)).epsilon(1e-12));
  // reopening an already-open class never costs more than naming a new one
  for (std::size_t i = 1; i < model.ledger.size(); ++i) {
    const LedgerEntry& e = model.ledger[i];
    if (!e.new_class) CHECK(e.costs.l_h <= std::log2(10.0) + 1e-12);
  }
}

TEST_CASE("savings identity: dual route agreement") {
  // tpc_savings computes flat-minus-aware in closed form; check it against a
  // literal evaluation of the two code lengths for random configurations.
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const int big_k = 1 + static_cast<int>(rng.below(12));
    std::vector<int> class_sizes(static_cast<std::size_t>(big_k));
    int m = 0;
    for (int& s : class_sizes) {
      s = 1 + static_cast<int>(rng.below(30));
      m += s;
    }
    // draw a selection: q features with distinct (class, slot) pairs
    const int q = static_cast<int>(rng.below(8));
    std::vector<int> sel_class;
    for (int i = 0; i < q; ++i) sel_class.push_back(static_cast<int>(rng.below(big_k)));
    // big_q = distinct classes actually used
    std::vector<char> used(static_cast<std::size_t>(big_k), 0);
    for (int c : sel_class) used[static_cast<std::size_t>(c)] = 1;
    int big_q = 0;
    for (char u : used) big_q += u;

    const double got = tpc_savings(q, big_q, big_k, m, class_sizes, sel_class);

    const double flat = q * (std::log2(static_cast<double>(m)) + 2.0);
    double aware = big_q * std::log2(static_cast<double>(big_k)) + 2.0 * q;
    if (q > big_q) aware += (q - big_q) * std::log2(static_cast<double>(big_q));
    for (int c : sel_class) aware += std::log2(static_cast<double>(class_sizes[static_cast<std::size_t>(c)]));
    const double expect = flat - aware;

    CHECK(got == doctest::Approx(expect).epsilon(1e-9));

    // uniform classes reduce to (q - big_q) * log2(big_k / big_q)
    if (big_q > 0) {
      std::vector<int> uniform(static_cast<std::size_t>(big_k), 7);
      const double u =
          tpc_savings(q, big_q, big_k, 7 * big_k, uniform, sel_class);
      const double reduced = (q - big_q) * std::log2(static_cast<double>(big_k) / big_q);
      CHECK(u == doctest::Approx(reduced).epsilon(1e-9));
    }
  }
  // empty selection saves nothing
  CHECK(tpc_savings(0, 0, 5, 50, {10, 10, 10, 10, 10}, {}) == 0.0);
}

TEST_CASE("savings identity validates its inputs") {
  CHECK_THROWS_AS(tpc_savings(2, 1, 3, 99, {10, 10, 10}, {0, 0}), DimensionMismatch);
  CHECK_THROWS_AS(tpc_savings(2, 2, 3, 30, {10, 10, 10}, {0, 0}), DimensionMismatch);
}

TEST_CASE("forward-backward never loses to plain tpc") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Dataset d = classed_dataset(60, 80, 8, 3000 + seed);
    drive_response(&d, {0, 1, 11, 40}, 1.0, 0.6, 4000 + seed);
    TpcConfig cfg;
    const SelectionModel plain = run_tpc(d, cfg);
    const SelectionModel fb = run_tpc_forward_backward(d, cfg);
    CHECK(fb.total_tdl <= plain.total_tdl + 1e-9);
    // the fb model's ledger still telescopes on a fresh replay
    CHECK(recompute_tdl(d, fb) == doctest::Approx(fb.total_tdl).epsilon(1e-6));
  }
}

TEST_CASE("streamwise visits features once, in order") {
  Dataset d = classed_dataset(60, 50, 5, 21);
  drive_response(&d, {5, 30}, 1.5, 0.4, 22);
  TpcConfig cfg;

  // natural order picks up the signal features when it reaches them
  const SelectionModel nat = run_tpc_streamwise(d, cfg);
  std::vector<int> got;
  for (const LedgerEntry& e : nat.ledger) got.push_back(e.feature_idx);
  // acceptance order must be increasing feature index (single pass)
  for (std::size_t i = 1; i < got.size(); ++i) CHECK(got[i - 1] < got[i]);
  CHECK(std::find(got.begin(), got.end(), 5) != got.end());
  CHECK(std::find(got.begin(), got.end(), 30) != got.end());

  // an order that never visits the signal features cannot select them
  std::vector<int> order;
  for (int j = 0; j < d.m; ++j) {
    if (j != 5 && j != 30) order.push_back(j);
  }
  const SelectionModel blind = run_tpc_streamwise(d, cfg, order);
  for (const LedgerEntry& e : blind.ledger) {
    CHECK(e.feature_idx != 5);
    CHECK(e.feature_idx != 30);
  }

  // duplicate / out-of-range orders are rejected
  CHECK_THROWS_AS(run_tpc_streamwise(d, cfg, {0, 0}), SpecError);
  CHECK_THROWS_AS(run_tpc_streamwise(d, cfg, {0, d.m}), DimensionMismatch);
}

TEST_CASE("tpc ledger telescopes and replays") {
  Dataset d = classed_dataset(70, 90, 9, 51);
  drive_response(&d, {3, 4, 50}, 1.3, 0.5, 52);
  TpcConfig cfg;
  const SelectionModel model = run_tpc(d, cfg);
  REQUIRE_FALSE(model.empty());

  TaskFit base(d, 0);
  const double base_bits = residual_bits_floored(base.rss(), d.n, base.rss_floor());
  double sum = 0.0;
  for (const LedgerEntry& e : model.ledger) {
    sum += e.d_se - e.d_sm;
    CHECK(e.d_se - e.d_sm > 0.0);  // strict improvement at every step
    CHECK(e.d_sm == doctest::Approx(e.costs.total()).epsilon(1e-12));
  }
  CHECK(model.total_tdl == doctest::Approx(base_bits - sum).epsilon(1e-9));
  CHECK(recompute_tdl(d, model) == doctest::Approx(model.total_tdl).epsilon(1e-6));
}

TEST_CASE("multi-response datasets are rejected") {
  Dataset d = classed_dataset(40, 30, 3, 61);
  d.h = 2;
  d.y.resize(static_cast<std::size_t>(d.n) * 2, 0.0);
  d.task_names.push_back("y1");
  TpcConfig cfg;
  CHECK_THROWS_AS(run_tpc(d, cfg), SpecError);
}
