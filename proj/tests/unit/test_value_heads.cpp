#include <doctest.h>

#include <cmath>
#include <limits>

#include "hra/errors.hpp"
#include "hra/oracle.hpp"
#include "hra/value_heads.hpp"
#include "reference.hpp"

using namespace hra;

TEST_SUITE("value_heads") {
  TEST_CASE("targets") {
    CHECK(td_target({TargetKind::max, 0.5}, 1.0, std::vector<double>{0.2, 0.8}, false) == doctest::Approx(1.4));
    CHECK(td_target({TargetKind::uniform_mean, 0.99}, 0.0, std::vector<double>{1, 1, 1, 1}, false) ==
          doctest::Approx(0.99));
    CHECK(td_target({TargetKind::max, 0.9}, 5.0, std::vector<double>{9, 9}, true) == 5.0);
    CHECK(td_target({TargetKind::uniform_mean, 0.9}, 5.0, std::vector<double>{9, 9}, true) == 5.0);
    CHECK_THROWS_AS(td_target({}, 0.0, std::vector<double>{}, false), InvalidArgument);
  }

  TEST_CASE("terminal targets never read next values") {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(td_target({TargetKind::max, 0.99}, 2.0, std::vector<double>{nan, nan}, true) == 2.0);
  }

  TEST_CASE("discount outside [0,1] is rejected") {
    CHECK_THROWS_AS((TargetRule{TargetKind::max, 1.5}.validate()), InvalidArgument);
    CHECK_THROWS_AS(TabularHead(3, 2, 1.0, TargetRule{TargetKind::max, -0.1}), InvalidArgument);
    CHECK_THROWS_AS(TabularHead(3, 2, 0.0, TargetRule{}), InvalidArgument);
  }

  TEST_CASE("tabular step sizes") {
    TabularHead full(2, 2, 1.0, {TargetKind::max, 0.9});
    CHECK(full.value(0, 1) == 0.0);
    CHECK(full.update(0, 1, 3.0, 1, false) == 3.0);
    CHECK(full.value(0, 1) == 3.0);

    TabularHead half(2, 2, 0.5, {TargetKind::max, 0.9});
    CHECK(half.update(0, 0, 2.0, 1, true) == 1.0);
  }

  TEST_CASE("tabular_update reads the chosen component") {
    TabularHead head(3, 2, 1.0, {TargetKind::uniform_mean, 0.5});
    head.row(2)[0] = 2.0;
    head.row(2)[1] = 4.0;
    DecomposedTransition t;
    t.s = {0};
    t.a = {1};
    t.s_next = {2};
    t.r_components = {1.0, 7.0};
    tabular_update(head, t, 1);
    CHECK(head.value(0, 1) == 7.0 + 0.5 * 3.0);
    t.terminal = true;
    t.truncated = true;
    tabular_update(head, t, 0);
    CHECK(head.value(0, 1) == 1.0 + 0.5 * 3.0);
    t.truncated = false;
    tabular_update(head, t, 0);
    CHECK(head.value(0, 1) == 1.0);
    CHECK_THROWS_AS(tabular_update(head, t, 2), InvalidArgument);
  }

  TEST_CASE("idempotent on deterministic transitions with fixed next values") {
    TabularHead head(2, 2, 1.0, {TargetKind::max, 0.9});
    head.row(1)[0] = 0.4;
    const double first = head.update(0, 0, 1.0, 1, false);
    const double second = head.update(0, 0, 1.0, 1, false);
    CHECK(first == second);
  }

  TEST_CASE("mean-rule sweeps on a 3-cell corridor reach the uniform-policy values") {
    const EnumeratedMdp mdp = ref::corridor(3);
    const double gamma = 0.9;
    TabularHead head(3, 2, 1.0, {TargetKind::uniform_mean, gamma});
    double change = 1.0;
    while (change >= 1e-9) {
      change = 0.0;
      for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t a = 0; a < 2; ++a) {
          const Outcome& o = mdp.outcomes(s, a)[0];
          const double before = head.value(s, a);
          head.update(s, a, o.rewards[0], o.next, mdp.terminal(o.next));
          change = std::max(change, std::abs(head.value(s, a) - before));
        }
    }
    const QTable expected = ref::uniform_q(mdp, gamma);
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t a = 0; a < 2; ++a) CHECK(std::abs(head.value(s, a) - expected.at(s, a)) < 1e-6);
  }
}
