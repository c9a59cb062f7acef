#include "doctest.h"
#include "support.hpp"

#include "sessionscreen/analysis.hpp"
#include "sessionscreen/error.hpp"
#include "sessionscreen/rng.hpp"
#include "sessionscreen/synth.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace sessionscreen;
using testing_support::make_session;

namespace {

AggregatedLabel label_for(const std::string& id, int bullying, int aggression, int n = 5) {
  AggregatedLabel a;
  a.session_id = id;
  a.n_labels = n;
  a.bullying_votes = bullying;
  a.aggression_votes = aggression;
  a.final_class = bullying * 10 >= 6 * n ? FinalClass::bullying : FinalClass::not_bullying;
  return a;
}

MediaSession with_categories(const std::string& id, std::set<std::string> cats) {
  MediaSession s = make_session(id, {"x"});
  s.image_categories = std::move(cats);
  return s;
}

}  // namespace

TEST_CASE("pearson on exact linear relations") {
  const std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y, z;
  for (double v : x) {
    y.push_back(2 * v + 1);
    z.push_back(-v);
  }
  CHECK(pearson(x, y) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson(x, z) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("pearson matches the direct formula") {
  const std::vector<double> x = {1, 2, 3, 4}, y = {2, 1, 4, 3};
  const double n = 4;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (int i = 0; i < 4; ++i) {
    sx += x[static_cast<std::size_t>(i)];
    sy += y[static_cast<std::size_t>(i)];
    sxx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    syy += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    sxy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
  }
  const double direct = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
  CHECK(std::abs(pearson(x, y) - direct) <= 1e-12);
  CHECK(std::abs(pearson(x, y) - 0.6) <= 1e-12);
}

TEST_CASE("pearson errors") {
  const std::vector<double> a = {1, 2, 3}, c = {4, 4, 4}, one = {1};
  CHECK_THROWS_AS(pearson(a, c), NumericalError);
  CHECK_THROWS_AS(pearson(a, one), ValidationError);
  CHECK_THROWS_AS(pearson(one, one), ValidationError);
}

TEST_CASE("pearson is affine invariant and bounded") {
  Rng rng(70);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<std::size_t>(rng.between(2, 60));
    std::vector<double> x(n), y(n), xa(n), yc(n);
    const double a = rng.uniform(0.01, 100), b = rng.uniform(-50, 50), c = rng.uniform(0.01, 100), d = rng.uniform(-50, 50);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.uniform(-1, 1) * x[i] + rng.normal();
      xa[i] = a * x[i] + b;
      yc[i] = c * y[i] + d;
    }
    const double r = pearson(x, y);
    CHECK(std::abs(r) <= 1.0);
    CHECK(std::abs(pearson(xa, yc) - r) <= 1e-12);
  }
}

TEST_CASE("correlation table covers four meta fields for both questions") {
  std::vector<MediaSession> sessions;
  std::vector<AggregatedLabel> labels;
  Rng rng(71);
  for (int i = 0; i < 200; ++i) {
    MediaSession s = make_session("s" + std::to_string(i), {"x"});
    const int votes = static_cast<int>(rng.between(0, 5));
    s.owner.followed_by = 100 * votes + static_cast<long long>(rng.between(0, 150));
    s.owner.follows = rng.between(0, 1000);
    s.owner.shared_media = rng.between(0, 1000);
    s.likes = rng.between(0, 1000);
    sessions.push_back(s);
    labels.push_back(label_for(s.session_id, votes, std::min(5, votes + static_cast<int>(rng.between(0, 1)))));
  }
  labels.push_back(label_for("unused", 1, 1));
  const auto t = correlation_table(sessions, labels);
  CHECK(t.pairs.size() == 8);
  for (const auto& c : t.pairs) {
    CHECK(std::abs(c.r) <= 1.0);
    CHECK(c.n == 200);
  }
  CHECK(t.at("followed_by", Question::bullying).r > t.at("follows", Question::bullying).r);
  CHECK(t.at("followed_by", Question::aggression).r > 0.5);
  CHECK_THROWS(t.at("height", Question::bullying));
}

TEST_CASE("independent meta data shows weak correlation") {
  std::vector<MediaSession> sessions;
  std::vector<AggregatedLabel> labels;
  Rng rng(72);
  for (int i = 0; i < 1000; ++i) {
    MediaSession s = make_session("s" + std::to_string(i), {"x"});
    s.owner = {rng.between(0, 5000), rng.between(0, 5000), rng.between(0, 5000)};
    s.likes = rng.between(0, 5000);
    sessions.push_back(s);
    labels.push_back(label_for(s.session_id, static_cast<int>(rng.between(0, 5)), static_cast<int>(rng.between(0, 5))));
  }
  for (const auto& c : correlation_table(sessions, labels).pairs) CHECK(std::abs(c.r) < 0.1);
}

TEST_CASE("correlation table errors") {
  std::vector<MediaSession> sessions = {make_session("a", {"x"}), make_session("b", {"x"}), make_session("c", {"x"})};
  sessions[0].likes = 1;
  std::vector<AggregatedLabel> labels = {label_for("a", 2, 2), label_for("b", 2, 2), label_for("c", 2, 2)};
  CHECK_THROWS_AS(correlation_table(sessions, labels), NumericalError);
  labels.pop_back();
  try {
    correlation_table(sessions, labels);
    FAIL("expected a join error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("c") != std::string::npos);
  }
}

TEST_CASE("temporal sweep shape and errors") {
  std::vector<MediaSession> sessions;
  std::vector<AggregatedLabel> labels;
  for (int i = 0; i < 10; ++i) {
    MediaSession s = make_session("s" + std::to_string(i), std::vector<std::string>(6, "x"), 100 + 2000 * i);
    sessions.push_back(s);
    labels.push_back(label_for(s.session_id, 5 - i / 2, 5));
  }
  const std::vector<std::int64_t> windows = {300, 3600, 86400};
  const auto sweep = temporal_correlation_sweep(sessions, labels, std::span<const std::int64_t>(windows.data(), 2));
  CHECK(sweep.size() == 2);
  CHECK(sweep[0].window_seconds == 300);
  CHECK(sweep[1].window_seconds == 3600);
  CHECK(sweep[1].r > 0.5);

  const std::vector<std::int64_t> bad = {3600, 300};
  CHECK_THROWS_AS(temporal_correlation_sweep(sessions, labels, bad), ValidationError);
  const std::vector<std::int64_t> zero = {0};
  CHECK_THROWS_AS(temporal_correlation_sweep(sessions, labels, zero), ValidationError);

  std::vector<MediaSession> singles;
  for (int i = 0; i < 4; ++i) singles.push_back(make_session("s" + std::to_string(i), {"x"}));
  CHECK_THROWS_AS(temporal_correlation_sweep(singles, labels, windows), NumericalError);

  TemporalSweepOptions binary;
  binary.binary_label = true;
  const auto b = temporal_correlation_sweep(sessions, labels, std::span<const std::int64_t>(windows.data(), 2), binary);
  CHECK(b.size() == 2);
  CHECK(b[1].r > 0.0);
  // Every gap is under a day, so the last window sees constant burst counts.
  CHECK_THROWS_AS(temporal_correlation_sweep(sessions, labels, windows), NumericalError);
}

TEST_CASE("interarrival statistics") {
  MediaSession s = make_session("a", {});
  for (std::int64_t t : {0, 10, 40, 100}) s.comments.push_back({"u", "x", t});
  const auto st = interarrival_stats(s);
  CHECK(st.median == 30.0);
  CHECK(st.mean == doctest::Approx(100.0 / 3));
  CHECK(st.variance == doctest::Approx(((10 - 100.0 / 3) * (10 - 100.0 / 3) + (30 - 100.0 / 3) * (30 - 100.0 / 3) +
                                        (60 - 100.0 / 3) * (60 - 100.0 / 3)) /
                                       3));
  CHECK(interarrival_stats(make_session("b", {"x"})).mean == 0.0);
}

TEST_CASE("ccdf examples") {
  const std::vector<double> v = {1, 2, 2, 4};
  const auto c = ccdf(v);
  REQUIRE(c.size() == 3);
  CHECK(c[0].value == 1);
  CHECK(c[0].fraction == 1.0);
  CHECK(c[1].value == 2);
  CHECK(c[1].fraction == 0.75);
  CHECK(c[2].value == 4);
  CHECK(c[2].fraction == 0.25);

  const std::vector<double> same = {5, 5};
  const auto s = ccdf(same);
  REQUIRE(s.size() == 1);
  CHECK(s[0].fraction == 1.0);
  CHECK_THROWS_AS(ccdf(std::vector<double>{}), ValidationError);
}

TEST_CASE("ccdf is monotone on random samples") {
  Rng rng(73);
  std::vector<double> v;
  for (int i = 0; i < 1000; ++i) v.push_back(std::floor(rng.exponential(20)));
  const auto c = ccdf(v);
  CHECK(c.front().fraction == 1.0);
  for (std::size_t i = 1; i < c.size(); ++i) {
    CHECK(c[i].value > c[i - 1].value);
    CHECK(c[i].fraction < c[i - 1].fraction);
  }
  const double top = *std::max_element(v.begin(), v.end());
  CHECK(c.back().value == top);
  CHECK(c.back().fraction == std::count(v.begin(), v.end(), top) / 1000.0);
}

TEST_CASE("category vote distribution") {
  const std::vector<MediaSession> sessions = {with_categories("a", {"tattoo"}), with_categories("b", {"tattoo"}),
                                              with_categories("c", {"person_people", "text"}),
                                              with_categories("d", {})};
  const std::vector<AggregatedLabel> labels = {label_for("a", 5, 5), label_for("b", 5, 5), label_for("c", 1, 2),
                                               label_for("d", 1, 1)};
  const auto d = category_vote_distribution(sessions, labels, Question::bullying);
  const auto tattoo = *category_index("tattoo");
  CHECK(d.fractions[5][tattoo] == 1.0);
  CHECK(d.sessions_per_k[5] == 2);
  CHECK(d.fractions[1][*category_index("person_people")] == 0.5);
  CHECK(d.fractions[1][*category_index("text")] == 0.5);
  CHECK(d.fractions[3][tattoo] == 0.0);

  const auto agg = category_vote_distribution(sessions, labels, Question::aggression);
  CHECK(agg.fractions[2][*category_index("text")] == 1.0);
}

TEST_CASE("category fractions are bounded on synthetic data") {
  SynthConfig cfg;
  cfg.n_sessions = 120;
  const auto c = generate_corpus(cfg);
  const auto agg = aggregate_all(generate_labels(c.sessions, c.true_classes, cfg));
  const auto d = category_vote_distribution(c.sessions, agg, Question::bullying);
  for (const auto& row : d.fractions) {
    for (double f : row) {
      CHECK(f >= 0.0);
      CHECK(f <= 1.0);
    }
  }
}

TEST_CASE("co-label fractions") {
  std::vector<MediaSession> sessions;
  for (int i = 0; i < 6; ++i) sessions.push_back(with_categories("e" + std::to_string(i), {"person_people"}));
  for (int i = 0; i < 2; ++i) sessions.push_back(with_categories("t" + std::to_string(i), {"person_people", "text"}));
  for (int i = 0; i < 2; ++i) sessions.push_back(with_categories("c" + std::to_string(i), {"person_people", "car"}));
  sessions.push_back(with_categories("z", {"food"}));
  const auto f = colabel_fraction(sessions, "person_people");
  CHECK(f.n_anchor == 10);
  CHECK(f.exclusive == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(f.with.at("text") == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(f.with.at("car") == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(f.with.at("food") == 0.0);
  CHECK_FALSE(f.with.contains("person_people"));

  const std::vector<MediaSession> only = {with_categories("a", {"tattoo"})};
  CHECK(colabel_fraction(only, "tattoo").exclusive == 1.0);
  CHECK_THROWS_AS(colabel_fraction(only, "sports"), ValidationError);
  CHECK_THROWS_AS(colabel_fraction(only, "portrait"), ValidationError);
}
