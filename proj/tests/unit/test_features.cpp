#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "doctest.h"
#include "expect.hpp"
#include "oracles.hpp"
#include "ransd/common/random.hpp"
#include "ransd/features/mutual_information.hpp"
#include "ransd/features/ngram.hpp"
#include "ransd/features/pca.hpp"
#include "ransd/features/wrapper.hpp"

using namespace ransd;
using namespace ransd::features;
using namespace ransd::testing;

namespace {

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Matrix m(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = g(rng);
  return m;
}

// 1/N covariance computed directly.
Matrix naive_covariance(const Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j) / static_cast<double>(n);
  Matrix c(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += (x(i, a) - mean[a]) * (x(i, b) - mean[b]);
      c(a, b) = s / static_cast<double>(n);
    }
  return c;
}

void check_pca_invariants(const Matrix& x, const PcaModel& m) {
  const std::size_t d = x.cols();
  const Matrix c = naive_covariance(x);
  double trace = 0.0;
  for (std::size_t j = 0; j < d; ++j) trace += c(j, j);
  CHECK(std::accumulate(m.eigenvalues.begin(), m.eigenvalues.end(), 0.0) ==
        doctest::Approx(trace).epsilon(1e-8));
  CHECK(std::is_sorted(m.eigenvalues.rbegin(), m.eigenvalues.rend()));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += m.components(k, a) * m.components(k, b);
      CHECK(std::abs(dot - (a == b ? 1.0 : 0.0)) <= 1e-9);
    }
    double residual = 0.0, largest = 0.0;
    for (std::size_t r = 0; r < d; ++r) {
      double cw = 0.0;
      for (std::size_t k = 0; k < d; ++k) cw += c(r, k) * m.components(k, a);
      residual = std::max(residual, std::abs(cw - m.eigenvalues[a] * m.components(r, a)));
      if (std::abs(m.components(r, a)) > std::abs(largest)) largest = m.components(r, a);
    }
    CHECK(residual <= 1e-8);
    CHECK(largest > 0.0);
  }
  const Matrix z = transform(m, x);
  for (std::size_t a = 0; a < d; ++a) {
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += z(i, a) / static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) var += (z(i, a) - mean) * (z(i, a) - mean);
    CHECK(std::abs(mean) <= 1e-8);
    CHECK(var / static_cast<double>(x.rows()) == doctest::Approx(m.eigenvalues[a]).epsilon(1e-8).scale(1.0));
  }
  const Matrix back = inverse_transform(m, z);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j) CHECK(std::abs(back(i, j) - x(i, j)) <= 1e-8);
}

std::vector<NGram> sliding_window(const std::vector<std::string>& s, int n) {
  std::vector<NGram> out;
  for (int i = 0; i + n <= static_cast<int>(s.size()); ++i)
    out.emplace_back(s.begin() + i, s.begin() + i + n);
  return out;
}

}  // namespace

TEST_CASE("pca on axis-confined and diagonal data") {
  const auto m = fit_pca(Matrix::from_rows({{0, 0}, {1, 0}, {2, 0}, {3, 0}}));
  CHECK(m.components(0, 0) == doctest::Approx(1.0));
  CHECK(m.components(1, 0) == doctest::Approx(0.0));
  CHECK(m.eigenvalues[0] == doctest::Approx(1.25));
  CHECK(m.eigenvalues[1] == doctest::Approx(0.0));
  CHECK(m.explained_variance_ratio[0] == doctest::Approx(1.0));
  CHECK(m.explained_variance_ratio[1] == doctest::Approx(0.0));

  const auto diag = fit_pca(Matrix::from_rows({{0, 0}, {1, 1}}));
  CHECK(diag.components(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(diag.components(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));

  const auto z = transform(diag, Matrix::from_rows({diag.mean}));
  CHECK(z(0, 0) == doctest::Approx(0.0));
  CHECK(z(0, 1) == doctest::Approx(0.0));

  CHECK_ERROR_KIND(fit_pca(Matrix::from_rows({{1, 2}})), ErrorKind::DegenerateInput);
  CHECK_ERROR_KIND(fit_pca(Matrix::from_rows({{1, NAN}, {2, 3}})), ErrorKind::NonFinite);
  CHECK_ERROR_KIND(transform(diag, Matrix(1, 3)), ErrorKind::DimensionMismatch);
}

TEST_CASE("pca eigenvalues match the characteristic cubic") {
  Rng rng(21);
  for (int trial = 0; trial < 25; ++trial) {
    Matrix x = random_matrix(rng, 40, 3);
    for (std::size_t i = 0; i < x.rows(); ++i) x(i, 1) += 0.7 * x(i, 0);
    const auto m = fit_pca(x);
    const Matrix c = naive_covariance(x);
    std::array<std::array<double, 3>, 3> a{};
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) a[r][s] = c(r, s);
    const auto roots = cubic_eigenvalues(a);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(m.eigenvalues[k] - roots[k]) <= 1e-8);
    check_pca_invariants(x, m);
  }
}

TEST_CASE("pca invariants on wider random data") {
  Rng rng(3);
  for (std::size_t d : {1u, 5u, 12u}) {
    const Matrix x = random_matrix(rng, 30, d, 2.5);
    check_pca_invariants(x, fit_pca(x));
  }
}

TEST_CASE("pca recovers rotated axis-aligned coordinates") {
  // A product grid has exactly zero sample covariance between its axes.
  std::vector<std::vector<double>> original, rotated;
  for (double u : {-3.0, -1.0, 1.0, 3.0, -7.0, 7.0})
    for (double v : {-0.5, 0.5, -1.5, 1.5}) original.push_back({u, v});
  for (double theta : {0.3, 1.1, 2.5}) {
    rotated.clear();
    for (const auto& p : original)
      rotated.push_back({std::cos(theta) * p[0] - std::sin(theta) * p[1] + 4.0,
                         std::sin(theta) * p[0] + std::cos(theta) * p[1] - 2.0});
    const Matrix x = Matrix::from_rows(rotated);
    const auto m = fit_pca(x);
    const Matrix z = transform(m, x);
    for (std::size_t axis = 0; axis < 2; ++axis) {
      const double sign = z(0, axis) * original[0][axis] >= 0 ? 1.0 : -1.0;
      for (std::size_t i = 0; i < original.size(); ++i)
        CHECK(std::abs(sign * z(i, axis) - original[i][axis]) <= 1e-9);
    }
  }
}

TEST_CASE("components_for_variance and scree") {
  PcaModel m;
  m.mean = {0, 0, 0};
  m.eigenvalues = {6, 3, 1};
  m.explained_variance_ratio = {0.6, 0.3, 0.1};
  m.components = Matrix(3, 3);
  CHECK(components_for_variance(m, 0.9) == 2);
  CHECK(components_for_variance(m, 0.5) == 1);
  CHECK(components_for_variance(m, 1.0) == 3);

  Rng rng(4);
  const Matrix x = random_matrix(rng, 25, 6);
  const auto fitted = fit_pca(x);
  const auto pts = scree(fitted);
  REQUIRE(pts.size() == 6);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    cumulative += fitted.explained_variance_ratio[i];
    CHECK(pts[i].component == i + 1);
    CHECK(pts[i].cumulative_ratio == doctest::Approx(cumulative).epsilon(1e-12));
    if (i) CHECK(pts[i].cumulative_ratio >= pts[i - 1].cumulative_ratio);
  }
  CHECK(pts.front().cumulative_ratio == doctest::Approx(fitted.explained_variance_ratio[0]));
  CHECK(std::abs(pts.back().cumulative_ratio - 1.0) <= 1e-9);
  std::ostringstream csv;
  write_scree_csv(csv, pts);
  CHECK(csv.str().rfind("component,eigenvalue,cumulative_ratio\n", 0) == 0);
}

TEST_CASE("constructed rank is recovered at 0.999") {
  Rng rng(17);
  for (int trial = 0; trial < 3; ++trial) {
    const Matrix signal = random_matrix(rng, 120, 5);
    const Matrix mix = random_matrix(rng, 5, 50);
    const Matrix x = signal * mix;
    const auto m = fit_pca(x);
    CHECK(components_for_variance(m, 0.999) == 5);
    std::size_t nonzero = 0;
    for (double v : m.eigenvalues) nonzero += v > 1e-9 * m.eigenvalues[0];
    CHECK(nonzero == 5);
    CHECK(components_for_variance(m, 1.0) <= 5);
  }
}

TEST_CASE("mutual information reference values") {
  const std::vector<int> a = {0, 1, 0, 1}, b = {0, 0, 1, 1};
  CHECK(mutual_information(a, a) == doctest::Approx(1.0));
  CHECK(mutual_information(b, a) == doctest::Approx(0.0));
  const std::vector<int> x = {0, 0, 0, 1}, y = {0, 0, 1, 1};
  CHECK(mutual_information(x, y) == doctest::Approx(contingency_mi(x, y)).epsilon(1e-12));
  CHECK(mutual_information(x, y) == doctest::Approx(0.31127812445913283).epsilon(1e-12));
  const std::size_t counts[2][2] = {{2, 0}, {1, 1}};
  CHECK(mutual_information_2x2(counts) == doctest::Approx(contingency_mi(x, y)).epsilon(1e-12));
  CHECK(entropy_bits(a) == doctest::Approx(1.0));

  CHECK_ERROR_KIND(mutual_information(a, std::vector<int>{0, 1}), ErrorKind::LengthMismatch);
  CHECK_ERROR_KIND(mutual_information(std::vector<int>{}, std::vector<int>{}), ErrorKind::InvalidArgument);
}

TEST_CASE("mutual information properties on random tables") {
  Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> len(1, 40), card(1, 4);
    const int n = len(rng), kx = card(rng), ky = card(rng);
    std::uniform_int_distribution<int> dx(0, kx - 1), dy(0, ky - 1);
    std::vector<int> x(n), y(n);
    for (int i = 0; i < n; ++i) x[i] = dx(rng), y[i] = dy(rng);
    const double mi = mutual_information(x, y);
    CHECK(mi >= 0.0);
    CHECK(mi == doctest::Approx(contingency_mi(x, y)).epsilon(1e-12).scale(1.0));
    CHECK(mi == doctest::Approx(mutual_information(y, x)).epsilon(1e-12).scale(1.0));
    CHECK(mi <= std::min(plug_in_entropy(x), plug_in_entropy(y)) + 1e-12);
    std::vector<int> relabeled(n);
    for (int i = 0; i < n; ++i) relabeled[i] = 7 * (kx - 1 - x[i]) + 3;
    CHECK(mutual_information(relabeled, y) == doctest::Approx(mi).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("rank_by_mi over sparse rows") {
  Rng rng(12);
  std::bernoulli_distribution coin(0.5), rare(0.2);
  const std::size_t d = 7, n = 20;
  std::vector<dynamic::SparseFeatureVector> rows(n);
  std::vector<std::vector<int>> cols(d, std::vector<int>(n));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool mal = i % 2 == 0;
    y[i] = mal;
    rows[i].dimension = d;
    rows[i].label = mal ? Label::Malicious : Label::Benign;
    for (std::size_t j = 0; j < d; ++j) {
      bool on = false;
      if (j == 2) on = mal;                 // equals the label
      else if (j == 4) on = false;          // constant
      else if (j == 5) on = mal ? coin(rng) : rare(rng);
      else on = coin(rng);
      cols[j][i] = on;
      if (on) rows[i].active.push_back(j);
    }
  }
  const auto table = rank_by_mi(rows);
  REQUIRE(table.scores.size() == d);
  for (std::size_t j = 0; j < d; ++j)
    CHECK(table.scores[j] == doctest::Approx(contingency_mi(cols[j], y)).epsilon(1e-12).scale(1.0));
  CHECK(table.order.front() == 2);
  CHECK(table.scores[2] == doctest::Approx(plug_in_entropy(y)));
  CHECK(table.scores[4] == 0.0);
  for (std::size_t k = 1; k < d; ++k) {
    const auto p = table.order[k - 1], q = table.order[k];
    CHECK((table.scores[p] > table.scores[q] || (table.scores[p] == table.scores[q] && p < q)));
  }
  CHECK(table.top(3) == std::vector<std::size_t>(table.order.begin(), table.order.begin() + 3));

  Matrix dense(n, d);
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = *rows[i].label;
    for (std::size_t j = 0; j < d; ++j) dense(i, j) = cols[j][i];
  }
  CHECK(rank_by_mi(dense, labels).scores == table.scores);

  for (auto& r : rows) r.label = Label::Benign;
  CHECK_ERROR_KIND(rank_by_mi(rows), ErrorKind::SingleClass);
}

TEST_CASE("median binarisation") {
  const Matrix x = Matrix::from_rows({{1, 5}, {2, 5}, {3, 5}, {10, 5}});
  const auto med = column_medians(x);
  CHECK(med[0] == doctest::Approx(2.5));
  CHECK(med[1] == 5.0);
  const Matrix b = binarize_at(x, med);
  CHECK(b.column(0) == std::vector<double>{0, 0, 1, 1});
  CHECK(b.column(1) == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("greedy wrapper trivial cases") {
  // Feature 3 alone predicts perfectly; the others are noise.
  const std::vector<std::size_t> candidates = {0, 1, 2, 3, 4};
  const SubsetEvaluator eval = [](std::span<const std::size_t> f) {
    const bool has3 = std::find(f.begin(), f.end(), 3) != f.end();
    return has3 ? 1.0 : 0.5 + 0.01 * static_cast<double>(f.size());
  };
  const auto trace = greedy_wrapper_select(candidates, eval, 3);
  REQUIRE(trace.steps.size() == 3);
  CHECK(trace.steps[0].added == 3);
  CHECK(trace.steps[0].accuracy == 1.0);
  CHECK(trace.best_k == 1);
  CHECK(trace.selected == std::vector<std::size_t>{3});
  CHECK(greedy_wrapper_select(candidates, eval, 0).steps.empty());

  const SubsetEvaluator broken = [](std::span<const std::size_t>) -> double { throw std::runtime_error("boom"); };
  CHECK_ERROR_KIND(greedy_wrapper_select(candidates, broken, 1), ErrorKind::EvaluatorFailure);
}

TEST_CASE("greedy wrapper matches an exhaustive per-step argmax") {
  Rng rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 60, d = 6;
  Matrix x(n, d);
  std::vector<Label> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool mal = i % 2 == 0;
    y[i] = mal ? Label::Malicious : Label::Benign;
    for (std::size_t j = 0; j < d; ++j) x(i, j) = g(rng) + (mal ? 0.3 * static_cast<double>(j % 3) : 0.0);
  }
  const auto eval = make_svm_evaluator(x, y, 5);
  const std::vector<std::size_t> candidates = {5, 0, 3, 1, 4, 2};
  const auto trace = greedy_wrapper_select(candidates, eval, 3);
  REQUIRE(trace.steps.size() == 3);

  std::vector<std::size_t> current;
  std::vector<std::size_t> remaining = {0, 1, 2, 3, 4, 5};
  for (std::size_t k = 0; k < 3; ++k) {
    double best = -1.0;
    std::size_t pick = 0;
    for (auto c : remaining) {
      auto trial = current;
      trial.push_back(c);
      const double acc = eval(trial);
      if (acc > best) best = acc, pick = c;
    }
    CHECK(trace.steps[k].added == pick);
    CHECK(trace.steps[k].accuracy == best);
    current.push_back(pick);
    remaining.erase(std::find(remaining.begin(), remaining.end(), pick));
  }
  const auto bsf = trace.best_so_far();
  CHECK(std::is_sorted(bsf.begin(), bsf.end()));
  CHECK(trace.selected.size() == trace.best_k);
  CHECK(std::equal(trace.selected.begin(), trace.selected.end(), current.begin()));
  CHECK(trace.steps[trace.best_k - 1].accuracy == *std::max_element(bsf.begin(), bsf.end()));

  std::vector<Label> one(n, Label::Benign);
  CHECK_ERROR_KIND(make_svm_evaluator(x, one, 5), ErrorKind::SingleClass);
}

TEST_CASE("n-grams of a short sentence") {
  const std::vector<std::string> s = {"Please", "take", "the", "notice"};
  const auto bi = extract_ngrams(s, 2);
  CHECK(bi == std::vector<NGram>{{"Please", "take"}, {"take", "the"}, {"the", "notice"}});
  CHECK(extract_ngrams(s, 5).empty());
  CHECK(extract_ngrams(s, 4).size() == 1);
  CHECK_ERROR_KIND(extract_ngrams(s, 0), ErrorKind::InvalidN);

  Rng rng(2);
  std::uniform_int_distribution<int> tok(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> seq(10);
    for (auto& t : seq) t = std::string(1, static_cast<char>('a' + tok(rng)));
    CHECK(extract_ngrams(seq, 3) == sliding_window(seq, 3));
  }
}

TEST_CASE("n-gram tables match a full scan") {
  Rng rng(6);
  std::uniform_int_distribution<int> len(0, 9), tok(0, 2);
  std::vector<std::vector<std::string>> seqs(10);
  for (auto& s : seqs) {
    s.resize(static_cast<std::size_t>(len(rng)));
    for (auto& t : s) t = std::string(1, static_cast<char>('k' + tok(rng)));
  }
  for (int n : {1, 3, 4}) {
    const auto table = build_ngram_table(seqs, n);
    std::map<NGram, std::size_t> counts;
    std::set<NGram> repeated;
    std::size_t mass = 0;
    for (const auto& s : seqs) {
      std::map<NGram, std::size_t> local;
      for (const auto& g : sliding_window(s, n)) ++counts[g], ++local[g];
      for (const auto& [g, c] : local)
        if (c >= 2) repeated.insert(g);
      mass += s.size() >= static_cast<std::size_t>(n) ? s.size() - static_cast<std::size_t>(n) + 1 : 0;
    }
    CHECK(table.counts == counts);
    CHECK(table.repeated == repeated);
    CHECK(table.total() == mass);
  }
}

TEST_CASE("class n-gram report on planted and mirrored corpora") {
  auto planted = make_planted_corpus(3, 20);
  const std::vector<int> ns = {3, 4};
  const auto report = class_ngram_report(planted.reports, dynamic::OpKind::Delete, ns);
  REQUIRE(report.per_n.size() == 2);
  const auto& tri = report.per_n[0];
  CHECK(tri.n == 3);
  CHECK(tri.malicious.repeated == std::set<NGram>{planted.delete_sequence});
  CHECK(tri.benign.repeated.empty());
  CHECK(tri.intersection.empty());
  CHECK(report.intersections_empty());
  CHECK(ngram_summary_text(report).find("no sequence is shared") != std::string::npos);

  std::vector<dynamic::BehaviorReport> mirrored;
  for (std::size_t i = 0; i < 5; ++i) {
    dynamic::BehaviorReport r;
    r.registry(dynamic::OpKind::Delete) = {"a", "b", "c", "d", "e"};
    if (i == 2) r.registry(dynamic::OpKind::Delete).push_back("f");
    for (Label l : {Label::Malicious, Label::Benign}) {
      r.label = l;
      mirrored.push_back(r);
    }
  }
  const auto same = class_ngram_report(mirrored, dynamic::OpKind::Delete, ns);
  for (const auto& c : same.per_n) {
    std::set<NGram> keys;
    for (const auto& [g, cnt] : c.malicious.counts) keys.insert(g);
    CHECK(c.intersection == keys);
  }
  CHECK(!same.intersections_empty());

  for (auto& r : mirrored) r.label = Label::Benign;
  CHECK_ERROR_KIND(class_ngram_report(mirrored, dynamic::OpKind::Delete, ns), ErrorKind::SingleClass);
}

TEST_CASE("co-occurrence probabilities match count ratios") {
  Rng rng(41);
  std::bernoulli_distribution coin(0.4);
  const std::vector<std::string> keys = {"k1", "k2", "k3", "k4", "k5"};
  std::vector<dynamic::BehaviorReport> reports(8);
  for (auto& r : reports)
    for (const auto& k : keys)
      if (coin(rng)) r.registry(dynamic::OpKind::Write).push_back(k);
  reports[0].registry(dynamic::OpKind::Write).push_back("k1");

  const auto m = cooccurrence_probability(reports, dynamic::OpKind::Write);
  for (std::size_t a = 0; a < m.tokens.size(); ++a) {
    for (std::size_t b = 0; b < m.tokens.size(); ++b) {
      std::size_t na = 0, nab = 0;
      for (const auto& r : reports) {
        const auto& seq = r.registry(dynamic::OpKind::Write);
        const bool ha = std::count(seq.begin(), seq.end(), m.tokens[a]) > 0;
        const bool hb = std::count(seq.begin(), seq.end(), m.tokens[b]) > 0;
        na += ha;
        nab += ha && hb;
      }
      REQUIRE(na > 0);
      REQUIRE(m.at(a, b).has_value());
      CHECK(*m.at(a, b) == doctest::Approx(static_cast<double>(nab) / static_cast<double>(na)));
      if (a == b) CHECK(*m.at(a, b) == 1.0);
    }
  }

  std::vector<dynamic::BehaviorReport> pair(3);
  pair[0].registry(dynamic::OpKind::Write) = {"a", "b"};
  pair[1].registry(dynamic::OpKind::Write) = {"b", "a"};
  pair[2].registry(dynamic::OpKind::Write) = {"c"};
  const auto p = cooccurrence_probability(pair, dynamic::OpKind::Write, {"a", "b", "c", "zz"});
  CHECK(*p.at(0, 1) == 1.0);
  CHECK(*p.at(1, 0) == 1.0);
  CHECK(*p.at(0, 2) == 0.0);
  CHECK(!p.at(3, 0).has_value());
}
