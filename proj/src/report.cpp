#include "tir/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace tir {

namespace {

std::string fmt(std::optional<double> v) {
  if (!v) return "-";
  char buf[64];
  if (*v == static_cast<double>(static_cast<long long>(*v)) &&
      std::abs(*v) < 1e15)
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(*v));
  else
    std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

ComparisonRow make_row(const std::string& name, std::optional<double> a,
                       std::optional<double> b, bool lower_is_better) {
  ComparisonRow r;
  r.metric = name;
  r.a = a;
  r.b = b;
  r.lower_is_better = lower_is_better;
  if (!a || !b) {
    r.better = "excluded";
    return r;
  }
  r.delta = *a - *b;
  if (*b != 0) r.pct_change = (*a - *b) / std::abs(*b) * 100.0;
  if (*a == *b)
    r.better = "tie";
  else if ((*a > *b) != lower_is_better)
    r.better = "a";
  else
    r.better = "b";
  return r;
}

}  // namespace

Comparison compare_reports(const ReplayReport& a, const ReplayReport& b,
                           const std::string& a_name,
                           const std::string& b_name) {
  Comparison c;
  c.a_name = a_name;
  c.b_name = b_name;
  auto opt = [](std::optional<uint64_t> v) -> std::optional<double> {
    if (!v) return std::nullopt;
    return static_cast<double>(*v);
  };
  c.rows.push_back(make_row("unique_bugs", double(a.unique_bugs),
                            double(b.unique_bugs), false));
  c.rows.push_back(make_row("unique_traces", double(a.unique_traces),
                            double(b.unique_traces), false));
  c.rows.push_back(make_row("time_to_first_bug", opt(a.time_to_first_bug),
                            opt(b.time_to_first_bug), true));
  c.rows.push_back(make_row("target_relevant_coverage",
                            a.target_relevant_coverage,
                            b.target_relevant_coverage, false));
  c.rows.push_back(make_row("target_reaches", double(a.target_reaches),
                            double(b.target_reaches), false));
  c.rows.push_back(make_row("target_reaching_inputs",
                            double(a.target_reaching_inputs),
                            double(b.target_reaching_inputs), false));
  c.rows.push_back(make_row("throughput", a.throughput, b.throughput, false));
  return c;
}

std::string render_table(const Comparison& c) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"metric", c.a_name, c.b_name, "delta", "pct", "better"});
  for (const ComparisonRow& r : c.rows)
    cells.push_back({r.metric, fmt(r.a), fmt(r.b), fmt(r.delta),
                     r.pct_change ? fmt(r.pct_change) + "%" : "-",
                     r.better == "a" ? c.a_name
                     : r.better == "b" ? c.b_name
                                       : r.better});
  std::vector<size_t> width(cells[0].size(), 0);
  for (const auto& row : cells)
    for (size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  std::string out;
  for (size_t ri = 0; ri < cells.size(); ++ri) {
    for (size_t i = 0; i < cells[ri].size(); ++i) {
      out += cells[ri][i];
      out.append(width[i] - cells[ri][i].size() + (i + 1 < width.size() ? 2 : 0),
                 ' ');
    }
    out += "\n";
    if (ri == 0) {
      for (size_t i = 0; i < width.size(); ++i)
        out.append(width[i] + (i + 1 < width.size() ? 2 : 0), '-');
      out += "\n";
    }
  }
  return out;
}

std::string render_csv(const Comparison& c) {
  std::string out = "metric," + c.a_name + "," + c.b_name + ",delta,pct,better\n";
  for (const ComparisonRow& r : c.rows) {
    out += r.metric + "," + fmt(r.a) + "," + fmt(r.b) + "," + fmt(r.delta) +
           "," + fmt(r.pct_change) + "," + r.better + "\n";
  }
  return out;
}

SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b,
                   bool lower_is_better) {
  SignTest t;
  size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (a[i] == b[i])
      ++t.ties;
    else if ((a[i] > b[i]) != lower_is_better)
      ++t.wins_a;
    else
      ++t.wins_b;
  }
  int m = t.wins_a + t.wins_b;
  if (m == 0) return t;
  // Exact binomial, two-sided: P(X >= max(wins)) * 2 under p = 1/2.
  int k = std::max(t.wins_a, t.wins_b);
  double tail = 0;
  for (int i = k; i <= m; ++i) {
    double logc = std::lgamma(m + 1) - std::lgamma(i + 1) - std::lgamma(m - i + 1);
    tail += std::exp(logc - m * std::log(2.0));
  }
  t.p_value = std::min(1.0, 2.0 * tail);
  return t;
}

}  // namespace tir
