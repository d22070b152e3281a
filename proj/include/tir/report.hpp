// Metric comparison tables and the sign-test summary used by multi-trial
// pipeline runs. Higher is better for every metric except time-to-bug.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tir/replay.hpp"

namespace tir {

struct ComparisonRow {
  std::string metric;
  std::optional<double> a, b;
  std::optional<double> delta;       // a - b
  std::optional<double> pct_change;  // (a - b) / b * 100
  std::string better;                // "a", "b", "tie" or "excluded"
  bool lower_is_better = false;
};

struct Comparison {
  std::string a_name = "a";
  std::string b_name = "b";
  std::vector<ComparisonRow> rows;
};

Comparison compare_reports(const ReplayReport& a, const ReplayReport& b,
                           const std::string& a_name = "a",
                           const std::string& b_name = "b");

std::string render_table(const Comparison& c);
std::string render_csv(const Comparison& c);

// Exact two-sided sign test over paired values (ties dropped).
struct SignTest {
  int wins_a = 0;
  int wins_b = 0;
  int ties = 0;
  double p_value = 1.0;
};
SignTest sign_test(const std::vector<double>& a, const std::vector<double>& b,
                   bool lower_is_better = false);

}  // namespace tir
