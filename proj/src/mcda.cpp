#include "tees/mcda.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "tees/criteria.hpp"
#include "tees/error.hpp"

namespace tees {

void CriteriaMatrix::validate() const {
  if (pathways.size() < 2) throw Error(ErrorCode::TooFewPathways, "normalization needs at least two pathways");
  if (values.size() != pathways.size()) throw Error(ErrorCode::LengthMismatch, "one value row per pathway expected");
  for (const auto& row : values) {
    if (row.size() != criteria.size()) throw Error(ErrorCode::LengthMismatch, "one value per criterion expected");
    for (double v : row) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidConfig, "criterion values must be finite");
    }
  }
  if (weights.size() != criteria.size()) throw Error(ErrorCode::LengthMismatch, "one weight per criterion expected");
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidConfig, "weights must be non-negative");
  }
}

NormalizedMatrix normalize(const CriteriaMatrix& m) {
  m.validate();
  const std::size_t np = m.pathways.size();
  const std::size_t nc = m.criteria.size();
  NormalizedMatrix out;
  out.values.assign(np, std::vector<double>(nc, 1.0));
  for (std::size_t c = 0; c < nc; ++c) {
    double lo = m.values[0][c], hi = lo;
    for (std::size_t p = 1; p < np; ++p) {
      lo = std::min(lo, m.values[p][c]);
      hi = std::max(hi, m.values[p][c]);
    }
    if (hi == lo) {
      out.degenerate.push_back(m.criteria[c].name);
      continue;
    }
    const bool higher = m.criteria[c].direction == Direction::HigherIsBetter;
    const double best = higher ? hi : lo;
    const double worst = higher ? lo : hi;
    for (std::size_t p = 0; p < np; ++p) out.values[p][c] = std::abs((m.values[p][c] - worst) / (best - worst));
  }
  return out;
}

std::vector<double> score(const NormalizedMatrix& n, const std::vector<double>& weights) {
  std::vector<double> s;
  s.reserve(n.values.size());
  for (const auto& row : n.values) {
    if (row.size() != weights.size()) throw Error(ErrorCode::LengthMismatch, "one weight per criterion expected");
    s.push_back(std::inner_product(row.begin(), row.end(), weights.begin(), 0.0) / static_cast<double>(row.size()));
  }
  return s;
}

std::vector<std::size_t> rank(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

StabilityReport rank_stability(const CriteriaMatrix& m, const std::vector<std::vector<double>>& weight_sets) {
  const NormalizedMatrix n = normalize(m);
  StabilityReport report;
  report.reference_order = rank(score(n, m.weights));
  for (const auto& w : weight_sets) {
    for (double x : w) {
      if (!(x >= 0.0)) throw Error(ErrorCode::InvalidConfig, "perturbed weights must be non-negative");
    }
    RankChange change;
    change.weights = w;
    change.order = rank(score(n, w));
    change.top_changed = change.order.front() != report.reference_order.front();
    change.order_changed = change.order != report.reference_order;
    report.perturbed.push_back(std::move(change));
  }
  return report;
}

std::vector<Criterion> report_criteria() {
  std::vector<Criterion> out;
  for (const auto& name : criteria_columns()) {
    const bool higher = name == "cea_level" || name == "saving_pct" || name == "co2e_reduction_pct";
    out.push_back({name, higher ? Direction::HigherIsBetter : Direction::LowerIsBetter});
  }
  return out;
}

std::vector<double> load_weights(const std::filesystem::path& path, const std::vector<Criterion>& criteria) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, path.string() + ": expected an object of weights");
  std::vector<double> weights(criteria.size(), 1.0);
  for (const auto& [key, value] : doc.items()) {
    const auto it = std::find_if(criteria.begin(), criteria.end(), [&](const Criterion& c) { return c.name == key; });
    if (it == criteria.end()) throw Error(ErrorCode::InvalidConfig, path.string() + ": unknown criterion '" + key + "'");
    if (!value.is_number() || !(value.get<double>() >= 0.0)) {
      throw Error(ErrorCode::InvalidConfig, path.string() + ": weight of '" + key + "' must be a non-negative number");
    }
    weights[static_cast<std::size_t>(it - criteria.begin())] = value.get<double>();
  }
  return weights;
}

}  // namespace tees
