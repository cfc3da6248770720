#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace tees {

enum class Direction { LowerIsBetter, HigherIsBetter };

struct Criterion {
  std::string name;
  Direction direction = Direction::LowerIsBetter;
};

struct CriteriaMatrix {
  std::vector<std::string> pathways;
  std::vector<Criterion> criteria;
  std::vector<std::vector<double>> values;  // [pathway][criterion]
  std::vector<double> weights;              // one per criterion

  void validate() const;
};

struct NormalizedMatrix {
  std::vector<std::vector<double>> values;  // in [0, 1], 1 is best
  // Criteria on which every pathway ties; they normalize to 1 everywhere.
  std::vector<std::string> degenerate;
};

NormalizedMatrix normalize(const CriteriaMatrix& matrix);

// Weighted sum divided by the number of criteria.
std::vector<double> score(const NormalizedMatrix& normalized, const std::vector<double>& weights);

// Pathway indices from best to worst; ties keep declaration order.
std::vector<std::size_t> rank(const std::vector<double>& scores);

struct RankChange {
  std::vector<double> weights;
  std::vector<std::size_t> order;
  bool top_changed = false;
  bool order_changed = false;
};

struct StabilityReport {
  std::vector<std::size_t> reference_order;
  std::vector<RankChange> perturbed;
};

// Rescores the matrix under each alternative weight vector.
StabilityReport rank_stability(const CriteriaMatrix& matrix, const std::vector<std::vector<double>>& weight_sets);

// Directions for the criteria report columns: assistance level, cost saving
// and emission reduction are better when higher, the rest when lower.
std::vector<Criterion> report_criteria();

// JSON object of criterion name to weight. Unlisted criteria weigh 1.
std::vector<double> load_weights(const std::filesystem::path& path, const std::vector<Criterion>& criteria);

}  // namespace tees
