#ifndef SUBSUM_ORACLE_HPP
#define SUBSUM_ORACLE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "subsum/rouge.hpp"

namespace subsum::oracle {

/// Extractive oracle labeling over a unit sequence.
struct OracleResult {
  std::vector<std::uint8_t> labels;   // one per unit
  std::vector<std::size_t> order;     // chosen unit indices in selection order
  std::vector<double> trajectory;     // metric F1 after each greedy step, strictly increasing
  rouge::RougeScore final_score;      // selected units concatenated vs. reference
};

struct OracleOptions {
  rouge::Metric metric = rouge::Metric::Rouge2;
  std::optional<std::size_t> max_units;
};

/// Greedy construction: repeatedly add the unit with the largest strict F1
/// improvement of the document-order concatenation of selected units against
/// the reference; ties break to the smallest unit index. Stops when nothing
/// strictly improves, everything is selected, or max_units is reached.
OracleResult greedy_oracle(const std::vector<std::vector<std::string>>& units,
                           const std::vector<std::string>& reference,
                           const OracleOptions& options = {});

class ExhaustiveCapError : public std::runtime_error {
 public:
  explicit ExhaustiveCapError(std::size_t count)
      : std::runtime_error("exhaustive oracle refused: " + std::to_string(count) +
                           " units exceeds the cap of 20") {}
};

/// Evaluates all 2^|units| subsets (|units| <= 20). Ties break to fewer
/// units, then to the lexicographically smallest index set. Test reference
/// for greedy_oracle and the granularity comparison.
OracleResult exhaustive_oracle(const std::vector<std::vector<std::string>>& units,
                               const std::vector<std::string>& reference,
                               rouge::Metric metric = rouge::Metric::Rouge2);

}  // namespace subsum::oracle

#endif
