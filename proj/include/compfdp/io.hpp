#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "compfdp/core.hpp"
#include "compfdp/simgen.hpp"

// Tab-separated score files. An optional first line
//   # compfdp-scores v1 format=pairs|labeled
// names the layout; a header row of column names works as well.
//   pairs:    target_score <TAB> decoy_score         (target may be -inf)
//   labeled:  label <TAB> score [<TAB> origin]       (label is +1 or -1)
// Blank lines and other '#' lines are skipped.

namespace compfdp {

enum class ScoreFormat { automatic, pairs, labeled };

using ScoreData = std::variant<std::vector<ScorePair>, std::vector<LabeledHypothesis>>;

ScoreData read_scores(std::istream& in, ScoreFormat format = ScoreFormat::automatic);
ScoreData read_scores_file(const std::filesystem::path& path, ScoreFormat format = ScoreFormat::automatic);

void write_pairs(std::ostream& out, const std::vector<ScorePair>& pairs);
void write_labeled(std::ostream& out, const std::vector<LabeledHypothesis>& hypotheses);

/// "# compfdp-truth v1" then one 0/1 per record (1 = true null).
void write_truth(std::ostream& out, const SimulationTruth& truth);
SimulationTruth read_truth_file(const std::filesystem::path& path);

/// location <TAB> scale per line.
std::vector<GumbelParams> read_pool_file(const std::filesystem::path& path);

inline constexpr const char* kReportSchema = "compfdp-report v1";

std::string report_json(const DiscoveryReport& report, std::optional<double> fdp = std::nullopt);

/// Fields of a report JSON needed to reuse a TDC run.
DiscoveryReport parse_report_json(const std::string& text);

std::string format_double(double x);

}  // namespace compfdp
