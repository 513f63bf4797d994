#pragma once

#include <iostream>
#include <map>
#include <string>

#include "gaitface/metrics.hpp"

namespace gaitface {

// Writes overall.csv, per_angle.csv, confusion CSVs and heatmap PNGs under
// out_dir, and renders a plain-text summary to text_out. Column order is the
// canonical model order (face, gait, average, bilinear, attention_concat,
// adaptive) followed by any other names alphabetically. confusion.csv /
// confusion.png mirror the adaptive model when present, the first model
// otherwise.
void emit_report(const std::map<std::string, EvalSummary>& summaries,
                 const std::string& out_dir, std::ostream& text_out = std::cout);

// Deterministic column order used by the report tables.
std::vector<std::string> canonical_model_order(
    const std::map<std::string, EvalSummary>& summaries);

void write_confusion_heatmap(const Eigen::MatrixXi& confusion, const std::string& path);

// summary.json next to a run's artifacts; what `report --runs` aggregates.
void write_summary_json(const EvalSummary& summary, const std::string& path);
EvalSummary read_summary_json(const std::string& path);

}  // namespace gaitface
