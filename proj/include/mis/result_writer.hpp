#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mis/experiment_runner.hpp"

namespace mis {

/// Shortest round-trip decimal, '.' separator, independent of locale.
std::string format_number(double value);

/// Header plus one LF-terminated line per row in fixed column order:
/// experiment,scheme,M,R,estimator,empirical_mse,stderr,analytic_variance,
/// target_evals,proposal_evals,proposal_evals_distinct[,wall_time]
void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool timing);
void write_json(std::ostream& out, const std::vector<ResultRow>& rows, bool timing);
void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows);

/// Writes through a temporary file renamed into place.
void write_file(const std::string& path, const std::string& content);

}  // namespace mis
