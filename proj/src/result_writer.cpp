#include "mis/result_writer.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include <json.hpp>

#include "mis/errors.hpp"

namespace mis {

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) {
    throw std::system_error(std::make_error_code(ec), "format_number");
  }
  return std::string(buffer, ptr);
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows, bool timing) {
  out << "experiment,scheme,M,R,estimator,empirical_mse,stderr,analytic_variance,target_evals,proposal_evals,"
         "proposal_evals_distinct";
  if (timing) {
    out << ",wall_time";
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row.experiment << ',' << row.scheme << ',' << row.M << ',' << row.R << ',' << to_string(row.estimator)
        << ',' << format_number(row.empirical_mse) << ',' << format_number(row.stderr_mse) << ','
        << (row.analytic_variance ? format_number(*row.analytic_variance) : "") << ','
        << format_number(row.target_evals) << ',' << format_number(row.proposal_evals) << ','
        << format_number(row.proposal_evals_distinct);
    if (timing) {
      out << ',' << (row.wall_time ? format_number(*row.wall_time) : "");
    }
    out << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<ResultRow>& rows, bool timing) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json j;
    j["experiment"] = row.experiment;
    j["scheme"] = row.scheme;
    j["M"] = row.M;
    j["R"] = row.R;
    j["estimator"] = std::string(to_string(row.estimator));
    j["empirical_mse"] = row.empirical_mse;
    j["stderr"] = row.stderr_mse;
    j["analytic_variance"] = row.analytic_variance ? nlohmann::ordered_json(*row.analytic_variance) : nullptr;
    j["target_evals"] = row.target_evals;
    j["proposal_evals"] = row.proposal_evals;
    j["proposal_evals_distinct"] = row.proposal_evals_distinct;
    if (timing) {
      j["wall_time"] = row.wall_time ? nlohmann::ordered_json(*row.wall_time) : nullptr;
    }
    array.push_back(std::move(j));
  }
  out << array.dump(2) << '\n';
}

void write_diagnostics_csv(std::ostream& out, const std::vector<DiagnosticRow>& rows) {
  out << "experiment,scheme,t,acceptance_rate,ess\n";
  for (const auto& row : rows) {
    out << row.experiment << ',' << row.scheme << ',' << row.t << ','
        << (row.acceptance_rate ? format_number(*row.acceptance_rate) : "") << ',' << format_number(row.ess) << '\n';
  }
}

void write_file(const std::string& path, const std::string& content) {
  const std::string temp = path + ".tmp";
  {
    std::ofstream file(temp, std::ios::binary | std::ios::trunc);
    if (!file) {
      throw InputError("cannot write " + path);
    }
    file << content;
    if (!file.flush()) {
      throw InputError("failed writing " + path);
    }
  }
  if (std::rename(temp.c_str(), path.c_str()) != 0) {
    std::remove(temp.c_str());
    throw InputError("cannot move output into place at " + path);
  }
}

}  // namespace mis
