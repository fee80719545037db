#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dls/solve.hpp"

namespace dls {

enum class StudyKind { converge, condition, failure, acoustics, compare_fosls };
enum class Precision { single, double_precision };

StudyKind parse_study(const std::string& name);
std::string to_string(StudyKind kind);

struct StudyConfig {
  StudyKind study = StudyKind::converge;
  std::string formulation = "ultraweak-dpg";
  std::string case_name;  // empty: the study's default case
  int p = 2;
  int dp = 1;
  std::vector<int> dp_list;  // compare-fosls; empty means {dp}
  int refinements = 4;
  int n0 = 2;  // coarsest mesh is n0 x n0
  std::optional<Precision> precision;
  bool ne = true;
  bool qr = true;
  bool condense = true;
  bool precondition_gram = true;
  bool precondition_global = true;
  bool dump_matrices = false;
  std::optional<bool> conditioning;  // default: condition and acoustics studies
  std::optional<double> omega;
  std::filesystem::path out;
  Execution execution = Execution::parallel;
  bool timing = true;
  int max_condition_size = 5000;
};

/// Applies the study defaults and forced settings; throws ConfigError naming
/// the offending field.
StudyConfig validated(StudyConfig config);

struct StudyRow {
  int n = 0;
  double h = 0;
  int N = 0;
  std::optional<int> M;
  std::optional<double> cond_a, cond_btilde;
  std::optional<double> err_ne, err_qr;
  std::optional<double> rho, eta_total;
  std::optional<double> wall_ms;
};

struct StudyFailure {
  int n = 0;
  std::string stage;
  std::string message;
};

struct StudyResult {
  std::vector<StudyRow> rows;
  std::vector<StudyFailure> failures;
};

/// One row per refinement n = n0, 2 n0, 4 n0, ...; writes Matrix Market
/// dumps to config.out when requested.
StudyResult run_study(const StudyConfig& config);

std::string study_csv(const StudyResult& result);

struct CompareRow {
  int n = 0;
  double h = 0;
  int dp = 0;
  std::optional<double> solution_distance;  // |u_dls - u_ref|_U / |u|_U
  std::optional<double> matrix_distance;    // |A_ref - A|_F / |A_ref|_F
};

struct CompareResult {
  std::vector<CompareRow> rows;
  std::vector<StudyFailure> failures;
};

/// fosls-strong against its continuous least-squares counterpart on the
/// same trial space.
CompareResult compare_fosls(const StudyConfig& config);

std::string compare_csv(const CompareResult& result);

/// Least-squares slope of log y against log x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dls
