#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "dls/errors.hpp"
#include "dls/study.hpp"

namespace {

template <class Failures>
int report(const Failures& failures) {
  for (const auto& f : failures) std::cerr << "n=" << f.n << " " << f.stage << ": " << f.message << "\n";
  return failures.empty() ? 0 : 2;
}

void emit(const std::string& csv, const std::filesystem::path& path) {
  std::cout << csv;
  if (path.empty()) return;
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!(out << csv)) throw dls::ConfigError("out: cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete least-squares finite element studies"};
  std::string study, formulation, case_name, precision, solver = "both";
  std::vector<int> dp_list;
  dls::StudyConfig config;
  bool no_condense = false, no_gram = false, no_global = false, serial = false, no_timing = false;
  double omega = 0;

  app.add_option("study", study, "converge | condition | failure | acoustics | compare-fosls")->required();
  app.add_option("--formulation", formulation, "fosls-strong | primal-dpg | ultraweak-dpg | bubnov-galerkin");
  app.add_option("--case", case_name, "manufactured solution");
  app.add_option("--p", config.p, "trial order")->default_val(2);
  app.add_option("--dp", config.dp, "test enrichment")->default_val(1);
  app.add_option("--dp-list", dp_list, "enrichments for compare-fosls")->delimiter(',');
  app.add_option("--refinements", config.refinements, "number of meshes")->default_val(4);
  app.add_option("--n0", config.n0, "coarsest mesh is n0 x n0")->default_val(2);
  app.add_option("--precision", precision, "single | double")->check(CLI::IsMember({"single", "double"}));
  app.add_option("--solver", solver, "ne | qr | both")->check(CLI::IsMember({"ne", "qr", "both"}));
  auto* omega_opt = app.add_option("--omega", omega, "acoustic frequency");
  app.add_flag("--no-condense", no_condense);
  app.add_flag("--no-precondition-gram", no_gram);
  app.add_flag("--no-precondition-global", no_global);
  app.add_flag("--dump-matrices", config.dump_matrices);
  app.add_flag("--serial", serial, "run element loops on one thread");
  app.add_flag("--no-timing", no_timing, "leave wall_ms empty (reproducible output)");
  app.add_option("--out", config.out, "output directory");
  CLI11_PARSE(app, argc, argv);

  try {
    config.study = dls::parse_study(study);
    if (!formulation.empty())
      config.formulation = formulation;
    else if (config.study == dls::StudyKind::compare_fosls || config.study == dls::StudyKind::condition)
      config.formulation = "fosls-strong";
    config.case_name = case_name;
    config.dp_list = dp_list;
    if (precision == "single") config.precision = dls::Precision::single;
    if (precision == "double") config.precision = dls::Precision::double_precision;
    config.ne = solver != "qr";
    config.qr = solver != "ne";
    config.condense = !no_condense;
    config.precondition_gram = !no_gram;
    config.precondition_global = !no_global;
    if (*omega_opt) config.omega = omega;
    config.execution = serial ? dls::Execution::serial : dls::Execution::parallel;
    config.timing = !no_timing;
    const auto csv_path = config.out.empty() ? std::filesystem::path{} : config.out / (study + ".csv");

    if (config.study == dls::StudyKind::compare_fosls) {
      const auto result = dls::compare_fosls(config);
      emit(dls::compare_csv(result), csv_path);
      return report(result.failures);
    }
    const auto result = dls::run_study(config);
    emit(dls::study_csv(result), csv_path);
    return report(result.failures);
  } catch (const dls::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: out: " << e.what() << "\n";
    return 1;
  }
}
