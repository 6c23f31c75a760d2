// Copyright 2026 The Knotosc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "knotosc/errors.hpp"
#include "knotosc/io.hpp"
#include "knotosc/pipeline.hpp"

namespace {

namespace fs = std::filesystem;
using namespace knotosc;

constexpr int kExitPass = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitNumericalError = 3;

pipeline::PipelineConfig load_config(const std::string& path, std::uint64_t seedOverride,
                                     const std::string& outOverride,
                                     const std::string& formatCsv, int threads,
                                     bool verbose) {
  pipeline::PipelineConfig cfg = pipeline::config_from_json(io::read_file(path));
  if (seedOverride != 0) cfg.rngSeed = seedOverride;
  if (!outOverride.empty()) cfg.outDir = outOverride;
  if (!formatCsv.empty()) {
    cfg.formats.clear();
    std::istringstream is(formatCsv);
    std::string tok;
    while (std::getline(is, tok, ',')) cfg.formats.push_back(tok);
  }
  if (threads > 0) cfg.threads = threads;
  if (verbose) cfg.verbose = true;
  return cfg;
}

std::string out_path(const std::string& outDir, const std::string& name) {
  if (outDir.empty()) return name;
  fs::create_directories(outDir);
  return (fs::path(outDir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knotosc: oscillator eigenfunctions with knotted nodal lines"};
  app.require_subcommand(1);

  std::string configPath, outDir, formatCsv, fieldPath, psiPath, curvesPath;
  std::uint64_t seed = 0;
  int threads = 0;
  bool verbose = false;
  int khat = 0;
  double ballRadius = 0;
  int gridRes = 48;
  std::string presetName = "hopf";
  int trials = 20;
  double epsilonRel = 0.1;
  std::string exportFormat = "obj";

  app.add_option("--seed", seed, "Override the RNG seed");
  app.add_option("--out", outDir, "Output directory");
  app.add_option("--format", formatCsv, "Comma-separated outputs: json,csv,obj,vtk");
  app.add_option("--threads", threads, "Worker threads (0 = hardware)");
  app.add_flag("--verbose", verbose, "Chatty stage logging");

  auto* runCmd = app.add_subcommand("run", "Full pipeline from a config file");
  runCmd->add_option("--config", configPath, "Pipeline config JSON")->required();

  auto* synthCmd = app.add_subcommand("synth", "Seed + fit, writes coefficients JSON");
  synthCmd->add_option("--config", configPath, "Pipeline config JSON")->required();

  auto* liftCmd = app.add_subcommand("lift", "Lift coefficients to an eigenfunction");
  liftCmd->add_option("--field", fieldPath, "coefficients.json")->required();
  liftCmd->add_option("--khat", khat, "Radial quantum number")->required();

  auto* compareCmd = app.add_subcommand("compare", "Rescaled C1 comparison");
  compareCmd->add_option("--field", fieldPath, "coefficients.json")->required();
  compareCmd->add_option("--psi", psiPath, "eigenfunction.json")->required();
  compareCmd->add_option("--ball", ballRadius, "Ball radius")->required();
  compareCmd->add_option("--grid", gridRes, "Grid resolution");

  auto* extractCmd = app.add_subcommand("extract", "Nodal curves of an eigenfunction");
  extractCmd->add_option("--psi", psiPath, "eigenfunction.json")->required();
  extractCmd->add_option("--ball", ballRadius, "Ball radius")->required();
  extractCmd->add_option("--grid", gridRes, "Grid resolution");

  auto* classifyCmd = app.add_subcommand("classify", "Invariants of extracted curves");
  classifyCmd->add_option("--curves", curvesPath, "curves.json")->required();
  classifyCmd->add_option("--preset", presetName, "Target preset")->required();

  auto* stabilityCmd = app.add_subcommand("stability", "Perturb-and-retrace report");
  stabilityCmd->add_option("--psi", psiPath, "eigenfunction.json")->required();
  stabilityCmd->add_option("--ball", ballRadius, "Ball radius")->required();
  stabilityCmd->add_option("--grid", gridRes, "Grid resolution");
  stabilityCmd->add_option("--trials", trials, "Perturbation trials");
  stabilityCmd->add_option("--epsilon", epsilonRel, "Relative C1 size");

  auto* exportCmd = app.add_subcommand("export", "Convert curves.json to obj/csv/vtk");
  exportCmd->add_option("--curves", curvesPath, "curves.json")->required();
  exportCmd->add_option("--to", exportFormat, "obj|csv|vtk|gauss");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (runCmd->parsed()) {
      auto cfg = load_config(configPath, seed, outDir, formatCsv, threads, verbose);
      auto report = pipeline::run_pipeline(cfg);
      pipeline::write_artifacts(report, cfg);
      if (!report.failedStage.empty() && report.failedStage != "verdict" &&
          !report.pass) {
        std::cerr << "stage " << report.failedStage << " failed: "
                  << report.failReason << "\n";
        return kExitNumericalError;
      }
      std::cout << "verdict: " << (report.pass ? "pass" : "fail") << "\n";
      if (!report.pass) std::cerr << report.failReason << "\n";
      return report.pass ? kExitPass : kExitVerdictFail;
    }
    if (synthCmd->parsed()) {
      auto cfg = load_config(configPath, seed, outDir, formatCsv, threads, verbose);
      auto synth = pipeline::run_synth(cfg);
      io::write_file(out_path(cfg.outDir, "coefficients.json"),
                     io::field_to_json(synth.fit.field));
      io::write_file(out_path(cfg.outDir, "samples.csv"),
                     io::samples_to_csv(synth.samples));
      std::cout << "l0 " << synth.fit.report.l0 << ", C1 residual "
                << synth.fit.report.c1Residual << ", seed margin "
                << synth.seed.margin << "\n";
      return kExitPass;
    }
    if (liftCmd->parsed()) {
      auto field = io::field_from_json(io::read_file(fieldPath));
      auto psi = oscillator::lift(field, khat);
      io::write_file(out_path(outDir, "eigenfunction.json"),
                     io::eigenfunction_to_json(psi));
      std::cout << "lambda " << psi.lambda() << ", modes " << psi.modes().size()
                << "\n";
      return kExitPass;
    }
    if (compareCmd->parsed()) {
      auto field = io::field_from_json(io::read_file(fieldPath));
      auto psi = io::eigenfunction_from_json(io::read_file(psiPath));
      auto rep = oscillator::rescaled_compare(psi, field, ballRadius, gridRes, threads);
      std::cout << "C1 error " << rep.c1Error << " (value " << rep.valueError
                << ", gradient " << rep.gradError << ")\n";
      return kExitPass;
    }
    if (extractCmd->parsed()) {
      auto psi = io::eigenfunction_from_json(io::read_file(psiPath));
      pipeline::PipelineConfig cfg;
      cfg.grid.extractRes = gridRes;
      cfg.threads = threads;
      auto result = pipeline::run_extract(psi, ballRadius, cfg);
      io::write_file(out_path(outDir, "curves.json"),
                     io::curves_to_json(result.curves));
      std::cout << result.curves.size() << " curves\n";
      return kExitPass;
    }
    if (classifyCmd->parsed()) {
      auto curves = io::curves_from_json(io::read_file(curvesPath));
      auto preset = helmholtz::preset_from_string(presetName);
      auto report = topology::classify_link(curves, preset, 0, 0, seed ? seed : 11);
      io::write_file(out_path(outDir, "invariants.json"),
                     io::invariants_to_json(report));
      std::cout << topology::link_class_to_string(report.classification)
                << (report.matchesTarget ? " (matches target)" : " (mismatch)")
                << "\n";
      return kExitPass;
    }
    if (stabilityCmd->parsed()) {
      auto psi = io::eigenfunction_from_json(io::read_file(psiPath));
      nodal::StabilityOptions opts;
      opts.region = nodal::Region::ball(ballRadius);
      opts.extraction.gridRes = gridRes;
      opts.extraction.threads = threads;
      auto report = nodal::perturb_and_retrace(psi, epsilonRel, trials,
                                               seed ? seed : 7, opts);
      std::cout << "preserved " << report.preserved << "/" << report.trials << "\n";
      return report.preserved == report.trials ? kExitPass : kExitVerdictFail;
    }
    if (exportCmd->parsed()) {
      auto curves = io::curves_from_json(io::read_file(curvesPath));
      std::string payload;
      std::string name;
      if (exportFormat == "obj") {
        payload = io::curves_to_obj(curves);
        name = "curves.obj";
      } else if (exportFormat == "csv") {
        payload = io::curves_to_csv(curves);
        name = "curves.csv";
      } else if (exportFormat == "vtk") {
        payload = io::curves_to_vtk(curves);
        name = "curves.vtk";
      } else if (exportFormat == "gauss") {
        std::vector<const nodal::NodalCurve*> ptrs;
        for (const auto& c : curves)
          if (c.closed && !c.degenerate) ptrs.push_back(&c);
        auto diagram = topology::project_to_diagram(ptrs, seed ? seed : 11);
        payload = diagram.gauss_code() + "\n";
        name = "curves.gauss";
      } else {
        throw ConfigError("unknown export format: " + exportFormat);
      }
      io::write_file(out_path(outDir, name), payload);
      std::cout << "wrote " << name << "\n";
      return kExitPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumericalError;
  }
  return kExitConfigError;
}
