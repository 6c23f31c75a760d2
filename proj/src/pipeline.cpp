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

#include "knotosc/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "knotosc/errors.hpp"
#include "knotosc/io.hpp"

namespace knotosc::pipeline {

using nlohmann::json;
using helmholtz::LinkPreset;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace

PresetDefaults preset_defaults(LinkPreset preset, int p, int q) {
  PresetDefaults d;
  const Vec3 diag{0.5773502691896258, 0.5773502691896258, 0.5773502691896258};
  // Torus-family seeds sit on a round torus whose central circle lies on an
  // origin-centered sphere; the thin radial shell keeps the fit conditioned.
  auto torusPlacement = [&](double dist, double scale) {
    helmholtz::Placement pl;
    pl.scale = scale;
    pl.translate = diag * dist;
    pl.axis = diag;
    return pl;
  };
  d.l0Candidates = {12, 16, 20};
  switch (preset) {
    case LinkPreset::Unknot:
      d.placement = torusPlacement(2.0, 1.0);
      d.ballRadius = 2.8;
      d.l0Candidates = {6, 8, 12, 16};
      break;
    case LinkPreset::Hopf:
      d.placement = torusPlacement(2.0, 1.0);
      d.ballRadius = 2.8;
      d.l0Candidates = {12, 16, 20};
      break;
    case LinkPreset::Trefoil:
      d.placement = torusPlacement(2.0, 1.0);
      d.ballRadius = 2.8;
      d.l0Candidates = {16, 20, 24};
      break;
    case LinkPreset::Solomon:
      d.placement = torusPlacement(2.0, 1.0);
      d.ballRadius = 2.8;
      d.l0Candidates = {16, 20, 24};
      break;
    case LinkPreset::Borromean:
      d.placement = torusPlacement(2.0, 1.0);
      d.ballRadius = 2.8;
      d.l0Candidates = {16, 20, 24};
      break;
    case LinkPreset::Torus: {
      int order = std::max(p, q);
      d.placement = torusPlacement(2.0, 1.0);
      d.ballRadius = 2.8;
      d.l0Candidates = order <= 4 ? std::vector<int>{16, 20, 24}
                                  : std::vector<int>{20, 24, 28};
      break;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Config JSON

PipelineConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  PipelineConfig cfg;
  if (!doc.contains("preset")) throw ConfigError("config: missing preset");
  cfg.preset = helmholtz::preset_from_string(doc["preset"].get<std::string>());
  if (cfg.preset == LinkPreset::Torus) {
    if (!doc.contains("torus"))
      throw ConfigError("config: torus preset needs {\"torus\": {\"p\",\"q\"}}");
    cfg.torusP = doc["torus"]["p"].get<int>();
    cfg.torusQ = doc["torus"]["q"].get<int>();
    if (cfg.torusP < 1 || cfg.torusQ < 1)
      throw ConfigError("config: torus p, q must be positive");
  }
  if (doc.contains("placement")) {
    helmholtz::Placement pl;
    pl.scale = doc["placement"]["scale"].get<double>();
    auto t = doc["placement"]["translate"];
    pl.translate = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
    if (doc["placement"].contains("axis")) {
      auto a = doc["placement"]["axis"];
      pl.axis = Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()}
                    .normalized();
    }
    cfg.placement = pl;
  }
  if (doc.contains("ballRadius")) cfg.ballRadius = doc["ballRadius"].get<double>();
  auto intOrAuto = [&](const char* key, int& out) {
    if (!doc.contains(key)) return;
    if (doc[key].is_string()) {
      if (doc[key].get<std::string>() != "auto")
        throw ConfigError(std::string("config: ") + key + " must be an integer or \"auto\"");
      out = 0;
    } else {
      out = doc[key].get<int>();
    }
  };
  intOrAuto("l0", cfg.l0);
  intOrAuto("khat", cfg.khat);
  if (cfg.l0 < 0 || (cfg.l0 > 0 && cfg.l0 % 2 != 0))
    throw ConfigError("config: l0 must be even and positive, or \"auto\"");
  if (cfg.khat < 0) throw ConfigError("config: khat must be positive or \"auto\"");
  if (doc.contains("background")) {
    if (doc["background"].is_string())
      cfg.background = -1;
    else
      cfg.background = doc["background"].get<double>();
  }
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    if (g.contains("compare")) cfg.grid.compareRes = g["compare"].get<int>();
    if (g.contains("extract")) cfg.grid.extractRes = g["extract"].get<int>();
    if (g.contains("norm")) cfg.grid.normRes = g["norm"].get<int>();
  }
  if (doc.contains("tolerances")) {
    const auto& t = doc["tolerances"];
    if (t.contains("regularization"))
      cfg.tolerances.regularization = t["regularization"].get<double>();
    if (t.contains("marginGate")) cfg.tolerances.marginGate = t["marginGate"].get<double>();
    if (t.contains("fitGradientWeight"))
      cfg.tolerances.fitGradientWeight = t["fitGradientWeight"].get<double>();
    if (t.contains("valueTolFactor"))
      cfg.tolerances.valueTolFactor = t["valueTolFactor"].get<double>();
    if (t.contains("degeneracyTolFactor"))
      cfg.tolerances.degeneracyTolFactor = t["degeneracyTolFactor"].get<double>();
  }
  if (doc.contains("stability")) {
    const auto& s = doc["stability"];
    if (s.contains("trials")) cfg.stability.trials = s["trials"].get<int>();
    if (s.contains("epsilonRel")) cfg.stability.epsilonRel = s["epsilonRel"].get<double>();
  }
  if (doc.contains("samples")) {
    const auto& s = doc["samples"];
    if (s.contains("along")) cfg.samples.alongPerComponent = s["along"].get<int>();
    if (s.contains("around")) cfg.samples.around = s["around"].get<int>();
    if (s.contains("guards")) cfg.samples.guardCount = s["guards"].get<int>();
  }
  if (doc.contains("rngSeed")) cfg.rngSeed = doc["rngSeed"].get<std::uint64_t>();
  if (doc.contains("threads")) cfg.threads = doc["threads"].get<int>();
  if (doc.contains("out")) cfg.outDir = doc["out"].get<std::string>();
  if (doc.contains("formats"))
    cfg.formats = doc["formats"].get<std::vector<std::string>>();
  if (doc.contains("verbose")) cfg.verbose = doc["verbose"].get<bool>();
  return cfg;
}

namespace {

json config_to_json_doc(const PipelineConfig& cfg) {
  json doc;
  doc["preset"] = helmholtz::preset_to_string(cfg.preset);
  if (cfg.preset == LinkPreset::Torus)
    doc["torus"] = {{"p", cfg.torusP}, {"q", cfg.torusQ}};
  if (cfg.placement) {
    doc["placement"] = {{"scale", cfg.placement->scale},
                        {"translate",
                         {cfg.placement->translate.x, cfg.placement->translate.y,
                          cfg.placement->translate.z}},
                        {"axis",
                         {cfg.placement->axis.x, cfg.placement->axis.y,
                          cfg.placement->axis.z}}};
  }
  doc["ballRadius"] = cfg.ballRadius;
  doc["l0"] = cfg.l0 == 0 ? json("auto") : json(cfg.l0);
  doc["khat"] = cfg.khat == 0 ? json("auto") : json(cfg.khat);
  doc["background"] = cfg.background < 0 ? json("auto") : json(cfg.background);
  doc["grid"] = {{"compare", cfg.grid.compareRes},
                 {"extract", cfg.grid.extractRes},
                 {"norm", cfg.grid.normRes}};
  doc["tolerances"] = {{"regularization", cfg.tolerances.regularization},
                       {"marginGate", cfg.tolerances.marginGate},
                       {"fitGradientWeight", cfg.tolerances.fitGradientWeight},
                       {"valueTolFactor", cfg.tolerances.valueTolFactor},
                       {"degeneracyTolFactor", cfg.tolerances.degeneracyTolFactor}};
  doc["stability"] = {{"trials", cfg.stability.trials},
                      {"epsilonRel", cfg.stability.epsilonRel}};
  doc["samples"] = {{"along", cfg.samples.alongPerComponent},
                    {"around", cfg.samples.around},
                    {"guards", cfg.samples.guardCount}};
  doc["rngSeed"] = cfg.rngSeed;
  doc["threads"] = cfg.threads;
  doc["out"] = cfg.outDir;
  doc["formats"] = cfg.formats;
  return doc;
}

}  // namespace

std::string config_to_json(const PipelineConfig& config) {
  return config_to_json_doc(config).dump(2);
}

std::string config_hash(const PipelineConfig& config) {
  // FNV-1a over the canonical JSON, timestamps excluded.
  std::string text = config_to_json_doc(config).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Stages

namespace {

PipelineConfig resolve_config(const PipelineConfig& in) {
  PipelineConfig cfg = in;
  PresetDefaults d = preset_defaults(cfg.preset, cfg.torusP, cfg.torusQ);
  if (!cfg.placement) cfg.placement = d.placement;
  if (cfg.ballRadius <= 0) cfg.ballRadius = d.ballRadius;
  return cfg;
}

}  // namespace

SynthResult run_synth(const PipelineConfig& raw) {
  PipelineConfig cfg = resolve_config(raw);
  helmholtz::SeedField seed = helmholtz::milnor_seed(
      cfg.preset, *cfg.placement, cfg.ballRadius, cfg.torusP, cfg.torusQ);

  // Background amplitude: large enough to keep the interior of the ball away
  // from zero, small next to margin * tube so the link survives the shift.
  double background =
      cfg.background >= 0 ? cfg.background : seed.margin * seed.tubeRadius;
  helmholtz::TubeSampleOptions sampleOpts;
  sampleOpts.alongPerComponent = cfg.samples.alongPerComponent;
  sampleOpts.around = cfg.samples.around;
  sampleOpts.guardCount = cfg.samples.guardCount;
  sampleOpts.background = background;
  sampleOpts.rngSeed = cfg.rngSeed;
  helmholtz::SampleSet samples =
      helmholtz::make_tube_samples(seed, cfg.ballRadius, sampleOpts);

  double linkRadius = 0;
  for (const auto& comp : seed.referenceLink)
    for (const auto& v : comp) linkRadius = std::max(linkRadius, v.norm());
  double extractionRadius =
      std::min(cfg.ballRadius, linkRadius + 1.0 * seed.tubeRadius);

  SynthResult result{seed, samples, {helmholtz::FourierBesselField(0), {}},
                     cfg.ballRadius, extractionRadius, background, {}};
  helmholtz::FitOptions fitOpts;
  fitOpts.regularization = cfg.tolerances.regularization;
  fitOpts.gradientWeight = cfg.tolerances.fitGradientWeight;
  if (cfg.l0 > 0) {
    result.fit = helmholtz::fit_coefficients(seed, cfg.l0, samples, fitOpts);
    return result;
  }
  PresetDefaults d = preset_defaults(cfg.preset, cfg.torusP, cfg.torusQ);
  auto sweep = helmholtz::fit_coefficients_sweep(d.l0Candidates, samples, fitOpts);
  for (const auto& fit : sweep) result.sweepReports.push_back(fit.report);
  // Smallest truncation whose C1 sample residual is below half the seed
  // margin; otherwise the largest candidate.
  std::size_t chosen = sweep.size() - 1;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    if (sweep[i].report.c1Residual < 0.5 * seed.margin) {
      chosen = i;
      break;
    }
  }
  result.fit = std::move(sweep[chosen]);
  return result;
}

HelmholtzCheck run_helmholtz_check(const SynthResult& synth,
                                   const PipelineConfig& raw) {
  PipelineConfig cfg = resolve_config(raw);
  nodal::ExtractionOptions opts;
  opts.gridRes = cfg.grid.extractRes;
  opts.valueTolFactor = cfg.tolerances.valueTolFactor;
  opts.degeneracyTolFactor = cfg.tolerances.degeneracyTolFactor;
  opts.threads = cfg.threads;
  auto extraction = nodal::extract_nodal_curves(
      synth.fit.field, nodal::Region::ball(synth.extractionRadius), opts);
  HelmholtzCheck check;
  check.stats = extraction.stats;
  check.curveCount = static_cast<int>(extraction.curves.size());
  check.invariants = topology::classify_link(extraction.curves, cfg.preset,
                                             cfg.torusP, cfg.torusQ,
                                             cfg.rngSeed + 101);
  double minMargin = std::numeric_limits<double>::infinity();
  for (const auto& c : extraction.curves)
    if (c.closed && !c.degenerate) minMargin = std::min(minMargin, c.minMargin);
  check.fittedMargin = std::isfinite(minMargin) ? minMargin : 0.0;
  return check;
}

LiftResult run_lift(const SynthResult& synth, const PipelineConfig& raw) {
  PipelineConfig cfg = resolve_config(raw);
  const auto& field = synth.fit.field;
  auto attempt = [&](int khat) {
    oscillator::OscillatorEigenfunction psi = oscillator::lift(field, khat);
    oscillator::LiftReport rep = oscillator::rescaled_compare(
        psi, field, synth.extractionRadius, cfg.grid.compareRes, cfg.threads);
    rep.marginRatio = rep.c1Error / synth.seed.margin;
    return std::make_pair(std::move(psi), rep);
  };
  if (cfg.khat > 0) {
    auto [psi, rep] = attempt(cfg.khat);
    return {std::move(psi), rep, {rep}};
  }
  int khat = std::max(32, field.l0());
  std::vector<oscillator::LiftReport> attempts;
  for (; khat <= 1024; khat *= 2) {
    auto [psi, rep] = attempt(khat);
    attempts.push_back(rep);
    if (rep.marginRatio < cfg.tolerances.marginGate) {
      return {std::move(psi), rep, attempts};
    }
  }
  throw NumericalError(
      "run_lift: khat doubling reached the cap without meeting the margin gate");
}

ExtractResult run_extract(const oscillator::OscillatorEigenfunction& psi,
                          double ballRadius, const PipelineConfig& raw) {
  PipelineConfig cfg = resolve_config(raw);
  double sqrtLambda = std::sqrt(static_cast<double>(psi.lambda()));
  RescaledField rescaled(psi, sqrtLambda);
  nodal::ExtractionOptions opts;
  opts.gridRes = cfg.grid.extractRes;
  opts.valueTolFactor = cfg.tolerances.valueTolFactor;
  opts.degeneracyTolFactor = cfg.tolerances.degeneracyTolFactor;
  opts.threads = cfg.threads;
  auto extraction =
      nodal::extract_nodal_curves(rescaled, nodal::Region::ball(ballRadius), opts);
  return {std::move(extraction.curves), extraction.stats};
}

PipelineReport run_pipeline(const PipelineConfig& raw) {
  PipelineConfig cfg = resolve_config(raw);
  PipelineReport report;
  report.configHash = config_hash(cfg);

  auto timed = [&](const char* name, auto&& fn) {
    double t0 = now_seconds();
    fn();
    report.timings.push_back({name, now_seconds() - t0});
  };

  std::string stage = "synth";
  try {
    timed("synth", [&] { report.synth = run_synth(cfg); });
    report.seedMargin = report.synth.seed.margin;
    cfg.l0 = report.synth.fit.report.l0;
    cfg.background = report.synth.background;

    stage = "helmholtz-check";
    timed("helmholtz-check",
          [&] { report.helmholtzCheck = run_helmholtz_check(report.synth, cfg); });

    stage = "lift";
    timed("lift", [&] { report.lift = run_lift(report.synth, cfg); });
    cfg.khat = report.lift->psi.khat();

    stage = "extract";
    timed("extract", [&] {
      report.extraction =
          run_extract(report.lift->psi, report.synth.extractionRadius, cfg);
    });

    stage = "classify";
    timed("classify", [&] {
      report.invariants =
          topology::classify_link(report.extraction.curves, cfg.preset, cfg.torusP,
                                  cfg.torusQ, cfg.rngSeed + 211);
    });

    stage = "stability";
    timed("stability", [&] {
      nodal::StabilityOptions opts;
      opts.region = nodal::Region::ball(report.synth.extractionRadius);
      opts.extraction.gridRes = cfg.grid.extractRes;
      opts.extraction.valueTolFactor = cfg.tolerances.valueTolFactor;
      opts.extraction.degeneracyTolFactor = cfg.tolerances.degeneracyTolFactor;
      opts.extraction.threads = cfg.threads;
      opts.normGridRes = cfg.grid.normRes;
      opts.topologySeed = cfg.rngSeed + 307;
      report.stability = nodal::perturb_and_retrace(
          report.lift->psi, cfg.stability.epsilonRel, cfg.stability.trials,
          cfg.rngSeed + 401, opts);
    });
  } catch (const std::exception& e) {
    report.resolved = cfg;
    report.pass = false;
    report.failedStage = stage;
    report.failReason = e.what();
    return report;
  }

  report.resolved = cfg;
  double minMargin = std::numeric_limits<double>::infinity();
  for (const auto& c : report.extraction.curves)
    if (c.closed && !c.degenerate) minMargin = std::min(minMargin, c.minMargin);
  bool marginOk = std::isfinite(minMargin) && minMargin > 0;
  bool gateOk = report.lift->report.marginRatio < cfg.tolerances.marginGate;
  bool stabilityOk = report.stability.preserved == report.stability.trials;
  report.pass = report.invariants.matchesTarget && marginOk && gateOk && stabilityOk;
  if (!report.pass) {
    std::ostringstream os;
    if (!report.invariants.matchesTarget) os << "classification mismatch; ";
    if (!marginOk) os << "nonpositive transversality margin; ";
    if (!gateOk) os << "margin gate not met; ";
    if (!stabilityOk)
      os << "stability " << report.stability.preserved << "/"
         << report.stability.trials << "; ";
    report.failReason = os.str();
    report.failedStage = "verdict";
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization and artifacts

namespace {

json fit_report_json(const helmholtz::FitReport& r) {
  return {{"l0", r.l0},
          {"c0Residual", r.c0Residual},
          {"gradResidual", r.gradResidual},
          {"c1Residual", r.c1Residual},
          {"sigmaMax", r.sigmaMax},
          {"sigmaMin", r.sigmaMin},
          {"effectiveRank", r.effectiveRank},
          {"conditionWarning", r.conditionWarning}};
}

json lift_report_json(const oscillator::LiftReport& r) {
  return {{"c1Error", r.c1Error},
          {"valueError", r.valueError},
          {"gradError", r.gradError},
          {"gridRes", r.gridRes},
          {"ballRadius", r.ballRadius},
          {"marginRatio", r.marginRatio}};
}

json extraction_stats_json(const nodal::ExtractionStats& s) {
  return {{"fieldSup", s.fieldSup},
          {"medianGradient", s.medianGradient},
          {"valueTol", s.valueTol},
          {"degeneracyTol", s.degeneracyTol},
          {"step", s.step},
          {"candidateCells", s.candidateCells},
          {"seedsConverged", s.seedsConverged},
          {"curvesTraced", s.curvesTraced},
          {"duplicatesMerged", s.duplicatesMerged},
          {"discardedShort", s.discardedShort}};
}

json invariants_json(const topology::InvariantReport& r) {
  return json::parse(io::invariants_to_json(r));
}

}  // namespace

std::string report_to_json(const PipelineReport& report) {
  json doc;
  doc["version"] = kVersion;
  doc["configHash"] = report.configHash;
  doc["config"] = json::parse(config_to_json(report.resolved));
  doc["seedMargin"] = report.seedMargin;
  json stages;
  stages["synth"] = {{"fit", fit_report_json(report.synth.fit.report)},
                     {"background", report.synth.background},
                     {"ballRadius", report.synth.ballRadius},
                     {"extractionRadius", report.synth.extractionRadius},
                     {"tubeRadius", report.synth.seed.tubeRadius},
                     {"windowOuter", report.synth.seed.windowOuter},
                     {"seedMargin", report.synth.seed.margin},
                     {"samples", report.synth.samples.size()}};
  if (!report.synth.sweepReports.empty()) {
    json sweeps = json::array();
    for (const auto& r : report.synth.sweepReports) sweeps.push_back(fit_report_json(r));
    stages["synth"]["l0Sweep"] = sweeps;
  }
  stages["helmholtzCheck"] = {{"invariants", invariants_json(report.helmholtzCheck.invariants)},
                              {"stats", extraction_stats_json(report.helmholtzCheck.stats)},
                              {"fittedMargin", report.helmholtzCheck.fittedMargin},
                              {"curves", report.helmholtzCheck.curveCount}};
  if (report.lift) {
    json attempts = json::array();
    for (const auto& a : report.lift->attempts) attempts.push_back(lift_report_json(a));
    stages["lift"] = {{"khat", report.lift->psi.khat()},
                      {"lambda", report.lift->psi.lambda()},
                      {"report", lift_report_json(report.lift->report)},
                      {"attempts", attempts}};
  }
  stages["extract"] = {{"stats", extraction_stats_json(report.extraction.stats)},
                       {"curves", report.extraction.curves.size()}};
  stages["classify"] = invariants_json(report.invariants);
  stages["stability"] = {{"trials", report.stability.trials},
                         {"epsilonRel", report.stability.epsilonRel},
                         {"preserved", report.stability.preserved},
                         {"baselineMargin", report.stability.baselineMargin},
                         {"baselineSignature", report.stability.baselineSignature},
                         {"signatures", report.stability.signatures}};
  doc["stages"] = stages;
  json timings = json::array();
  for (const auto& t : report.timings)
    timings.push_back({{"stage", t.name}, {"seconds", t.seconds}});
  doc["timings"] = timings;
  doc["verdict"] = report.pass ? "pass" : "fail";
  if (!report.pass) {
    doc["failReason"] = report.failReason;
    doc["failedStage"] = report.failedStage;
  }
  return doc.dump(2);
}

void write_artifacts(const PipelineReport& report, const PipelineConfig& config) {
  if (config.outDir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(config.outDir);
  auto path = [&](const std::string& name) {
    return (fs::path(config.outDir) / name).string();
  };
  io::write_file(path("report.json"), report_to_json(report));
  io::write_file(path("coefficients.json"), io::field_to_json(report.synth.fit.field));
  if (report.lift)
    io::write_file(path("eigenfunction.json"),
                   io::eigenfunction_to_json(report.lift->psi));
  for (const auto& fmt : config.formats) {
    if (fmt == "json")
      io::write_file(path("curves.json"), io::curves_to_json(report.extraction.curves));
    else if (fmt == "obj")
      io::write_file(path("curves.obj"), io::curves_to_obj(report.extraction.curves));
    else if (fmt == "csv")
      io::write_file(path("curves.csv"), io::curves_to_csv(report.extraction.curves));
    else if (fmt == "vtk")
      io::write_file(path("curves.vtk"), io::curves_to_vtk(report.extraction.curves));
    else
      throw ConfigError("unknown output format: " + fmt);
  }
}

}  // namespace knotosc::pipeline
