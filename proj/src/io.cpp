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

#include "knotosc/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "knotosc/errors.hpp"

namespace knotosc::io {

using nlohmann::json;

std::string field_to_json(const helmholtz::FourierBesselField& field) {
  json entries = json::array();
  for (int l = 0; l <= field.l0(); ++l) {
    for (int m = -l; m <= l; ++m) {
      cplx c = field.coeff(l, m);
      if (c == cplx{0, 0}) continue;
      entries.push_back({{"l", l}, {"m", m}, {"re", c.real()}, {"im", c.imag()}});
    }
  }
  json doc{{"l0", field.l0()}, {"entries", entries}};
  return doc.dump(2);
}

helmholtz::FourierBesselField field_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (!doc.contains("l0") || !doc.contains("entries"))
    throw ConfigError("field_from_json: missing l0 or entries");
  helmholtz::FourierBesselField field(doc["l0"].get<int>());
  for (const auto& e : doc["entries"]) {
    field.set_coeff(e["l"].get<int>(), e["m"].get<int>(),
                    cplx(e["re"].get<double>(), e["im"].get<double>()));
  }
  return field;
}

std::string eigenfunction_to_json(const oscillator::OscillatorEigenfunction& psi) {
  json modes = json::array();
  for (const auto& mode : psi.modes()) {
    modes.push_back({{"k", mode.index.k},
                     {"l", mode.index.l},
                     {"m", mode.index.m},
                     {"weightRe", mode.weight.real()},
                     {"weightIm", mode.weight.imag()}});
  }
  json doc{{"khat", psi.khat()}, {"lambda", psi.lambda()}, {"modes", modes}};
  return doc.dump(2);
}

oscillator::OscillatorEigenfunction eigenfunction_from_json(const std::string& text) {
  json doc = json::parse(text);
  if (!doc.contains("khat") || !doc.contains("modes"))
    throw ConfigError("eigenfunction_from_json: missing khat or modes");
  std::vector<oscillator::WeightedMode> modes;
  for (const auto& e : doc["modes"]) {
    oscillator::WeightedMode mode;
    mode.index = {e["k"].get<int>(), e["l"].get<int>(), e["m"].get<int>(), 3};
    mode.weight = cplx(e["weightRe"].get<double>(), e["weightIm"].get<double>());
    modes.push_back(mode);
  }
  return oscillator::OscillatorEigenfunction(doc["khat"].get<int>(), std::move(modes));
}

std::string samples_to_csv(const helmholtz::SampleSet& samples) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "x,y,z,reV,imV,reGx,imGx,reGy,imGy,reGz,imGz,weight\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples.points[i];
    const auto& g = samples.gradients[i];
    os << p.x << ',' << p.y << ',' << p.z << ',' << samples.values[i].real() << ','
       << samples.values[i].imag() << ',' << g.x.real() << ',' << g.x.imag() << ','
       << g.y.real() << ',' << g.y.imag() << ',' << g.z.real() << ',' << g.z.imag()
       << ',' << samples.weights[i] << '\n';
  }
  return os.str();
}

helmholtz::SampleSet samples_from_csv(const std::string& text) {
  helmholtz::SampleSet set;
  std::istringstream is(text);
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.find("x,") == 0 || line.find("x ,") == 0) continue;
    }
    std::istringstream ls(line);
    std::vector<double> cols;
    std::string tok;
    while (std::getline(ls, tok, ',')) cols.push_back(std::stod(tok));
    if (cols.size() != 12)
      throw ConfigError("samples_from_csv: expected 12 columns per row");
    set.append({cols[0], cols[1], cols[2]}, cplx(cols[3], cols[4]),
               CVec3{cplx(cols[5], cols[6]), cplx(cols[7], cols[8]),
                     cplx(cols[9], cols[10])},
               cols[11]);
  }
  return set;
}

std::string curves_to_json(const std::vector<nodal::NodalCurve>& curves) {
  json arr = json::array();
  for (const auto& c : curves) {
    json verts = json::array();
    for (const auto& v : c.vertices) verts.push_back({v.x, v.y, v.z});
    arr.push_back({{"vertices", verts},
                   {"margins", c.margins},
                   {"closed", c.closed},
                   {"degenerate", c.degenerate},
                   {"minMargin", c.minMargin},
                   {"arcLength", c.arcLength}});
  }
  return json{{"curves", arr}}.dump(2);
}

std::vector<nodal::NodalCurve> curves_from_json(const std::string& text) {
  json doc = json::parse(text);
  std::vector<nodal::NodalCurve> out;
  for (const auto& e : doc["curves"]) {
    nodal::NodalCurve c;
    for (const auto& v : e["vertices"])
      c.vertices.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
    c.margins = e["margins"].get<std::vector<double>>();
    c.closed = e["closed"].get<bool>();
    c.degenerate = e["degenerate"].get<bool>();
    c.minMargin = e["minMargin"].get<double>();
    c.arcLength = e["arcLength"].get<double>();
    out.push_back(std::move(c));
  }
  return out;
}

std::string curves_to_obj(const std::vector<nodal::NodalCurve>& curves) {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "# nodal curves\n";
  int base = 1;
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    os << "o curve_" << k << "\n";
    for (const auto& v : c.vertices)
      os << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    os << "l";
    for (std::size_t i = 0; i < c.vertices.size(); ++i) os << ' ' << (base + i);
    if (c.closed) os << ' ' << base;
    os << '\n';
    base += static_cast<int>(c.vertices.size());
  }
  return os.str();
}

std::string curves_to_csv(const std::vector<nodal::NodalCurve>& curves) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "curveId,x,y,z,margin\n";
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
      os << k << ',' << c.vertices[i].x << ',' << c.vertices[i].y << ','
         << c.vertices[i].z << ','
         << (i < c.margins.size() ? c.margins[i] : 0.0) << '\n';
    }
  }
  return os.str();
}

std::string curves_to_vtk(const std::vector<nodal::NodalCurve>& curves) {
  std::ostringstream os;
  os << std::setprecision(12);
  std::size_t total = 0;
  for (const auto& c : curves) total += c.vertices.size();
  os << "# vtk DataFile Version 3.0\nnodal curves\nASCII\nDATASET POLYDATA\n";
  os << "POINTS " << total << " double\n";
  for (const auto& c : curves)
    for (const auto& v : c.vertices) os << v.x << ' ' << v.y << ' ' << v.z << '\n';
  std::size_t lineEntries = 0;
  for (const auto& c : curves) lineEntries += c.vertices.size() + (c.closed ? 2 : 1);
  os << "LINES " << curves.size() << ' ' << lineEntries << '\n';
  std::size_t base = 0;
  for (const auto& c : curves) {
    os << (c.vertices.size() + (c.closed ? 1 : 0));
    for (std::size_t i = 0; i < c.vertices.size(); ++i) os << ' ' << (base + i);
    if (c.closed) os << ' ' << base;
    os << '\n';
    base += c.vertices.size();
  }
  return os.str();
}

std::string invariants_to_json(const topology::InvariantReport& report) {
  json lk = json::array();
  for (const auto& row : report.linkingMatrix) lk.push_back(row);
  json doc{{"componentCount", report.componentCount},
           {"openCurves", report.openCurves},
           {"linkingMatrix", lk},
           {"determinants", report.determinants},
           {"classification", topology::link_class_to_string(report.classification)},
           {"matchesTarget", report.matchesTarget},
           {"mirrorSplit", report.mirrorSplit},
           {"perCopyComponents", report.perCopyComponents},
           {"splitPairDetected", report.splitPairDetected},
           {"signature", report.signature}};
  return doc.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << content;
}

}  // namespace knotosc::io
