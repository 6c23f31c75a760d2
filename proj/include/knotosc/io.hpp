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

#pragma once

#include <string>
#include <vector>

#include "knotosc/helmholtz.hpp"
#include "knotosc/nodal.hpp"
#include "knotosc/oscillator.hpp"
#include "knotosc/topology.hpp"

namespace knotosc::io {

// Fourier-Bessel coefficients: {"l0": .., "entries": [{"l","m","re","im"}]}.
std::string field_to_json(const helmholtz::FourierBesselField& field);
helmholtz::FourierBesselField field_from_json(const std::string& text);

// Eigenfunction: {"khat","lambda","modes":[{"k","l","m","weightRe","weightIm"}]}.
std::string eigenfunction_to_json(const oscillator::OscillatorEigenfunction& psi);
oscillator::OscillatorEigenfunction eigenfunction_from_json(const std::string& text);

// SampleSet CSV: x,y,z,reV,imV,reGx,imGx,reGy,imGy,reGz,imGz,weight.
std::string samples_to_csv(const helmholtz::SampleSet& samples);
helmholtz::SampleSet samples_from_csv(const std::string& text);

// Curves.
std::string curves_to_json(const std::vector<nodal::NodalCurve>& curves);
std::vector<nodal::NodalCurve> curves_from_json(const std::string& text);
std::string curves_to_obj(const std::vector<nodal::NodalCurve>& curves);
std::string curves_to_csv(const std::vector<nodal::NodalCurve>& curves);
std::string curves_to_vtk(const std::vector<nodal::NodalCurve>& curves);

std::string invariants_to_json(const topology::InvariantReport& report);

// File helpers.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace knotosc::io
