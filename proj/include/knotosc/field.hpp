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

#include <functional>
#include <memory>

#include "knotosc/types.hpp"

namespace knotosc {

// A complex scalar field on R^3 with an analytic gradient. All field types in
// the library (Fourier-Bessel sums, point-source sums, polynomial seeds,
// oscillator eigenfunctions) implement this interface, and the nodal-curve
// extractor and comparison utilities consume it.
class ComplexField {
 public:
  virtual ~ComplexField() = default;
  virtual FieldValue eval(const Vec3& x) const = 0;
};

// Field defined by a plain callable; handy for tests and adapters.
class LambdaField final : public ComplexField {
 public:
  explicit LambdaField(std::function<FieldValue(const Vec3&)> fn)
      : fn_(std::move(fn)) {}
  FieldValue eval(const Vec3& x) const override { return fn_(x); }

 private:
  std::function<FieldValue(const Vec3&)> fn_;
};

// f(x) = base(x / scale), gradient divided by scale accordingly.
class RescaledField final : public ComplexField {
 public:
  RescaledField(const ComplexField& base, double scale)
      : base_(base), scale_(scale) {}
  FieldValue eval(const Vec3& x) const override {
    FieldValue v = base_.eval(x / scale_);
    v.gradient = v.gradient * cplx(1.0 / scale_, 0.0);
    return v;
  }

 private:
  const ComplexField& base_;
  double scale_;
};

// f(x) = a(x) + w * b(x).
class SumField final : public ComplexField {
 public:
  SumField(const ComplexField& a, const ComplexField& b, cplx weight)
      : a_(a), b_(b), w_(weight) {}
  FieldValue eval(const Vec3& x) const override {
    FieldValue va = a_.eval(x);
    FieldValue vb = b_.eval(x);
    return {va.value + w_ * vb.value, va.gradient + w_ * vb.gradient};
  }

 private:
  const ComplexField& a_;
  const ComplexField& b_;
  cplx w_;
};

}  // namespace knotosc
