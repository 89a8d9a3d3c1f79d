// Copyright 2026 The ECSP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Diagnostic plots: per-level loss curves and a 2-D view of one class's
// hypersphere. SVG output carries text labels; PNG output is a plain raster
// whose legend uses colour swatches only.

#ifndef ECSP_PLOT_H_
#define ECSP_PLOT_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ecsp/common.h"
#include "ecsp/trainer.h"

namespace ecsp {

enum class PlotFormat { kSvg, kPng };

// Chosen from the file extension (.svg or .png); anything else throws
// ConfigError.
PlotFormat FormatForPath(const std::string &path);

// Token, sentence and document loss against step. Throws ValidationError on
// an empty series.
std::string RenderLossCurvesSvg(const LossSeries &series);
std::vector<uint8_t> RenderLossCurvesPng(const LossSeries &series);

// Reads back the values attached to each polyline of a loss-curve SVG,
// keyed by series name ("token", "sentence", "document").
std::map<std::string, std::vector<double>> ParseSvgSeries(const std::string &svg);

// Mention embeddings and their centroid projected onto the top two
// principal axes of the combined point set.
struct SphereView {
  std::string class_name;
  Matrix points;    // n x 2
  Vector centroid;  // 2
  double radius = 0.0;
  Vector mean;      // d, subtracted before projection
  Matrix axes;      // d x 2, orthonormal columns
};

// Throws ValidationError when `embeddings` is empty.
SphereView ProjectSphere(const std::vector<Vector> &embeddings,
                         const Vector &centroid, double radius,
                         const std::string &class_name);

std::string RenderSphereSvg(const SphereView &view);
std::vector<uint8_t> RenderSpherePng(const SphereView &view);

void WriteBytes(const std::string &path, const std::string &bytes);
void WriteBytes(const std::string &path, const std::vector<uint8_t> &bytes);

}  // namespace ecsp

#endif  // ECSP_PLOT_H_
