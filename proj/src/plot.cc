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

#include "ecsp/plot.h"

#include <png.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ecsp/config.h"

namespace ecsp {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr double kLeft = 70, kRight = 150, kTop = 30, kBottom = 50;

using Rgb = std::array<uint8_t, 3>;

struct Style {
  const char *name;
  const char *hex;
  Rgb rgb;
};

constexpr Style kLevels[] = {
    {"token", "#d62728", {214, 39, 40}},
    {"sentence", "#1f77b4", {31, 119, 180}},
    {"document", "#2ca02c", {44, 160, 44}},
};

struct Frame {
  double x0, x1, y0, y1;

  double X(double x) const {
    const double span = x1 > x0 ? x1 - x0 : 1.0;
    return kLeft + (x - x0) / span * (kWidth - kLeft - kRight);
  }
  double Y(double y) const {
    const double span = y1 > y0 ? y1 - y0 : 1.0;
    return kHeight - kBottom - (y - y0) / span * (kHeight - kTop - kBottom);
  }
};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string Tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

const std::vector<double> &Values(const LossSeries &s, int level) {
  return level == 0 ? s.token : level == 1 ? s.sentence : s.document;
}

Frame LossFrame(const LossSeries &s) {
  if (s.step.empty()) throw ValidationError("loss series is empty");
  Frame f{s.step.front(), s.step.back(), 0.0, 0.0};
  f.y1 = -1e300;
  for (int level = 0; level < 3; ++level) {
    const auto &v = Values(s, level);
    if (v.size() != s.step.size()) {
      throw ValidationError("loss series have different lengths");
    }
    for (double x : v) {
      if (!std::isfinite(x)) throw ValidationError("loss series has non-finite values");
      f.y0 = std::min(f.y0, x);
      f.y1 = std::max(f.y1, x);
    }
  }
  if (f.y1 <= f.y0) f.y1 = f.y0 + 1.0;
  f.y1 += 0.05 * (f.y1 - f.y0);
  return f;
}

// Small RGB raster with just enough drawing for the plots.
class Canvas {
 public:
  Canvas() : pixels_(kWidth * kHeight * 3, 255) {}

  void Set(int x, int y, const Rgb &c) {
    if (x < 0 || y < 0 || x >= kWidth || y >= kHeight) return;
    uint8_t *p = &pixels_[(static_cast<size_t>(y) * kWidth + x) * 3];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  void Dot(double x, double y, int r, const Rgb &c) {
    const int cx = static_cast<int>(std::lround(x));
    const int cy = static_cast<int>(std::lround(y));
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx) {
        if (dx * dx + dy * dy <= r * r) Set(cx + dx, cy + dy, c);
      }
    }
  }

  void Line(double x0, double y0, double x1, double y1, const Rgb &c,
            int width = 1) {
    const double len = std::max(std::abs(x1 - x0), std::abs(y1 - y0));
    const int n = std::max(1, static_cast<int>(std::ceil(len)));
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      Dot(x0 + t * (x1 - x0), y0 + t * (y1 - y0), width / 2, c);
    }
  }

  void Circle(double cx, double cy, double r, const Rgb &c) {
    const int n = std::max(32, static_cast<int>(8 * r));
    for (int k = 0; k < n; ++k) {
      const double a0 = 2 * M_PI * k / n, a1 = 2 * M_PI * (k + 1) / n;
      Line(cx + r * std::cos(a0), cy + r * std::sin(a0), cx + r * std::cos(a1),
           cy + r * std::sin(a1), c);
    }
  }

  void Box(int x0, int y0, int x1, int y1, const Rgb &c) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) Set(x, y, c);
    }
  }

  std::vector<uint8_t> EncodePng() const {
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png == nullptr) throw Error("libpng: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    if (info == nullptr) {
      png_destroy_write_struct(&png, nullptr);
      throw Error("libpng: cannot create info struct");
    }
    std::vector<uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
      png_destroy_write_struct(&png, &info);
      throw Error("libpng: encoding failed");
    }
    png_set_write_fn(
        png, &out,
        [](png_structp p, png_bytep data, png_size_t len) {
          auto *buf = static_cast<std::vector<uint8_t> *>(png_get_io_ptr(p));
          buf->insert(buf->end(), data, data + len);
        },
        nullptr);
    png_set_IHDR(png, info, kWidth, kHeight, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < kHeight; ++y) {
      png_write_row(png, const_cast<png_bytep>(
                             &pixels_[static_cast<size_t>(y) * kWidth * 3]));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
  }

 private:
  std::vector<uint8_t> pixels_;
};

constexpr Rgb kBlack = {0, 0, 0};
constexpr Rgb kGrey = {150, 150, 150};

void Axes(Canvas &canvas) {
  canvas.Line(kLeft, kTop, kLeft, kHeight - kBottom, kBlack);
  canvas.Line(kLeft, kHeight - kBottom, kWidth - kRight, kHeight - kBottom,
              kBlack);
}

std::string SvgHeader(const std::string &title) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(kWidth) + "\" height=\"" + std::to_string(kHeight) +
         "\" viewBox=\"0 0 " + std::to_string(kWidth) + " " +
         std::to_string(kHeight) + "\">\n<title>" + title +
         "</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string SvgAxes(const Frame &f, const std::string &xlabel,
                    const std::string &ylabel) {
  std::string s;
  const std::string xb = Num(kHeight - kBottom);
  s += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + Num(kTop) + "\" x2=\"" +
       Num(kLeft) + "\" y2=\"" + xb + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + Num(kLeft) + "\" y1=\"" + xb + "\" x2=\"" +
       Num(kWidth - kRight) + "\" y2=\"" + xb + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = f.x0 + (f.x1 - f.x0) * k / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * k / 4.0;
    s += "<text x=\"" + Num(f.X(xv)) + "\" y=\"" + Num(kHeight - kBottom + 16) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + Tick(xv) + "</text>\n";
    s += "<text x=\"" + Num(kLeft - 6) + "\" y=\"" + Num(f.Y(yv) + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">" + Tick(yv) + "</text>\n";
  }
  s += "<text x=\"" + Num((kLeft + kWidth - kRight) / 2) + "\" y=\"" +
       Num(kHeight - 12) + "\" font-size=\"12\" text-anchor=\"middle\">" +
       xlabel + "</text>\n";
  s += "<text x=\"16\" y=\"" + Num((kTop + kHeight - kBottom) / 2) +
       "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       Num((kTop + kHeight - kBottom) / 2) + ")\">" + ylabel + "</text>\n";
  return s;
}

std::string Escape(const std::string &text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

PlotFormat FormatForPath(const std::string &path) {
  auto ends_with = [&](const std::string &ext) {
    if (path.size() < ext.size()) return false;
    std::string tail = path.substr(path.size() - ext.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return tail == ext;
  };
  if (ends_with(".svg")) return PlotFormat::kSvg;
  if (ends_with(".png")) return PlotFormat::kPng;
  throw ConfigError("output '" + path + "' must end in .svg or .png");
}

std::string RenderLossCurvesSvg(const LossSeries &series) {
  const Frame f = LossFrame(series);
  std::string s = SvgHeader("energy loss per level");
  s += SvgAxes(f, "step", "loss");
  for (int level = 0; level < 3; ++level) {
    const auto &v = Values(series, level);
    std::string points, values;
    for (size_t k = 0; k < v.size(); ++k) {
      if (k > 0) {
        points += ' ';
        values += ' ';
      }
      points += Num(f.X(series.step[k])) + "," + Num(f.Y(v[k]));
      values += FormatDouble(v[k]);
    }
    s += "<polyline class=\"series\" data-series=\"" +
         std::string(kLevels[level].name) + "\" data-values=\"" + values +
         "\" fill=\"none\" stroke=\"" + kLevels[level].hex +
         "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
    const double ly = kTop + 10 + 20 * level;
    s += "<line x1=\"" + Num(kWidth - kRight + 12) + "\" y1=\"" + Num(ly) +
         "\" x2=\"" + Num(kWidth - kRight + 36) + "\" y2=\"" + Num(ly) +
         "\" stroke=\"" + kLevels[level].hex + "\" stroke-width=\"3\"/>\n";
    s += "<text x=\"" + Num(kWidth - kRight + 42) + "\" y=\"" + Num(ly + 4) +
         "\" font-size=\"12\">" + kLevels[level].name + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::vector<uint8_t> RenderLossCurvesPng(const LossSeries &series) {
  const Frame f = LossFrame(series);
  Canvas canvas;
  Axes(canvas);
  for (int level = 0; level < 3; ++level) {
    const auto &v = Values(series, level);
    const Rgb &c = kLevels[level].rgb;
    if (v.size() == 1) canvas.Dot(f.X(series.step[0]), f.Y(v[0]), 2, c);
    for (size_t k = 1; k < v.size(); ++k) {
      canvas.Line(f.X(series.step[k - 1]), f.Y(v[k - 1]), f.X(series.step[k]),
                  f.Y(v[k]), c, 2);
    }
    const int ly = static_cast<int>(kTop) + 10 + 20 * level;
    canvas.Box(kWidth - static_cast<int>(kRight) + 12, ly - 2,
               kWidth - static_cast<int>(kRight) + 36, ly + 2, c);
  }
  return canvas.EncodePng();
}

std::map<std::string, std::vector<double>> ParseSvgSeries(const std::string &svg) {
  std::map<std::string, std::vector<double>> out;
  const std::string name_key = "data-series=\"", values_key = "data-values=\"";
  size_t pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
    const size_t end = svg.find("/>", pos);
    if (end == std::string::npos) throw ParseError("unterminated polyline");
    const std::string element = svg.substr(pos, end - pos);
    pos = end;
    const size_t n = element.find(name_key);
    const size_t v = element.find(values_key);
    if (n == std::string::npos || v == std::string::npos) continue;
    const size_t n0 = n + name_key.size(), v0 = v + values_key.size();
    const std::string name = element.substr(n0, element.find('"', n0) - n0);
    std::istringstream values(element.substr(v0, element.find('"', v0) - v0));
    std::vector<double> &dst = out[name];
    std::string token;
    while (values >> token) dst.push_back(ParseDouble(name, token));
  }
  return out;
}

SphereView ProjectSphere(const std::vector<Vector> &embeddings,
                         const Vector &centroid, double radius,
                         const std::string &class_name) {
  if (embeddings.empty()) {
    throw ValidationError("class '" + class_name + "' has no mentions");
  }
  const Eigen::Index d = centroid.size();
  Matrix all(static_cast<Eigen::Index>(embeddings.size()) + 1, d);
  for (size_t k = 0; k < embeddings.size(); ++k) {
    ECSP_CHECK(embeddings[k].size() == d, "embedding dimension mismatch");
    all.row(static_cast<Eigen::Index>(k)) = embeddings[k].transpose();
  }
  all.row(all.rows() - 1) = centroid.transpose();

  SphereView view;
  view.class_name = class_name;
  view.radius = radius;
  view.mean = all.colwise().mean().transpose();
  const Matrix centered = all.rowwise() - view.mean.transpose();
  const Matrix cov = centered.transpose() * centered;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  view.axes = Matrix::Zero(d, 2);
  // Eigenvalues come out ascending; take the two largest.
  for (int a = 0; a < 2 && a < d; ++a) {
    Vector axis = eig.eigenvectors().col(d - 1 - a);
    Eigen::Index big;
    axis.cwiseAbs().maxCoeff(&big);
    if (axis(big) < 0) axis = -axis;
    view.axes.col(a) = axis;
  }
  const Matrix projected = centered * view.axes;
  view.points = projected.topRows(projected.rows() - 1);
  view.centroid = projected.row(projected.rows() - 1).transpose();
  return view;
}

namespace {

Frame SphereFrame(const SphereView &view) {
  double half = view.radius;
  for (Eigen::Index k = 0; k < view.points.rows(); ++k) {
    half = std::max(half, (view.points.row(k).transpose() - view.centroid)
                              .cwiseAbs()
                              .maxCoeff());
  }
  half *= 1.1;
  // Equal aspect: the plot area is wider than tall, so widen x.
  const double aspect =
      (kWidth - kLeft - kRight) / static_cast<double>(kHeight - kTop - kBottom);
  return Frame{view.centroid(0) - half * aspect, view.centroid(0) + half * aspect,
               view.centroid(1) - half, view.centroid(1) + half};
}

}  // namespace

std::string RenderSphereSvg(const SphereView &view) {
  const Frame f = SphereFrame(view);
  const double scale = (kHeight - kTop - kBottom) / (f.y1 - f.y0);
  std::string s = SvgHeader("hypersphere of " + Escape(view.class_name));
  s += SvgAxes(f, "PC1", "PC2");
  s += "<circle class=\"radius\" cx=\"" + Num(f.X(view.centroid(0))) +
       "\" cy=\"" + Num(f.Y(view.centroid(1))) + "\" r=\"" +
       Num(view.radius * scale) +
       "\" fill=\"none\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
  for (Eigen::Index k = 0; k < view.points.rows(); ++k) {
    s += "<circle class=\"mention\" cx=\"" + Num(f.X(view.points(k, 0))) +
         "\" cy=\"" + Num(f.Y(view.points(k, 1))) +
         "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>\n";
  }
  s += "<circle class=\"centroid\" cx=\"" + Num(f.X(view.centroid(0))) +
       "\" cy=\"" + Num(f.Y(view.centroid(1))) +
       "\" r=\"6\" fill=\"#d62728\"/>\n";
  const double lx = kWidth - kRight + 12;
  s += "<circle cx=\"" + Num(lx + 6) + "\" cy=\"" + Num(kTop + 10) +
       "\" r=\"6\" fill=\"#d62728\"/>\n<text x=\"" + Num(lx + 18) + "\" y=\"" +
       Num(kTop + 14) + "\" font-size=\"12\">centroid</text>\n";
  s += "<circle cx=\"" + Num(lx + 6) + "\" cy=\"" + Num(kTop + 30) +
       "\" r=\"3\" fill=\"#1f77b4\"/>\n<text x=\"" + Num(lx + 18) + "\" y=\"" +
       Num(kTop + 34) + "\" font-size=\"12\">" + Escape(view.class_name) +
       " mentions</text>\n";
  s += "<text x=\"" + Num(lx) + "\" y=\"" + Num(kTop + 54) +
       "\" font-size=\"12\">radius " + Tick(view.radius) + "</text>\n";
  s += "</svg>\n";
  return s;
}

std::vector<uint8_t> RenderSpherePng(const SphereView &view) {
  const Frame f = SphereFrame(view);
  const double scale = (kHeight - kTop - kBottom) / (f.y1 - f.y0);
  Canvas canvas;
  Axes(canvas);
  canvas.Circle(f.X(view.centroid(0)), f.Y(view.centroid(1)),
                view.radius * scale, kGrey);
  for (Eigen::Index k = 0; k < view.points.rows(); ++k) {
    canvas.Dot(f.X(view.points(k, 0)), f.Y(view.points(k, 1)), 3,
               kLevels[1].rgb);
  }
  canvas.Dot(f.X(view.centroid(0)), f.Y(view.centroid(1)), 6, kLevels[0].rgb);
  return canvas.EncodePng();
}

void WriteBytes(const std::string &path, const std::string &bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void WriteBytes(const std::string &path, const std::vector<uint8_t> &bytes) {
  WriteBytes(path, std::string(bytes.begin(), bytes.end()));
}

}  // namespace ecsp
