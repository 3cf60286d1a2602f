// Copyright 2026 The HPQS Authors.
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

#include "hpqs/mnist.hpp"

#include "hpqs/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#ifndef HPQS_DEFAULT_DATA_ROOT
#define HPQS_DEFAULT_DATA_ROOT "data/mnist"
#endif

namespace hpqs {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open '" + path.string() +
                    "'; set HPQS_DATA_ROOT to a directory with the MNIST IDX files or run "
                    "tools/make_mnist_subset.py");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t at) {
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) |
         (std::uint32_t{b[at + 2]} << 8) | std::uint32_t{b[at + 3]};
}

void put32(std::ofstream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                         static_cast<char>(v >> 8), static_cast<char>(v)};
  out.write(bytes, 4);
}

}  // namespace

ImageSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                  std::size_t limit, int max_label) {
  const auto img = read_file(images);
  const auto lab = read_file(labels);
  if (img.size() < 16) throw DataError(images.string() + ": truncated header");
  if (lab.size() < 8) throw DataError(labels.string() + ": truncated header");
  if (be32(img, 0) != kImageMagic)
    throw DataError(images.string() + ": bad magic number " + std::to_string(be32(img, 0)));
  if (be32(lab, 0) != kLabelMagic)
    throw DataError(labels.string() + ": bad magic number " + std::to_string(be32(lab, 0)));
  const std::size_t n = be32(img, 4), rows = be32(img, 8), cols = be32(img, 12);
  if (be32(lab, 4) != n)
    throw DataError(labels.string() + ": " + std::to_string(be32(lab, 4)) + " labels for " +
                    std::to_string(n) + " images");
  if (img.size() < 16 + n * rows * cols) throw DataError(images.string() + ": truncated pixel data");
  if (lab.size() < 8 + n) throw DataError(labels.string() + ": truncated label data");

  const std::size_t keep = limit > 0 ? std::min(limit, n) : n;
  ImageSet set;
  set.rows = rows;
  set.cols = cols;
  set.pixels.resize(static_cast<Eigen::Index>(keep), static_cast<Eigen::Index>(rows * cols));
  set.labels.resize(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const int y = lab[8 + i];
    if (y > max_label)
      throw DataError(labels.string() + ": label " + std::to_string(y) + " at record " +
                      std::to_string(i) + " exceeds " + std::to_string(max_label));
    set.labels[i] = y;
    for (std::size_t p = 0; p < rows * cols; ++p)
      set.pixels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) =
          img[16 + i * rows * cols + p] / 255.0;
  }
  return set;
}

MnistSplits load_mnist(const std::filesystem::path& root) {
  return {load_idx(root / "train-images-idx3-ubyte", root / "train-labels-idx1-ubyte"),
          load_idx(root / "t10k-images-idx3-ubyte", root / "t10k-labels-idx1-ubyte")};
}

std::filesystem::path default_data_root() {
  if (const char* env = std::getenv("HPQS_DATA_ROOT"); env && *env) return env;
  return HPQS_DEFAULT_DATA_ROOT;
}

ImageSet filter_classes(const ImageSet& set, const std::vector<int>& classes) {
  std::vector<Eigen::Index> keep;
  std::vector<int> remapped;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto it = std::find(classes.begin(), classes.end(), set.labels[i]);
    if (it == classes.end()) continue;
    keep.push_back(static_cast<Eigen::Index>(i));
    remapped.push_back(static_cast<int>(it - classes.begin()));
  }
  ImageSet out;
  out.rows = set.rows;
  out.cols = set.cols;
  out.pixels = set.pixels(keep, Eigen::all);
  out.labels = std::move(remapped);
  return out;
}

ImageSet truncate(const ImageSet& set, std::size_t n) {
  if (n >= set.size()) return set;
  ImageSet out;
  out.rows = set.rows;
  out.cols = set.cols;
  out.pixels = set.pixels.topRows(static_cast<Eigen::Index>(n));
  out.labels.assign(set.labels.begin(), set.labels.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

Eigen::MatrixXd avgpool_features(const ImageSet& set, std::size_t kernel) {
  if (kernel == 0 || kernel > set.rows || kernel > set.cols)
    throw ShapeError("avgpool_features: kernel " + std::to_string(kernel) + " for " +
                     std::to_string(set.rows) + "x" + std::to_string(set.cols) + " images");
  const std::size_t oh = set.rows / kernel, ow = set.cols / kernel;
  Eigen::MatrixXd out(set.pixels.rows(), static_cast<Eigen::Index>(oh * ow));
  const double inv = 1.0 / static_cast<double>(kernel * kernel);
  for (Eigen::Index n = 0; n < set.pixels.rows(); ++n)
    for (std::size_t r = 0; r < oh; ++r)
      for (std::size_t c = 0; c < ow; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < kernel; ++i)
          for (std::size_t j = 0; j < kernel; ++j)
            s += set.pixels(n, static_cast<Eigen::Index>((r * kernel + i) * set.cols + c * kernel + j));
        out(n, static_cast<Eigen::Index>(r * ow + c)) = s * inv;
      }
  return out;
}

void write_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
               const ImageSet& set) {
  std::ofstream img(images, std::ios::binary), lab(labels, std::ios::binary);
  if (!img || !lab) throw DataError("cannot write IDX files at " + images.string());
  put32(img, kImageMagic);
  put32(img, static_cast<std::uint32_t>(set.size()));
  put32(img, static_cast<std::uint32_t>(set.rows));
  put32(img, static_cast<std::uint32_t>(set.cols));
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t p = 0; p < set.rows * set.cols; ++p) {
      const double v = std::clamp(set.pixels(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)), 0.0, 1.0);
      img.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  put32(lab, kLabelMagic);
  put32(lab, static_cast<std::uint32_t>(set.size()));
  for (int y : set.labels) lab.put(static_cast<char>(y));
}

}  // namespace hpqs
