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

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <vector>

namespace hpqs {

/// Grayscale images with integer labels, pixels scaled to [0, 1].
struct ImageSet {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Eigen::MatrixXd pixels;  // [N, rows * cols], row-major per image
  std::vector<int> labels;

  std::size_t size() const { return labels.size(); }
};

/// Reads an IDX3 image file and its IDX1 label file. Throws DataError on a
/// wrong magic number, a truncated file, mismatched counts or a label above
/// `max_label`. `limit` > 0 keeps only the first `limit` records.
ImageSet load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                  std::size_t limit = 0, int max_label = 9);

struct MnistSplits {
  ImageSet train;
  ImageSet test;
};

/// Standard file names under `root`: train-images-idx3-ubyte,
/// train-labels-idx1-ubyte, t10k-images-idx3-ubyte, t10k-labels-idx1-ubyte.
MnistSplits load_mnist(const std::filesystem::path& root);

/// $HPQS_DATA_ROOT if set, otherwise the bundled subset directory.
std::filesystem::path default_data_root();

/// Keeps records whose label is in `classes`, relabelled by position in
/// `classes`. Order is preserved.
ImageSet filter_classes(const ImageSet& set, const std::vector<int>& classes);

/// First `n` records (all when n >= size).
ImageSet truncate(const ImageSet& set, std::size_t n);

/// Non-overlapping k x k mean pooling per image; trailing rows/cols that do
/// not fill a window are dropped. Returns [N, (rows / k) * (cols / k)].
Eigen::MatrixXd avgpool_features(const ImageSet& set, std::size_t kernel);

/// Writes an IDX pair; used to build fixtures and subsets.
void write_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
               const ImageSet& set);

}  // namespace hpqs
