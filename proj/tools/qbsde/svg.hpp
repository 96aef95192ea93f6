// Copyright 2026 The qbsde Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qbsde::cli::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

void line_plot(std::ostream& os, const std::string& title, const std::string& xlabel, const std::string& ylabel,
               const std::vector<Series>& series);

/// values is rows.size() x cols.size(), row-major; rows run along the
/// vertical axis. Cells are coloured by log10 |value|.
void heatmap(std::ostream& os, const std::string& title, const std::string& xlabel, const std::string& ylabel,
             const std::vector<double>& cols, const std::vector<double>& rows, const std::vector<double>& values);

}  // namespace qbsde::cli::svg
