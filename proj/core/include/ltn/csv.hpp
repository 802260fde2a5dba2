/* Copyright 2026 The ltn Authors. Licensed under the Apache License, Version 2.0. */
#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "ltn/numerics.hpp"

namespace ltn {

// Ten significant digits, locale independent.
std::string format_number(double v);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

Matrix read_matrix_csv(const std::string& path);
void write_matrix_csv(const std::string& path, const Matrix& m);

}  // namespace ltn
