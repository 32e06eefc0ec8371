#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace cpb {

// Bivariate regression sample: two responses plus a covariate matrix.
struct Dataset {
  Eigen::VectorXd y1;
  Eigen::VectorXd y2;
  Eigen::MatrixXd X;                // n x p
  std::vector<std::string> names;   // covariate names, length p

  int n() const { return static_cast<int>(y1.size()); }
  int p() const { return static_cast<int>(X.cols()); }

  Dataset rows(const std::vector<int>& idx) const;
};

// CSV with header "y1,y2,<covariate names...>".  Strict numeric parse;
// missing or malformed fields raise std::runtime_error citing row and column.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& d, const std::string& path);

}  // namespace cpb
