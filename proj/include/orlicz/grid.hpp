#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace orlicz {

/// Uniform grid on Omega = (0,1)^dim with n interior nodes per axis at
/// x_k = k h, k = 1..n, h = 1/(n+1). Halo nodes sit at k = 1-halo..0 and
/// n+1..n+halo and always carry the value 0.
struct GridDomain {
  int dim = 1;
  int n = 0;
  int halo = 0;

  static GridDomain make(int dim, int n, int halo);
  /// {"dim": 1, "n": 127, "halo": 127}; halo defaults to n.
  static GridDomain from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  double h() const { return 1.0 / (n + 1); }
  double cell_measure() const;
  std::size_t size() const;  ///< interior node count n^dim
  double measure() const { return cell_measure() * static_cast<double>(size()); }
  double diameter() const;
};

/// Values at interior nodes, row-major (x fastest) in 2-D.
struct GridFunction {
  GridDomain grid;
  std::vector<double> values;

  static GridFunction zeros(const GridDomain& grid);
  static GridFunction constant(const GridDomain& grid, double c);

  std::size_t size() const { return values.size(); }
  /// Coordinate columns then the value, one row per interior node.
  void write_csv(std::ostream& os) const;
  std::string to_csv() const;
};

}  // namespace orlicz
