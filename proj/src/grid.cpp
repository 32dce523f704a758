#include "orlicz/grid.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "orlicz/errors.hpp"

namespace orlicz {

GridDomain GridDomain::make(int dim, int n, int halo) {
  if (dim != 1 && dim != 2) throw ConfigError("grid: dim must be 1 or 2");
  if (n < 1) throw ConfigError("grid: need at least one interior node");
  if (halo < 0) throw ConfigError("grid: halo must be nonnegative");
  return GridDomain{dim, n, halo};
}

GridDomain GridDomain::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("grid: expected an object");
  auto integer = [&](const char* key, int fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer()) throw ConfigError(std::string("grid: '") + key + "' must be an integer");
    return j[key].get<int>();
  };
  const int dim = integer("dim", 1);
  if (!j.contains("n")) throw ConfigError("grid: missing 'n'");
  const int n = integer("n", 0);
  return make(dim, n, integer("halo", n));
}

nlohmann::json GridDomain::to_json() const {
  return {{"dim", dim}, {"n", n}, {"halo", halo}, {"h", h()}};
}

double GridDomain::cell_measure() const { return dim == 1 ? h() : h() * h(); }

std::size_t GridDomain::size() const {
  const auto m = static_cast<std::size_t>(n);
  return dim == 1 ? m : m * m;
}

double GridDomain::diameter() const { return std::sqrt(static_cast<double>(dim)); }

GridFunction GridFunction::zeros(const GridDomain& grid) { return constant(grid, 0.0); }

GridFunction GridFunction::constant(const GridDomain& grid, double c) {
  return GridFunction{grid, std::vector<double>(grid.size(), c)};
}

void GridFunction::write_csv(std::ostream& os) const {
  const double h = grid.h();
  os << std::setprecision(17);
  if (grid.dim == 1) {
    os << "x,value\n";
    for (int k = 0; k < grid.n; ++k) os << (k + 1) * h << ',' << values[k] << '\n';
  } else {
    os << "x,y,value\n";
    for (int b = 0; b < grid.n; ++b)
      for (int a = 0; a < grid.n; ++a)
        os << (a + 1) * h << ',' << (b + 1) * h << ',' << values[b * grid.n + a] << '\n';
  }
}

std::string GridFunction::to_csv() const {
  std::ostringstream os;
  write_csv(os);
  return os.str();
}

}  // namespace orlicz
