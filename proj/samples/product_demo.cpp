// Approximate min-plus product of two small matrices whose entries span
// hundreds of binary orders, next to the exact product and the op count.

#include <iostream>

#include "minplus/minplus.hpp"

using namespace minplus;

int main() {
  const double eps = 0.1;
  WeightMatrix a(3, 3), b(3, 3);
  const char* ta[] = {"1", "1p200", "inf", "3", "1p-50", "7", "1p100", "2", "5"};
  const char* tb[] = {"2", "inf", "1p10", "1p-60", "4", "1", "9", "1p300", "6"};
  for (std::size_t k = 0; k < 9; ++k) {
    a.data()[k] = parse_weight(ta[k]);
    b.data()[k] = parse_weight(tb[k]);
  }

  OpCounter ops;
  WeightMatrix approx;
  {
    CountingScope scope(ops);
    approx = approx_minplus_product(a, b, eps);
  }
  const WeightMatrix exact = minplus_product_naive(a, b);

  std::cout << "i j  exact            approx           ratio-1\n";
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      std::cout << i << ' ' << j << "  " << format_weight(exact(i, j)) << "\t" << format_weight(approx(i, j)) << "\t"
                << relative_excess(approx(i, j), exact(i, j)) << '\n';
    }
  }
  std::cout << "operations: " << ops.total() << " (eps " << eps << ")\n";
}
