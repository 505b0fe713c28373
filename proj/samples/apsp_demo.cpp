// Approximate all-pairs shortest paths on a graph read from an instance
// file, or on a generated one when no file is given.
//
//   apsp_demo [instance.txt] [eps]

#include <fstream>
#include <iostream>
#include <string>

#include "minplus/minplus.hpp"

using namespace minplus;

int main(int argc, char** argv) {
  const double eps = argc > 2 ? std::stod(argv[2]) : 0.1;
  Graph g(0, true);
  try {
    if (argc > 1) {
      std::ifstream in(argv[1]);
      if (!in) throw std::runtime_error(std::string("cannot open ") + argv[1]);
      g = std::get<Graph>(parse_instance(in).blocks.at(0));
    } else {
      GenSpec spec;
      spec.n = 12;
      spec.exp_hi = 60;
      spec.connected = true;
      spec.directed = false;
      g = std::get<Graph>(generate_instance(spec).blocks.at(0));
    }
  } catch (const std::exception& e) {
    std::cerr << "apsp_demo: " << e.what() << '\n';
    return 2;
  }

  const DistanceMatrix approx = g.directed() ? approx_apsp_directed(g, eps) : approx_apsp_undirected(g, eps);
  const DistanceMatrix exact = exact_apsp(g);
  double worst = 0.0;
  for (std::size_t k = 0; k < exact.data().size(); ++k) {
    if (!exact.data()[k].is_infinite() && !exact.data()[k].is_zero()) {
      worst = std::max(worst, relative_excess(approx.data()[k], exact.data()[k]));
    }
  }
  std::cout << (g.directed() ? "directed" : "undirected") << " graph, n=" << g.n() << ", m=" << g.edge_count()
            << ", eps=" << eps << '\n';
  const std::size_t shown = std::min<std::size_t>(g.n(), 6);
  for (std::size_t j = 0; j < shown; ++j) {
    std::cout << "d(0," << j << ") = " << format_weight(approx(0, j)) << "  exact " << format_weight(exact(0, j))
              << '\n';
  }
  std::cout << "worst relative excess: " << worst << '\n';
}
