#include "frbs/grid.hpp"

#include <cmath>

namespace frbs {

Grid make_grid(int p) {
    if (p < 2) throw std::invalid_argument("make_grid: p must be >= 2");
    Grid g;
    g.p = p;
    g.nodes.resize(p);
    g.weights.resize(p);
    const double h = 1.0 / (p - 1);
    for (int i = 0; i < p; ++i) {
        g.nodes[i] = i * h;
        g.weights[i] = (i == 0 || i == p - 1) ? h / 2.0 : h;
    }
    g.nodes[p - 1] = 1.0;  // exact endpoint regardless of rounding
    return g;
}

double inner_l2(const GridFunction& f, const GridFunction& g, const Grid& grid) {
    check_on_grid(f, grid, "inner_l2");
    check_on_grid(g, grid, "inner_l2");
    double acc = 0.0;
    for (int i = 0; i < grid.p; ++i) acc += grid.weights[i] * (f[i] * g[i]);
    return acc;
}

}  // namespace frbs
