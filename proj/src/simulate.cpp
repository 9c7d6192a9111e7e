#include "frbs/simulate.hpp"

#include <cmath>

#include "frbs/rng.hpp"

namespace frbs {

GridFunction eigenfunction(int m, const Grid& grid) {
    if (m < 1) throw std::invalid_argument("eigenfunction: m must be >= 1");
    GridFunction f(grid.p);
    if (m == 1) {
        f.setOnes();
        return f;
    }
    const double freq = (m - 1) * M_PI;
    const double amp = std::sqrt(2.0);
    for (int i = 0; i < grid.p; ++i) f[i] = amp * std::cos(freq * grid.nodes[i]);
    return f;
}

namespace {

// slope coefficients in the eigenfunction basis
std::vector<double> beta_coeffs(int level, double c_beta, int n_terms) {
    std::vector<double> b(static_cast<std::size_t>(n_terms));
    for (int m = 1; m <= n_terms; ++m) {
        const double sign = (m % 2 == 1) ? 1.0 : -1.0;
        b[m - 1] = level == 0 ? 4.0 * sign * std::pow(m, -4.0)
                              : (4.0 - c_beta) * sign * std::pow(m, -2.0);
    }
    return b;
}

}  // namespace

SimulatedData generate(const ScenarioSpec& spec) {
    if (spec.n < 2 || spec.p < 2 || spec.n_terms < 1)
        throw std::invalid_argument("generate: bad scenario dimensions");
    if (!(std::abs(spec.ar_coeff) < 1.0))
        throw std::invalid_argument("generate: |ar_coeff| must be < 1");
    for (std::size_t i = 0; i < spec.change_points.size(); ++i) {
        const int cp = spec.change_points[i];
        if (!(0 < cp && cp < spec.n))
            throw std::invalid_argument("generate: change points must lie in (0, n)");
        if (i > 0 && cp <= spec.change_points[i - 1])
            throw std::invalid_argument("generate: change points must be strictly increasing");
    }

    SimulatedData out;
    FunctionalSeries& data = out.data;
    data.grid = make_grid(spec.p);
    const int n = spec.n, nt = spec.n_terms;

    // scores Z_{m,j}: stationary unit-variance AR(1) per mode, drawn m-major
    NormalSampler normal(mix_seed(spec.seed, 0));
    Eigen::MatrixXd scores(nt, n);
    const double a = spec.ar_coeff;
    const double innov = std::sqrt(1.0 - a * a);
    for (int m = 0; m < nt; ++m) {
        double z = normal();  // Z_{m,0} from the stationary N(0,1) law
        for (int j = 0; j < n; ++j) {
            z = a * z + innov * normal();
            scores(m, j) = z;
        }
    }

    // X_j = sum_m zeta_m Z_{m,j} phi_m with zeta_m = (-1)^{m+1} m^{-1}
    Eigen::MatrixXd phi(nt, spec.p);
    Eigen::VectorXd zeta(nt);
    for (int m = 1; m <= nt; ++m) {
        phi.row(m - 1) = eigenfunction(m, data.grid).transpose();
        zeta[m - 1] = ((m % 2 == 1) ? 1.0 : -1.0) / m;
    }
    data.x = scores.transpose() * zeta.asDiagonal() * phi;

    // piecewise slope truth
    const auto c0 = beta_coeffs(0, spec.c_beta, nt);
    const auto c1 = beta_coeffs(1, spec.c_beta, nt);
    GridFunction beta0 = GridFunction::Zero(spec.p);
    GridFunction beta1 = GridFunction::Zero(spec.p);
    for (int m = 0; m < nt; ++m) {
        beta0 += c0[m] * phi.row(m).transpose();
        beta1 += c1[m] * phi.row(m).transpose();
    }

    double kappa_sq = 0.0;  // sum_m zeta_m^2 (b0_m - b1_m)^2, the generative change size
    for (int m = 0; m < nt; ++m) {
        const double d = c0[m] - c1[m];
        kappa_sq += zeta[m] * zeta[m] * d * d;
    }

    out.truth.change_points = spec.change_points;
    const int n_segments = static_cast<int>(spec.change_points.size()) + 1;
    for (int seg = 0; seg < n_segments; ++seg)
        out.truth.slope_segments.push_back(seg % 2 == 0 ? beta0 : beta1);
    out.truth.kappa_sq_true.assign(spec.change_points.size(), kappa_sq);

    // y_j = <X_j, beta*_j> + eps_j
    NormalSampler noise(mix_seed(spec.seed, 1));
    data.y.resize(n);
    int seg = 0;
    for (int j = 0; j < n; ++j) {
        while (seg < static_cast<int>(spec.change_points.size()) &&
               j + 1 > spec.change_points[seg])
            ++seg;
        const GridFunction& beta = out.truth.slope_segments[seg];
        data.y[j] = inner_l2(data.x.row(j).transpose(), beta, data.grid) + noise();
    }
    return out;
}

ScenarioSpec scenario_presets(const std::string& name, int n, double c_beta, std::uint64_t seed) {
    ScenarioSpec spec;
    spec.n = n;
    spec.p = 200;
    spec.c_beta = c_beta;
    spec.seed = seed;
    if (name == "S1") {
        spec.change_points = {n / 2};
    } else if (name == "S2") {
        spec.change_points = {n / 4, 5 * n / 8};
    } else {
        throw std::invalid_argument("scenario_presets: unknown scenario '" + name + "'");
    }
    return spec;
}

}  // namespace frbs
