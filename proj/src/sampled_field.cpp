#include "confmet/sampled_field.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>

#include "confmet/errors.hpp"

namespace confmet {

std::vector<double> fornberg_weights(double z, const std::vector<double>& nodes, int m) {
    // B. Fornberg, "Generation of finite difference formulas on arbitrarily
    // spaced grids", Math. Comp. 51 (1988).
    int nd = static_cast<int>(nodes.size()) - 1;
    require(nd >= m, Errc::StencilOutOfDomain, "not enough nodes for derivative order");
    std::vector<std::vector<double>> c(nodes.size(), std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = nodes[0] - z;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0;
        double c5 = c4;
        c4 = nodes[i] - z;
        for (int j = 0; j < i; ++j) {
            double c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) w[i] = c[i][m];
    return w;
}

void unit_vector_from_angles(const std::vector<double>& angles, int n, double* out) {
    require(static_cast<int>(angles.size()) == n - 1, Errc::InternalError, "angle count mismatch");
    double sin_prod = 1.0;
    for (int i = 0; i < n - 2; ++i) {
        out[i] = sin_prod * std::cos(angles[i]);
        sin_prod *= std::sin(angles[i]);
    }
    out[n - 2] = sin_prod * std::cos(angles[n - 2]);
    out[n - 1] = sin_prod * std::sin(angles[n - 2]);
}

std::vector<double> angles_from_unit_vector(const double* u, int n) {
    std::vector<double> angles(n - 1);
    double tail = 1.0;  // norm^2 of the remaining components
    for (int i = 0; i < n - 2; ++i) {
        double c = std::clamp(u[i] / std::sqrt(std::max(tail, 1e-300)), -1.0, 1.0);
        angles[i] = std::acos(c);
        tail = std::max(0.0, tail - u[i] * u[i]);
    }
    angles[n - 2] = std::atan2(u[n - 1], u[n - 2]);
    if (angles[n - 2] < 0) angles[n - 2] += 2.0 * kPi;
    return angles;
}

namespace {

// Component c of the unit vector as a product of per-axis sin/cos factors.
// axis a in [0, n-2] is a polar angle, axis n-2 is the azimuth (for the last
// two components). Returns the product with `d1` derivatives applied on axis
// da and `d2` on axis db (da == db allowed, then order d1+d2).
double unit_component(const std::vector<double>& angles, int n, int comp, int da, int d1, int db,
                      int d2) {
    auto factor = [&](int axis, int kind, int order) -> double {
        // kind: 0 = sin, 1 = cos, 2 = one
        if (kind == 2) return order == 0 ? 1.0 : 0.0;
        double a = angles[axis];
        int o = order % 4;
        if (kind == 0) {  // sin chain: sin, cos, -sin, -cos
            switch (o) {
                case 0: return std::sin(a);
                case 1: return std::cos(a);
                case 2: return -std::sin(a);
                default: return -std::cos(a);
            }
        }
        switch (o) {  // cos chain: cos, -sin, -cos, sin
            case 0: return std::cos(a);
            case 1: return -std::sin(a);
            case 2: return -std::cos(a);
            default: return std::sin(a);
        }
    };
    double prod = 1.0;
    for (int axis = 0; axis < n - 1; ++axis) {
        int kind;
        if (comp < n - 2) {
            if (axis < comp)
                kind = 0;
            else if (axis == comp)
                kind = 1;
            else
                kind = 2;
        } else if (comp == n - 2) {
            kind = (axis < n - 2) ? 0 : 1;  // all sines then cos(phi)
        } else {
            kind = 0;  // all sines then sin(phi)
        }
        int order = (axis == da ? d1 : 0) + (axis == db ? d2 : 0);
        prod *= factor(axis, kind, order);
    }
    return prod;
}

}  // namespace

struct SampledField::Stencils {
    // Per radial node: first/second derivative weights over a 5-node window
    // starting at `start` (uniform s-grid, so the same weights everywhere).
    std::vector<double> rad_d1, rad_d2;  // size 5, central
    // Per polar axis and node: window start + weights.
    struct AxisStencil {
        std::vector<int> start;
        std::vector<std::vector<double>> d1, d2;
    };
    std::vector<AxisStencil> polar;  // in theta coordinates
    // Azimuth: uniform periodic, offsets -2..2.
    std::vector<double> az_d1, az_d2;
    std::vector<std::vector<double>> polar_theta;  // node angles per polar axis
};

SampledField::SampledField(AnnulusGrid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == grid_.point_count(), Errc::ValidationError,
            "sampled field size does not match grid");
    for (double v : values_)
        require(v > 0.0, Errc::ValidationError, "sampled conformal factor must be positive");

    auto st = std::make_shared<Stencils>();
    double h = grid_.log_step();
    st->rad_d1 = {1.0 / (12 * h), -8.0 / (12 * h), 0.0, 8.0 / (12 * h), -1.0 / (12 * h)};
    st->rad_d2 = {-1.0 / (12 * h * h), 16.0 / (12 * h * h), -30.0 / (12 * h * h),
                  16.0 / (12 * h * h), -1.0 / (12 * h * h)};

    const auto& sq = grid_.sphere;
    for (std::size_t axis = 0; axis + 1 < sq.axis_sizes().size(); ++axis) {
        // Stencils live in theta but are indexed in the t = cos(theta) node
        // order of the tensor grid; Fornberg does not need sorted nodes.
        std::vector<double> theta(sq.polar_t[axis].size());
        for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = std::acos(sq.polar_t[axis][j]);
        Stencils::AxisStencil as;
        int m = static_cast<int>(theta.size());
        int win = std::min(5, m);
        for (int j = 0; j < m; ++j) {
            int start = std::clamp(j - win / 2, 0, m - win);
            std::vector<double> nodes(theta.begin() + start, theta.begin() + start + win);
            as.start.push_back(start);
            as.d1.push_back(fornberg_weights(theta[j], nodes, 1));
            as.d2.push_back(fornberg_weights(theta[j], nodes, 2));
        }
        st->polar_theta.push_back(std::move(theta));
        st->polar.push_back(std::move(as));
    }
    double hp = 2.0 * kPi / static_cast<double>(sq.azimuth.size());
    st->az_d1 = {1.0 / (12 * hp), -8.0 / (12 * hp), 0.0, 8.0 / (12 * hp), -1.0 / (12 * hp)};
    st->az_d2 = {-1.0 / (12 * hp * hp), 16.0 / (12 * hp * hp), -30.0 / (12 * hp * hp),
                 16.0 / (12 * hp * hp), -1.0 / (12 * hp * hp)};
    stencils_ = st;
}

double SampledField::value_at_node(std::size_t ir, std::size_t is) const {
    return values_[ir * grid_.sphere.count() + is];
}

bool SampledField::radial_edge(std::size_t ir) const {
    return ir < 2 || ir + 2 >= grid_.radial_count();
}

Jet2 SampledField::jet_at_node(std::size_t ir, std::size_t is) const {
    require(!radial_edge(ir), Errc::StencilOutOfDomain,
            "radial stencil does not fit at node " + std::to_string(ir));
    const auto& sq = grid_.sphere;
    int n = sq.n;
    auto sizes = sq.axis_sizes();
    int naxes = static_cast<int>(sizes.size());       // angular axes
    int ncoord = 1 + naxes;                           // chart coords: s then angles

    // Decompose the sphere flat index into the tensor multi-index.
    std::vector<std::size_t> tidx(naxes);
    {
        std::size_t rem = is;
        for (int a = naxes - 1; a >= 0; --a) {
            tidx[a] = rem % sizes[a];
            rem /= sizes[a];
        }
    }

    // Sample accessor with azimuth wrap; polar indices stay in range by
    // stencil construction.
    auto sample = [&](int dr, int axis_a, int ja, int axis_b, int jb) -> double {
        std::vector<std::size_t> id = tidx;
        if (axis_a >= 0) id[axis_a] = static_cast<std::size_t>(ja);
        if (axis_b >= 0) id[axis_b] = static_cast<std::size_t>(jb);
        // wrap azimuth
        std::size_t flat = 0;
        for (int a = 0; a < naxes; ++a) flat = flat * sizes[a] + id[a];
        return values_[(ir + dr) * sq.count() + flat];
    };

    // Chart-coordinate jet.
    std::vector<double> fd1(ncoord, 0.0);
    std::vector<double> fd2(ncoord * ncoord, 0.0);
    double f0 = value_at_node(ir, is);

    const auto& st = *stencils_;
    int az_axis = naxes - 1;
    int az_m = static_cast<int>(sizes[az_axis]);
    auto az_wrap = [&](int j) { return ((j % az_m) + az_m) % az_m; };

    // Derivative along one angular axis at given (dr, other-axis override).
    auto axis_derivative = [&](int axis, int order, int dr, int axis_b, int jb) -> double {
        double acc = 0.0;
        if (axis == az_axis) {
            const auto& w = order == 1 ? st.az_d1 : st.az_d2;
            for (int k = -2; k <= 2; ++k)
                acc += w[k + 2] * sample(dr, axis, az_wrap(static_cast<int>(tidx[axis]) + k), axis_b, jb);
        } else {
            const auto& as = st.polar[axis];
            int j = static_cast<int>(tidx[axis]);
            const auto& w = order == 1 ? as.d1[j] : as.d2[j];
            int start = as.start[j];
            for (std::size_t k = 0; k < w.size(); ++k)
                acc += w[k] * sample(dr, axis, start + static_cast<int>(k), axis_b, jb);
        }
        return acc;
    };

    // s-derivatives.
    for (int k = -2; k <= 2; ++k) {
        fd1[0] += st.rad_d1[k + 2] * sample(k, -1, 0, -1, 0);
        fd2[0] += st.rad_d2[k + 2] * sample(k, -1, 0, -1, 0);
    }
    // pure angular derivatives.
    for (int a = 0; a < naxes; ++a) {
        fd1[1 + a] = axis_derivative(a, 1, 0, -1, 0);
        fd2[(1 + a) * ncoord + (1 + a)] = axis_derivative(a, 2, 0, -1, 0);
    }
    // mixed s-angle: apply radial stencil to angular first derivatives.
    for (int a = 0; a < naxes; ++a) {
        double acc = 0.0;
        for (int k = -2; k <= 2; ++k) acc += st.rad_d1[k + 2] * axis_derivative(a, 1, k, -1, 0);
        fd2[0 * ncoord + (1 + a)] = acc;
        fd2[(1 + a) * ncoord + 0] = acc;
    }
    // mixed angle-angle.
    for (int a = 0; a < naxes; ++a)
        for (int b = a + 1; b < naxes; ++b) {
            double acc = 0.0;
            if (a == az_axis || b == az_axis) {
                int az = az_axis, other = (a == az_axis) ? b : a;
                for (int k = -2; k <= 2; ++k) {
                    int j = az_wrap(static_cast<int>(tidx[az]) + k);
                    acc += st.az_d1[k + 2] * axis_derivative(other, 1, 0, az, j);
                }
            } else {
                const auto& as = st.polar[b];
                int j = static_cast<int>(tidx[b]);
                const auto& w = as.d1[j];
                int start = as.start[j];
                for (std::size_t k = 0; k < w.size(); ++k)
                    acc += w[k] * axis_derivative(a, 1, 0, b, start + static_cast<int>(k));
            }
            fd2[(1 + a) * ncoord + (1 + b)] = acc;
            fd2[(1 + b) * ncoord + (1 + a)] = acc;
        }

    // Chart map x(q) = e^s * Theta(angles): Jacobian and second derivatives.
    double r = grid_.radii[ir];
    std::vector<double> angles(naxes);
    for (int a = 0; a < naxes - 1; ++a) angles[a] = stencils_->polar_theta[a][tidx[a]];
    angles[naxes - 1] = sq.azimuth[tidx[az_axis]];

    Eigen::MatrixXd J(n, ncoord);
    std::vector<Eigen::MatrixXd> Hx(n, Eigen::MatrixXd::Zero(ncoord, ncoord));
    std::vector<double> unit(n);
    unit_vector_from_angles(angles, n, unit.data());
    for (int i = 0; i < n; ++i) {
        J(i, 0) = r * unit[i];
        Hx[i](0, 0) = r * unit[i];
        for (int a = 0; a < naxes; ++a) {
            double d1 = unit_component(angles, n, i, a, 1, -1, 0);
            J(i, 1 + a) = r * d1;
            Hx[i](0, 1 + a) = r * d1;
            Hx[i](1 + a, 0) = r * d1;
            for (int b = a; b < naxes; ++b) {
                double d2 = (a == b) ? unit_component(angles, n, i, a, 2, -1, 0)
                                     : unit_component(angles, n, i, a, 1, b, 1);
                Hx[i](1 + a, 1 + b) = r * d2;
                Hx[i](1 + b, 1 + a) = r * d2;
            }
        }
    }

    Eigen::MatrixXd Jinv = J.fullPivLu().inverse();

    Jet2 out;
    out.value = f0;
    out.grad.assign(n, 0.0);
    out.hess.assign(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < ncoord; ++a) out.grad[i] += Jinv(a, i) * fd1[a];

    // Gamma^c_{ab} = sum_i Jinv(c,i) * Hx[i](a,b)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int a = 0; a < ncoord; ++a)
                for (int b = 0; b < ncoord; ++b) {
                    double corr = fd2[a * ncoord + b];
                    for (int c = 0; c < ncoord; ++c) {
                        double gamma = 0.0;
                        for (int ii = 0; ii < n; ++ii) gamma += Jinv(c, ii) * Hx[ii](a, b);
                        corr -= gamma * fd1[c];
                    }
                    acc += Jinv(a, i) * Jinv(b, j) * corr;
                }
            out.hess[i * n + j] = acc;
        }
    return out;
}

double SampledField::value(const double* x) const {
    const auto& sq = grid_.sphere;
    int n = sq.n;
    double r = 0.0;
    for (int i = 0; i < n; ++i) r += x[i] * x[i];
    r = std::sqrt(r);
    require(r >= grid_.r_min * (1 - 1e-12) && r <= grid_.r_max * (1 + 1e-12), Errc::EvalOutsideDomain,
            "point radius outside sampled chart");
    std::vector<double> unit(n);
    for (int i = 0; i < n; ++i) unit[i] = x[i] / r;
    auto angles = angles_from_unit_vector(unit.data(), n);

    // Radial cubic window in s.
    double h = grid_.log_step();
    double s = std::log(r) - std::log(grid_.r_min);
    int m = static_cast<int>(grid_.radial_count());
    int j0 = std::clamp(static_cast<int>(std::floor(s / h)) - 1, 0, std::max(0, m - 4));
    int win = std::min(4, m);

    auto sizes = sq.axis_sizes();
    int naxes = static_cast<int>(sizes.size());

    // Barycentric weights along each angular axis at the query angle.
    std::vector<std::vector<double>> aw(naxes);
    std::vector<std::vector<std::size_t>> aj(naxes);
    for (int a = 0; a < naxes - 1; ++a) {
        std::size_t ma = sizes[a];
        double t = std::cos(angles[a]);
        for (std::size_t j = 0; j < ma; ++j) {
            double w = 1.0;
            for (std::size_t k = 0; k < ma; ++k)
                if (k != j) w *= (t - sq.polar_t[a][k]) / (sq.polar_t[a][j] - sq.polar_t[a][k]);
            aw[a].push_back(w);
            aj[a].push_back(j);
        }
    }
    {  // azimuth: cubic over the 4 nearest periodic nodes
        int a = naxes - 1;
        int ma = static_cast<int>(sizes[a]);
        double hp = 2.0 * kPi / ma;
        double u = angles[a] / hp - 0.5;  // node j at (j + 0.5) hp
        int base = static_cast<int>(std::floor(u)) - 1;
        std::vector<double> nodes(4);
        std::vector<std::size_t> idx(4);
        for (int k = 0; k < 4; ++k) {
            int j = base + k;
            nodes[k] = (j + 0.5) * hp;
            idx[k] = static_cast<std::size_t>(((j % ma) + ma) % ma);
        }
        for (int k = 0; k < 4; ++k) {
            double w = 1.0;
            for (int l = 0; l < 4; ++l)
                if (l != k) w *= (angles[a] - nodes[l]) / (nodes[k] - nodes[l]);
            aw[a].push_back(w);
            aj[a].push_back(idx[k]);
        }
    }

    // Tensor contraction over (radial window) x (angular supports).
    double total = 0.0;
    std::vector<double> svals(win);
    for (int k = 0; k < win; ++k) svals[k] = std::log(grid_.radii[j0 + k]) - std::log(grid_.r_min);
    std::vector<double> rw(win);
    for (int k = 0; k < win; ++k) {
        double w = 1.0;
        for (int l = 0; l < win; ++l)
            if (l != k) w *= (s - svals[l]) / (svals[k] - svals[l]);
        rw[k] = w;
    }
    // iterate over the angular support product
    std::vector<std::size_t> cursor(naxes, 0);
    for (;;) {
        double w_ang = 1.0;
        std::size_t flat = 0;
        for (int a = 0; a < naxes; ++a) {
            w_ang *= aw[a][cursor[a]];
            flat = flat * sizes[a] + aj[a][cursor[a]];
        }
        if (w_ang != 0.0) {
            for (int k = 0; k < win; ++k)
                total += rw[k] * w_ang * values_[(j0 + k) * sq.count() + flat];
        }
        int a = naxes - 1;
        for (; a >= 0; --a) {
            if (++cursor[a] < aw[a].size()) break;
            cursor[a] = 0;
        }
        if (a < 0) break;
    }
    return total;
}

SampledField sample_field(const AnnulusGrid& grid,
                          const std::function<double(const double*)>& f) {
    std::vector<double> vals(grid.point_count());
    std::vector<double> x(grid.n());
    for (std::size_t ir = 0; ir < grid.radial_count(); ++ir)
        for (std::size_t is = 0; is < grid.sphere.count(); ++is) {
            grid.point(ir, is, x.data());
            vals[ir * grid.sphere.count() + is] = f(x.data());
        }
    return SampledField(grid, std::move(vals));
}

}  // namespace confmet
