#include "confmet/distance_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "confmet/errors.hpp"
#include "confmet/sampled_field.hpp"

namespace confmet {

namespace {

int gcd_all(const std::array<int, 8>& o, int d) {
    int g = 0;
    for (int i = 0; i < d; ++i) g = std::gcd(g, std::abs(o[i]));
    return g;
}

}  // namespace

GeodesicGridSpec make_grid_spec(int n, double r_min, double r_max, double resolution) {
    require(r_min > 0 && r_min < r_max, Errc::BadRadii, "need 0 < r_min < r_max");
    require(resolution > 0, Errc::ValidationError, "resolution must be positive");
    GeodesicGridSpec s;
    s.r_min = r_min;
    s.r_max = r_max;
    int base_polar = n == 3 ? 16 : (n == 4 ? 12 : 7);
    int m = std::max(4, static_cast<int>(std::lround(base_polar * resolution)));
    s.polar.assign(n - 2, m);
    s.azimuth = 2 * m;
    double h_ang = kPi / m;
    s.radial = std::max(4, static_cast<int>(std::ceil(std::log(r_max / r_min) / h_ang)) + 1);
    s.reach = std::clamp(static_cast<int>(std::lround(3.0 * std::sqrt(resolution))), 2, 6);
    return s;
}

DistanceGraph::DistanceGraph(const ConformalFactor& u, const BackgroundMetric& g0,
                             GeodesicGridSpec spec)
    : n_(g0.dim().n()), spec_(std::move(spec)) {
    require(static_cast<int>(spec_.polar.size()) == n_ - 2, Errc::ValidationError,
            "spec polar axis count must be n-2");
    require(spec_.azimuth % 2 == 0, Errc::ValidationError, "azimuth count must be even");
    require(spec_.radial >= 2, Errc::ValidationError, "need at least two radial layers");

    axis_sizes_.push_back(spec_.radial);
    for (int m : spec_.polar) axis_sizes_.push_back(m);
    axis_sizes_.push_back(spec_.azimuth);

    s_levels_.resize(spec_.radial);
    double s0 = std::log(spec_.r_min);
    double hs = (std::log(spec_.r_max) - s0) / (spec_.radial - 1);
    for (int i = 0; i < spec_.radial; ++i) s_levels_[i] = s0 + i * hs;

    for (std::size_t a = 0; a < spec_.polar.size(); ++a) {
        std::vector<double> t(spec_.polar[a]);
        for (int j = 0; j < spec_.polar[a]; ++j) t[j] = (j + 0.5) * kPi / spec_.polar[a];
        angle_levels_.push_back(std::move(t));
    }
    {
        std::vector<double> t(spec_.azimuth);
        for (int j = 0; j < spec_.azimuth; ++j) t[j] = (j + 0.5) * 2.0 * kPi / spec_.azimuth;
        angle_levels_.push_back(std::move(t));
    }

    std::size_t total = 1;
    for (int m : axis_sizes_) total *= static_cast<std::size_t>(m);
    lattice_count_ = total;
    positions_.resize((total + 2 * spec_.radial) * n_);
    conf_.resize(total + 2 * spec_.radial);
    volumes_.resize(total + 2 * spec_.radial);

    const bool conformal = g0.conformally_flat();
    require(conformal, Errc::UnsupportedBackground,
            "distance graphs currently require an analytic background; rescaled backgrounds stay "
            "in this class");
    const Expr& b = g0.flat_factor();
    int naxes = n_ - 1;
    double kappa = 2.0 / (n_ - 2);

    std::vector<std::size_t> idx(axis_sizes_.size(), 0);
    std::vector<double> angles(naxes);
    std::vector<double> x(n_);
    for (std::size_t k = 0; k < total; ++k) {
        double r = std::exp(s_levels_[idx[0]]);
        for (int a = 0; a < naxes; ++a) angles[a] = angle_levels_[a][idx[1 + a]];
        unit_vector_from_angles(angles, n_, x.data());
        for (int i = 0; i < n_; ++i) x[i] *= r;
        for (int i = 0; i < n_; ++i) positions_[k * n_ + i] = x[i];

        double uv = u.value(x.data(), n_);
        require(uv > 0.0 && std::isfinite(uv), Errc::EvalOutsideDomain,
                "conformal factor must be positive on the graph");
        double U = uv * b.eval(x.data(), n_);
        conf_[k] = std::pow(U, kappa);  // e^w: length density

        // dual-cell measure: ds * prod sin^{n-2-a}(theta_a) dtheta_a * dphi * r^n * density
        double cell = hs;
        if (idx[0] == 0 || idx[0] + 1 == static_cast<std::size_t>(spec_.radial)) cell *= 0.5;
        for (std::size_t a = 0; a < spec_.polar.size(); ++a) {
            double dth = kPi / spec_.polar[a];
            cell *= dth * std::pow(std::sin(angles[a]), n_ - 2 - static_cast<int>(a));
        }
        cell *= 2.0 * kPi / spec_.azimuth;
        double dens = std::pow(U, 2.0 * n_ / (n_ - 2));
        volumes_[k] = cell * std::pow(r, n_) * dens;

        for (int a = static_cast<int>(idx.size()) - 1; a >= 0; --a) {
            if (++idx[a] < static_cast<std::size_t>(axis_sizes_[a])) break;
            idx[a] = 0;
        }
    }

    // Pole supernodes at +-e1 per radial layer: the first polar axis has true
    // point-poles and the lattice leaves a node-free cone there; these nodes
    // let paths cut straight across it. They carry no cell volume.
    for (int ir = 0; ir < spec_.radial; ++ir) {
        for (int side = 0; side < 2; ++side) {
            std::size_t k = total + 2 * static_cast<std::size_t>(ir) + side;
            double r = std::exp(s_levels_[ir]);
            for (int i = 0; i < n_; ++i) positions_[k * n_ + i] = 0.0;
            positions_[k * n_] = side == 0 ? r : -r;
            double uv = u.value(positions_.data() + k * n_, n_);
            require(uv > 0.0 && std::isfinite(uv), Errc::EvalOutsideDomain,
                    "conformal factor must be positive on the graph");
            double U = uv * b.eval(positions_.data() + k * n_, n_);
            conf_[k] = std::pow(U, kappa);
            volumes_[k] = 0.0;
        }
    }

    // primitive offsets within the reach box
    int d = n_;
    std::array<int, 8> o{};
    std::function<void(int)> gen = [&](int axis) {
        if (axis == d) {
            if (gcd_all(o, d) == 1) offsets_.push_back(o);
            return;
        }
        for (int v = -spec_.reach; v <= spec_.reach; ++v) {
            o[axis] = v;
            gen(axis + 1);
        }
    };
    gen(0);
}

double DistanceGraph::node_radius(std::size_t k) const {
    double r2 = 0;
    for (int i = 0; i < n_; ++i) r2 += node_position(k)[i] * node_position(k)[i];
    return std::sqrt(r2);
}

bool DistanceGraph::boundary_node(std::size_t k) const {
    std::size_t ir;
    if (k >= lattice_count_) {
        ir = (k - lattice_count_) / 2;
    } else {
        ir = k / (lattice_count_ / spec_.radial);
    }
    return ir == 0 || ir + 1 == static_cast<std::size_t>(spec_.radial);
}

double DistanceGraph::cell_volume(std::size_t k) const { return volumes_[k]; }

namespace {

struct HeapItem {
    double f;
    std::size_t node;
    bool operator>(const HeapItem& o) const { return f > o.f; }
};

}  // namespace

void DistanceGraph::run_dijkstra(std::vector<double>& dist,
                                 std::vector<std::pair<std::size_t, double>> seeds,
                                 const std::function<double(const double*)>& heuristic,
                                 const std::vector<Attach>* target_adj, double* target_best,
                                 std::vector<std::size_t>* pred) const {
    std::size_t total = node_count();
    dist.assign(total, std::numeric_limits<double>::infinity());
    std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;
    auto h_of = [&](std::size_t k) { return heuristic ? heuristic(node_position(k)) : 0.0; };
    if (pred) pred->assign(total, static_cast<std::size_t>(-1));
    for (auto& [k, d0] : seeds) {
        if (d0 < dist[k]) {
            dist[k] = d0;
            if (pred) (*pred)[k] = k;
            heap.push({d0 + h_of(k), k});
        }
    }
    std::vector<double> best_to_target;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> target_w;
    std::vector<std::size_t> target_nodes;
    if (target_adj) {
        for (const auto& a : *target_adj) {
            target_nodes.push_back(a.node);
            target_w.push_back(a.weight);
        }
    }

    int d = n_;
    int naxes = static_cast<int>(axis_sizes_.size());
    std::vector<std::size_t> strides(naxes, 1);
    for (int a = naxes - 2; a >= 0; --a) strides[a] = strides[a + 1] * axis_sizes_[a + 1];

    std::vector<int> idx(naxes);
    while (!heap.empty()) {
        auto [f, k] = heap.top();
        heap.pop();
        double dk = dist[k];
        if (f > dk + h_of(k) + 1e-15 * (1.0 + std::abs(dk))) continue;  // stale
        if (target_adj && f >= best) break;

        if (target_adj) {
            for (std::size_t t = 0; t < target_nodes.size(); ++t)
                if (target_nodes[t] == k) best = std::min(best, dk + target_w[t]);
        }

        auto relax_node = [&](std::size_t j) {
            if (j == k) return;
            const double* pj = node_position(j);
            const double* pk2 = node_position(k);
            double chord = 0;
            for (int i = 0; i < d; ++i) chord += (pj[i] - pk2[i]) * (pj[i] - pk2[i]);
            chord = std::sqrt(chord);
            double nd = dk + chord * std::sqrt(conf_[k] * conf_[j]);
            if (nd < dist[j]) {
                dist[j] = nd;
                if (pred) (*pred)[j] = k;
                heap.push({nd + h_of(j), j});
            }
        };

        if (k >= lattice_count_) {
            // pole supernode: edges to the cap-ring lattice nodes within the
            // radial reach and to neighboring pole nodes.
            std::size_t pk_idx = k - lattice_count_;
            int ir = static_cast<int>(pk_idx / 2);
            int side = static_cast<int>(pk_idx % 2);  // 0: +e1 (theta1 ~ 0), 1: -e1
            std::size_t per_layer = lattice_count_ / spec_.radial;
            std::size_t cap_theta = side == 0 ? 0 : axis_sizes_[1] - 1;
            std::size_t ring = per_layer / axis_sizes_[1];  // nodes per theta1 value
            for (int dr = -spec_.reach; dr <= spec_.reach; ++dr) {
                int ir2 = ir + dr;
                if (ir2 < 0 || ir2 >= spec_.radial) continue;
                if (dr != 0) relax_node(lattice_count_ + 2 * ir2 + side);
                std::size_t base = static_cast<std::size_t>(ir2) * per_layer + cap_theta * ring;
                for (std::size_t j = base; j < base + ring; ++j) relax_node(j);
            }
            continue;
        }

        // decode index
        std::size_t rem = k;
        for (int a = 0; a < naxes; ++a) {
            idx[a] = static_cast<int>(rem / strides[a]);
            rem %= strides[a];
        }
        const double* pk = node_position(k);
        double ck = conf_[k];

        // Trailing angular steps shrink like the product of leading sines;
        // stretching their index offsets keeps the physical stencil isotropic
        // near the poles (every edge is still a valid chord).
        int scale[8];
        int half_scale[8];
        scale[0] = half_scale[0] = 1;
        double sin_prod = 1.0;
        for (int a = 1; a < naxes; ++a) {
            scale[a] = std::clamp(static_cast<int>(std::lround(1.0 / std::max(sin_prod, 1e-9))), 1,
                                  std::max(1, axis_sizes_[a] / 2));
            half_scale[a] = std::max(1, (scale[a] + 1) / 2);
            if (a < naxes - 1) sin_prod *= std::sin(angle_levels_[a - 1][idx[a]]);
        }

        bool stretched = false;
        for (int a = 1; a < naxes; ++a) stretched |= scale[a] > 1;

        auto relax_offset = [&](const std::array<int, 8>& o, const int* sc) {
            std::size_t j = 0;
            bool ok = true;
            for (int a = 0; a < naxes && ok; ++a) {
                int v = idx[a] + o[a] * (sc ? sc[a] : 1);
                if (a == naxes - 1) {
                    v = ((v % axis_sizes_[a]) + axis_sizes_[a]) % axis_sizes_[a];
                } else if (v < 0 || v >= axis_sizes_[a]) {
                    ok = false;
                }
                if (ok) j += static_cast<std::size_t>(v) * strides[a];
            }
            if (!ok || j == k) return;
            const double* pj = node_position(j);
            double chord = 0;
            for (int i = 0; i < d; ++i) chord += (pj[i] - pk[i]) * (pj[i] - pk[i]);
            chord = std::sqrt(chord);
            double w = chord * std::sqrt(ck * conf_[j]);
            double nd = dk + w;
            if (nd < dist[j]) {
                dist[j] = nd;
                if (pred) (*pred)[j] = k;
                heap.push({nd + h_of(j), j});
            }
        };

        for (const auto& o : offsets_) {
            relax_offset(o, nullptr);
            if (stretched) {
                relax_offset(o, half_scale);
                relax_offset(o, scale);
            }
        }

        // cap-ring nodes reach the pole supernodes
        if (idx[1] == 0 || idx[1] == axis_sizes_[1] - 1) {
            int side = idx[1] == 0 ? 0 : 1;
            for (int dr = -spec_.reach; dr <= spec_.reach; ++dr) {
                int ir2 = idx[0] + dr;
                if (ir2 < 0 || ir2 >= spec_.radial) continue;
                relax_node(lattice_count_ + 2 * static_cast<std::size_t>(ir2) + side);
            }
        }

        // Near the poles the composed directions stay coarse; dense pure-axis
        // jumps on the stretched axes restore angular mobility at a cost of
        // O(reach * scale) extra edges per near-pole node.
        if (stretched) {
            for (int a = 1; a < naxes; ++a) {
                if (scale[a] <= 1) continue;
                int span = std::min(spec_.reach * scale[a], axis_sizes_[a] - 1);
                std::array<int, 8> o{};
                for (int step = 1; step <= span; ++step) {
                    o[a] = step;
                    relax_offset(o, nullptr);
                    o[a] = -step;
                    relax_offset(o, nullptr);
                }
            }
        }

        // Polar caps: a node on the first or last layer of a polar axis sits
        // next to the degenerate pole, where all trailing angular coordinates
        // collapse; connect it straight across to every node sharing its
        // leading indices (the chord through the near-pole region is short).
        for (int a = 0; a < n_ - 2; ++a) {
            int sz = axis_sizes_[1 + a];
            if (idx[1 + a] != 0 && idx[1 + a] != sz - 1) continue;
            std::size_t trailing = strides[1 + a] / 1;
            std::size_t base = (k / trailing) * trailing;  // same indices up to axis a
            for (std::size_t j = base; j < base + trailing; ++j) {
                if (j == k) continue;
                const double* pj = node_position(j);
                double chord = 0;
                for (int i = 0; i < d; ++i) chord += (pj[i] - pk[i]) * (pj[i] - pk[i]);
                chord = std::sqrt(chord);
                double w = chord * std::sqrt(ck * conf_[j]);
                double nd = dk + w;
                if (nd < dist[j]) {
                    dist[j] = nd;
                    heap.push({nd + h_of(j), j});
                }
            }
        }
    }
    if (target_best) *target_best = best;
}

std::vector<DistanceGraph::Attach> DistanceGraph::attach_point(const double* x) const {
    // locate continuous index, attach to all nodes within the reach box
    double r = 0;
    for (int i = 0; i < n_; ++i) r += x[i] * x[i];
    r = std::sqrt(r);
    require(r >= spec_.r_min * (1 - 1e-9) && r <= spec_.r_max * (1 + 1e-9), Errc::Disconnected,
            "point outside the covered annulus");
    std::vector<double> unit(n_);
    for (int i = 0; i < n_; ++i) unit[i] = x[i] / r;
    auto angles = angles_from_unit_vector(unit.data(), n_);

    int naxes = static_cast<int>(axis_sizes_.size());
    std::vector<std::size_t> strides(naxes, 1);
    for (int a = naxes - 2; a >= 0; --a) strides[a] = strides[a + 1] * axis_sizes_[a + 1];

    std::vector<int> base(naxes);
    double hs = s_levels_.size() > 1 ? s_levels_[1] - s_levels_[0] : 1.0;
    base[0] = static_cast<int>(std::floor((std::log(r) - s_levels_[0]) / hs));
    for (int a = 0; a < n_ - 2; ++a)
        base[1 + a] = static_cast<int>(std::floor(angles[a] / (kPi / spec_.polar[a]) - 0.5));
    base[naxes - 1] =
        static_cast<int>(std::floor(angles[n_ - 2] / (2.0 * kPi / spec_.azimuth) - 0.5));

    // The attach edges use the trapezoid rule with the factor taken from the
    // nearest node; the O(h) difference sits inside the edge-quadrature budget.
    std::vector<Attach> out;
    int reach = spec_.reach;
    std::vector<int> off(naxes, -reach);
    for (;;) {
        bool ok = true;
        std::size_t k = 0;
        for (int a = 0; a < naxes && ok; ++a) {
            int v = base[a] + off[a] + (a == 0 || a == naxes - 1 ? 0 : 0);
            if (a == naxes - 1)
                v = ((v % axis_sizes_[a]) + axis_sizes_[a]) % axis_sizes_[a];
            else if (v < 0 || v >= axis_sizes_[a])
                ok = false;
            if (ok) k += static_cast<std::size_t>(v) * strides[a];
        }
        if (ok) {
            const double* p = node_position(k);
            double chord = 0;
            for (int i = 0; i < n_; ++i) chord += (p[i] - x[i]) * (p[i] - x[i]);
            chord = std::sqrt(chord);
            out.push_back({k, chord * conf_[k]});
        }
        int a = naxes - 1;
        for (; a >= 0; --a) {
            if (++off[a] <= reach) break;
            off[a] = -reach;
        }
        if (a < 0) break;
    }
    // Near the theta1 poles index-proximity and physical proximity part ways:
    // attach to the pole supernodes and to the whole cap block (all theta2/phi
    // at the first two theta1 layers) within the radial window.
    {
        double theta1 = angles[0];
        double dth = kPi / spec_.polar[0];
        bool near0 = theta1 < (spec_.reach + 1) * dth;
        bool near1 = kPi - theta1 < (spec_.reach + 1) * dth;
        if (near0 || near1) {
            int side = near0 ? 0 : 1;
            std::size_t per_layer = lattice_count_ / spec_.radial;
            std::size_t ring = per_layer / axis_sizes_[1];
            for (int dr = -spec_.reach; dr <= spec_.reach; ++dr) {
                int ir2 = base[0] + dr;
                if (ir2 < 0 || ir2 >= spec_.radial) continue;
                std::size_t kp = lattice_count_ + 2 * static_cast<std::size_t>(ir2) + side;
                const double* p = node_position(kp);
                double chord = 0;
                for (int i = 0; i < n_; ++i) chord += (p[i] - x[i]) * (p[i] - x[i]);
                out.push_back({kp, std::sqrt(chord) * conf_[kp]});
                for (int layer = 0; layer < 2 && layer < axis_sizes_[1]; ++layer) {
                    std::size_t theta_idx =
                        side == 0 ? static_cast<std::size_t>(layer)
                                  : static_cast<std::size_t>(axis_sizes_[1] - 1 - layer);
                    std::size_t blk = static_cast<std::size_t>(ir2) * per_layer + theta_idx * ring;
                    for (std::size_t j = blk; j < blk + ring; ++j) {
                        const double* pj = node_position(j);
                        double c2 = 0;
                        for (int i = 0; i < n_; ++i) c2 += (pj[i] - x[i]) * (pj[i] - x[i]);
                        out.push_back({j, std::sqrt(c2) * conf_[j]});
                    }
                }
            }
        }
    }
    require(!out.empty(), Errc::Disconnected, "no graph nodes near the point");

    // refine attach weights with the factor at x itself (trapezoid rule)
    std::size_t nearest = out.front().node;
    double bestd = std::numeric_limits<double>::infinity();
    for (auto& a : out) {
        const double* p = node_position(a.node);
        double c2 = 0;
        for (int i = 0; i < n_; ++i) c2 += (p[i] - x[i]) * (p[i] - x[i]);
        if (c2 < bestd) {
            bestd = c2;
            nearest = a.node;
        }
    }
    double cx = conf_[nearest];
    for (auto& a : out) {
        const double* p = node_position(a.node);
        double chord = 0;
        for (int i = 0; i < n_; ++i) chord += (p[i] - x[i]) * (p[i] - x[i]);
        chord = std::sqrt(chord);
        a.weight = chord * std::sqrt(cx * conf_[a.node]);
    }
    return out;
}

std::vector<double> DistanceGraph::distance_field_pred(const double* source,
                                                       std::vector<std::size_t>& pred) const {
    auto seeds_att = attach_point(source);
    std::vector<std::pair<std::size_t, double>> seeds;
    for (auto& a : seeds_att) seeds.push_back({a.node, a.weight});
    std::vector<double> dist;
    run_dijkstra(dist, std::move(seeds), nullptr, nullptr, nullptr, &pred);
    return dist;
}

std::vector<double> DistanceGraph::distance_field(const double* source) const {
    auto seeds_att = attach_point(source);
    std::vector<std::pair<std::size_t, double>> seeds;
    for (auto& a : seeds_att) seeds.push_back({a.node, a.weight});
    std::vector<double> dist;
    run_dijkstra(dist, std::move(seeds), nullptr, nullptr, nullptr);
    return dist;
}

std::vector<double> DistanceGraph::distance_field_multi(
    const std::vector<std::size_t>& sources) const {
    std::vector<std::pair<std::size_t, double>> seeds;
    for (auto k : sources) seeds.push_back({k, 0.0});
    std::vector<double> dist;
    run_dijkstra(dist, std::move(seeds), nullptr, nullptr, nullptr);
    return dist;
}

double DistanceGraph::distance(const double* x, const double* y,
                               const std::function<double(const double*)>& heuristic) const {
    auto sx = attach_point(x);
    auto sy = attach_point(y);
    std::vector<std::pair<std::size_t, double>> seeds;
    for (auto& a : sx) seeds.push_back({a.node, a.weight});
    std::vector<double> dist;
    double best = std::numeric_limits<double>::infinity();
    run_dijkstra(dist, std::move(seeds), heuristic, &sy, &best);
    require(std::isfinite(best), Errc::Disconnected, "no path between the points");
    // direct chord when the two points share an attachment region
    double chord = 0;
    for (int i = 0; i < n_; ++i) chord += (x[i] - y[i]) * (x[i] - y[i]);
    chord = std::sqrt(chord);
    double cnear = conf_[nearest_node(x)], cnear2 = conf_[nearest_node(y)];
    double direct = chord * std::sqrt(cnear * cnear2);
    bool adjacent = false;
    {
        // if y lies within the attach box of x, the straight chord is a valid
        // one-segment path
        double hs = s_levels_.size() > 1 ? s_levels_[1] - s_levels_[0] : 1.0;
        double ds = std::abs(std::log(node_radius(nearest_node(x))) -
                             std::log(node_radius(nearest_node(y))));
        adjacent = ds <= spec_.reach * hs * 1.5 && chord <= spec_.reach * hs *
                        std::max(node_radius(nearest_node(x)), node_radius(nearest_node(y))) * 2.0;
    }
    if (adjacent) best = std::min(best, direct);
    return best;
}

double DistanceGraph::eval_to_field(const double* target, const std::vector<double>& field) const {
    auto att = attach_point(target);
    double best = std::numeric_limits<double>::infinity();
    for (auto& a : att)
        if (std::isfinite(field[a.node])) best = std::min(best, field[a.node] + a.weight);
    require(std::isfinite(best), Errc::Disconnected, "target not reached by the field");
    return best;
}

std::size_t DistanceGraph::radial_layer(double r) const {
    double s = std::log(r);
    std::size_t bi = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < s_levels_.size(); ++i) {
        double d = std::abs(s_levels_[i] - s);
        if (d < bd) {
            bd = d;
            bi = i;
        }
    }
    return bi;
}

std::vector<std::size_t> DistanceGraph::layer_nodes(double r) const {
    std::size_t per_layer = lattice_per_layer();
    std::size_t ir = radial_layer(r);
    std::vector<std::size_t> out(per_layer);
    for (std::size_t j = 0; j < per_layer; ++j) out[j] = ir * per_layer + j;
    return out;
}

std::size_t DistanceGraph::nearest_node(const double* x) const {
    auto att = attach_point(x);
    std::size_t best = att.front().node;
    double bd = std::numeric_limits<double>::infinity();
    for (auto& a : att) {
        const double* p = node_position(a.node);
        double c2 = 0;
        for (int i = 0; i < n_; ++i) c2 += (p[i] - x[i]) * (p[i] - x[i]);
        if (c2 < bd) {
            bd = c2;
            best = a.node;
        }
    }
    return best;
}

}  // namespace confmet
