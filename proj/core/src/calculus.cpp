#include "qtherm/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "qtherm/fft.hpp"

namespace qtherm {

namespace detail {

std::vector<double> fd_weights(double z, const std::vector<double>& nodes, int m) {
    const int n = static_cast<int>(nodes.size());
    const int cols = m + 1;
    std::vector<double> c(static_cast<std::size_t>(n) * cols, 0.0);
    auto at = [&](int i, int k) -> double& { return c[static_cast<std::size_t>(i) * cols + k]; };

    double c1 = 1.0;
    double c4 = nodes[0] - z;
    at(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = nodes[static_cast<std::size_t>(i)] - z;
        for (int j = 0; j < i; ++j) {
            const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) {
                    at(i, k) = c1 * (k * at(i - 1, k - 1) - c5 * at(i - 1, k)) / c2;
                }
                at(i, 0) = -c1 * c5 * at(i - 1, 0) / c2;
            }
            for (int k = mn; k >= 1; --k) {
                at(j, k) = (c4 * at(j, k) - k * at(j, k - 1)) / c3;
            }
            at(j, 0) = c4 * at(j, 0) / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = at(i, m);
    return w;
}

} // namespace detail

namespace {

// Precomputed rows of a banded differentiation matrix for one dirichlet axis.
// Interior rows share one central stencil; the first and last two rows carry
// one-sided closures of the same order.
struct FdStencil {
    int half = 2;                               // interior window is [i-half, i+half]
    std::vector<double> interior;               // width 2*half+1
    std::vector<std::vector<double>> left;      // rows 0, 1 over nodes [0, width)
    std::vector<std::vector<double>> right;     // rows n-2, n-1 over trailing nodes
    int edge_width = 0;
};

FdStencil make_fd_stencil(std::size_t n, double h, int m) {
    FdStencil s;
    const int order = 4;
    const int interior_width = 2 * s.half + 1;
    s.edge_width = m + order;                   // one-sided width for the same order

    std::vector<double> nodes(static_cast<std::size_t>(interior_width));
    for (int k = 0; k < interior_width; ++k) nodes[static_cast<std::size_t>(k)] = h * (k - s.half);
    s.interior = detail::fd_weights(0.0, nodes, m);

    nodes.resize(static_cast<std::size_t>(s.edge_width));
    for (int k = 0; k < s.edge_width; ++k) nodes[static_cast<std::size_t>(k)] = h * k;
    for (int row = 0; row < s.half; ++row) {
        s.left.push_back(detail::fd_weights(h * row, nodes, m));
    }
    for (int row = 0; row < s.half; ++row) {
        const double z = h * (static_cast<double>(n) - 1.0 - (s.half - 1) + row);
        std::vector<double> tail(static_cast<std::size_t>(s.edge_width));
        for (int k = 0; k < s.edge_width; ++k) {
            tail[static_cast<std::size_t>(k)] =
                h * (static_cast<double>(n) - s.edge_width + k);
        }
        s.right.push_back(detail::fd_weights(z, tail, m));
    }
    return s;
}

template <typename T>
void fd_derivative_line(const FdStencil& s, const T* in, std::ptrdiff_t stride, std::size_t n,
                        T* out, std::ptrdiff_t out_stride) {
    const int half = s.half;
    for (int row = 0; row < half; ++row) {
        T acc{};
        for (int k = 0; k < s.edge_width; ++k) {
            acc += s.left[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)] *
                   in[stride * k];
        }
        out[out_stride * row] = acc;
    }
    const auto ni = static_cast<std::ptrdiff_t>(n);
    for (std::ptrdiff_t i = half; i < ni - half; ++i) {
        T acc{};
        for (int k = -half; k <= half; ++k) {
            acc += s.interior[static_cast<std::size_t>(k + half)] * in[stride * (i + k)];
        }
        out[out_stride * i] = acc;
    }
    for (int row = 0; row < half; ++row) {
        const std::ptrdiff_t i = ni - half + row;
        T acc{};
        for (int k = 0; k < s.edge_width; ++k) {
            acc += s.right[static_cast<std::size_t>(row)][static_cast<std::size_t>(k)] *
                   in[stride * (ni - s.edge_width + k)];
        }
        out[out_stride * i] = acc;
    }
}

void spectral_derivative_line(std::vector<complexd>& line, double length, int m) {
    const std::size_t n = line.size();
    detail::fft_forward(n, line.data());
    for (std::size_t j = 0; j < n; ++j) {
        const double k = detail::fft_wavenumber(j, n, length);
        if (m == 1) {
            // The Nyquist sawtooth has no well-defined first derivative.
            const bool nyquist = (n % 2 == 0) && (j == n / 2);
            line[j] *= nyquist ? complexd{0.0, 0.0} : complexd{0.0, k};
        } else {
            line[j] *= -k * k;
        }
    }
    detail::fft_inverse(n, line.data());
}

struct LineWalk {
    std::size_t count = 0;       // lines
    std::size_t length = 0;      // points per line
    std::ptrdiff_t stride = 1;   // step between points within a line
    std::ptrdiff_t dist = 1;     // step between line starts
};

LineWalk line_walk(const Grid& g, int axis) {
    LineWalk w;
    const std::size_t n0 = g.points(0);
    const std::size_t n1 = g.dim() == 2 ? g.points(1) : 1;
    if (axis == 0) {
        w.count = n1;
        w.length = n0;
        w.stride = static_cast<std::ptrdiff_t>(n1);
        w.dist = 1;
    } else {
        w.count = n0;
        w.length = n1;
        w.stride = 1;
        w.dist = static_cast<std::ptrdiff_t>(n1);
    }
    return w;
}

template <typename T>
void derivative_axis(const Grid& g, const std::vector<T>& in, std::vector<T>& out, int axis,
                     int m) {
    if (axis < 0 || axis >= g.dim()) {
        throw std::invalid_argument("derivative: axis out of range");
    }
    const LineWalk w = line_walk(g, axis);
    if (g.periodic()) {
        std::vector<complexd> line(w.length);
        for (std::size_t l = 0; l < w.count; ++l) {
            const T* src = in.data() + w.dist * static_cast<std::ptrdiff_t>(l);
            for (std::size_t i = 0; i < w.length; ++i) {
                line[i] = complexd(src[w.stride * static_cast<std::ptrdiff_t>(i)]);
            }
            spectral_derivative_line(line, g.length(axis), m);
            T* dst = out.data() + w.dist * static_cast<std::ptrdiff_t>(l);
            for (std::size_t i = 0; i < w.length; ++i) {
                if constexpr (std::is_same_v<T, double>) {
                    dst[w.stride * static_cast<std::ptrdiff_t>(i)] = line[i].real();
                } else {
                    dst[w.stride * static_cast<std::ptrdiff_t>(i)] = line[i];
                }
            }
        }
    } else {
        const FdStencil s = make_fd_stencil(w.length, g.spacing(axis), m);
        for (std::size_t l = 0; l < w.count; ++l) {
            const T* src = in.data() + w.dist * static_cast<std::ptrdiff_t>(l);
            T* dst = out.data() + w.dist * static_cast<std::ptrdiff_t>(l);
            fd_derivative_line(s, src, w.stride, w.length, dst, w.stride);
        }
    }
}

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double y = x - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

double axis_weight(const Grid& g, int axis, std::size_t i) {
    if (g.periodic()) return 1.0;
    return (i == 0 || i + 1 == g.points(axis)) ? 0.5 : 1.0;
}

} // namespace

ScalarField gradient_component(const ScalarField& f, int axis) {
    ScalarField out(f.grid);
    out.mask = f.mask;
    derivative_axis(f.grid, f.values, out.values, axis, 1);
    return out;
}

ComplexField gradient_component(const ComplexField& f, int axis) {
    ComplexField out(f.grid);
    derivative_axis(f.grid, f.values, out.values, axis, 1);
    return out;
}

VectorField gradient(const ScalarField& f) {
    VectorField out(f.grid);
    out.mask = f.mask;
    for (int a = 0; a < f.grid.dim(); ++a) {
        derivative_axis(f.grid, f.values, out.component(a), a, 1);
    }
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    ScalarField out(f.grid);
    out.mask = f.mask;
    std::vector<double> tmp(f.size());
    for (int a = 0; a < f.grid.dim(); ++a) {
        derivative_axis(f.grid, f.values, tmp, a, 2);
        for (std::size_t i = 0; i < tmp.size(); ++i) out.values[i] += tmp[i];
    }
    return out;
}

ComplexField laplacian(const ComplexField& f) {
    ComplexField out(f.grid);
    std::vector<complexd> tmp(f.size());
    for (int a = 0; a < f.grid.dim(); ++a) {
        derivative_axis(f.grid, f.values, tmp, a, 2);
        for (std::size_t i = 0; i < tmp.size(); ++i) out.values[i] += tmp[i];
    }
    return out;
}

ScalarField divergence(const VectorField& v) {
    ScalarField out(v.grid);
    out.mask = v.mask;
    std::vector<double> tmp(v.grid.total_points());
    for (int a = 0; a < v.grid.dim(); ++a) {
        derivative_axis(v.grid, v.component(a), tmp, a, 1);
        for (std::size_t i = 0; i < tmp.size(); ++i) out.values[i] += tmp[i];
    }
    return out;
}

double integrate(const ScalarField& f) {
    const Grid& g = f.grid;
    double cell = 1.0;
    for (int a = 0; a < g.dim(); ++a) cell *= g.spacing(a);

    KahanSum acc;
    const std::size_t n0 = g.points(0);
    const std::size_t n1 = g.dim() == 2 ? g.points(1) : 1;
    for (std::size_t i0 = 0; i0 < n0; ++i0) {
        const double w0 = axis_weight(g, 0, i0);
        for (std::size_t i1 = 0; i1 < n1; ++i1) {
            const double w1 = g.dim() == 2 ? axis_weight(g, 1, i1) : 1.0;
            acc.add(f.values[g.flat_index(i0, i1)] * w0 * w1);
        }
    }
    return acc.sum * cell;
}

ScalarField shift_field(const ScalarField& f, int axis, double h) {
    const Grid& g = f.grid;
    if (axis < 0 || axis >= g.dim()) {
        throw std::invalid_argument("shift_field: axis out of range");
    }
    ScalarField out(g);
    out.mask = f.mask;
    const LineWalk w = line_walk(g, axis);

    if (g.periodic()) {
        std::vector<complexd> line(w.length);
        for (std::size_t l = 0; l < w.count; ++l) {
            const double* src = f.values.data() + w.dist * static_cast<std::ptrdiff_t>(l);
            for (std::size_t i = 0; i < w.length; ++i) {
                line[i] = complexd(src[w.stride * static_cast<std::ptrdiff_t>(i)]);
            }
            detail::fft_forward(w.length, line.data());
            for (std::size_t j = 0; j < w.length; ++j) {
                const double k = detail::fft_wavenumber(j, w.length, g.length(axis));
                const bool nyquist = (w.length % 2 == 0) && (j == w.length / 2);
                // Real data: keep the shifted Nyquist mode real.
                line[j] *= nyquist ? complexd{std::cos(k * h), 0.0}
                                   : std::exp(complexd{0.0, k * h});
            }
            detail::fft_inverse(w.length, line.data());
            double* dst = out.values.data() + w.dist * static_cast<std::ptrdiff_t>(l);
            for (std::size_t i = 0; i < w.length; ++i) {
                dst[w.stride * static_cast<std::ptrdiff_t>(i)] = line[i].real();
            }
        }
        return out;
    }

    // Dirichlet: 6-point Lagrange interpolation at x + h; points whose source
    // leaves the domain get masked.
    const double spacing = g.spacing(axis);
    const std::size_t n = w.length;
    Mask mask = out.mask.empty() ? Mask(g.total_points(), 0) : out.mask;
    const int width = 6;
    for (std::size_t l = 0; l < w.count; ++l) {
        const double* src = f.values.data() + w.dist * static_cast<std::ptrdiff_t>(l);
        double* dst = out.values.data() + w.dist * static_cast<std::ptrdiff_t>(l);
        for (std::size_t i = 0; i < n; ++i) {
            const double target = static_cast<double>(i) * spacing + h;
            const double pos = target / spacing;
            const auto nearest = static_cast<long>(std::floor(pos));
            if (pos < 0.0 || pos > static_cast<double>(n - 1)) {
                const std::size_t flat = (axis == 0) ? g.flat_index(i, l) : g.flat_index(l, i);
                mask[flat] = 1;
                dst[w.stride * static_cast<std::ptrdiff_t>(i)] = 0.0;
                continue;
            }
            long lo = std::clamp<long>(nearest - width / 2 + 1, 0,
                                       static_cast<long>(n) - width);
            std::vector<double> nodes(width);
            for (int k = 0; k < width; ++k) nodes[static_cast<std::size_t>(k)] =
                static_cast<double>(lo + k) * spacing;
            const std::vector<double> wts = detail::fd_weights(target, nodes, 0);
            double acc = 0.0;
            for (int k = 0; k < width; ++k) {
                acc += wts[static_cast<std::size_t>(k)] *
                       src[w.stride * static_cast<std::ptrdiff_t>(lo + k)];
            }
            dst[w.stride * static_cast<std::ptrdiff_t>(i)] = acc;
        }
    }
    out.mask = mask;
    return out;
}

} // namespace qtherm
