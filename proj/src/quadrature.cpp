#include "maxlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace maxlab::quad {

namespace {

constexpr std::array<double, 8> kronrod_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kronrod_w = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> gauss_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::array<double, 8> gl8_x = {
    -0.960289856497536231683560868569473, -0.796666477413626739591553936475830,
    -0.525532409916328985817739049189246, -0.183434642495649804939476142360184,
    0.183434642495649804939476142360184,  0.525532409916328985817739049189246,
    0.796666477413626739591553936475830,  0.960289856497536231683560868569473};
constexpr std::array<double, 8> gl8_w = {
    0.101228536290376259152531354309962, 0.222381034453374470544355994426241,
    0.313706645877887287337962201986601, 0.362683783378361982965150449277196,
    0.362683783378361982965150449277196, 0.313706645877887287337962201986601,
    0.222381034453374470544355994426241, 0.101228536290376259152531354309962};

// Hard cap per call; noisy integrands would otherwise refine the whole tree.
constexpr int kMaxEvaluations = 1 << 21;

struct Panel {
    double kronrod;
    double gauss;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = kronrod_w[7] * fc;
    double g = gauss_w[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kronrod_x[static_cast<std::size_t>(i)];
        const double s = f(c - dx) + f(c + dx);
        k += kronrod_w[static_cast<std::size_t>(i)] * s;
        if (i % 2 == 1) g += gauss_w[static_cast<std::size_t>(i / 2)] * s;
    }
    return {k * h, g * h};
}

void recurse(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
             int depth, Result& acc) {
    const Panel p = gk15(f, a, b);
    acc.evaluations += 15;
    const double err = std::abs(p.kronrod - p.gauss);
    const double target = std::max(abs_tol, rel_tol * std::abs(p.kronrod));
    if (err <= target || depth <= 0 || acc.evaluations > kMaxEvaluations || !(b - a > 4.0 * std::numeric_limits<double>::epsilon() * std::abs(a))) {
        acc.value += p.kronrod;
        acc.error += err;
        return;
    }
    const double m = 0.5 * (a + b);
    recurse(f, a, m, rel_tol, 0.5 * abs_tol, depth - 1, acc);
    recurse(f, m, b, rel_tol, 0.5 * abs_tol, depth - 1, acc);
}

}  // namespace

Result adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                int max_depth) {
    Result r;
    if (a == b) return r;
    if (a > b) {
        r = adaptive(f, b, a, rel_tol, abs_tol, max_depth);
        r.value = -r.value;
        return r;
    }
    recurse(f, a, b, rel_tol, abs_tol, max_depth, r);
    return r;
}

Result adaptive_on_grid(const std::function<double(double)>& f, std::span<const double> grid, double rel_tol,
                        double abs_tol, int max_depth) {
    Result total;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (!(grid[i] < grid[i + 1])) throw std::invalid_argument("adaptive_on_grid: grid not increasing");
        recurse(f, grid[i], grid[i + 1], rel_tol, abs_tol, max_depth, total);
    }
    return total;
}

Rule gauss_legendre8() { return {gl8_x, gl8_w}; }

}  // namespace maxlab::quad
