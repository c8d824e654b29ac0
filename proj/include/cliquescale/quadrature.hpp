#pragma once

// Globally adaptive Gauss-Kronrod (10/21 point) integration. The error
// estimate follows the QUADPACK qk21 heuristic; the interval with the largest
// estimated error is bisected until the tolerance is met.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <vector>

namespace cliquescale::quad {

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-30;
    std::size_t max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
    std::size_t evaluations = 0;

    Result& operator+=(const Result& other) noexcept {
        value += other.value;
        error += other.error;
        converged = converged && other.converged;
        evaluations += other.evaluations;
        return *this;
    }
};

namespace detail {

inline constexpr std::array<double, 11> kronrod_nodes{
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kronrod_weights{
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208292358843, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for kronrod_nodes[1], [3], [5], [7], [9].
inline constexpr std::array<double, 5> gauss_weights{
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const noexcept { return error < o.error; }
};

template <class F>
Panel gk21(F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kronrod_weights[10];
    double gauss = 0.0;
    std::array<double, 10> f1{}, f2{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kronrod_nodes[j];
        f1[j] = f(center - dx);
        f2[j] = f(center + dx);
        const double sum = f1[j] + f2[j];
        kronrod += kronrod_weights[j] * sum;
        if (j % 2 == 1) gauss += gauss_weights[j / 2] * sum;
    }
    const double mean = 0.5 * kronrod;
    double asc = kronrod_weights[10] * std::abs(fc - mean);
    for (std::size_t j = 0; j < 10; ++j)
        asc += kronrod_weights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

    const double value = kronrod * half;
    asc *= std::abs(half);
    double error = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && error != 0.0) error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
    // Round-off floor.
    error = std::max(error, 50.0 * 2.220446049250313e-16 * std::abs(value));
    if (!std::isfinite(value)) error = INFINITY;
    return {a, b, value, error};
}

}  // namespace detail

/// Integrate f over the union of consecutive panels [breaks[i], breaks[i+1]].
template <class F>
Result integrate_panels(F&& f, std::span<const double> breaks, const Options& opt = {}) {
    Result out;
    if (breaks.size() < 2) return out;
    std::priority_queue<detail::Panel> heap;
    double total = 0.0, total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        if (!(breaks[i + 1] > breaks[i])) continue;
        auto p = detail::gk21(f, breaks[i], breaks[i + 1]);
        out.evaluations += 21;
        total += p.value;
        total_error += p.error;
        heap.push(p);
    }
    while (!heap.empty()) {
        if (total_error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) break;
        if (heap.size() >= opt.max_intervals) {
            out.converged = false;
            break;
        }
        auto worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            // Interval cannot be split further in floating point.
            out.converged = false;
            break;
        }
        heap.pop();
        auto left = detail::gk21(f, worst.a, mid);
        auto right = detail::gk21(f, mid, worst.b);
        out.evaluations += 42;
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // Resum to shed the drift of the running totals.
    double value = 0.0, error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    out.value = value;
    out.error = error;
    if (!std::isfinite(value)) out.converged = false;
    return out;
}

/// Integrate f over [a, b] split into `panels` equal initial pieces.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}, std::size_t panels = 1) {
    if (!(b > a)) return {};
    panels = std::max<std::size_t>(panels, 1);
    std::vector<double> breaks(panels + 1);
    for (std::size_t i = 0; i <= panels; ++i)
        breaks[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
    breaks.back() = b;
    return integrate_panels(f, breaks, opt);
}

/// Panels of width at most `max_width`; used for integrands in t = log h,
/// which span many decades of h.
inline std::size_t panel_count(double a, double b, double max_width) {
    if (!(b > a)) return 1;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / max_width)));
}

}  // namespace cliquescale::quad
