#include "l0fgl/bfgs.hpp"

#include <cmath>
#include <limits>

namespace l0fgl {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct LinePoint {
    double t;
    double f;
    double slope;  // directional derivative
    VectorXd x;
    VectorXd g;
};

LinePoint probe(const SmoothObjective& f, const VectorXd& x, const VectorXd& dir, double t) {
    LinePoint p{t, 0.0, 0.0, x + t * dir, VectorXd(x.size())};
    p.f = f(p.x, &p.g);
    p.slope = p.g.dot(dir);
    return p;
}

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), falling back to
// bisection when it leaves the safeguarded interior of [a, b].
double interpolate(const LinePoint& a, const LinePoint& b) {
    const double d1 = a.slope + b.slope - 3.0 * (a.f - b.f) / (a.t - b.t);
    const double disc = d1 * d1 - a.slope * b.slope;
    const double lo = std::min(a.t, b.t);
    const double hi = std::max(a.t, b.t);
    const double mid = 0.5 * (lo + hi);
    if (!(disc >= 0.0)) return mid;
    const double d2 = std::copysign(std::sqrt(disc), b.t - a.t);
    const double t = b.t - (b.t - a.t) * (b.slope + d2 - d1) / (b.slope - a.slope + 2.0 * d2);
    const double margin = 0.1 * (hi - lo);
    if (!std::isfinite(t) || t < lo + margin || t > hi - margin) return mid;
    return t;
}

// Strong-Wolfe search along `dir` from `start` (t = 0).
bool wolfe_search(const SmoothObjective& f, const VectorXd& x, const VectorXd& dir,
                  const LinePoint& start, double t_init, const BfgsSettings& s, LinePoint& out) {
    LinePoint prev = start;
    double t = t_init;
    for (int k = 0; k < s.max_line_search; ++k) {
        LinePoint cur = probe(f, x, dir, t);
        if (!std::isfinite(cur.f) || cur.f > start.f + s.c1 * t * start.slope ||
            (k > 0 && cur.f >= prev.f)) {
            // zoom between prev and cur
            LinePoint lo = prev;
            LinePoint hi = cur;
            for (int z = 0; z < s.max_line_search; ++z) {
                if (!std::isfinite(hi.f)) {
                    hi = probe(f, x, dir, 0.5 * (lo.t + hi.t));
                    continue;
                }
                LinePoint mid = probe(f, x, dir, interpolate(lo, hi));
                if (mid.f > start.f + s.c1 * mid.t * start.slope || mid.f >= lo.f) {
                    hi = std::move(mid);
                } else {
                    if (std::abs(mid.slope) <= -s.c2 * start.slope) {
                        out = std::move(mid);
                        return true;
                    }
                    if (mid.slope * (hi.t - lo.t) >= 0.0) hi = lo;
                    lo = std::move(mid);
                }
                if (std::abs(hi.t - lo.t) < 1e-16 * std::max(1.0, lo.t)) break;
            }
            if (lo.t > 0.0 && lo.f < start.f) {
                out = std::move(lo);
                return true;
            }
            return false;
        }
        if (std::abs(cur.slope) <= -s.c2 * start.slope) {
            out = std::move(cur);
            return true;
        }
        if (cur.slope >= 0.0) {
            LinePoint lo = cur;
            LinePoint hi = prev;
            for (int z = 0; z < s.max_line_search; ++z) {
                LinePoint mid = probe(f, x, dir, interpolate(lo, hi));
                if (mid.f > start.f + s.c1 * mid.t * start.slope || mid.f >= lo.f) {
                    hi = std::move(mid);
                } else {
                    if (std::abs(mid.slope) <= -s.c2 * start.slope) {
                        out = std::move(mid);
                        return true;
                    }
                    if (mid.slope * (hi.t - lo.t) >= 0.0) hi = lo;
                    lo = std::move(mid);
                }
                if (std::abs(hi.t - lo.t) < 1e-16 * std::max(1.0, lo.t)) break;
            }
            out = std::move(lo);
            return out.f < start.f;
        }
        prev = std::move(cur);
        t *= 2.0;
    }
    return false;
}

}  // namespace

BfgsResult bfgs_minimize(const SmoothObjective& f, VectorXd x0, const BfgsSettings& settings) {
    const auto n = x0.size();
    BfgsResult result;
    VectorXd g(n);
    double fx = f(x0, &g);
    VectorXd x = std::move(x0);
    MatrixXd H = MatrixXd::Identity(n, n);  // inverse Hessian approximation
    bool scaled = false;

    result.x = x;
    result.value = fx;
    result.grad_norm = g.lpNorm<Eigen::Infinity>();

    for (int it = 0; it < settings.max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= settings.grad_tol) {
            result.converged = true;
            break;
        }
        VectorXd dir = -H * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            H.setIdentity();
            scaled = false;
            dir = -g;
            slope = -g.squaredNorm();
        }
        const LinePoint start{0.0, fx, slope, x, g};
        // Unit steps are natural once H carries curvature; before that keep
        // the first step within a unit move.
        const double t0 = scaled ? 1.0 : std::min(1.0, 1.0 / dir.lpNorm<Eigen::Infinity>());
        LinePoint next;
        if (!wolfe_search(f, x, dir, start, t0, settings, next)) {
            result.line_search_failed = true;
            break;
        }
        const VectorXd s = next.x - x;
        const VectorXd yv = next.g - g;
        const double sy = s.dot(yv);
        x = std::move(next.x);
        g = std::move(next.g);
        fx = next.f;
        result.iterations = it + 1;
        if (fx < result.value) {
            result.x = x;
            result.value = fx;
            result.grad_norm = g.lpNorm<Eigen::Infinity>();
        }
        if (sy > 1e-300) {
            if (!scaled) {
                H *= sy / yv.squaredNorm();
                scaled = true;
            }
            const double rho = 1.0 / sy;
            const VectorXd Hy = H * yv;
            H += ((1.0 + rho * yv.dot(Hy)) * rho) * (s * s.transpose()) -
                 rho * (Hy * s.transpose() + s * Hy.transpose());
        }
    }
    if (g.lpNorm<Eigen::Infinity>() <= settings.grad_tol) result.converged = true;
    if (fx <= result.value) {
        result.x = x;
        result.value = fx;
        result.grad_norm = g.lpNorm<Eigen::Infinity>();
    }
    return result;
}

}  // namespace l0fgl
