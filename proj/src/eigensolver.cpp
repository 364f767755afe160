#include "cqed/eigensolver.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace cqed {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double abs1(cplx z) { return std::abs(z.real()) + std::abs(z.imag()); }

// Plane rotation G = [[c, s], [-conj(s), c]] with G [x; y] = [r; 0].
struct Givens {
    double c = 1.0;
    cplx s{0.0, 0.0};
};

Givens make_givens(cplx x, cplx y)
{
    const double ay = std::abs(y);
    if (ay == 0.0) return {};
    const double ax = std::abs(x);
    const double norm = std::hypot(ax, ay);
    if (ax == 0.0) return {0.0, std::conj(y) / ay};
    const cplx phase = x / ax;
    return {ax / norm, phase * std::conj(y) / norm};
}

// Rows k, k+1 of m, columns [col_begin, col_end).
void rotate_rows(CMatrix& m, Eigen::Index k, const Givens& g, Eigen::Index col_begin,
                 Eigen::Index col_end)
{
    for (Eigen::Index j = col_begin; j < col_end; ++j) {
        const cplx top = m(k, j);
        const cplx bottom = m(k + 1, j);
        m(k, j) = g.c * top + g.s * bottom;
        m(k + 1, j) = -std::conj(g.s) * top + g.c * bottom;
    }
}

// m <- m G^H on columns k, k+1, rows [0, row_end).
void rotate_cols(CMatrix& m, Eigen::Index k, const Givens& g, Eigen::Index row_end)
{
    for (Eigen::Index i = 0; i < row_end; ++i) {
        const cplx left = m(i, k);
        const cplx right = m(i, k + 1);
        m(i, k) = left * g.c + right * std::conj(g.s);
        m(i, k + 1) = -left * g.s + right * g.c;
    }
}

cplx wilkinson_shift(cplx a, cplx b, cplx c, cplx d)
{
    const cplx half_diff = 0.5 * (a - d);
    const cplx root = std::sqrt(half_diff * half_diff + b * c);
    const cplx mid = 0.5 * (a + d);
    const cplx mu1 = mid + root;
    const cplx mu2 = mid - root;
    return std::abs(mu1 - d) < std::abs(mu2 - d) ? mu1 : mu2;
}

}  // namespace

SchurForm hessenberg(const CMatrix& a)
{
    require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "hessenberg: matrix not square");
    const Eigen::Index n = a.rows();
    CMatrix h = a;
    CMatrix q = CMatrix::Identity(n, n);

    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        CVector x = h.col(k).segment(k + 1, n - k - 1);
        const double xnorm = x.norm();
        if (xnorm == 0.0) continue;
        const double a0 = std::abs(x(0));
        const cplx phase = a0 == 0.0 ? cplx{1.0, 0.0} : x(0) / a0;
        const cplx alpha = -phase * xnorm;
        CVector v = x;
        v(0) -= alpha;
        const double vnorm = v.norm();
        if (vnorm == 0.0) continue;
        v /= vnorm;

        const Eigen::Index m = n - k - 1;
        // H <- P H P with P = I - 2 v v^H acting on indices k+1..n-1.
        auto rows = h.bottomRows(m);
        rows -= 2.0 * v * (v.adjoint() * rows);
        auto cols = h.rightCols(m);
        cols -= 2.0 * (cols * v) * v.adjoint();
        auto qcols = q.rightCols(m);
        qcols -= 2.0 * (qcols * v) * v.adjoint();

        h.col(k).segment(k + 2, m - 1).setZero();
        h(k + 1, k) = alpha;
    }
    return {std::move(q), std::move(h)};
}

SchurForm complex_schur(const CMatrix& a, int max_iterations_per_eigenvalue)
{
    SchurForm form = hessenberg(a);
    CMatrix& h = form.t;
    CMatrix& q = form.q;
    const Eigen::Index n = h.rows();
    if (n <= 1) return form;

    const double scale = std::max(h.norm(), std::numeric_limits<double>::min());
    const double absolute_floor = kEps * scale;

    Eigen::Index iu = n - 1;
    int iter = 0;
    int total_iter = 0;
    const int max_total = max_iterations_per_eigenvalue * static_cast<int>(n);

    while (iu > 0) {
        Eigen::Index il = iu;
        while (il > 0) {
            const double sub = abs1(h(il, il - 1));
            const double local = abs1(h(il, il)) + abs1(h(il - 1, il - 1));
            if (sub <= kEps * local || sub <= absolute_floor) {
                h(il, il - 1) = 0.0;
                break;
            }
            --il;
        }
        if (il == iu) {
            --iu;
            iter = 0;
            continue;
        }

        ++iter;
        ++total_iter;
        if (iter > max_iterations_per_eigenvalue || total_iter > max_total) {
            fail(ErrorKind::EigFailure, "complex_schur: QR iteration did not converge");
        }

        cplx shift;
        if (iter % 10 == 0) {
            // Exceptional shift to break cycles.
            const double ex = std::abs(h(iu, iu - 1).real()) +
                              (iu >= 2 ? std::abs(h(iu - 1, iu - 2).real()) : 0.0);
            shift = h(iu, iu) + cplx{0.75 * ex, 0.0};
        } else {
            shift = wilkinson_shift(h(iu - 1, iu - 1), h(iu - 1, iu), h(iu, iu - 1), h(iu, iu));
        }

        // One implicit-shift QR sweep on the active block [il, iu].
        for (Eigen::Index k = il; k < iu; ++k) {
            cplx x;
            cplx y;
            if (k == il) {
                x = h(k, k) - shift;
                y = h(k + 1, k);
            } else {
                x = h(k, k - 1);
                y = h(k + 1, k - 1);
            }
            const Givens g = make_givens(x, y);
            rotate_rows(h, k, g, k == il ? il : k - 1, n);
            // Column rotation includes rows above il so T stays a full Schur factor.
            rotate_cols(h, k, g, std::min<Eigen::Index>(k + 3, iu + 1));
            rotate_cols(q, k, g, n);
            if (k > il) h(k + 1, k - 1) = 0.0;
        }
    }

    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = j + 1; i < n; ++i) h(i, j) = 0.0;
    return form;
}

EigenPairs eigen_decompose(const CMatrix& a)
{
    require(a.rows() == a.cols(), ErrorKind::DimensionMismatch, "eigen_decompose: matrix not square");
    const Eigen::Index n = a.rows();
    const SchurForm form = complex_schur(a);
    const CMatrix& t = form.t;

    const double smin = std::max(kEps * t.norm(), std::numeric_limits<double>::min());
    CMatrix x = CMatrix::Zero(n, n);
    for (Eigen::Index k = n - 1; k >= 0; --k) {
        const cplx lambda = t(k, k);
        x(k, k) = 1.0;
        for (Eigen::Index i = k - 1; i >= 0; --i) {
            cplx acc{0.0, 0.0};
            for (Eigen::Index j = i + 1; j <= k; ++j) acc += t(i, j) * x(j, k);
            cplx denom = t(i, i) - lambda;
            if (std::abs(denom) < smin) denom = smin;
            x(i, k) = -acc / denom;
            const double mag = std::abs(x(i, k));
            if (mag > 1e150) x.col(k).segment(i, k - i + 1) /= mag;
        }
    }

    EigenPairs out;
    out.values = t.diagonal();
    out.vectors = form.q * x;
    for (Eigen::Index k = 0; k < n; ++k) {
        auto col = out.vectors.col(k);
        col.normalize();
        Eigen::Index imax = 0;
        col.cwiseAbs().maxCoeff(&imax);
        const double mag = std::abs(col(imax));
        if (mag > 0.0) col *= std::conj(col(imax)) / mag;
    }
    return out;
}

double condition_number(const CMatrix& a)
{
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double smallest = s(s.size() - 1);
    if (smallest == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smallest;
}

}  // namespace cqed
