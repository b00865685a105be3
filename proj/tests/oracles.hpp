#pragma once

// Independent reference computations for the tests.  Nothing here calls the library's
// kernels: integrals come from collapsed-cube Gauss quadrature, barycentric coordinates and
// gradients from inverting the full (d+1)x(d+1) affine matrix of each simplex.

#include "simplex_asm/assembly.hpp"
#include "simplex_asm/mesh.hpp"
#include "simplex_asm/sparse.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using simplex_asm::Index;
using simplex_asm::Mesh;
using simplex_asm::SparseMatrix;

inline std::pair<double, double> legendre_pair(int n, double x)
{
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    return {p1, p0};  // P_n, P_{n-1}
}

/// Gauss-Legendre nodes and weights mapped to [0, 1]; exact for degree 2n-1.
inline std::vector<std::pair<double, double>> gauss_legendre01(int n)
{
    std::vector<std::pair<double, double>> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [pn, pm] = legendre_pair(n, x);
            const double dx = pn / (n * (x * pn - pm) / (x * x - 1.0));
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const auto [pn, pm] = legendre_pair(n, x);
        const double dp = n * (x * pn - pm) / (x * x - 1.0);
        out[static_cast<std::size_t>(i)] = {0.5 * (1.0 - x), 1.0 / ((1.0 - x * x) * dp * dp)};
    }
    return out;
}

/// Vertices of element k as the columns of a d x (d+1) matrix.
inline Eigen::MatrixXd element_vertices(const Mesh& m, Index k)
{
    Eigen::MatrixXd v(m.d, m.d + 1);
    for (int a = 0; a <= m.d; ++a) {
        for (int nu = 0; nu < m.d; ++nu) v(nu, a) = m.coord(nu, m.vertex(a, k));
    }
    return v;
}

inline double simplex_volume(const Eigen::MatrixXd& v)
{
    const int d = static_cast<int>(v.rows());
    Eigen::MatrixXd b(d, d);
    for (int i = 0; i < d; ++i) b.col(i) = v.col(i + 1) - v.col(0);
    double f = 1.0;
    for (int i = 2; i <= d; ++i) f *= i;
    return std::abs(b.determinant()) / f;
}

/// Inverse of [1 ... 1; v_0 ... v_d]: row a holds (c_a, grad lambda_a) with
/// lambda_a(x) = c_a + grad lambda_a . x.
inline Eigen::MatrixXd barycentric_map(const Eigen::MatrixXd& v)
{
    const int d = static_cast<int>(v.rows());
    Eigen::MatrixXd t(d + 1, d + 1);
    t.row(0).setOnes();
    t.bottomRows(d) = v;
    return t.fullPivLu().inverse();
}

inline Eigen::VectorXd barycentric(const Eigen::MatrixXd& map, const Eigen::VectorXd& x)
{
    Eigen::VectorXd h(x.size() + 1);
    h(0) = 1.0;
    h.tail(x.size()) = x;
    return map * h;
}

/// grad lambda_a as row a of a (d+1) x d matrix.
inline Eigen::MatrixXd gradients(const Eigen::MatrixXd& v)
{
    const int d = static_cast<int>(v.rows());
    return barycentric_map(v).rightCols(d);
}

/// Integral over the simplex with vertex columns v of f(x), using the Duffy collapse of
/// [0,1]^d and npts Gauss points per direction.
template <typename F>
double integrate_simplex(const Eigen::MatrixXd& v, int npts, F&& f)
{
    const int d = static_cast<int>(v.rows());
    const auto gl = gauss_legendre01(npts);
    Eigen::MatrixXd b(d, d);
    for (int i = 0; i < d; ++i) b.col(i) = v.col(i + 1) - v.col(0);
    const double jac = std::abs(b.determinant());
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    double total = 0.0;
    while (true) {
        Eigen::VectorXd xhat(d);
        double w = 1.0;
        double rest = 1.0;
        for (int i = 0; i < d; ++i) {
            const auto& [u, wu] = gl[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
            xhat(i) = rest * u;
            w *= wu * rest;  // d xhat_i / d u_i
            rest *= (1.0 - u);
        }
        const Eigen::VectorXd x = v.col(0) + b * xhat;
        total += w * f(x);
        int i = 0;
        while (i < d && ++idx[static_cast<std::size_t>(i)] == npts) idx[static_cast<std::size_t>(i++)] = 0;
        if (i == d) break;
    }
    return total * jac;
}

// Local matrices, each from first principles on one element.

/// int_K lambda_a lambda_b w_h with w_h the P1 interpolant of nodal values w.
inline Eigen::MatrixXd local_mass(const Eigen::MatrixXd& v, const Eigen::VectorXd& w)
{
    const int n = static_cast<int>(v.cols());
    const auto map = barycentric_map(v);
    Eigen::MatrixXd out(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            out(a, b) = integrate_simplex(v, 4, [&](const Eigen::VectorXd& x) {
                const Eigen::VectorXd l = barycentric(map, x);
                return l(a) * l(b) * l.dot(w);
            });
        }
    }
    return out;
}

inline Eigen::MatrixXd local_stiffness(const Eigen::MatrixXd& v)
{
    const Eigen::MatrixXd g = gradients(v);
    return simplex_volume(v) * (g * g.transpose());
}

/// Engineering strain-displacement matrix (Voigt rows xx, yy[, zz], xy[, yz, zx]) with local
/// dof c = d * a + l.
inline Eigen::MatrixXd voigt_strain_matrix(const Eigen::MatrixXd& g)
{
    const int d = static_cast<int>(g.cols());
    const int n = static_cast<int>(g.rows());
    const int nv = d == 2 ? 3 : 6;
    Eigen::MatrixXd bm = Eigen::MatrixXd::Zero(nv, d * n);
    for (int a = 0; a < n; ++a) {
        for (int i = 0; i < d; ++i) bm(i, d * a + i) = g(a, i);
        if (d == 2) {
            bm(2, d * a + 0) = g(a, 1);
            bm(2, d * a + 1) = g(a, 0);
        } else {
            bm(3, d * a + 0) = g(a, 1);
            bm(3, d * a + 1) = g(a, 0);
            bm(4, d * a + 1) = g(a, 2);
            bm(4, d * a + 2) = g(a, 1);
            bm(5, d * a + 2) = g(a, 0);
            bm(5, d * a + 0) = g(a, 2);
        }
    }
    return bm;
}

/// Isotropic Voigt elasticity tensor.
inline Eigen::MatrixXd voigt_tensor(int d, double lambda, double mu)
{
    const int nv = d == 2 ? 3 : 6;
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(nv, nv);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) c(i, j) = lambda;
        c(i, i) += 2.0 * mu;
    }
    for (int i = d; i < nv; ++i) c(i, i) = mu;
    return c;
}

/// int_K B^t C(x) B with C linear in the P1-interpolated Lame fields, so the integral of C
/// is |K| times C at the nodal means.
inline Eigen::MatrixXd local_elastic(const Eigen::MatrixXd& v, const Eigen::VectorXd& lam,
                                     const Eigen::VectorXd& mu)
{
    const int d = static_cast<int>(v.rows());
    const Eigen::MatrixXd bm = voigt_strain_matrix(gradients(v));
    const Eigen::MatrixXd c = voigt_tensor(d, lam.mean(), mu.mean());
    return simplex_volume(v) * (bm.transpose() * c * bm);
}

/// Lagrange basis of order k attached to multi-index alpha, in barycentric coordinates:
/// prod_i prod_{j < alpha_i} (k lambda_i - j) / (j + 1).
inline double lagrange_basis(const std::vector<int>& alpha, int k, const Eigen::VectorXd& l)
{
    double p = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        for (int j = 0; j < alpha[i]; ++j) p *= (k * l(static_cast<Index>(i)) - j) / (j + 1.0);
    }
    return p;
}

inline Eigen::MatrixXd local_pk_mass(const Eigen::MatrixXd& v, int k,
                                     const std::vector<std::vector<int>>& alphas)
{
    const int n = static_cast<int>(alphas.size());
    const auto map = barycentric_map(v);
    Eigen::MatrixXd out(n, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b <= a; ++b) {
            out(a, b) = integrate_simplex(v, k + 3, [&](const Eigen::VectorXd& x) {
                const Eigen::VectorXd l = barycentric(map, x);
                return lagrange_basis(alphas[static_cast<std::size_t>(a)], k, l) *
                       lagrange_basis(alphas[static_cast<std::size_t>(b)], k, l);
            });
            out(b, a) = out(a, b);
        }
    }
    return out;
}

// Global dense assembly.

inline Eigen::MatrixXd to_dense(const SparseMatrix& s)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(s.rows(), s.cols());
    const auto rp = s.row_ptr();
    const auto ci = s.col_idx();
    const auto vv = s.values();
    for (Index i = 0; i < s.rows(); ++i) {
        for (Index p = rp[static_cast<std::size_t>(i)]; p < rp[static_cast<std::size_t>(i + 1)]; ++p) {
            out(i, ci[static_cast<std::size_t>(p)]) = vv[static_cast<std::size_t>(p)];
        }
    }
    return out;
}

/// Triple loop over elements and local indices calling the single-element kernel.
inline Eigen::MatrixXd dense_assemble(const simplex_asm::ConnectivityView& c,
                                      const simplex_asm::ScalarKernel& kernel)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.num_nodes, c.num_nodes);
    for (Index k = 0; k < c.num_elements; ++k) {
        for (int a = 0; a < c.nodes_per_element; ++a) {
            for (int b = 0; b < c.nodes_per_element; ++b) out(c.at(a, k), c.at(b, k)) += kernel.single(a, b, k);
        }
    }
    return out;
}

inline Eigen::MatrixXd dense_assemble(const simplex_asm::ConnectivityView& c,
                                      const simplex_asm::VectorKernel& kernel)
{
    const int m = kernel.components();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m * c.num_nodes, m * c.num_nodes);
    for (Index k = 0; k < c.num_elements; ++k) {
        for (int a = 0; a < c.nodes_per_element; ++a) {
            for (int l = 0; l < m; ++l) {
                for (int b = 0; b < c.nodes_per_element; ++b) {
                    for (int n = 0; n < m; ++n) {
                        out(m * c.at(a, k) + l, m * c.at(b, k) + n) += kernel.single(l, a, n, b, k);
                    }
                }
            }
        }
    }
    return out;
}

/// Scatter of per-element local matrices with m interleaved components per node.
template <typename LocalFn>
Eigen::MatrixXd dense_from_locals(const simplex_asm::ConnectivityView& c, int m, LocalFn&& local)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m * c.num_nodes, m * c.num_nodes);
    for (Index k = 0; k < c.num_elements; ++k) {
        const Eigen::MatrixXd e = local(k);
        const int n = c.nodes_per_element;
        for (int a = 0; a < n; ++a) {
            for (int l = 0; l < m; ++l) {
                for (int b = 0; b < n; ++b) {
                    for (int q = 0; q < m; ++q) out(m * c.at(a, k) + l, m * c.at(b, k) + q) += e(m * a + l, m * b + q);
                }
            }
        }
    }
    return out;
}

/// Hypercube mesh with interior vertices moved by up to `amplitude` of the cell size, so that
/// elements are no longer congruent.
inline Mesh perturbed_hypercube(int d, Index n, unsigned seed, double amplitude = 0.2)
{
    Mesh m = simplex_asm::generate_hypercube_mesh(d, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude / static_cast<double>(n),
                                             amplitude / static_cast<double>(n));
    for (Index j = 0; j < m.nq; ++j) {
        bool interior = true;
        for (int nu = 0; nu < d; ++nu) {
            const double x = m.coord(nu, j);
            if (x <= 0.0 || x >= 1.0) interior = false;
        }
        if (!interior) continue;
        for (int nu = 0; nu < d; ++nu) m.q[static_cast<std::size_t>(nu * m.nq + j)] += u(rng);
    }
    m.vols = simplex_asm::compute_volumes(m.d, m.nq, m.q, m.me, m.nme);
    return m;
}

/// A single random non-degenerate simplex in R^d.
inline Mesh random_simplex(int d, std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mesh m;
    m.d = d;
    m.nq = d + 1;
    m.nme = 1;
    while (true) {
        m.q.assign(static_cast<std::size_t>(d * (d + 1)), 0.0);
        for (auto& x : m.q) x = u(rng);
        m.me.resize(static_cast<std::size_t>(d + 1));
        for (int a = 0; a <= d; ++a) m.me[static_cast<std::size_t>(a)] = a;
        Eigen::MatrixXd v = element_vertices(m, 0);
        if (simplex_volume(v) > 0.05) break;
    }
    m.vols = simplex_asm::compute_volumes(m.d, m.nq, m.q, m.me, m.nme);
    return m;
}

inline double max_abs(const Eigen::MatrixXd& a)
{
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

} // namespace oracle
