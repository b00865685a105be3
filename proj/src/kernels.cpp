#include "simplex_asm/kernels.hpp"

#include <Eigen/Dense>
#include <gmpxx.h>

#include <cmath>
#include <map>

namespace simplex_asm {

std::int64_t factorial(int n)
{
    if (n < 0 || n > 20) {
        throw Error(ErrorCode::invalid_argument,
                    "factorial argument " + std::to_string(n) + " outside [0, 20]");
    }
    std::int64_t r = 1;
    for (int i = 2; i <= n; ++i) {
        r *= i;
    }
    return r;
}

double barycentric_moment(int d, double vol, std::span<const int> n)
{
    if (d < 1 || n.size() != static_cast<std::size_t>(d + 1)) {
        throw Error(ErrorCode::invalid_argument, "moment exponent tuple must have length d+1");
    }
    int total = 0;
    std::int64_t num = 1;
    for (int ni : n) {
        if (ni < 0) {
            throw Error(ErrorCode::invalid_argument, "negative exponent in moment");
        }
        total += ni;
        if (d + total > 20) {
            throw Error(ErrorCode::invalid_argument,
                        "moment exponent range exceeded: d + sum(n) must be <= 20");
        }
        num *= factorial(ni);
    }
    return static_cast<double>(factorial(d)) * vol * static_cast<double>(num) /
           static_cast<double>(factorial(d + total));
}

GradientTable compute_gradients(const Mesh& mesh)
{
    const int d = mesh.d;
    GradientTable g;
    g.d = d;
    g.nme = mesh.nme;
    g.data.resize(static_cast<std::size_t>((d + 1) * d * mesh.nme));

    Eigen::MatrixXd ghat = Eigen::MatrixXd::Zero(d, d + 1);
    ghat.col(0).setConstant(-1.0);
    ghat.rightCols(d).setIdentity();

    Eigen::MatrixXd bt(d, d);
    Eigen::MatrixXd gk(d, d + 1);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(d);
    for (Index k = 0; k < mesh.nme; ++k) {
        const Index v0 = mesh.vertex(0, k);
        double bound = 1.0;
        for (int i = 0; i < d; ++i) {
            const Index vi = mesh.vertex(i + 1, k);
            for (int nu = 0; nu < d; ++nu) {
                bt(i, nu) = mesh.coord(nu, vi) - mesh.coord(nu, v0);
            }
            bound *= bt.row(i).norm();
        }
        lu.compute(bt);
        if (!(std::abs(lu.determinant()) > 1e-13 * bound)) {
            throw Error(ErrorCode::degenerate_simplex,
                        "degenerate simplex at element " + std::to_string(k));
        }
        gk.noalias() = lu.solve(ghat);
        for (int a = 0; a <= d; ++a) {
            for (int i = 0; i < d; ++i) {
                g.data[static_cast<std::size_t>((a * d + i) * mesh.nme + k)] = gk(i, a);
            }
        }
    }
    return g;
}

std::vector<double> sample_at_vertices(const Mesh& mesh, const PointFunction& w)
{
    std::vector<double> out(static_cast<std::size_t>(mesh.nq));
    std::vector<double> x(static_cast<std::size_t>(mesh.d));
    for (Index j = 0; j < mesh.nq; ++j) {
        for (int nu = 0; nu < mesh.d; ++nu) {
            x[static_cast<std::size_t>(nu)] = mesh.coord(nu, j);
        }
        out[static_cast<std::size_t>(j)] = w(x);
    }
    return out;
}

ElementField gather_to_elements(const Mesh& mesh, std::span<const double> nodal)
{
    if (nodal.size() != static_cast<std::size_t>(mesh.nq)) {
        throw Error(ErrorCode::shape_mismatch, "nodal array length must equal nq");
    }
    ElementField f;
    f.rows = mesh.d + 1;
    f.nme = mesh.nme;
    f.values.resize(static_cast<std::size_t>(f.rows * mesh.nme));
    f.sums.assign(static_cast<std::size_t>(mesh.nme), 0.0);
    for (int a = 0; a < f.rows; ++a) {
        double* row = f.values.data() + static_cast<std::size_t>(a * mesh.nme);
        for (Index k = 0; k < mesh.nme; ++k) {
            row[k] = nodal[static_cast<std::size_t>(mesh.vertex(a, k))];
            f.sums[static_cast<std::size_t>(k)] += row[k];
        }
    }
    return f;
}

std::vector<double> element_integrals(const Mesh& mesh, const ElementField& field)
{
    std::vector<double> out(static_cast<std::size_t>(mesh.nme));
    const double inv = 1.0 / static_cast<double>(mesh.d + 1);
    for (Index k = 0; k < mesh.nme; ++k) {
        out[static_cast<std::size_t>(k)] =
            field.sums[static_cast<std::size_t>(k)] * mesh.vols[static_cast<std::size_t>(k)] * inv;
    }
    return out;
}

namespace {

double mass_factor(int a, int b, int d)
{
    return (a == b ? 2.0 : 1.0) * static_cast<double>(factorial(d)) /
           static_cast<double>(factorial(d + 3));
}

} // namespace

void mass_kernel(int a, int b, int d, std::span<const double> vols, const ElementField& w,
                 std::span<double> out)
{
    const double c = mass_factor(a, b, d);
    const auto wa = w.row(a);
    const auto wb = w.row(b);
    const std::size_t n = out.size();
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = c * vols[k] * (w.sums[k] + (wa[k] + wb[k]));
    }
}

double mass_entry(int a, int b, int d, double vol, const ElementField& w, Index k)
{
    const auto i = static_cast<std::size_t>(k);
    return mass_factor(a, b, d) * vol * (w.sums[i] + (w.row(a)[i] + w.row(b)[i]));
}

void stiffness_kernel(int a, int b, const GradientTable& g, std::span<const double> vols,
                      std::span<double> out)
{
    const std::size_t n = out.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < g.d; ++i) {
        const auto ga = g.component(a, i);
        const auto gb = g.component(b, i);
        for (std::size_t k = 0; k < n; ++k) {
            out[k] += gb[k] * ga[k];
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        out[k] *= vols[k];
    }
}

double stiffness_entry(int a, int b, const GradientTable& g, double vol, Index k)
{
    double s = 0.0;
    for (int i = 0; i < g.d; ++i) {
        s += g.at(k, b, i) * g.at(k, a, i);
    }
    return s * vol;
}

ElasticTables build_elastic_tables(int d)
{
    if (d != 2 && d != 3) {
        throw Error(ErrorCode::invalid_argument, "elastic tables exist for d = 2 or 3 only");
    }
    const int nv = 3 * (d - 1);
    ElasticTables t;
    t.d = d;
    for (int l = 0; l < d; ++l) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nv, d);
        auto delta = [l](int i) { return l == i ? 1.0 : 0.0; };
        if (d == 2) {
            b << delta(0), 0, 0, delta(1), delta(1), delta(0);
        } else {
            b << delta(0), 0, 0,
                 0, delta(1), 0,
                 0, 0, delta(2),
                 delta(1), delta(0), 0,
                 0, delta(2), delta(1),
                 delta(2), 0, delta(0);
        }
        t.strain_maps.push_back(std::move(b));
    }
    t.c0 = Eigen::MatrixXd::Zero(nv, nv);
    t.c0.topLeftCorner(d, d).setOnes();
    t.c1 = Eigen::MatrixXd::Zero(nv, nv);
    t.c1.topLeftCorner(d, d) = 2.0 * Eigen::MatrixXd::Identity(d, d);
    t.c1.bottomRightCorner(2 * d - 3, 2 * d - 3).setIdentity();
    for (int n = 0; n < d; ++n) {
        for (int l = 0; l < d; ++l) {
            const auto& bn = t.strain_maps[static_cast<std::size_t>(n)];
            const auto& bl = t.strain_maps[static_cast<std::size_t>(l)];
            t.q.push_back(bn.transpose() * t.c0 * bl);
            t.s.push_back(bn.transpose() * t.c1 * bl);
        }
    }
    return t;
}

void dot_mat_vec_g(const Eigen::MatrixXd& A, const GradientTable& g, int a, int b,
                   std::span<double> out)
{
    const std::size_t n = out.size();
    std::fill(out.begin(), out.end(), 0.0);
    for (int i = 0; i < g.d; ++i) {
        const auto ga = g.component(a, i);
        for (int j = 0; j < g.d; ++j) {
            const double c = A(j, i);
            if (c == 0.0) {
                continue;
            }
            const auto gb = g.component(b, j);
            for (std::size_t k = 0; k < n; ++k) {
                out[k] += c * (ga[k] * gb[k]);
            }
        }
    }
}

namespace {

double dot_mat_vec_single(const Eigen::MatrixXd& A, const GradientTable& g, int a, int b, Index k)
{
    double x = 0.0;
    for (int i = 0; i < g.d; ++i) {
        for (int j = 0; j < g.d; ++j) {
            const double c = A(j, i);
            if (c != 0.0) {
                x += c * (g.at(k, a, i) * g.at(k, b, j));
            }
        }
    }
    return x;
}

} // namespace

void elastic_kernel(int l, int a, int n, int b, const ElasticTables& tables,
                    const GradientTable& g, std::span<const double> lambs,
                    std::span<const double> mus, std::span<double> out)
{
    const std::size_t ne = out.size();
    std::vector<double> xs(ne);
    dot_mat_vec_g(tables.Q(n, l), g, a, b, out);
    dot_mat_vec_g(tables.S(n, l), g, a, b, xs);
    for (std::size_t k = 0; k < ne; ++k) {
        out[k] = lambs[k] * out[k] + mus[k] * xs[k];
    }
}

double elastic_entry(int l, int a, int n, int b, const ElasticTables& tables,
                     const GradientTable& g, double lamb, double mu, Index k)
{
    return lamb * dot_mat_vec_single(tables.Q(n, l), g, a, b, k) +
           mu * dot_mat_vec_single(tables.S(n, l), g, a, b, k);
}

namespace {

// Coefficients of prod_{j < m} (k x - j) / (j + 1), lowest degree first.
std::vector<mpq_class> univariate_factor(int k, int m)
{
    std::vector<mpq_class> p{mpq_class(1)};
    for (int j = 0; j < m; ++j) {
        std::vector<mpq_class> next(p.size() + 1, mpq_class(0));
        const mpq_class scale(1, j + 1);
        for (std::size_t e = 0; e < p.size(); ++e) {
            next[e + 1] += p[e] * k * scale;
            next[e] -= p[e] * j * scale;
        }
        for (auto& c : next) {
            c.canonicalize();
        }
        p = std::move(next);
    }
    return p;
}

using Monomial = std::vector<int>;

// a_mu(alpha) for every mu with a nonzero coefficient.
std::map<Monomial, mpq_class> expand_basis(const std::vector<int>& alpha, int k)
{
    std::map<Monomial, mpq_class> terms{{Monomial{}, mpq_class(1)}};
    for (int entry : alpha) {
        const auto f = univariate_factor(k, entry);
        std::map<Monomial, mpq_class> next;
        for (const auto& [mono, c] : terms) {
            for (std::size_t e = 0; e < f.size(); ++e) {
                if (f[e] == 0) {
                    continue;
                }
                Monomial m = mono;
                m.push_back(static_cast<int>(e));
                next[m] += c * f[e];
            }
        }
        terms = std::move(next);
    }
    return terms;
}

} // namespace

PkCoeffTable pk_mass_coeffs(int d, int k)
{
    if (d < 1 || d > 3 || k < 1 || k > 6) {
        throw Error(ErrorCode::invalid_argument, "Pk mass coefficients support 1 <= d <= 3, 1 <= k <= 6");
    }
    PkCoeffTable t;
    t.d = d;
    t.k = k;
    t.multi_indices = lattice_multi_indices(d, k);
    t.ndfe = static_cast<int>(t.multi_indices.size());

    std::vector<std::map<Monomial, mpq_class>> expansions;
    expansions.reserve(t.multi_indices.size());
    for (const auto& alpha : t.multi_indices) {
        expansions.push_back(expand_basis(alpha, k));
    }

    const auto nd = static_cast<std::size_t>(t.ndfe);
    t.c.resize(nd * nd);
    t.exact.resize(nd * nd);
    for (std::size_t a = 0; a < nd; ++a) {
        for (std::size_t b = a; b < nd; ++b) {
            mpq_class sum(0);
            for (const auto& [mu, ca] : expansions[a]) {
                for (const auto& [nu, cb] : expansions[b]) {
                    int total = 0;
                    std::int64_t num = 1;
                    for (std::size_t i = 0; i < mu.size(); ++i) {
                        const int e = mu[i] + nu[i];
                        total += e;
                        num *= factorial(e);
                    }
                    mpq_class moment(mpz_class(std::to_string(num)),
                                     mpz_class(std::to_string(factorial(d + total))));
                    moment.canonicalize();
                    sum += ca * cb * moment;
                }
            }
            sum.canonicalize();
            t.c[a * nd + b] = t.c[b * nd + a] = sum.get_d();
            t.exact[a * nd + b] = t.exact[b * nd + a] = sum.get_str();
        }
    }
    return t;
}

} // namespace simplex_asm
