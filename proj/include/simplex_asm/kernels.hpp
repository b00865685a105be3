#pragma once

#include "simplex_asm/mesh.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace simplex_asm {

/// n! over exact 64-bit integers, 0 <= n <= 20.
std::int64_t factorial(int n);

/// Integral over a d-simplex of volume `vol` of prod_i lambda_i^{n_i}:
/// d! vol prod(n_i!) / (d + sum n_i)!.  Requires n.size() == d + 1 and d + sum n_i <= 20.
double barycentric_moment(int d, double vol, std::span<const int> n);

/// Gradients of the barycentric coordinates, constant per element.
///
/// Stored structure-of-arrays: component i of grad lambda_a on element k lives at
/// `data[(a * d + i) * nme + k]`, so `component(a, i)` is a contiguous nme-array.
struct GradientTable {
    int d = 0;
    Index nme = 0;
    std::vector<double> data;

    std::span<const double> component(int a, int i) const
    {
        return {data.data() + static_cast<std::size_t>((a * d + i) * nme),
                static_cast<std::size_t>(nme)};
    }
    double at(Index k, int a, int i) const
    {
        return data[static_cast<std::size_t>((a * d + i) * nme + k)];
    }
};

/// Solves B_k^t G_k = [-1, I_d] element by element.
GradientTable compute_gradients(const Mesh& mesh);

/// Nodal values of a coefficient gathered per element: W(a, k) = w(q^{me(a,k)}) stored
/// row-major `(d+1) x nme`, plus the per-element column sums.
struct ElementField {
    int rows = 0;
    Index nme = 0;
    std::vector<double> values;
    std::vector<double> sums;

    std::span<const double> row(int a) const
    {
        return {values.data() + static_cast<std::size_t>(a * nme), static_cast<std::size_t>(nme)};
    }
};

using PointFunction = std::function<double(std::span<const double>)>;

/// w evaluated once at every vertex.
std::vector<double> sample_at_vertices(const Mesh& mesh, const PointFunction& w);

ElementField gather_to_elements(const Mesh& mesh, std::span<const double> nodal);

/// vols .* sum_a f(q^{me(a,:)}) / (d+1): integral of the P1 interpolant of f on each element.
std::vector<double> element_integrals(const Mesh& mesh, const ElementField& field);

/// (a, b) entries of the P1-weighted local mass matrices, all elements at once:
/// d!/(d+3)! (1 + delta_ab) |K| (w^s + w_a + w_b).
void mass_kernel(int a, int b, int d, std::span<const double> vols, const ElementField& w,
                 std::span<double> out);
double mass_entry(int a, int b, int d, double vol, const ElementField& w, Index k);

/// |K| <grad lambda_b, grad lambda_a> for all elements.
void stiffness_kernel(int a, int b, const GradientTable& g, std::span<const double> vols,
                      std::span<double> out);
double stiffness_entry(int a, int b, const GradientTable& g, double vol, Index k);

/// 0/1 strain maps and the split of the isotropic Voigt tensor C = lambda C0 + mu C1, with
/// Q^{n,l} = B_n^t C0 B_l and S^{n,l} = B_n^t C1 B_l.  Components are zero-based.
struct ElasticTables {
    int d = 0;
    std::vector<Eigen::MatrixXd> strain_maps;  // B_l, 3(d-1) x d
    Eigen::MatrixXd c0;
    Eigen::MatrixXd c1;
    std::vector<Eigen::MatrixXd> q;  // q[n * d + l] = Q^{n,l}
    std::vector<Eigen::MatrixXd> s;  // s[n * d + l] = S^{n,l}

    const Eigen::MatrixXd& Q(int n, int l) const { return q[static_cast<std::size_t>(n * d + l)]; }
    const Eigen::MatrixXd& S(int n, int l) const { return s[static_cast<std::size_t>(n * d + l)]; }
};

ElasticTables build_elastic_tables(int d);

/// X(k) = sum_{i,j} A(j,i) G(k,a,i) G(k,b,j) = <grad lambda_b, A grad lambda_a>.
void dot_mat_vec_g(const Eigen::MatrixXd& A, const GradientTable& g, int a, int b,
                   std::span<double> out);

/// Local elastic entry coupling component l of node a (row) with component n of node b
/// (column): lambs .* <grad b, Q^{n,l} grad a> + mus .* <grad b, S^{n,l} grad a>, where
/// lambs / mus are the per-element integrals of the interpolated Lame fields.
void elastic_kernel(int l, int a, int n, int b, const ElasticTables& tables,
                    const GradientTable& g, std::span<const double> lambs,
                    std::span<const double> mus, std::span<double> out);
double elastic_entry(int l, int a, int n, int b, const ElasticTables& tables,
                     const GradientTable& g, double lamb, double mu, Index k);

/// Element-independent Pk mass coefficients: int_K phi_a phi_b = d! |K| C(a, b).
struct PkCoeffTable {
    int d = 0;
    int k = 0;
    int ndfe = 0;
    std::vector<std::vector<int>> multi_indices;  // local numbering, descending lexicographic
    std::vector<double> c;                        // ndfe x ndfe, row-major
    std::vector<std::string> exact;               // same entries as reduced fractions "p/q"

    double at(int a, int b) const { return c[static_cast<std::size_t>(a * ndfe + b)]; }
    const std::string& exact_at(int a, int b) const
    {
        return exact[static_cast<std::size_t>(a * ndfe + b)];
    }
};

/// Expands each basis function in monomials of the barycentric coordinates with exact
/// rational arithmetic and integrates the products with the moment formula.  d <= 3, k <= 6.
PkCoeffTable pk_mass_coeffs(int d, int k);

} // namespace simplex_asm
