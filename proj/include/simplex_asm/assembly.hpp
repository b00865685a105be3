#pragma once

#include "simplex_asm/kernels.hpp"
#include "simplex_asm/mesh.hpp"
#include "simplex_asm/sparse.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace simplex_asm {

/// Batched evaluator of one local-matrix entry (a, b) over all elements, plus a
/// single-element evaluator for the element-loop strategies.
class ScalarKernel {
public:
    virtual ~ScalarKernel() = default;
    virtual bool symmetric() const = 0;
    virtual void batched(int a, int b, std::span<double> out) const = 0;
    virtual double single(int a, int b, Index k) const = 0;
};

/// Vector-valued counterpart for m-component systems.  Entry (l, a, n, b) couples component
/// l of local node a (row) with component n of local node b (column).  Global dofs use the
/// interleaved numbering r = m * node + component.
class VectorKernel {
public:
    virtual ~VectorKernel() = default;
    virtual int components() const = 0;
    virtual bool symmetric() const = 0;
    virtual void batched(int l, int a, int n, int b, std::span<double> out) const = 0;
    virtual double single(int l, int a, int n, int b, Index k) const = 0;
};

enum class Variant { base, optv1, optv2, optv, optvs };

std::string_view variant_name(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
inline constexpr Variant kAllVariants[] = {Variant::base, Variant::optv1, Variant::optv2,
                                           Variant::optv, Variant::optvs};

/// Instrumentation filled in by the drivers.
struct AssemblyStats {
    std::size_t constructor_calls = 0;
    /// Local (row, col) index pairs accumulated before the M + M^t step of optvs.  Scalar
    /// drivers record (a, b); vector drivers record (m a + l, m b + n).
    std::vector<std::pair<int, int>> pretranspose_pairs;
};

/// Bytes of temporary triplet/local-matrix storage each strategy allocates: base keeps one
/// local matrix, optv1/optv2 keep 3 (L^2 nme)-arrays, optv/optvs keep 3 nme-arrays per step.
/// L is the local dof count (nodes per element times components).
std::size_t auxiliary_bytes(Variant v, Index nme, int local_dofs);

/// Words of the same storage, one word per index or value.
std::size_t auxiliary_words(Variant v, Index nme, int local_dofs);

SparseMatrix assemble_base(const ConnectivityView& c, const ScalarKernel& kernel,
                           AssemblyStats* stats = nullptr);
SparseMatrix assemble_optv1(const ConnectivityView& c, const ScalarKernel& kernel,
                            AssemblyStats* stats = nullptr);
SparseMatrix assemble_optv2(const ConnectivityView& c, const ScalarKernel& kernel,
                            AssemblyStats* stats = nullptr);
SparseMatrix assemble_optv(const ConnectivityView& c, const ScalarKernel& kernel,
                           AssemblyStats* stats = nullptr);
/// Throws contract_violation when the kernel is not flagged symmetric.
SparseMatrix assemble_optvs(const ConnectivityView& c, const ScalarKernel& kernel,
                            AssemblyStats* stats = nullptr);
SparseMatrix assemble(Variant v, const ConnectivityView& c, const ScalarKernel& kernel,
                      AssemblyStats* stats = nullptr);

SparseMatrix assemble_vector_base(const ConnectivityView& c, const VectorKernel& kernel,
                                  AssemblyStats* stats = nullptr);
SparseMatrix assemble_vector_optv1(const ConnectivityView& c, const VectorKernel& kernel,
                                   AssemblyStats* stats = nullptr);
SparseMatrix assemble_vector_optv2(const ConnectivityView& c, const VectorKernel& kernel,
                                   AssemblyStats* stats = nullptr);
SparseMatrix assemble_vector_optv(const ConnectivityView& c, const VectorKernel& kernel,
                                  AssemblyStats* stats = nullptr);
SparseMatrix assemble_vector_optvs(const ConnectivityView& c, const VectorKernel& kernel,
                                   AssemblyStats* stats = nullptr);
SparseMatrix assemble_vector(Variant v, const ConnectivityView& c, const VectorKernel& kernel,
                             AssemblyStats* stats = nullptr);

/// P1 mass matrix weighted by the P1 interpolant of nodal values w.
class MassKernel final : public ScalarKernel {
public:
    MassKernel(const Mesh& mesh, std::span<const double> nodal_weight);
    bool symmetric() const override { return true; }
    void batched(int a, int b, std::span<double> out) const override;
    double single(int a, int b, Index k) const override;

private:
    const Mesh& mesh_;
    ElementField w_;
};

class StiffnessKernel final : public ScalarKernel {
public:
    explicit StiffnessKernel(const Mesh& mesh);
    bool symmetric() const override { return true; }
    void batched(int a, int b, std::span<double> out) const override;
    double single(int a, int b, Index k) const override;

    const GradientTable& gradients() const { return g_; }

private:
    const Mesh& mesh_;
    GradientTable g_;
};

/// Isotropic linear elasticity, d = m = 2 or 3, with P1-interpolated Lame fields.
class ElasticKernel final : public VectorKernel {
public:
    ElasticKernel(const Mesh& mesh, std::span<const double> nodal_lambda,
                  std::span<const double> nodal_mu);
    int components() const override { return tables_.d; }
    bool symmetric() const override { return true; }
    void batched(int l, int a, int n, int b, std::span<double> out) const override;
    double single(int l, int a, int n, int b, Index k) const override;

private:
    ElasticTables tables_;
    GradientTable g_;
    std::vector<double> lambs_;
    std::vector<double> mus_;
};

/// Pk mass kernel: d! C(a, b) |K|.
class PkMassKernel final : public ScalarKernel {
public:
    PkMassKernel(const PkMesh& mesh, const PkCoeffTable& coeffs);
    bool symmetric() const override { return true; }
    void batched(int a, int b, std::span<double> out) const override;
    double single(int a, int b, Index k) const override;

private:
    const PkMesh& mesh_;
    std::vector<double> scaled_;  // d! C, ndfe x ndfe
};

/// Presents a scalar kernel as a one-component vector kernel.
class ScalarAsVectorKernel final : public VectorKernel {
public:
    explicit ScalarAsVectorKernel(const ScalarKernel& inner) : inner_(inner) {}
    int components() const override { return 1; }
    bool symmetric() const override { return inner_.symmetric(); }
    void batched(int, int a, int, int b, std::span<double> out) const override
    {
        inner_.batched(a, b, out);
    }
    double single(int, int a, int, int b, Index k) const override { return inner_.single(a, b, k); }

private:
    const ScalarKernel& inner_;
};

/// Pk mass matrix through the optv2 strategy.
SparseMatrix assemble_mass_pk(const PkMesh& mesh, const PkCoeffTable& coeffs,
                              AssemblyStats* stats = nullptr);

enum class MatrixKind { mass, stiffness, elastic, mass_pk };

std::string_view matrix_kind_name(MatrixKind kind);
std::optional<MatrixKind> parse_matrix_kind(std::string_view name);

/// Coefficient choices exposed by the tools.  Weight and Lame fields are evaluated at the
/// nodes once, when the problem is prepared.
struct ProblemSpec {
    MatrixKind kind = MatrixKind::stiffness;
    int order = 1;  // mass_pk only
    PointFunction weight;  // mass; empty means w = 1
    PointFunction lambda;  // elastic; empty means 1
    PointFunction mu;      // elastic; empty means 1
};

/// A mesh plus everything that does not belong to the timed assembly: the Pk mesh and
/// coefficient table, and nodal samples of the coefficients.  `assemble` builds the
/// kernel (gradients, gathered fields) and runs one strategy.
class PreparedProblem {
public:
    PreparedProblem(const Mesh& mesh, ProblemSpec spec);

    SparseMatrix assemble(Variant v, AssemblyStats* stats = nullptr) const;
    bool symmetric() const { return true; }
    Index ndof() const;
    Index num_elements() const { return mesh_.nme; }
    int local_dofs() const;
    const ProblemSpec& spec() const { return spec_; }

private:
    const Mesh& mesh_;
    ProblemSpec spec_;
    std::optional<PkMesh> pk_mesh_;
    std::optional<PkCoeffTable> pk_coeffs_;
    std::vector<double> weight_;
    std::vector<double> lambda_;
    std::vector<double> mu_;
};

} // namespace simplex_asm
