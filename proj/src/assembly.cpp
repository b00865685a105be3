#include "simplex_asm/assembly.hpp"

#include <unordered_map>

namespace simplex_asm {

std::string_view variant_name(Variant v)
{
    switch (v) {
    case Variant::base: return "base";
    case Variant::optv1: return "optv1";
    case Variant::optv2: return "optv2";
    case Variant::optv: return "optv";
    case Variant::optvs: return "optvs";
    }
    return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name)
{
    for (Variant v : kAllVariants) {
        if (variant_name(v) == name) {
            return v;
        }
    }
    return std::nullopt;
}

std::string_view matrix_kind_name(MatrixKind kind)
{
    switch (kind) {
    case MatrixKind::mass: return "mass";
    case MatrixKind::stiffness: return "stiffness";
    case MatrixKind::elastic: return "elastic";
    case MatrixKind::mass_pk: return "mass-pk";
    }
    return "unknown";
}

std::optional<MatrixKind> parse_matrix_kind(std::string_view name)
{
    for (MatrixKind k : {MatrixKind::mass, MatrixKind::stiffness, MatrixKind::elastic,
                         MatrixKind::mass_pk}) {
        if (matrix_kind_name(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::size_t auxiliary_words(Variant v, Index nme, int local_dofs)
{
    const auto l2 = static_cast<std::size_t>(local_dofs) * static_cast<std::size_t>(local_dofs);
    const auto ne = static_cast<std::size_t>(nme);
    switch (v) {
    case Variant::base: return l2;
    case Variant::optv1:
    case Variant::optv2: return 3 * l2 * ne;
    case Variant::optv:
    case Variant::optvs: return 3 * ne;
    }
    return 0;
}

std::size_t auxiliary_bytes(Variant v, Index nme, int local_dofs)
{
    const auto l2 = static_cast<std::size_t>(local_dofs) * static_cast<std::size_t>(local_dofs);
    const auto ne = static_cast<std::size_t>(nme);
    constexpr std::size_t triplet = 2 * sizeof(Index) + sizeof(double);
    switch (v) {
    case Variant::base: return l2 * sizeof(double);
    case Variant::optv1:
    case Variant::optv2: return triplet * l2 * ne;
    case Variant::optv:
    case Variant::optvs: return triplet * ne;
    }
    return 0;
}

namespace {

void count_call(AssemblyStats* stats)
{
    if (stats != nullptr) {
        ++stats->constructor_calls;
    }
}

// Dictionary-of-keys accumulator used by the base strategies.
class KeyAccumulator {
public:
    KeyAccumulator(Index nrows, Index ncols) : nrows_(nrows), ncols_(ncols) {}

    void add(Index i, Index j, double v) { entries_[i * ncols_ + j] += v; }

    SparseMatrix finish(AssemblyStats* stats) const
    {
        TripletBatch t;
        t.nrows = nrows_;
        t.ncols = ncols_;
        t.reserve(entries_.size());
        for (const auto& [key, v] : entries_) {
            t.push(key / ncols_, key % ncols_, v);
        }
        count_call(stats);
        return sparse_from_triplets(t);
    }

private:
    Index nrows_;
    Index ncols_;
    std::unordered_map<Index, double> entries_;
};

} // namespace

SparseMatrix assemble_base(const ConnectivityView& c, const ScalarKernel& kernel,
                           AssemblyStats* stats)
{
    const int nl = c.nodes_per_element;
    KeyAccumulator acc(c.num_nodes, c.num_nodes);
    std::vector<double> e(static_cast<std::size_t>(nl * nl));
    for (Index k = 0; k < c.num_elements; ++k) {
        for (int a = 0; a < nl; ++a) {
            for (int b = 0; b < nl; ++b) {
                e[static_cast<std::size_t>(a * nl + b)] = kernel.single(a, b, k);
            }
        }
        for (int a = 0; a < nl; ++a) {
            const Index i = c.at(a, k);
            for (int b = 0; b < nl; ++b) {
                acc.add(i, c.at(b, k), e[static_cast<std::size_t>(a * nl + b)]);
            }
        }
    }
    return acc.finish(stats);
}

SparseMatrix assemble_optv1(const ConnectivityView& c, const ScalarKernel& kernel,
                            AssemblyStats* stats)
{
    const int nl = c.nodes_per_element;
    const auto total = static_cast<std::size_t>(nl * nl) * static_cast<std::size_t>(c.num_elements);
    std::vector<Index> ig(total), jg(total);
    std::vector<double> kg(total);
    std::size_t p = 0;
    for (Index k = 0; k < c.num_elements; ++k) {
        // Column-wise local order: b outer, a inner.
        for (int b = 0; b < nl; ++b) {
            for (int a = 0; a < nl; ++a) {
                ig[p] = c.at(a, k);
                jg[p] = c.at(b, k);
                kg[p] = kernel.single(a, b, k);
                ++p;
            }
        }
    }
    count_call(stats);
    return sparse_from_triplets(c.num_nodes, c.num_nodes, ig, jg, kg);
}

SparseMatrix assemble_optv2(const ConnectivityView& c, const ScalarKernel& kernel,
                            AssemblyStats* stats)
{
    const int nl = c.nodes_per_element;
    const auto ne = static_cast<std::size_t>(c.num_elements);
    const auto total = static_cast<std::size_t>(nl * nl) * ne;
    std::vector<Index> ig(total), jg(total);
    std::vector<double> kg(total);
    std::size_t row = 0;
    for (int b = 0; b < nl; ++b) {
        for (int a = 0; a < nl; ++a) {
            const std::span<double> krow(kg.data() + row * ne, ne);
            kernel.batched(a, b, krow);
            const auto ma = c.row(a);
            const auto mb = c.row(b);
            std::copy(ma.begin(), ma.end(), ig.begin() + static_cast<std::ptrdiff_t>(row * ne));
            std::copy(mb.begin(), mb.end(), jg.begin() + static_cast<std::ptrdiff_t>(row * ne));
            ++row;
        }
    }
    count_call(stats);
    return sparse_from_triplets(c.num_nodes, c.num_nodes, ig, jg, kg);
}

SparseMatrix assemble_optv(const ConnectivityView& c, const ScalarKernel& kernel,
                           AssemblyStats* stats)
{
    const int nl = c.nodes_per_element;
    SparseMatrix m(c.num_nodes, c.num_nodes);
    std::vector<double> kg(static_cast<std::size_t>(c.num_elements));
    for (int b = 0; b < nl; ++b) {
        for (int a = 0; a < nl; ++a) {
            kernel.batched(a, b, kg);
            count_call(stats);
            m = add(m, sparse_from_triplets(c.num_nodes, c.num_nodes, c.row(a), c.row(b), kg));
        }
    }
    return m;
}

SparseMatrix assemble_optvs(const ConnectivityView& c, const ScalarKernel& kernel,
                            AssemblyStats* stats)
{
    if (!kernel.symmetric()) {
        throw Error(ErrorCode::contract_violation, "optvs requires a symmetric kernel");
    }
    const int nl = c.nodes_per_element;
    SparseMatrix m(c.num_nodes, c.num_nodes);
    std::vector<double> kg(static_cast<std::size_t>(c.num_elements));
    // Strictly lower local pairs, the same side the vector driver keeps.
    for (int a = 0; a < nl; ++a) {
        for (int b = 0; b < a; ++b) {
            kernel.batched(a, b, kg);
            count_call(stats);
            if (stats != nullptr) {
                stats->pretranspose_pairs.emplace_back(a, b);
            }
            m = add(m, sparse_from_triplets(c.num_nodes, c.num_nodes, c.row(a), c.row(b), kg));
        }
    }
    m = add(m, transpose(m));
    for (int a = 0; a < nl; ++a) {
        kernel.batched(a, a, kg);
        count_call(stats);
        m = add(m, sparse_from_triplets(c.num_nodes, c.num_nodes, c.row(a), c.row(a), kg));
    }
    return m;
}

SparseMatrix assemble(Variant v, const ConnectivityView& c, const ScalarKernel& kernel,
                      AssemblyStats* stats)
{
    switch (v) {
    case Variant::base: return assemble_base(c, kernel, stats);
    case Variant::optv1: return assemble_optv1(c, kernel, stats);
    case Variant::optv2: return assemble_optv2(c, kernel, stats);
    case Variant::optv: return assemble_optv(c, kernel, stats);
    case Variant::optvs: return assemble_optvs(c, kernel, stats);
    }
    throw Error(ErrorCode::invalid_argument, "unknown variant");
}

namespace {

void dof_row(std::span<const Index> nodes, int m, int l, std::vector<Index>& out)
{
    out.resize(nodes.size());
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        out[k] = m * nodes[k] + l;
    }
}

} // namespace

SparseMatrix assemble_vector_base(const ConnectivityView& c, const VectorKernel& kernel,
                                  AssemblyStats* stats)
{
    const int m = kernel.components();
    const int nl = c.nodes_per_element;
    const int nd = m * nl;
    const Index ndof = m * c.num_nodes;
    KeyAccumulator acc(ndof, ndof);
    std::vector<double> he(static_cast<std::size_t>(nd * nd));
    for (Index k = 0; k < c.num_elements; ++k) {
        for (int a = 0; a < nl; ++a) {
            for (int l = 0; l < m; ++l) {
                for (int b = 0; b < nl; ++b) {
                    for (int n = 0; n < m; ++n) {
                        he[static_cast<std::size_t>((m * a + l) * nd + m * b + n)] =
                            kernel.single(l, a, n, b, k);
                    }
                }
            }
        }
        for (int l = 0; l < m; ++l) {
            for (int n = 0; n < m; ++n) {
                for (int a = 0; a < nl; ++a) {
                    const Index r = m * c.at(a, k) + l;
                    const int i = m * a + l;
                    for (int b = 0; b < nl; ++b) {
                        const Index s = m * c.at(b, k) + n;
                        const int j = m * b + n;
                        acc.add(r, s, he[static_cast<std::size_t>(i * nd + j)]);
                    }
                }
            }
        }
    }
    return acc.finish(stats);
}

SparseMatrix assemble_vector_optv1(const ConnectivityView& c, const VectorKernel& kernel,
                                   AssemblyStats* stats)
{
    const int m = kernel.components();
    const int nl = c.nodes_per_element;
    const int nd = m * nl;
    const Index ndof = m * c.num_nodes;
    const auto total = static_cast<std::size_t>(nd * nd) * static_cast<std::size_t>(c.num_elements);
    std::vector<Index> ig(total), jg(total);
    std::vector<double> kg(total);
    std::size_t p = 0;
    for (Index k = 0; k < c.num_elements; ++k) {
        for (int j = 0; j < nd; ++j) {
            const int b = j / m, n = j % m;
            for (int i = 0; i < nd; ++i) {
                const int a = i / m, l = i % m;
                ig[p] = m * c.at(a, k) + l;
                jg[p] = m * c.at(b, k) + n;
                kg[p] = kernel.single(l, a, n, b, k);
                ++p;
            }
        }
    }
    count_call(stats);
    return sparse_from_triplets(ndof, ndof, ig, jg, kg);
}

SparseMatrix assemble_vector_optv2(const ConnectivityView& c, const VectorKernel& kernel,
                                   AssemblyStats* stats)
{
    const int m = kernel.components();
    const int nl = c.nodes_per_element;
    const auto ne = static_cast<std::size_t>(c.num_elements);
    const Index ndof = m * c.num_nodes;
    const auto total = static_cast<std::size_t>(m * m * nl * nl) * ne;
    std::vector<Index> ig(total), jg(total);
    std::vector<double> kg(total);
    std::size_t p = 0;
    for (int l = 0; l < m; ++l) {
        for (int n = 0; n < m; ++n) {
            for (int b = 0; b < nl; ++b) {
                for (int a = 0; a < nl; ++a) {
                    kernel.batched(l, a, n, b, std::span<double>(kg.data() + p * ne, ne));
                    const auto ma = c.row(a);
                    const auto mb = c.row(b);
                    for (std::size_t k = 0; k < ne; ++k) {
                        ig[p * ne + k] = m * ma[k] + l;
                        jg[p * ne + k] = m * mb[k] + n;
                    }
                    ++p;
                }
            }
        }
    }
    count_call(stats);
    return sparse_from_triplets(ndof, ndof, ig, jg, kg);
}

SparseMatrix assemble_vector_optv(const ConnectivityView& c, const VectorKernel& kernel,
                                  AssemblyStats* stats)
{
    const int m = kernel.components();
    const int nl = c.nodes_per_element;
    const Index ndof = m * c.num_nodes;
    SparseMatrix mat(ndof, ndof);
    std::vector<double> kg(static_cast<std::size_t>(c.num_elements));
    std::vector<Index> ig, jg;
    for (int l = 0; l < m; ++l) {
        for (int a = 0; a < nl; ++a) {
            dof_row(c.row(a), m, l, ig);
            for (int n = 0; n < m; ++n) {
                for (int b = 0; b < nl; ++b) {
                    kernel.batched(l, a, n, b, kg);
                    dof_row(c.row(b), m, n, jg);
                    count_call(stats);
                    mat = add(mat, sparse_from_triplets(ndof, ndof, ig, jg, kg));
                }
            }
        }
    }
    return mat;
}

SparseMatrix assemble_vector_optvs(const ConnectivityView& c, const VectorKernel& kernel,
                                   AssemblyStats* stats)
{
    if (!kernel.symmetric()) {
        throw Error(ErrorCode::contract_violation, "optvs requires a symmetric kernel");
    }
    const int m = kernel.components();
    const int nl = c.nodes_per_element;
    const Index ndof = m * c.num_nodes;
    SparseMatrix mat(ndof, ndof);
    std::vector<double> kg(static_cast<std::size_t>(c.num_elements));
    std::vector<Index> ig, jg;
    for (int l = 0; l < m; ++l) {
        for (int a = 0; a < nl; ++a) {
            dof_row(c.row(a), m, l, ig);
            const int ii = m * a + l;
            for (int n = 0; n < m; ++n) {
                for (int b = 0; b < nl; ++b) {
                    const int jj = m * b + n;
                    if (ii > jj) {
                        kernel.batched(l, a, n, b, kg);
                        dof_row(c.row(b), m, n, jg);
                        count_call(stats);
                        if (stats != nullptr) {
                            stats->pretranspose_pairs.emplace_back(ii, jj);
                        }
                        mat = add(mat, sparse_from_triplets(ndof, ndof, ig, jg, kg));
                    }
                }
            }
        }
    }
    mat = add(mat, transpose(mat));
    for (int l = 0; l < m; ++l) {
        for (int a = 0; a < nl; ++a) {
            dof_row(c.row(a), m, l, ig);
            kernel.batched(l, a, l, a, kg);
            count_call(stats);
            mat = add(mat, sparse_from_triplets(ndof, ndof, ig, ig, kg));
        }
    }
    return mat;
}

SparseMatrix assemble_vector(Variant v, const ConnectivityView& c, const VectorKernel& kernel,
                             AssemblyStats* stats)
{
    switch (v) {
    case Variant::base: return assemble_vector_base(c, kernel, stats);
    case Variant::optv1: return assemble_vector_optv1(c, kernel, stats);
    case Variant::optv2: return assemble_vector_optv2(c, kernel, stats);
    case Variant::optv: return assemble_vector_optv(c, kernel, stats);
    case Variant::optvs: return assemble_vector_optvs(c, kernel, stats);
    }
    throw Error(ErrorCode::invalid_argument, "unknown variant");
}

MassKernel::MassKernel(const Mesh& mesh, std::span<const double> nodal_weight)
    : mesh_(mesh), w_(gather_to_elements(mesh, nodal_weight))
{
}

void MassKernel::batched(int a, int b, std::span<double> out) const
{
    mass_kernel(a, b, mesh_.d, mesh_.vols, w_, out);
}

double MassKernel::single(int a, int b, Index k) const
{
    return mass_entry(a, b, mesh_.d, mesh_.vols[static_cast<std::size_t>(k)], w_, k);
}

StiffnessKernel::StiffnessKernel(const Mesh& mesh) : mesh_(mesh), g_(compute_gradients(mesh)) {}

void StiffnessKernel::batched(int a, int b, std::span<double> out) const
{
    stiffness_kernel(a, b, g_, mesh_.vols, out);
}

double StiffnessKernel::single(int a, int b, Index k) const
{
    return stiffness_entry(a, b, g_, mesh_.vols[static_cast<std::size_t>(k)], k);
}

ElasticKernel::ElasticKernel(const Mesh& mesh, std::span<const double> nodal_lambda,
                             std::span<const double> nodal_mu)
    : tables_(build_elastic_tables(mesh.d)), g_(compute_gradients(mesh)),
      lambs_(element_integrals(mesh, gather_to_elements(mesh, nodal_lambda))),
      mus_(element_integrals(mesh, gather_to_elements(mesh, nodal_mu)))
{
}

void ElasticKernel::batched(int l, int a, int n, int b, std::span<double> out) const
{
    elastic_kernel(l, a, n, b, tables_, g_, lambs_, mus_, out);
}

double ElasticKernel::single(int l, int a, int n, int b, Index k) const
{
    const auto i = static_cast<std::size_t>(k);
    return elastic_entry(l, a, n, b, tables_, g_, lambs_[i], mus_[i], k);
}

PkMassKernel::PkMassKernel(const PkMesh& mesh, const PkCoeffTable& coeffs) : mesh_(mesh)
{
    if (mesh.d != coeffs.d || mesh.k != coeffs.k || mesh.ndfe != coeffs.ndfe) {
        throw Error(ErrorCode::shape_mismatch,
                    "Pk coefficient table does not match the mesh dimension/order");
    }
    const double dfact = static_cast<double>(factorial(mesh.d));
    scaled_.resize(coeffs.c.size());
    for (std::size_t i = 0; i < coeffs.c.size(); ++i) {
        scaled_[i] = dfact * coeffs.c[i];
    }
}

void PkMassKernel::batched(int a, int b, std::span<double> out) const
{
    const double c = scaled_[static_cast<std::size_t>(a * mesh_.ndfe + b)];
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = c * mesh_.vols[k];
    }
}

double PkMassKernel::single(int a, int b, Index k) const
{
    return scaled_[static_cast<std::size_t>(a * mesh_.ndfe + b)] *
           mesh_.vols[static_cast<std::size_t>(k)];
}

SparseMatrix assemble_mass_pk(const PkMesh& mesh, const PkCoeffTable& coeffs, AssemblyStats* stats)
{
    const PkMassKernel kernel(mesh, coeffs);
    return assemble_optv2(mesh.connectivity(), kernel, stats);
}

namespace {

std::vector<double> sample_or_one(const Mesh& mesh, const PointFunction& f)
{
    if (!f) {
        return std::vector<double>(static_cast<std::size_t>(mesh.nq), 1.0);
    }
    return sample_at_vertices(mesh, f);
}

} // namespace

PreparedProblem::PreparedProblem(const Mesh& mesh, ProblemSpec spec)
    : mesh_(mesh), spec_(std::move(spec))
{
    switch (spec_.kind) {
    case MatrixKind::mass:
        weight_ = sample_or_one(mesh_, spec_.weight);
        break;
    case MatrixKind::stiffness:
        break;
    case MatrixKind::elastic:
        if (mesh_.d != 2 && mesh_.d != 3) {
            throw Error(ErrorCode::invalid_argument, "elastic matrix requires d = 2 or 3");
        }
        lambda_ = sample_or_one(mesh_, spec_.lambda);
        mu_ = sample_or_one(mesh_, spec_.mu);
        break;
    case MatrixKind::mass_pk:
        pk_coeffs_ = pk_mass_coeffs(mesh_.d, spec_.order);
        pk_mesh_ = build_pk_mesh(mesh_, spec_.order);
        break;
    }
}

Index PreparedProblem::ndof() const
{
    switch (spec_.kind) {
    case MatrixKind::elastic: return mesh_.d * mesh_.nq;
    case MatrixKind::mass_pk: return pk_mesh_->nq;
    default: return mesh_.nq;
    }
}

int PreparedProblem::local_dofs() const
{
    switch (spec_.kind) {
    case MatrixKind::elastic: return mesh_.d * (mesh_.d + 1);
    case MatrixKind::mass_pk: return pk_mesh_->ndfe;
    default: return mesh_.d + 1;
    }
}

SparseMatrix PreparedProblem::assemble(Variant v, AssemblyStats* stats) const
{
    switch (spec_.kind) {
    case MatrixKind::mass: {
        const MassKernel kernel(mesh_, weight_);
        return simplex_asm::assemble(v, mesh_.connectivity(), kernel, stats);
    }
    case MatrixKind::stiffness: {
        const StiffnessKernel kernel(mesh_);
        return simplex_asm::assemble(v, mesh_.connectivity(), kernel, stats);
    }
    case MatrixKind::elastic: {
        const ElasticKernel kernel(mesh_, lambda_, mu_);
        return assemble_vector(v, mesh_.connectivity(), kernel, stats);
    }
    case MatrixKind::mass_pk: {
        const PkMassKernel kernel(*pk_mesh_, *pk_coeffs_);
        return simplex_asm::assemble(v, pk_mesh_->connectivity(), kernel, stats);
    }
    }
    throw Error(ErrorCode::invalid_argument, "unknown matrix kind");
}

} // namespace simplex_asm
