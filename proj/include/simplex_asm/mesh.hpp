#pragma once

#include "simplex_asm/error.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace simplex_asm {

/// Read-only view of an element-to-node map, shared by P1 and Pk meshes.
///
/// `me` is stored row-major with shape `nodes_per_element x num_elements`, so that
/// `me[a * num_elements + k]` is the a-th local node of element k.  Batched kernels walk
/// one row at a time.
struct ConnectivityView {
    Index num_nodes = 0;
    Index num_elements = 0;
    int nodes_per_element = 0;
    std::span<const Index> me;

    std::span<const Index> row(int a) const
    {
        return me.subspan(static_cast<std::size_t>(a) * static_cast<std::size_t>(num_elements),
                          static_cast<std::size_t>(num_elements));
    }
    Index at(int a, Index k) const { return me[static_cast<std::size_t>(a * num_elements + k)]; }
};

/// Simplicial mesh of dimension d.
///
/// Coordinates are stored `d x nq` row-major (`q[nu * nq + j]`), connectivity `(d+1) x nme`
/// row-major, volumes `1 x nme`.  All indices are zero-based.
struct Mesh {
    int d = 0;
    Index nq = 0;
    Index nme = 0;
    std::vector<double> q;
    std::vector<Index> me;
    std::vector<double> vols;

    double coord(int nu, Index j) const { return q[static_cast<std::size_t>(nu * nq + j)]; }
    Index vertex(int a, Index k) const { return me[static_cast<std::size_t>(a * nme + k)]; }

    ConnectivityView connectivity() const { return {nq, nme, d + 1, me}; }
};

/// Mesh carrying the Lagrange nodes of order k.  Local node order is the descending
/// lexicographic order of the multi-indices in E_d^k, see `lattice_multi_indices`.
struct PkMesh {
    int d = 0;
    int k = 0;
    int ndfe = 0;
    Index nq = 0;
    Index nme = 0;
    std::vector<double> q;
    std::vector<Index> me;
    std::vector<double> vols;

    double coord(int nu, Index j) const { return q[static_cast<std::size_t>(nu * nq + j)]; }
    Index node(int a, Index e) const { return me[static_cast<std::size_t>(a * nme + e)]; }

    ConnectivityView connectivity() const { return {nq, nme, ndfe, me}; }
};

/// Kuhn (Freudenthal) triangulation of [0,1]^d with n subdivisions per axis.
///
/// Vertices are numbered lexicographically with the first axis fastest; cells are visited in
/// the same order and each cell is split into d! simplices, one per axis permutation in
/// `std::next_permutation` order.
Mesh generate_hypercube_mesh(int d, Index n);

/// |det B_k| / d! for every element; throws `degenerate_simplex` naming the first offender.
std::vector<double> compute_volumes(int d, Index nq, std::span<const double> q,
                                    std::span<const Index> me, Index nme);

/// Checks index ranges, array shapes and stored volumes against the coordinates.
void validate(const Mesh& mesh);

/// Number of multi-indices of length d+1 summing to k, i.e. (d+k)! / (d! k!).
Index lattice_size(int d, int k);

/// All multi-indices of length d+1 summing to k, in descending lexicographic order.
/// For k = 1 this is e_0, e_1, ..., e_d, so local vertex order is preserved.
std::vector<std::vector<int>> lattice_multi_indices(int d, int k);

PkMesh build_pk_mesh(const Mesh& mesh, int k);

/// Text format: header `simplexmesh 1 <d> <nq> <nme>`, nq coordinate lines, nme
/// connectivity lines.  Volumes are recomputed on load.
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);

} // namespace simplex_asm
