#include "simplex_asm/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <unordered_map>

namespace simplex_asm {

namespace {

Index checked_mul(Index a, Index b, const char* what)
{
    Index r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw Error(ErrorCode::capacity, std::string("index range exceeded computing ") + what);
    }
    return r;
}

Index checked_pow(Index base, int e, const char* what)
{
    Index r = 1;
    for (int i = 0; i < e; ++i) {
        r = checked_mul(r, base, what);
    }
    return r;
}

// Hadamard bound scaled by ~1e3 ulp; below it the simplex is treated as flat.
constexpr double kDegenerateRelTol = 1e-13;

} // namespace

std::vector<double> compute_volumes(int d, Index nq, std::span<const double> q,
                                    std::span<const Index> me, Index nme)
{
    if (d < 1) {
        throw Error(ErrorCode::invalid_argument, "dimension must be >= 1");
    }
    double dfact = 1.0;
    for (int i = 2; i <= d; ++i) {
        dfact *= i;
    }
    std::vector<double> vols(static_cast<std::size_t>(nme));
    Eigen::MatrixXd b(d, d);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(d);
    for (Index k = 0; k < nme; ++k) {
        const Index v0 = me[static_cast<std::size_t>(k)];
        double bound = 1.0;
        for (int i = 0; i < d; ++i) {
            const Index vi = me[static_cast<std::size_t>((i + 1) * nme + k)];
            for (int nu = 0; nu < d; ++nu) {
                b(nu, i) = q[static_cast<std::size_t>(nu * nq + vi)] -
                           q[static_cast<std::size_t>(nu * nq + v0)];
            }
            bound *= b.col(i).norm();
        }
        lu.compute(b);
        const double det = lu.determinant();
        if (!(std::abs(det) > kDegenerateRelTol * bound)) {
            throw Error(ErrorCode::degenerate_simplex,
                        "degenerate simplex at element " + std::to_string(k));
        }
        vols[static_cast<std::size_t>(k)] = std::abs(det) / dfact;
    }
    return vols;
}

Mesh generate_hypercube_mesh(int d, Index n)
{
    if (d < 1 || n < 1) {
        throw Error(ErrorCode::invalid_argument, "hypercube mesh requires d >= 1 and n >= 1");
    }
    Index dfact = 1;
    for (int i = 2; i <= d; ++i) {
        dfact = checked_mul(dfact, i, "d!");
    }
    Mesh mesh;
    mesh.d = d;
    mesh.nq = checked_pow(n + 1, d, "vertex count");
    const Index ncells = checked_pow(n, d, "cell count");
    mesh.nme = checked_mul(ncells, dfact, "element count");
    checked_mul(mesh.nme, d + 1, "connectivity size");
    checked_mul(mesh.nq, d, "coordinate size");

    mesh.q.resize(static_cast<std::size_t>(mesh.nq * d));
    std::vector<Index> stride(static_cast<std::size_t>(d));
    {
        Index s = 1;
        for (int nu = 0; nu < d; ++nu) {
            stride[static_cast<std::size_t>(nu)] = s;
            s *= n + 1;
        }
    }
    for (Index j = 0; j < mesh.nq; ++j) {
        Index rem = j;
        for (int nu = 0; nu < d; ++nu) {
            const Index c = rem % (n + 1);
            rem /= n + 1;
            mesh.q[static_cast<std::size_t>(nu * mesh.nq + j)] =
                static_cast<double>(c) / static_cast<double>(n);
        }
    }

    mesh.me.resize(static_cast<std::size_t>(mesh.nme * (d + 1)));
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::vector<Index> cell(static_cast<std::size_t>(d));
    Index k = 0;
    for (Index c = 0; c < ncells; ++c) {
        Index rem = c;
        Index base = 0;
        for (int nu = 0; nu < d; ++nu) {
            cell[static_cast<std::size_t>(nu)] = rem % n;
            rem /= n;
            base += cell[static_cast<std::size_t>(nu)] * stride[static_cast<std::size_t>(nu)];
        }
        std::iota(perm.begin(), perm.end(), 0);
        do {
            Index v = base;
            mesh.me[static_cast<std::size_t>(k)] = v;
            for (int i = 0; i < d; ++i) {
                v += stride[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
                mesh.me[static_cast<std::size_t>((i + 1) * mesh.nme + k)] = v;
            }
            ++k;
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    mesh.vols = compute_volumes(d, mesh.nq, mesh.q, mesh.me, mesh.nme);
    return mesh;
}

void validate(const Mesh& mesh)
{
    if (mesh.d < 1) {
        throw Error(ErrorCode::invalid_argument, "mesh dimension must be >= 1");
    }
    if (mesh.q.size() != static_cast<std::size_t>(mesh.d * mesh.nq) ||
        mesh.me.size() != static_cast<std::size_t>((mesh.d + 1) * mesh.nme) ||
        mesh.vols.size() != static_cast<std::size_t>(mesh.nme)) {
        throw Error(ErrorCode::shape_mismatch, "mesh array sizes do not match d, nq, nme");
    }
    for (std::size_t i = 0; i < mesh.me.size(); ++i) {
        if (mesh.me[i] < 0 || mesh.me[i] >= mesh.nq) {
            throw Error(ErrorCode::index_out_of_range,
                        "connectivity entry " + std::to_string(mesh.me[i]) + " at element " +
                            std::to_string(static_cast<Index>(i) % std::max<Index>(mesh.nme, 1)) +
                            " is outside [0, " + std::to_string(mesh.nq) + ")");
        }
    }
    for (Index k = 0; k < mesh.nme; ++k) {
        if (!(mesh.vols[static_cast<std::size_t>(k)] > 0.0)) {
            throw Error(ErrorCode::degenerate_simplex,
                        "non-positive volume at element " + std::to_string(k));
        }
    }
    const auto fresh = compute_volumes(mesh.d, mesh.nq, mesh.q, mesh.me, mesh.nme);
    for (Index k = 0; k < mesh.nme; ++k) {
        const double stored = mesh.vols[static_cast<std::size_t>(k)];
        const double expect = fresh[static_cast<std::size_t>(k)];
        if (std::abs(stored - expect) > 1e-14 * expect) {
            throw Error(ErrorCode::invalid_argument,
                        "stored volume disagrees with coordinates at element " + std::to_string(k));
        }
    }
}

Index lattice_size(int d, int k)
{
    // C(d+k, k) computed incrementally; exact at every step.
    Index r = 1;
    for (int i = 1; i <= k; ++i) {
        r = checked_mul(r, d + i, "lattice size") / i;
    }
    return r;
}

std::vector<std::vector<int>> lattice_multi_indices(int d, int k)
{
    if (d < 1 || k < 0) {
        throw Error(ErrorCode::invalid_argument, "lattice requires d >= 1 and k >= 0");
    }
    std::vector<std::vector<int>> out;
    std::vector<int> alpha(static_cast<std::size_t>(d + 1), 0);
    // Depth-first with the largest leading entry first gives descending lexicographic order.
    auto recurse = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == d) {
            alpha[static_cast<std::size_t>(pos)] = remaining;
            out.push_back(alpha);
            return;
        }
        for (int a = remaining; a >= 0; --a) {
            alpha[static_cast<std::size_t>(pos)] = a;
            self(self, pos + 1, remaining - a);
        }
    };
    recurse(recurse, 0, k);
    return out;
}

namespace {

using LatticeKey = std::vector<std::pair<Index, int>>;

struct LatticeKeyHash {
    std::size_t operator()(const LatticeKey& key) const noexcept
    {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (const auto& [v, a] : key) {
            h ^= std::hash<Index>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h ^= std::hash<int>{}(a) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

} // namespace

PkMesh build_pk_mesh(const Mesh& mesh, int k)
{
    if (k < 1) {
        throw Error(ErrorCode::invalid_argument, "polynomial order must be >= 1");
    }
    const int d = mesh.d;
    const auto lattice = lattice_multi_indices(d, k);

    PkMesh pk;
    pk.d = d;
    pk.k = k;
    pk.ndfe = static_cast<int>(lattice.size());
    pk.nme = mesh.nme;
    pk.vols = mesh.vols;
    pk.me.resize(static_cast<std::size_t>(pk.ndfe) * static_cast<std::size_t>(mesh.nme));

    // Vertices keep their ids; interior lattice nodes are appended in first-seen order.
    std::vector<std::vector<double>> extra;
    std::unordered_map<LatticeKey, Index, LatticeKeyHash> ids;
    LatticeKey key;
    Index next = mesh.nq;

    for (Index e = 0; e < mesh.nme; ++e) {
        for (int a = 0; a < pk.ndfe; ++a) {
            const auto& alpha = lattice[static_cast<std::size_t>(a)];
            key.clear();
            for (int i = 0; i <= d; ++i) {
                if (alpha[static_cast<std::size_t>(i)] > 0) {
                    key.emplace_back(mesh.vertex(i, e), alpha[static_cast<std::size_t>(i)]);
                }
            }
            Index id = 0;
            if (key.size() == 1) {
                id = key.front().first;
            } else {
                std::sort(key.begin(), key.end());
                auto [it, inserted] = ids.try_emplace(key, next);
                if (inserted) {
                    std::vector<double> x(static_cast<std::size_t>(d), 0.0);
                    for (const auto& [v, w] : key) {
                        for (int nu = 0; nu < d; ++nu) {
                            x[static_cast<std::size_t>(nu)] +=
                                static_cast<double>(w) * mesh.coord(nu, v);
                        }
                    }
                    for (auto& xi : x) {
                        xi /= static_cast<double>(k);
                    }
                    extra.push_back(std::move(x));
                    ++next;
                }
                id = it->second;
            }
            pk.me[static_cast<std::size_t>(a * mesh.nme + e)] = id;
        }
    }

    pk.nq = next;
    pk.q.resize(static_cast<std::size_t>(d * pk.nq));
    for (int nu = 0; nu < d; ++nu) {
        for (Index j = 0; j < mesh.nq; ++j) {
            pk.q[static_cast<std::size_t>(nu * pk.nq + j)] = mesh.coord(nu, j);
        }
        for (std::size_t j = 0; j < extra.size(); ++j) {
            pk.q[static_cast<std::size_t>(nu * pk.nq + mesh.nq) + j] =
                extra[j][static_cast<std::size_t>(nu)];
        }
    }
    return pk;
}

namespace {

std::vector<std::string> split_tokens(const std::string& line)
{
    std::istringstream in(line);
    std::vector<std::string> toks;
    std::string t;
    while (in >> t) {
        toks.push_back(t);
    }
    return toks;
}

bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno)
{
    while (std::getline(in, line)) {
        ++lineno;
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos != std::string::npos && line[pos] != '#') {
            return true;
        }
    }
    return false;
}

template <typename T>
T parse_number(const std::string& tok, std::size_t lineno)
{
    std::istringstream in(tok);
    T value{};
    in >> value;
    if (in.fail() || !in.eof()) {
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(lineno) + ": cannot parse '" + tok + "'");
    }
    return value;
}

} // namespace

Mesh read_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open mesh file " + path.string());
    }
    std::string line;
    std::size_t lineno = 0;
    if (!next_content_line(in, line, lineno)) {
        throw Error(ErrorCode::parse_error, "empty mesh file");
    }
    const auto header = split_tokens(line);
    if (header.size() != 5 || header[0] != "simplexmesh") {
        throw Error(ErrorCode::parse_error, "malformed header: expected 'simplexmesh 1 d nq nme'");
    }
    if (parse_number<int>(header[1], lineno) != 1) {
        throw Error(ErrorCode::parse_error, "unsupported mesh format version " + header[1]);
    }
    Mesh mesh;
    mesh.d = parse_number<int>(header[2], lineno);
    mesh.nq = parse_number<Index>(header[3], lineno);
    mesh.nme = parse_number<Index>(header[4], lineno);
    if (mesh.d < 1 || mesh.nq < 0 || mesh.nme < 0) {
        throw Error(ErrorCode::parse_error, "malformed header: invalid sizes");
    }
    const int d = mesh.d;
    mesh.q.resize(static_cast<std::size_t>(d * mesh.nq));
    for (Index j = 0; j < mesh.nq; ++j) {
        if (!next_content_line(in, line, lineno)) {
            throw Error(ErrorCode::parse_error, "unexpected end of file in coordinates");
        }
        const auto toks = split_tokens(line);
        if (toks.size() != static_cast<std::size_t>(d)) {
            throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) +
                                                    ": dimension mismatch, expected " +
                                                    std::to_string(d) + " coordinates");
        }
        for (int nu = 0; nu < d; ++nu) {
            mesh.q[static_cast<std::size_t>(nu * mesh.nq + j)] =
                parse_number<double>(toks[static_cast<std::size_t>(nu)], lineno);
        }
    }
    mesh.me.resize(static_cast<std::size_t>((d + 1) * mesh.nme));
    for (Index k = 0; k < mesh.nme; ++k) {
        if (!next_content_line(in, line, lineno)) {
            throw Error(ErrorCode::parse_error, "unexpected end of file in connectivity");
        }
        const auto toks = split_tokens(line);
        if (toks.size() != static_cast<std::size_t>(d + 1)) {
            throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) +
                                                    ": dimension mismatch, expected " +
                                                    std::to_string(d + 1) + " vertex ids");
        }
        for (int a = 0; a <= d; ++a) {
            const auto v = parse_number<Index>(toks[static_cast<std::size_t>(a)], lineno);
            if (v < 0 || v >= mesh.nq) {
                throw Error(ErrorCode::index_out_of_range,
                            "line " + std::to_string(lineno) + ": vertex id " + std::to_string(v) +
                                " outside [0, " + std::to_string(mesh.nq) + ")");
            }
            mesh.me[static_cast<std::size_t>(a * mesh.nme + k)] = v;
        }
    }
    if (next_content_line(in, line, lineno)) {
        throw Error(ErrorCode::parse_error, "line " + std::to_string(lineno) + ": trailing data");
    }
    mesh.vols = compute_volumes(d, mesh.nq, mesh.q, mesh.me, mesh.nme);
    return mesh;
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCode::io_error, "cannot write mesh file " + path.string());
    }
    out << "simplexmesh 1 " << mesh.d << ' ' << mesh.nq << ' ' << mesh.nme << '\n';
    out.precision(17);
    for (Index j = 0; j < mesh.nq; ++j) {
        for (int nu = 0; nu < mesh.d; ++nu) {
            out << (nu ? " " : "") << mesh.coord(nu, j);
        }
        out << '\n';
    }
    for (Index k = 0; k < mesh.nme; ++k) {
        for (int a = 0; a <= mesh.d; ++a) {
            out << (a ? " " : "") << mesh.vertex(a, k);
        }
        out << '\n';
    }
    if (!out) {
        throw Error(ErrorCode::io_error, "write failed for " + path.string());
    }
}

} // namespace simplex_asm
