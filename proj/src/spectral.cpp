#include "tqd/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace tqd {

int SpectralFrame::cluster_count() const {
    return cluster_ids.empty() ? 0 : cluster_ids.back() + 1;
}

int SpectralFrame::block_start(int block) const {
    int start = 0;
    for (int b = 0; b < block; ++b) start += block_sizes[b];
    return start;
}

Complex SpectralFrame::eigenvalue_of_column(int col) const {
    int start = 0;
    for (int b = 0; b < block_count(); ++b) {
        if (col < start + block_sizes[b]) return eigenvalues(b);
        start += block_sizes[b];
    }
    fail(ErrorCode::OutOfRange, "eigenvalue_of_column: column out of range");
}

int SpectralFrame::cluster_of_column(int col) const {
    int start = 0;
    for (int b = 0; b < block_count(); ++b) {
        if (col < start + block_sizes[b]) return cluster_ids[b];
        start += block_sizes[b];
    }
    fail(ErrorCode::OutOfRange, "cluster_of_column: column out of range");
}

Eigen::MatrixXcd SpectralFrame::jordan_form() const {
    const int n = dim2();
    Eigen::MatrixXcd j = Eigen::MatrixXcd::Zero(n, n);
    int start = 0;
    for (int b = 0; b < block_count(); ++b) {
        const int m = block_sizes[b];
        for (int k = 0; k < m; ++k) {
            j(start + k, start + k) = eigenvalues(b);
            if (k > 0) j(start + k - 1, start + k) = 1.0;
        }
        start += m;
    }
    return j;
}

std::vector<std::pair<int, int>> SpectralFrame::cluster_column_ranges() const {
    std::vector<std::pair<int, int>> ranges;
    int start = 0;
    for (int b = 0; b < block_count(); ++b) {
        if (b == 0 || cluster_ids[b] != cluster_ids[b - 1])
            ranges.emplace_back(start, 0);
        ranges.back().second += block_sizes[b];
        start += block_sizes[b];
    }
    return ranges;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Orthonormal basis of the numerical null space (singular values <= thr).
Eigen::MatrixXcd null_space(const Eigen::MatrixXcd& m, double thr) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int dim = 0;
    for (int i = static_cast<int>(sv.size()) - 1; i >= 0 && sv(i) <= thr; --i) ++dim;
    return svd.matrixV().rightCols(dim);
}

// Maximum-weight assignment of rows to columns (square weight matrix,
// -inf entries forbidden) by bitmask dynamic programming; n <= 20.
// Fast path: when every row has a dominant entry (at least twice the
// runner-up) and those entries form a permutation, that permutation is
// taken without running the DP.
std::vector<int> max_assignment(const Eigen::MatrixXd& w) {
    const int n = static_cast<int>(w.rows());
    const double neg = -std::numeric_limits<double>::infinity();
    {
        std::vector<int> greedy(static_cast<size_t>(n), -1);
        std::vector<bool> used(static_cast<size_t>(n), false);
        bool ok = true;
        for (int r = 0; r < n && ok; ++r) {
            double best = neg, second = neg;
            int arg = -1;
            for (int c = 0; c < n; ++c) {
                const double x = w(r, c);
                if (x > best) {
                    second = best;
                    best = x;
                    arg = c;
                } else if (x > second) {
                    second = x;
                }
            }
            if (arg < 0 || best == neg || used[static_cast<size_t>(arg)] ||
                !(second == neg || second <= 0.5 * best)) {
                ok = false;
                break;
            }
            used[static_cast<size_t>(arg)] = true;
            greedy[static_cast<size_t>(r)] = arg;
        }
        if (ok) return greedy;
    }
    std::vector<double> dp(size_t(1) << n, neg);
    std::vector<int> choice(size_t(1) << n, -1);
    dp[0] = 0.0;
    for (size_t mask = 1; mask < dp.size(); ++mask) {
        const int row = __builtin_popcountll(mask) - 1;
        for (int c = 0; c < n; ++c) {
            if (!(mask & (size_t(1) << c))) continue;
            const double prev = dp[mask ^ (size_t(1) << c)];
            if (prev == neg || w(row, c) == neg) continue;
            const double cand = prev + w(row, c);
            if (cand > dp[mask]) {
                dp[mask] = cand;
                choice[mask] = c;
            }
        }
    }
    size_t mask = dp.size() - 1;
    if (dp[mask] == neg)
        fail(ErrorCode::TrackingLost, "assignment: no structure-compatible matching");
    std::vector<int> col_of_row(n, -1);
    while (mask) {
        const int row = __builtin_popcountll(mask) - 1;
        const int c = choice[mask];
        col_of_row[row] = c;
        mask ^= size_t(1) << c;
    }
    return col_of_row;
}

struct RawCluster {
    Complex mean;
    double radius = 0.0;
    int multiplicity = 0;
};

std::vector<RawCluster> cluster_eigenvalues(const Eigen::VectorXcd& evs, double thr) {
    const int n = static_cast<int>(evs.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(evs(i) - evs(j)) <= thr) parent[find(i)] = find(j);
    std::vector<RawCluster> clusters;
    std::vector<int> root_to_cluster(n, -1);
    for (int i = 0; i < n; ++i) {
        const int r = find(i);
        if (root_to_cluster[r] < 0) {
            root_to_cluster[r] = static_cast<int>(clusters.size());
            clusters.push_back({});
        }
        auto& c = clusters[static_cast<size_t>(root_to_cluster[r])];
        c.mean += evs(i);
        c.multiplicity += 1;
    }
    for (auto& c : clusters) c.mean /= static_cast<double>(c.multiplicity);
    for (int i = 0; i < n; ++i) {
        auto& c = clusters[static_cast<size_t>(root_to_cluster[find(i)])];
        c.radius = std::max(c.radius, std::abs(evs(i) - c.mean));
    }
    std::sort(clusters.begin(), clusters.end(), [](const RawCluster& a, const RawCluster& b) {
        if (a.mean.real() != b.mean.real()) return a.mean.real() > b.mean.real();
        const double ia = std::abs(a.mean.imag()), ib = std::abs(b.mean.imag());
        if (ia != ib) return ia < ib;
        return a.mean.imag() < b.mean.imag();
    });
    return clusters;
}

struct Chain {
    std::vector<Eigen::VectorXcd> members; // bottom (eigenvector) first
};

// Pick a unit vector inside colspan(subspace) orthogonal to all constraint
// vectors; the smallest left-singular direction of the constraint matrix in
// subspace coordinates. Returns the achieved residual via out parameter.
Eigen::VectorXcd pick_complement_direction(const Eigen::MatrixXcd& subspace,
                                           const std::vector<Eigen::VectorXcd>& avoid,
                                           double& constraint_leak) {
    const int d = static_cast<int>(subspace.cols());
    Eigen::MatrixXcd k(d, std::max<size_t>(avoid.size(), 1));
    k.setZero();
    for (size_t i = 0; i < avoid.size(); ++i) {
        Eigen::VectorXcd c = subspace.adjoint() * avoid[i];
        const double nrm = avoid[i].norm();
        if (nrm > 0) c /= nrm;
        k.col(static_cast<int>(i)) = c;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(k, Eigen::ComputeFullU);
    const Eigen::VectorXcd y = svd.matrixU().col(d - 1);
    constraint_leak = (k.adjoint() * y).norm();
    return subspace * y;
}

std::vector<Chain> build_jordan_chains(const Eigen::MatrixXcd& l, const RawCluster& cluster,
                                       double scale) {
    const int n = static_cast<int>(l.rows());
    const int m = cluster.multiplicity;
    const Eigen::MatrixXcd nil =
        l - cluster.mean * Eigen::MatrixXcd::Identity(n, n);

    // Nullspace filtration of powers of (L - lambda).
    std::vector<Eigen::MatrixXcd> filtration; // filtration[k] = null(N^{k+1})
    std::vector<int> dims;
    Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(n, n);
    int p = 0;
    for (int k = 1; k <= m + 1; ++k) {
        power = (power * nil).eval();
        const double smax = std::max(power.norm(), 1e-300);
        const double thr = std::max({100.0 * n * kEps * smax, 4.0 * cluster.radius, 1e-9 * smax});
        Eigen::MatrixXcd ns = null_space(power, thr);
        filtration.push_back(ns);
        dims.push_back(static_cast<int>(ns.cols()));
        if (dims.back() >= m || (k > 1 && dims[k - 1] == dims[k - 2])) {
            p = k;
            break;
        }
    }
    if (dims.empty() || dims.back() < m)
        fail(ErrorCode::DefectiveBeyondTolerance,
             "spectral_frame: generalized eigenspace of lambda = (" +
                 std::to_string(cluster.mean.real()) + ", " +
                 std::to_string(cluster.mean.imag()) +
                 ") could not be resolved at the working tolerance");

    auto dim_at = [&](int k) { // dim null(N^k), k >= 0
        if (k <= 0) return 0;
        if (k > p) return dims.back();
        return dims[static_cast<size_t>(k - 1)];
    };

    std::vector<Chain> chains;
    std::vector<Eigen::VectorXcd> used;
    for (int s = p; s >= 1; --s) {
        const int blocks_ge_s = dim_at(s) - dim_at(s - 1);
        const int blocks_ge_s1 = dim_at(s + 1) - dim_at(s);
        const int count = blocks_ge_s - blocks_ge_s1;
        for (int b = 0; b < count; ++b) {
            std::vector<Eigen::VectorXcd> avoid = used;
            const Eigen::MatrixXcd& lower = filtration[static_cast<size_t>(
                std::max(0, s - 2))];
            if (s >= 2)
                for (int c = 0; c < lower.cols(); ++c) avoid.push_back(lower.col(c));
            double leak = 0.0;
            Eigen::VectorXcd top = pick_complement_direction(
                filtration[static_cast<size_t>(s - 1)], avoid, leak);
            if (leak > 0.5)
                fail(ErrorCode::DefectiveBeyondTolerance,
                     "spectral_frame: could not separate a Jordan chain top");
            Chain chain;
            chain.members.assign(static_cast<size_t>(s), Eigen::VectorXcd());
            chain.members[static_cast<size_t>(s - 1)] = top;
            for (int k = s - 1; k >= 1; --k)
                chain.members[static_cast<size_t>(k - 1)] =
                    nil * chain.members[static_cast<size_t>(k)];
            const Eigen::VectorXcd& bottom = chain.members.front();
            if (bottom.norm() <= 1e-10 ||
                (nil * bottom).norm() > kChainResidualTol * scale * bottom.norm())
                fail(ErrorCode::DefectiveBeyondTolerance,
                     "spectral_frame: chain bottom is not an eigenvector within tolerance");
            for (const auto& v : chain.members) used.push_back(v);
            chains.push_back(std::move(chain));
        }
    }
    std::stable_sort(chains.begin(), chains.end(), [](const Chain& a, const Chain& b) {
        return a.members.size() > b.members.size();
    });
    return chains;
}

void fix_chain_gauge(Chain& chain, GaugeEntry& entry) {
    Eigen::VectorXcd& bottom = chain.members.front();
    int anchor = 0;
    double best = -1.0;
    for (int i = 0; i < bottom.size(); ++i)
        if (std::abs(bottom(i)) > best) {
            best = std::abs(bottom(i));
            anchor = i;
        }
    if (best <= 0.0)
        fail(ErrorCode::FrameSingular, "spectral_frame: zero eigenvector");
    const Complex phase = bottom(anchor) / std::abs(bottom(anchor));
    const Complex scale = 1.0 / (bottom.norm() * phase);
    for (auto& v : chain.members) v *= scale;
    entry.anchor = anchor;
    entry.scale = scale;
}

} // namespace

SpectralFrame spectral_frame(const SuperMatrix& l, double cluster_tol) {
    require_square(l, "spectral_frame");
    const int n = static_cast<int>(l.rows());
    const double scale = std::max(1.0, l.norm());
    const double thr = cluster_tol * l.norm();

    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(l, false);
    if (schur.info() != Eigen::Success)
        fail(ErrorCode::NumericalFailure, "spectral_frame: Schur decomposition failed");
    const Eigen::VectorXcd evs = schur.matrixT().diagonal();
    const std::vector<RawCluster> clusters = cluster_eigenvalues(evs, thr);

    SpectralFrame frame;
    frame.right.resize(n, n);
    frame.eigenvalues.resize(n); // trimmed below
    int block_index = 0;
    int col = 0;
    std::vector<Complex> block_eigs;
    for (size_t ci = 0; ci < clusters.size(); ++ci) {
        const RawCluster& cluster = clusters[ci];
        const Eigen::MatrixXcd nil =
            l - cluster.mean * Eigen::MatrixXcd::Identity(n, n);
        const double smax = std::max(nil.norm(), 1e-300);
        const double rank_thr =
            std::max({100.0 * n * kEps * smax, 4.0 * cluster.radius, 1e-11 * smax});
        Eigen::MatrixXcd eigvecs = null_space(nil, rank_thr);
        std::vector<Chain> chains;
        if (eigvecs.cols() >= cluster.multiplicity) {
            // Diagonalizable cluster: the m least-dominant null directions.
            for (int k = 0; k < cluster.multiplicity; ++k) {
                Chain c;
                c.members.push_back(
                    eigvecs.col(eigvecs.cols() - cluster.multiplicity + k));
                chains.push_back(std::move(c));
            }
        } else {
            chains = build_jordan_chains(l, cluster, scale);
        }
        int placed = 0;
        for (auto& chain : chains) {
            GaugeEntry entry;
            fix_chain_gauge(chain, entry);
            for (const auto& member : chain.members) frame.right.col(col++) = member;
            frame.block_sizes.push_back(static_cast<int>(chain.members.size()));
            frame.cluster_ids.push_back(static_cast<int>(ci));
            frame.gauge.push_back(entry);
            block_eigs.push_back(cluster.mean);
            placed += static_cast<int>(chain.members.size());
            ++block_index;
        }
        if (placed != cluster.multiplicity)
            fail(ErrorCode::DefectiveBeyondTolerance,
                 "spectral_frame: chain sizes do not fill the cluster multiplicity");
    }
    frame.eigenvalues =
        Eigen::Map<Eigen::VectorXcd>(block_eigs.data(), static_cast<long>(block_eigs.size()));

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(frame.right);
    const double smin = svd.singularValues()(n - 1);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > kMaxFrameCondition)
        fail(ErrorCode::FrameSingular,
             "spectral_frame: eigenvector matrix condition number exceeds 1e12");
    frame.left = frame.right.inverse();
    if ((frame.left * frame.right - Eigen::MatrixXcd::Identity(n, n)).norm() > 1e-9)
        fail(ErrorCode::FrameSingular, "spectral_frame: biorthonormality failed");

    // Chain relation residual gate on every column.
    int start = 0;
    for (int b = 0; b < frame.block_count(); ++b) {
        for (int k = 0; k < frame.block_sizes[b]; ++k) {
            Eigen::VectorXcd r = l * frame.right.col(start + k) -
                                 frame.eigenvalues(b) * frame.right.col(start + k);
            if (k > 0) r -= frame.right.col(start + k - 1);
            if (r.norm() > kChainResidualTol * scale *
                               std::max(1.0, frame.right.col(start + k).norm()))
                fail(ErrorCode::DefectiveBeyondTolerance,
                     "spectral_frame: chain relation residual exceeds tolerance");
        }
        start += frame.block_sizes[b];
    }
    return frame;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> similarity(const SpectralFrame& frame) {
    const int n = frame.dim2();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(frame.right);
    const double smin = svd.singularValues()(n - 1);
    if (!(smin > 0.0) || svd.singularValues()(0) / smin > kMaxFrameCondition)
        fail(ErrorCode::FrameSingular, "similarity: frame condition number exceeds 1e12");
    return {frame.right, frame.left};
}

namespace {

bool same_structure(const SpectralFrame& a, const SpectralFrame& b) {
    if (a.block_count() != b.block_count()) return false;
    if (a.cluster_count() != b.cluster_count()) return false;
    auto sizes = [](const SpectralFrame& f) {
        std::vector<int> s = f.block_sizes;
        std::sort(s.begin(), s.end());
        return s;
    };
    auto cluster_cols = [](const SpectralFrame& f) {
        std::vector<int> s;
        for (auto [start, size] : f.cluster_column_ranges()) s.push_back(size);
        std::sort(s.begin(), s.end());
        return s;
    };
    return sizes(a) == sizes(b) && cluster_cols(a) == cluster_cols(b);
}

} // namespace

SpectralFrame align_frame_to(const SpectralFrame& reference, SpectralFrame frame,
                             AlignmentMode mode, double min_overlap) {
    if (!same_structure(reference, frame))
        fail(ErrorCode::DegeneracyCrossing,
             "align_frame_to: block/cluster structure changed between frames");
    const int nb = reference.block_count();
    const double neg = -std::numeric_limits<double>::infinity();
    Eigen::MatrixXd w(nb, nb);
    for (int a = 0; a < nb; ++a) {
        const int ra = reference.block_start(a);
        for (int b = 0; b < nb; ++b) {
            if (reference.block_sizes[a] != frame.block_sizes[b]) {
                w(a, b) = neg;
                continue;
            }
            // Bilinear pairing (no conjugation): rows of left are duals.
            w(a, b) = std::abs(
                (reference.left.row(ra) * frame.right.col(frame.block_start(b))).value());
        }
    }
    std::vector<int> match = max_assignment(w);
    // Per-block overlap is only meaningful for blocks alone in their
    // cluster; inside a degenerate cluster the eigenbasis is arbitrary, so
    // those blocks are gated at the cluster-subspace level further down.
    std::vector<int> cluster_blocks(static_cast<size_t>(reference.cluster_count()), 0);
    for (int b = 0; b < nb; ++b)
        ++cluster_blocks[static_cast<size_t>(reference.cluster_ids[static_cast<size_t>(b)])];
    for (int a = 0; a < nb; ++a) {
        const int cid = reference.cluster_ids[static_cast<size_t>(a)];
        if (cluster_blocks[static_cast<size_t>(cid)] == 1 && w(a, match[a]) < min_overlap)
            fail(ErrorCode::TrackingLost,
                 "align_frame_to: best-assignment overlap " +
                     std::to_string(w(a, match[a])) + " below " +
                     std::to_string(min_overlap));
    }

    // Blocks of the same reference cluster must still share a cluster in the
    // new frame, and distinct clusters must stay distinct.
    for (int a = 0; a < nb; ++a)
        for (int b = 0; b < nb; ++b) {
            const bool ref_same = reference.cluster_ids[a] == reference.cluster_ids[b];
            const bool new_same =
                frame.cluster_ids[match[a]] == frame.cluster_ids[match[b]];
            if (ref_same != new_same)
                fail(ErrorCode::DegeneracyCrossing,
                     "align_frame_to: eigenvalue clusters merged or split between frames");
        }

    SpectralFrame out;
    out.t = frame.t;
    const int n = frame.dim2();
    out.right.resize(n, n);
    out.left.resize(n, n);
    out.eigenvalues.resize(nb);
    out.block_sizes.resize(static_cast<size_t>(nb));
    out.cluster_ids = reference.cluster_ids;
    out.gauge.resize(static_cast<size_t>(nb));
    int col = 0;
    for (int a = 0; a < nb; ++a) {
        const int b = match[a];
        const int src = frame.block_start(b);
        const int m = frame.block_sizes[b];
        out.block_sizes[static_cast<size_t>(a)] = m;
        out.eigenvalues(a) = frame.eigenvalues(b);
        out.gauge[static_cast<size_t>(a)] = frame.gauge[static_cast<size_t>(b)];
        out.right.middleCols(col, m) = frame.right.middleCols(src, m);
        out.left.middleRows(col, m) = frame.left.middleRows(src, m);
        col += m;
    }

    // Subspace gate for multi-block clusters: the spanned invariant
    // subspace must still project onto the reference one.
    {
        const auto ranges = out.cluster_column_ranges();
        for (int c = 0; c < out.cluster_count(); ++c) {
            if (cluster_blocks[static_cast<size_t>(c)] < 2) continue;
            const auto [start, size] = ranges[static_cast<size_t>(c)];
            const Eigen::MatrixXcd g = reference.left.middleRows(start, size) *
                                       out.right.middleCols(start, size);
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
            if (svd.singularValues()(size - 1) < 0.5 * min_overlap)
                fail(ErrorCode::TrackingLost,
                     "align_frame_to: degenerate-cluster subspace overlap " +
                         std::to_string(svd.singularValues()(size - 1)) + " below " +
                         std::to_string(0.5 * min_overlap));
        }
    }

    if (mode == AlignmentMode::pin_gauge) {
        for (auto [start, size] : out.cluster_column_ranges()) {
            bool all_simple = true;
            int b0 = 0, blocks_in = 0;
            {
                int s = 0;
                for (int b = 0; b < nb; ++b) {
                    if (s == start) b0 = b;
                    if (s >= start && s < start + size) {
                        ++blocks_in;
                        if (out.block_sizes[static_cast<size_t>(b)] != 1)
                            all_simple = false;
                    }
                    s += out.block_sizes[static_cast<size_t>(b)];
                }
            }
            if (all_simple && size > 1) {
                const Eigen::MatrixXcd g = reference.left.middleRows(start, size) *
                                           out.right.middleCols(start, size);
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
                if (svd.singularValues()(size - 1) < 0.1)
                    fail(ErrorCode::TrackingLost,
                         "align_frame_to: degenerate-cluster alignment is near singular");
                out.right.middleCols(start, size) =
                    (out.right.middleCols(start, size) * g.inverse()).eval();
            } else {
                int s = start;
                for (int b = b0; b < b0 + blocks_in; ++b) {
                    const Complex ov =
                        (reference.left.row(s) * out.right.col(s)).value();
                    if (std::abs(ov) < 1e-3)
                        fail(ErrorCode::TrackingLost,
                             "align_frame_to: gauge pin overlap vanishes");
                    const int m = out.block_sizes[static_cast<size_t>(b)];
                    out.right.middleCols(s, m) /= ov;
                    s += m;
                }
            }
        }
        out.left = out.right.inverse();
    }
    return out;
}

FramePath track_frames(const DrivingProtocol& protocol, const HermitianBasis& basis,
                       const std::vector<double>& grid, double cluster_tol) {
    protocol.validate("track_frames");
    if (grid.empty())
        fail(ErrorCode::ConfigInvalid, "track_frames: empty grid");
    for (size_t k = 0; k < grid.size(); ++k) {
        protocol.require_time(grid[k]);
        if (k > 0 && !(grid[k] > grid[k - 1]))
            fail(ErrorCode::ConfigInvalid, "track_frames: grid must increase strictly");
    }
    FramePath path;
    path.protocol = protocol;
    path.basis = basis;
    path.cluster_tol = cluster_tol;
    path.times = grid;
    path.frames.reserve(grid.size());
    for (size_t k = 0; k < grid.size(); ++k) {
        SuperMatrix l = supermatrix(protocol.generator(grid[k]), basis);
        SpectralFrame raw = spectral_frame(l, cluster_tol);
        raw.t = grid[k];
        if (k == 0) {
            path.frames.push_back(std::move(raw));
            continue;
        }
        try {
            path.frames.push_back(align_frame_to(path.frames.back(), std::move(raw),
                                                 AlignmentMode::permute_only));
        } catch (const Error& e) {
            fail(e.code(), std::string(e.what()) + " at t = " + std::to_string(grid[k]));
        }
    }
    return path;
}

Operator steady_state(const SuperMatrix& l, const HermitianBasis& basis) {
    require_square(l, "steady_state");
    if (l.rows() != basis.size())
        fail(ErrorCode::DimensionMismatch, "steady_state: basis size mismatch");
    const double scale = std::max(1.0, l.norm());
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(l);
    if (es.info() != Eigen::Success)
        fail(ErrorCode::NumericalFailure, "steady_state: eigensolver failed");
    const double zero_thr = 1e-9 * scale;
    int zero_count = 0;
    for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (std::abs(es.eigenvalues()(i)) <= zero_thr) ++zero_count;
    if (zero_count == 0)
        fail(ErrorCode::NotAGenerator, "steady_state: no zero eigenvalue found");
    if (zero_count > 1)
        fail(ErrorCode::NonUniqueSteadyState,
             "steady_state: zero eigenvalue multiplicity " + std::to_string(zero_count));
    const Eigen::MatrixXcd ns = null_space(l, zero_thr);
    if (ns.cols() != 1)
        fail(ErrorCode::NumericalFailure, "steady_state: null space extraction failed");
    Operator rho = devectorize(ns.col(0), basis);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const double tr = rho.trace().real();
    if (std::abs(tr) < 1e-10)
        fail(ErrorCode::NotAGenerator, "steady_state: fixed point has vanishing trace");
    rho /= tr;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> saes(rho);
    if (saes.eigenvalues().minCoeff() < -1e-9)
        fail(ErrorCode::InvalidState,
             "steady_state: fixed point has a negative eigenvalue beyond tolerance");
    return rho;
}

} // namespace tqd
