#pragma once

#include <utility>
#include <vector>

#include "tqd/liouvillian.hpp"

namespace tqd {

// Phase/normalization fixing applied to a block (see spectral_frame).
struct GaugeEntry {
    int anchor = -1;      // component index made real positive
    Complex scale = 1.0;  // factor applied to the whole chain
};

// Spectral decomposition of a (generally non-normal) supermatrix at one
// time: L = C L_J C^{-1} with L_J upper-bidiagonal Jordan blocks. Columns
// of `right` are right quasi-eigenvectors in (block, height) order with
// the height-0 member an exact eigenvector; rows of `left` are the
// biorthonormal duals. Blocks sharing an eigenvalue within the clustering
// tolerance are grouped into contiguous clusters.
struct SpectralFrame {
    double t = 0.0;
    Eigen::VectorXcd eigenvalues;     // one entry per block
    std::vector<int> block_sizes;     // sum equals the matrix dimension
    std::vector<int> cluster_ids;     // per block, non-decreasing
    Eigen::MatrixXcd right;           // C
    Eigen::MatrixXcd left;            // C^{-1}
    std::vector<GaugeEntry> gauge;

    int dim2() const { return static_cast<int>(right.rows()); }
    int block_count() const { return static_cast<int>(block_sizes.size()); }
    int cluster_count() const;
    int block_start(int block) const;
    Complex eigenvalue_of_column(int col) const;
    int cluster_of_column(int col) const;
    Eigen::MatrixXcd jordan_form() const;
    // Contiguous (start, size) column ranges, one per cluster.
    std::vector<std::pair<int, int>> cluster_column_ranges() const;
};

// Frames on a time grid plus the context needed to refine them locally.
struct FramePath {
    DrivingProtocol protocol;
    HermitianBasis basis;
    double cluster_tol = 0.0;
    std::vector<double> times;
    std::vector<SpectralFrame> frames;
};

// Relative eigenvalue clustering tolerance (threshold = tol * ||L||_F).
inline constexpr double kDefaultClusterTol = 1e-8;
inline constexpr double kChainResidualTol = 1e-6;
inline constexpr double kMaxFrameCondition = 1e12;

// Decompose a raw square complex matrix. Throws frame-singular when the
// eigenvector matrix is ill-conditioned and defective-beyond-tolerance when
// no chain set meets the residual gate.
SpectralFrame spectral_frame(const SuperMatrix& l, double cluster_tol = kDefaultClusterTol);

// (C, C^{-1}) with a condition-number gate.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> similarity(const SpectralFrame& frame);

enum class AlignmentMode {
    permute_only, // reorder blocks to match the reference, keep per-frame gauge
    pin_gauge,    // additionally pin scales/cluster mixing to the reference
};

// Reorder (and optionally regauge) `frame` so its blocks correspond to the
// reference frame's blocks under maximal total overlap. Throws
// degeneracy-crossing when the block structures differ and tracking-lost
// when the best assignment leaves an overlap below min_overlap.
SpectralFrame align_frame_to(const SpectralFrame& reference, SpectralFrame frame,
                             AlignmentMode mode, double min_overlap = 0.9);

// Frames along a grid inside the protocol span, consecutive frames aligned
// by maximal-overlap assignment.
FramePath track_frames(const DrivingProtocol& protocol, const HermitianBasis& basis,
                       const std::vector<double>& grid,
                       double cluster_tol = kDefaultClusterTol);

// Unique trace-one Hermitian fixed point of a generator supermatrix.
Operator steady_state(const SuperMatrix& l, const HermitianBasis& basis);

} // namespace tqd
