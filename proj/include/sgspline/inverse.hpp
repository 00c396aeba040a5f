#pragma once

// Largest Rayleigh quotients of higher-order (semi)norms over the L2 norm on
// spline spaces whose low odd/even derivatives vanish at the boundary.

#include "sgspline/geometry.hpp"
#include "sgspline/sparse_index.hpp"

#include <Eigen/Dense>

namespace sgspline {

/// sqrt of the largest eigenvalue of A x = mu B x (B symmetric positive definite).
double max_pencil_ratio(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// max |u|_{H^q} / ||u||_{L2} over the q-vanishing subspace of S_{p,h_level}.
double univariate_inverse_ratio(int p, int q, int level);

/// Orthonormal coefficient basis, in S_{p,h_n}^d, of the span of the tensor q-vanishing
/// spaces over all combination levels.
Eigen::MatrixXd sparse_vanishing_basis(const LevelRule& rule, int q);

/// max ||u||_{H^q_mix} / ||u||_{L2} over the q-vanishing sparse space on (0,1)^d.
double sparse_inverse_ratio(const LevelRule& rule, int q);

/// max |u|_{H^1(Omega)} / ||u||_{L2(Omega)} over the push-forward of the q-vanishing sparse space.
double mapped_inverse_ratio(const LevelRule& rule, int q, const GeometryMap& map,
                            Execution exec = Execution::Parallel);

}  // namespace sgspline
