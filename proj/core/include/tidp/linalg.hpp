#pragma once

#include <vector>

#include "tidp/matrix.hpp"

namespace tidp::linalg {

/// Least-squares solution of A x = b via Householder QR. A is n x p with
/// n >= p. Throws SingularityError naming column `names[j]` (or "#j") when
/// the R diagonal collapses at column j.
std::vector<double> solve_least_squares(const Dense2D& a, const std::vector<double>& b,
                                        const std::vector<std::string>* names = nullptr);

/// Orthonormalizes the columns of `m` in place (modified Gram-Schmidt).
/// Columns that vanish are replaced with zero; returns the retained rank.
int orthonormalize_columns(Dense2D& m);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are sorted descending; `vectors` columns are the matching
/// eigenvectors.
void symmetric_eigen(const Dense2D& sym, std::vector<double>& values, Dense2D& vectors);

double dot(const double* a, const double* b, int n);

}  // namespace tidp::linalg
