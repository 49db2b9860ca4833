#pragma once

#include <span>
#include <vector>

#include "randblock/model.hpp"
#include "randblock/types.hpp"

// Transfer matrices, matrix-valued solutions of the block three-term
// recursion, the modified Wronskian and the block Green function.
//
// Convention: inside this module a finite chain of length L is extended by
// S_0 = S_L = I, so every site k = 1..L has a left hopping block S_{k-1} and
// a right hopping block S_k. M_L itself only depends on S_1..S_{L-1}.

namespace randblock {

/// 2l x 2l modified transfer matrix at one site:
/// [[0, S_{k-1}^{-1}], [-S_{k-1}^t, (V_k - E) S_{k-1}^{-1}]].
/// It maps (u(k-1), S_{k-1} u(k)) to (u(k), S_k u(k+1)).
struct TransferMatrix {
  CMat entries;
  cplx energy;
  int site = 0;
};

TransferMatrix transfer_matrix(const Mat& V, const Mat& S_prev, cplx E, int site = 0);

/// The standard symplectic form J = [[0, I], [-I, 0]] of size 2l.
Mat symplectic_form(int ell);
/// max-abs of A^t J A - J (transpose, not adjoint: holds for complex E too).
double symplectic_defect(const CMat& A);

/// The hopping block S_k with S_0 = S_L = I, k = 0..L.
Mat hopping(const BlockJacobiMatrix& M, int k);

/// Transfer matrices A_1..A_L of M at energy E.
std::vector<TransferMatrix> transfer_matrices(const BlockJacobiMatrix& M, cplx E);

/// States (u(k), S_k u(k+1)) for k = 0..size(transfers), starting from
/// `initial` = (u(0), S_0 u(1)).
std::vector<CVec> propagate(const CVec& initial, std::span<const TransferMatrix> transfers);

/// Recovers u(0..L+1) from the propagated states.
std::vector<CVec> solution_from_states(const BlockJacobiMatrix& M, std::span<const CVec> states);

/// Max relative residual of -S_{k-1}^t u(k-1) + V_k u(k) - S_k u(k+1) = E u(k), k = 1..L.
double recursion_residual(const BlockJacobiMatrix& M, cplx E, std::span<const CVec> u);

/// Matrix-valued function X(k), k = 0..L+1.
struct MatrixSolution {
  enum class Boundary { left, right, custom };
  std::vector<CMat> X;
  Boundary boundary = Boundary::custom;
};

struct FundamentalSolutions {
  MatrixSolution U;  // U(0) = 0, U(1) = I
  MatrixSolution V;  // V(L) = I, V(L+1) = 0
};

/// Unique solutions of the matrix recursion with the boundary data above.
/// Throws NumericalError on overflow.
FundamentalSolutions fundamental_solutions(const BlockJacobiMatrix& M, cplx z);

/// Max relative residual of the matrix recursion at k = 1..L.
double recursion_residual(const BlockJacobiMatrix& M, cplx z, const MatrixSolution& X);

/// W(U,V)(k) = V(k)^t S_k U(k+1) - (S_k V(k+1))^t U(k), k = 0..L.
CMat wronskian(const BlockJacobiMatrix& M, const MatrixSolution& U, const MatrixSolution& V, int k);

struct GreenOptions {
  double max_condition = 1e12;
};

/// G_L(j,k;z) = P_j (M_L - z)^{-1} P_k^* for 1 <= j,k <= L via the Wronskian
/// formula. Throws NearSpectrumError when (||M|| + |z|) ||G(k,k)|| exceeds
/// max_condition.
CMat green_block(const BlockJacobiMatrix& M, cplx z, int j, int k, const GreenOptions& options = {});

/// Same quantity from a dense resolvent; the reference route for green_block.
CMat green_block_dense(const BlockJacobiMatrix& M, cplx z, int j, int k);

/// (||M|| + |z|) max_k ||G(k,k)||, the largest value green_block tests against
/// max_condition; bounded by (||M|| + |z|) / dist(z, spec M_L).
double wronskian_condition(const BlockJacobiMatrix& M, cplx z);

struct CharpolyCheck {
  cplx det_direct;          // det(M_n - E)
  cplx det_transfer;        // (prod det S_j) * det P^E(n+1)
  cplx exterior_element;    // <e_{l+1}^...^e_{2l}, wedge^l T_n (same)> = det of lower-right block of T_n
  double det_residual = 0.0;        // relative
  double exterior_residual = 0.0;   // relative, exterior element vs det P^E(n+1)
};

CharpolyCheck charpoly_identity_check(const BlockJacobiMatrix& M, cplx E);

}  // namespace randblock
