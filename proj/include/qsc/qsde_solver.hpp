#pragma once

#include <vector>

#include "qsc/ito_formula.hpp"

namespace qsc {

// Generator blocks at one point with n = dim_h and d = dim K_x:
//   pm : n x n, cm : n x nd, pc : nd x n, cc : nd x nd.
struct GeneratorBlocks {
  Mat pm;
  Mat cm;
  Mat pc;
  Mat cc;

  static GeneratorBlocks identity(int dim_h, int d);
  static GeneratorBlocks zero(int dim_h, int d);
};

struct GeneratorS {
  GridPtr grid;
  int dim_h = 1;
  std::vector<GeneratorBlocks> points;

  void validate() const;
};

// Kernel of the single-point factor F_x: identity away from x and the
// generator blocks at x, padded by the identity on the preserved legs.
KernelTable point_kernel(const GeneratorS& s, int x);

// K_t = K0 F_{x1} ... F_{xk} over the points of X^t in increasing time;
// K0 is a constant operator on H.
KernelTable chrono_product(const GeneratorS& s, const Mat& k0, double t);

struct FixedPointReport {
  double residual = 0.0;  // || T_t - T_0 - sum_x i(T <> (S - 1)) ||
  double recurrence = 0.0;  // || K_{t(x)+} - K_{t(x)} F_x || in eps
  Mat t_t;
};
FixedPointReport solve_qsde(const GeneratorS& s, const Mat& k0, double t);

// Weighted unitary block S^ on H (+) H (x) K with mass dx:
//   [[1 + dx pm, sqrt(dx) cm], [sqrt(dx) pc, cc]].
Mat deformed_block(const GeneratorBlocks& b, double dx);

struct UnitarityReport {
  double cc_isometry = 0.0;  // cc* cc + dx cm* cm - I
  double pm_identity = 0.0;  // pm + pm* + pc* pc + dx pm* pm
  double cm_identity = 0.0;  // cm + pc* cc + dx pm* cm
  double assembled = 0.0;    // S^* S^ - I and S^ S^* - I
  bool pass = false;
};
UnitarityReport pseudo_unitarity_check(const GeneratorBlocks& b, double dx, double tol = 1e-12);

// Pseudo-selfadjoint generator data: hcc Hermitian on H (x) K, hpc : nd x n
// (with hcm = hpc*), hpm Hermitian on H.
struct HamiltonianBlocks {
  Mat hcc;
  Mat hpc;
  Mat hpm;
};
double pseudo_selfadjoint_residual(const HamiltonianBlocks& h);

// phi(z) = (e^{iz} - 1) / (iz) and psi(z) = (e^{iz} - 1 - iz) / z^2 of a
// Hermitian matrix, with a series for eigenvalues |z| < 1e-4.
Mat phi_matrix(const Mat& h);
Mat psi_matrix(const Mat& h);
cplx phi_series(cplx z);
cplx phi_closed(cplx z);

// Generator exp(i H). dx = 0 gives the continuum blocks
//   cc = e^{iH}, pc = phi(H) i hpc, cm = i hcm phi(H), pm = hcm psi(H) hpc + i hpm;
// dx > 0 gives the blocks of the unitary exp(i H^) with
// H^ = [[dx hpm, sqrt(dx) hcm], [sqrt(dx) hpc, hcc]].
GeneratorBlocks exp_generator(const HamiltonianBlocks& h, double dx = 0.0);

struct Decomposition {
  GeneratorBlocks poisson;
  GeneratorBlocks brownian;
  GeneratorBlocks lebesgue;
  Mat f0;                       // triangular diagonalizer of the Poisson part
  double diagonalization = 0.0;  // || F0^dagger L1 F0 - diag(0, L, 0) ||
  double orthogonality = 0.0;    // max || L_i L_j || over i != j
  double reassembly = 0.0;       // || I + sum L_i - F ||
  double product = 0.0;          // || (I + L1)(I + L2)(I + L3) - F ||
  double commutation = 0.0;      // max || [L_i, L_j] ||
};
Decomposition decompose_evolution(const HamiltonianBlocks& h, double tol = 1e-10);

// Triangular matrix [[0, cm, pm], [0, cc, pc], [0, 0, 0]] of L = F - 1.
Mat triangular_part(const GeneratorBlocks& b);

// U_s^t = prod over s <= t(x) < t in increasing time of (1 + dx S_pm(x)).
Mat evolution_family(const Grid& grid, const std::vector<Mat>& s_pm, double s, double t);

// Chronological semi-tensor product of the adapted solution compared with
// the three-argument kernel of chrono_product.
double semi_tensor_residual(const GeneratorS& s, const Mat& k0, double t);

struct Three10Report {
  double bound = 0.0;
  double measured = 0.0;
};
// bound = exp{ 1/2 sum_{x in X^t} dx r(x) (||cm||^2 + ||pc||^2) } and the
// weighted norm ||T_t||_q with q = 1 + 1/r.
Three10Report estimate_three10(const GeneratorS& s, const Mat& k0, const WeightFunction& r, double t);

}  // namespace qsc
