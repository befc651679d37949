#include "forgesim/oracle.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "forgesim/error.hpp"

namespace forgesim {

FCIResult fci_ground_state(const ActiveSpaceHamiltonian& ham) {
  return fci_ground_state(ham, Sector(ham.n_orbitals(), ham.n_alpha(), ham.n_beta()));
}

FCIResult fci_ground_state(const ActiveSpaceHamiltonian& ham, const Sector& sector) {
  if (sector.dim() > kFciCapacity)
    throw CapacityError("FCI sector dimension " + std::to_string(sector.dim()) +
                        " exceeds capacity " + std::to_string(kFciCapacity));
  if (sector.dim() == 0) throw ValidationError("empty sector");
  const Eigen::SparseMatrix<double> h = sector_hamiltonian(ham, sector);

  double energy = 0.0;
  Eigen::VectorXd v;
  if (sector.dim() <= kDenseFciLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(h)};
    if (es.info() != Eigen::Success) throw NumericalError("FCI eigensolver failed");
    energy = es.eigenvalues()[0];
    v = es.eigenvectors().col(0);
  } else {
    std::tie(energy, v) = davidson_lowest(h);
  }
  FCIResult out{energy, CIVector{sector, v.cast<cplx>()}, sector.dim()};
  out.state.normalize();
  return out;
}

std::pair<double, Eigen::VectorXd> davidson_lowest(const Eigen::SparseMatrix<double>& h,
                                                   double tol, int max_iter) {
  const Eigen::Index n = h.rows();
  const Eigen::VectorXd diag = h.diagonal();
  const int max_basis = 40;

  Eigen::Index start = 0;
  diag.minCoeff(&start);
  Eigen::MatrixXd basis(n, 0);
  Eigen::MatrixXd hbasis(n, 0);
  Eigen::VectorXd guess = Eigen::VectorXd::Zero(n);
  guess[start] = 1.0;

  double theta = 0.0;
  Eigen::VectorXd x = guess;
  auto append = [&](Eigen::VectorXd t) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index k = 0; k < basis.cols(); ++k) t -= basis.col(k).dot(t) * basis.col(k);
    const double nrm = t.norm();
    if (nrm < 1e-12) return false;
    t /= nrm;
    basis.conservativeResize(Eigen::NoChange, basis.cols() + 1);
    hbasis.conservativeResize(Eigen::NoChange, hbasis.cols() + 1);
    basis.col(basis.cols() - 1) = t;
    hbasis.col(hbasis.cols() - 1) = h * t;
    return true;
  };
  append(guess);
  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd sub = basis.transpose() * hbasis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (sub + sub.transpose()));
    theta = es.eigenvalues()[0];
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x = basis * y;
    const Eigen::VectorXd r = hbasis * y - theta * x;
    if (r.norm() < tol) return {theta, x};
    Eigen::VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = diag[i] - theta;
      t[i] = r[i] / (std::abs(d) > 1e-8 ? d : 1e-8);
    }
    if (basis.cols() >= max_basis) {
      basis = x;
      hbasis = h * x;
    }
    if (!append(t) && !append(r)) return {theta, x};
  }
  throw NumericalError("Davidson did not converge");
}

}  // namespace forgesim
