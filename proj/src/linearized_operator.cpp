#include <cstdio>
#include <cstring>
#include <fstream>

#include "vpb/collision.hpp"

namespace vpb {
namespace {

// E^T z with E the nodal evaluation matrix (separable axis transforms).
Eigen::VectorXd eval_transpose(const HermiteBasis& basis,
                               const Eigen::VectorXd& z) {
  const int n = basis.axis_size();
  const Eigen::MatrixXd Et = basis.eval1d().transpose();
  Eigen::VectorXd cur = z, next(z.size());
  for (int b = 0; b < n * n; ++b)
    next.segment(b * n, n) = Et * cur.segment(b * n, n);
  cur.swap(next);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += Et(j, l) * cur[(i * n + l) * n + k];
        next[(i * n + j) * n + k] = s;
      }
  cur.swap(next);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += Et(i, l) * cur[(l * n + j) * n + k];
        next[(i * n + j) * n + k] = s;
      }
  return next;
}

}  // namespace

LinearizedOperator::LinearizedOperator(BasisPtr basis,
                                       const CollisionConfig& cfg)
    : basis_(std::move(basis)), cfg_(cfg), nu_(collision_frequency(basis_)) {
  require(cfg_.degree >= 4, "LinearizedOperator: degree >= 4 required");
  require(cfg_.degree <= basis_->max_degree(),
          "LinearizedOperator: Galerkin degree exceeds quadrature degree");
  require(cfg_.nl_degree >= 2 && cfg_.nl_degree <= cfg_.degree,
          "LinearizedOperator: nl_degree out of range");
  assemble();
  assemble_tensors();
}

void LinearizedOperator::assemble() {
  const int n = basis_->axis_size();
  const auto mis = simplex_indices(cfg_.degree);
  const int nd = static_cast<int>(mis.size());
  dspace_.resize(nd);
  dpos_of_flat_.assign(basis_->size(), -1);
  for (int p = 0; p < nd; ++p) {
    dspace_[p] = basis_->flat(mis[p][0], mis[p][1], mis[p][2]);
    dpos_of_flat_[dspace_[p]] = p;
  }
  for (int f = 0; f < basis_->size(); ++f)
    if (dpos_of_flat_[f] < 0) tailspace_.push_back(f);

  // exact Galerkin form, possibly cached on disk
  bool loaded = false;
  std::string form_cache;
  if (!cfg_.cache_dir.empty()) {
    form_cache = cfg_.cache_dir + "/dform_D" + std::to_string(cfg_.degree) +
                 ".bin";
    std::ifstream in(form_cache, std::ios::binary);
    if (in) {
      form_.resize(nd, nd);
      in.read(reinterpret_cast<char*>(form_.data()),
              sizeof(double) * nd * nd);
      loaded = in.good();
    }
  }
  if (!loaded) {
    form_ = assemble_exact_form(cfg_.degree);
    if (!form_cache.empty()) {
      std::ofstream out(form_cache, std::ios::binary);
      out.write(reinterpret_cast<const char*>(form_.data()),
                sizeof(double) * nd * nd);
    }
  }

  // exact invariant coefficient vectors: 1, v_d, (|v|^2 - 3)/sqrt(6)
  inv_coeffs_ = Eigen::MatrixXd::Zero(nd, 5);
  auto pos_of = [&](int a, int b, int c) {
    return dpos_of_flat_[basis_->flat(a, b, c)];
  };
  inv_coeffs_(pos_of(0, 0, 0), 0) = 1.0;
  inv_coeffs_(pos_of(1, 0, 0), 1) = 1.0;
  inv_coeffs_(pos_of(0, 1, 0), 2) = 1.0;
  inv_coeffs_(pos_of(0, 0, 1), 3) = 1.0;
  const double c2 = 1.0 / std::sqrt(3.0);
  inv_coeffs_(pos_of(2, 0, 0), 4) = c2;
  inv_coeffs_(pos_of(0, 2, 0), 4) = c2;
  inv_coeffs_(pos_of(0, 0, 2), 4) = c2;

  // exact kernel: project the invariants out of the form
  Eigen::MatrixXd P = inv_coeffs_ * inv_coeffs_.transpose();
  Eigen::MatrixXd Pc = Eigen::MatrixXd::Identity(nd, nd) - P;
  double raw_null = (form_ * inv_coeffs_).norm() / form_.norm();
  require_numeric(raw_null < 1e-10,
                  "collision assembly lost the invariants (raw null residual " +
                      std::to_string(raw_null) + ")");
  form_ = Pc * form_ * Pc;
  form_ = 0.5 * (form_ + form_.transpose()).eval();

  // spectral data on the complement of N within the Galerkin space
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(form_);
  // first 5 eigenvalues are the exact zeros (PSD form)
  evals_ = es.eigenvalues().tail(nd - 5);
  evecs_ = es.eigenvectors().rightCols(nd - 5);
  require_numeric(evals_.minCoeff() > 0.0,
                  "collision form is not positive semidefinite");

  // tail closure: diagonal relaxation at the modal collision rates
  tail_rates_.resize(static_cast<int>(tailspace_.size()));
  {
    const auto& wts = basis_->quad().weights();
    const int nv = basis_->size();
    // per-axis squared evaluation tables
    const Eigen::MatrixXd& E1 = basis_->eval1d();
    for (size_t t = 0; t < tailspace_.size(); ++t) {
      auto m = basis_->unflat(tailspace_[t]);
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double pij = E1(i, m[0]) * E1(j, m[1]);
          for (int k = 0; k < n; ++k) {
            int node = basis_->flat(i, j, k);
            double phi = pij * E1(k, m[2]);
            acc += wts[node] * nu_.nodal()[node] * phi * phi;
          }
        }
      tail_rates_[static_cast<int>(t)] = acc;
    }
  }

  spectral_gap_ = evals_(0);
  if (tail_rates_.size() > 0)
    spectral_gap_ = std::min(spectral_gap_, tail_rates_.minCoeff());
  op_norm_ = evals_(evals_.size() - 1);
  if (tail_rates_.size() > 0)
    op_norm_ = std::max(op_norm_, tail_rates_.maxCoeff());

  // nodal null basis from the analytic invariants, Gram-Schmidt in the
  // quadrature inner product
  const auto& quad = basis_->quad();
  std::vector<Eigen::VectorXd> raw(5, Eigen::VectorXd(quad.size()));
  for (int k = 0; k < quad.size(); ++k) {
    const auto& v = quad.node(k);
    raw[0][k] = 1.0;
    raw[1][k] = v[0];
    raw[2][k] = v[1];
    raw[3][k] = v[2];
    raw[4][k] = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  }
  const auto& wts = quad.weights();
  auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = 0.0;
    for (int k = 0; k < quad.size(); ++k) s += wts[k] * a[k] * b[k];
    return s;
  };
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < i; ++j) raw[i] -= dot(raw[i], raw[j]) * raw[j];
    raw[i] /= std::sqrt(dot(raw[i], raw[i]));
  }
  null_basis_.clear();
  for (int i = 0; i < 5; ++i) null_basis_.emplace_back(basis_, raw[i]);
}

int LinearizedOperator::near_null_count() const {
  double thr = cfg_.tol_null * op_norm_;
  int count = 5;  // exact kernel by construction
  for (int i = 0; i < evals_.size(); ++i)
    if (evals_(i) <= thr) ++count;
  for (int i = 0; i < tail_rates_.size(); ++i)
    if (tail_rates_(i) <= thr) ++count;
  return count;
}

Eigen::VectorXd LinearizedOperator::apply_modal(
    const Eigen::VectorXd& modal) const {
  const int nd = static_cast<int>(dspace_.size());
  Eigen::VectorXd xd(nd);
  for (int p = 0; p < nd; ++p) xd[p] = modal[dspace_[p]];
  Eigen::VectorXd yd = form_ * xd;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(modal.size());
  for (int p = 0; p < nd; ++p) out[dspace_[p]] = yd[p];
  for (size_t t = 0; t < tailspace_.size(); ++t)
    out[tailspace_[t]] = tail_rates_[static_cast<int>(t)] * modal[tailspace_[t]];
  return out;
}

Eigen::VectorXd LinearizedOperator::solve_implicit_modal(
    const Eigen::VectorXd& modal, double c) const {
  const int nd = static_cast<int>(dspace_.size());
  Eigen::VectorXd xd(nd);
  for (int p = 0; p < nd; ++p) xd[p] = modal[dspace_[p]];
  // exact kernel components pass through unchanged
  Eigen::VectorXd nu_part = inv_coeffs_.transpose() * xd;
  Eigen::VectorXd w = evecs_.transpose() * xd;
  for (int i = 0; i < w.size(); ++i) w[i] /= 1.0 + c * evals_(i);
  Eigen::VectorXd yd = inv_coeffs_ * nu_part + evecs_ * w;
  Eigen::VectorXd out = modal;
  for (int p = 0; p < nd; ++p) out[dspace_[p]] = yd[p];
  for (size_t t = 0; t < tailspace_.size(); ++t)
    out[tailspace_[t]] =
        modal[tailspace_[t]] / (1.0 + c * tail_rates_[static_cast<int>(t)]);
  return out;
}

VelocityFunction LinearizedOperator::apply(const VelocityFunction& f) const {
  return VelocityFunction::from_modal(basis_, apply_modal(f.modal()));
}

Eigen::VectorXd LinearizedOperator::project_N_modal(
    const Eigen::VectorXd& modal) const {
  const int nd = static_cast<int>(dspace_.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(modal.size());
  Eigen::VectorXd xd(nd);
  for (int p = 0; p < nd; ++p) xd[p] = modal[dspace_[p]];
  Eigen::VectorXd yd = inv_coeffs_ * (inv_coeffs_.transpose() * xd);
  for (int p = 0; p < nd; ++p) out[dspace_[p]] = yd[p];
  return out;
}

Eigen::VectorXd LinearizedOperator::solve_on_complement(
    const Eigen::VectorXd& rhs_modal) const {
  const int nd = static_cast<int>(dspace_.size());
  Eigen::VectorXd xd(nd);
  for (int p = 0; p < nd; ++p) xd[p] = rhs_modal[dspace_[p]];
  double out_of_space = 0.0;
  for (size_t t = 0; t < tailspace_.size(); ++t)
    out_of_space += rhs_modal[tailspace_[t]] * rhs_modal[tailspace_[t]];
  double total = rhs_modal.squaredNorm();
  require(out_of_space <= 1e-16 * (total > 0 ? total : 1.0),
          "solve_on_complement: rhs has content outside the Galerkin space");
  double on_null = (inv_coeffs_.transpose() * xd).norm();
  require(on_null <= 1e-8 * std::sqrt(total > 0 ? total : 1.0),
          "solve_on_complement: rhs not orthogonal to Ker L");
  Eigen::VectorXd w = evecs_.transpose() * xd;
  for (int i = 0; i < w.size(); ++i) w[i] /= evals_(i);
  Eigen::VectorXd yd = evecs_ * w;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(rhs_modal.size());
  for (int p = 0; p < nd; ++p) out[dspace_[p]] = yd[p];
  return out;
}

const Eigen::MatrixXd& LinearizedOperator::matrix() const {
  if (dense_) return *dense_;
  const int nv = basis_->size();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nv, nv);
  const int nd = static_cast<int>(dspace_.size());
  for (int p = 0; p < nd; ++p)
    for (int q = 0; q < nd; ++q) M(dspace_[p], dspace_[q]) = form_(p, q);
  for (size_t t = 0; t < tailspace_.size(); ++t)
    M(tailspace_[t], tailspace_[t]) = tail_rates_[static_cast<int>(t)];
  // nodal action: E * M * B
  Eigen::MatrixXd E(nv, nv);
  for (int m = 0; m < nv; ++m) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(nv);
    unit[m] = 1.0;
    E.col(m) = basis_->to_nodal(unit);
  }
  Eigen::MatrixXd B(nv, nv);
  for (int k = 0; k < nv; ++k) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(nv);
    unit[k] = 1.0;
    B.col(k) = basis_->to_modal(unit);
  }
  dense_ = std::make_unique<Eigen::MatrixXd>(E * M * B);
  return *dense_;
}

void LinearizedOperator::write_cache(const std::string& path) const {
  const Eigen::MatrixXd& A = matrix();
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "write_cache: cannot open " + path);
  const char magic[8] = {'V', 'P', 'B', 'L', 'O', 'P', '0', '1'};
  out.write(magic, 8);
  int32_t version = 1;
  int32_t npa = basis_->quad().nodes_per_axis();
  double scal = basis_->quad().scaling();
  int32_t ang = 2 * cfg_.theta_half;
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&npa), 4);
  out.write(reinterpret_cast<const char*>(&scal), 8);
  out.write(reinterpret_cast<const char*>(&ang), 4);
  // row-major float64
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) {
      double x = A(i, j);
      out.write(reinterpret_cast<const char*>(&x), 8);
    }
  require(out.good(), "write_cache: write failed for " + path);
}

Eigen::MatrixXd LinearizedOperator::read_cache(const std::string& path,
                                               int nodes_per_axis,
                                               double scaling,
                                               int angular_order) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "read_cache: cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  require(std::memcmp(magic, "VPBLOP01", 8) == 0,
          "read_cache: bad magic in " + path);
  int32_t version, npa, ang;
  double scal;
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&npa), 4);
  in.read(reinterpret_cast<char*>(&scal), 8);
  in.read(reinterpret_cast<char*>(&ang), 4);
  require(version == 1, "read_cache: unsupported format version");
  require(npa == nodes_per_axis && scal == scaling && ang == angular_order,
          "read_cache: header mismatch");
  int nv = npa * npa * npa;
  Eigen::MatrixXd A(nv, nv);
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nv; ++j) {
      double x;
      in.read(reinterpret_cast<char*>(&x), 8);
      A(i, j) = x;
    }
  require(in.good(), "read_cache: truncated file " + path);
  return A;
}

OperatorPtr assemble_L(BasisPtr basis, const CollisionConfig& cfg) {
  return std::make_shared<const LinearizedOperator>(std::move(basis), cfg);
}

double estimate_coercivity(const LinearizedOperator& op) {
  // largest eigenvalue of (L + sigma P)^{-1} G_nu equals 1/delta with the
  // kernel shifted out of the way; matrix-free power iteration.
  const auto& basis = op.basis();
  const int nv = basis.size();
  const double sigma = 1e6 * std::max(op.norm(), 1.0);
  const auto& wts = basis.quad().weights();
  const auto& nuv = op.nu().nodal();

  auto apply_Gnu = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = basis.to_nodal(x);
    for (int k = 0; k < nv; ++k) y[k] *= wts[k] * nuv[k];
    return eval_transpose(basis, y);
  };
  auto solve_A = [&](const Eigen::VectorXd& x) {
    const int nd = static_cast<int>(op.dspace().size());
    Eigen::VectorXd xd(nd);
    for (int p = 0; p < nd; ++p) xd[p] = x[op.dspace()[p]];
    Eigen::VectorXd null_c = op.invariant_coeffs().transpose() * xd;
    Eigen::VectorXd w = op.eigenvectors().transpose() * xd;
    for (int i = 0; i < w.size(); ++i) w[i] /= op.eigenvalues()(i);
    Eigen::VectorXd yd =
        op.invariant_coeffs() * (null_c / sigma) + op.eigenvectors() * w;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(nv);
    for (int p = 0; p < nd; ++p) out[op.dspace()[p]] = yd[p];
    const auto& tail = op.tailspace();
    for (size_t t = 0; t < tail.size(); ++t)
      out[tail[t]] = x[tail[t]] / op.tail_rates()[static_cast<int>(t)];
    return out;
  };

  // deterministic pseudo-random start
  Eigen::VectorXd x(nv);
  uint64_t s = 0x9e3779b97f4a7c15ull;
  for (int i = 0; i < nv; ++i) {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    x[i] = static_cast<double>((s >> 11) & 0xffffffu) / double(1 << 24) - 0.5;
  }
  x.normalize();
  double lam = 0.0;
  for (int it = 0; it < 400; ++it) {
    Eigen::VectorXd y = solve_A(apply_Gnu(x));
    double nrm = y.norm();
    y /= nrm;
    double lam_new = y.dot(solve_A(apply_Gnu(y))) / y.dot(y);
    if (it > 10 && std::abs(lam_new - lam) < 1e-12 * std::abs(lam_new)) {
      lam = lam_new;
      x = y;
      break;
    }
    lam = lam_new;
    x = y;
  }
  // unbiased readout on the projected minimizer
  Eigen::VectorXd xp = x - op.project_N_modal(x);
  double num = xp.dot(op.apply_modal(xp));
  double den = xp.dot(apply_Gnu(xp));
  double delta = num / den;
  require_numeric(delta > 0.0, "estimate_coercivity: nonpositive gap");
  return delta;
}

}  // namespace vpb
