#include "qquery/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include "qquery/errors.hpp"

namespace qquery {

namespace {

void check_budget(std::size_t dim, const char* what) {
  if (dim == 0 || dim > kMaxDim) {
    throw ResourceError(std::string(what) + ": dimension " + std::to_string(dim) +
                        " outside budget [1, 2^24]");
  }
}

void check_dense(std::size_t dim, const char* what) {
  if (dim > kDenseMaxDim) {
    throw ResourceError(std::string(what) + ": dimension " + std::to_string(dim) +
                        " exceeds dense limit 4096");
  }
}

}  // namespace

// ---------------------------------------------------------------- layout

RegisterLayout::RegisterLayout(std::vector<int> widths) : widths_(std::move(widths)) {
  for (int w : widths_) {
    if (w < 0) throw ContractError("register width must be non-negative");
    total_ += w;
  }
  if (total_ > 24) throw ResourceError("layout needs " + std::to_string(total_) + " qubits, budget is 24");
  shifts_.resize(widths_.size());
  std::size_t s = 0;
  for (std::size_t r = widths_.size(); r-- > 0;) {
    shifts_[r] = s;
    s += static_cast<std::size_t>(widths_[r]);
  }
}

std::size_t RegisterLayout::value(std::size_t index, std::size_t reg) const {
  return (index >> shift(reg)) & (register_dim(reg) - 1);
}

std::size_t RegisterLayout::with_value(std::size_t index, std::size_t reg, std::size_t v) const {
  const std::size_t mask = (register_dim(reg) - 1) << shift(reg);
  return (index & ~mask) | ((v << shift(reg)) & mask);
}

std::size_t RegisterLayout::index_of(std::span<const std::size_t> values) const {
  if (values.size() != widths_.size()) throw ContractError("index_of: wrong number of register values");
  std::size_t idx = 0;
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (values[r] >= register_dim(r)) throw ContractError("index_of: register value out of range");
    idx |= values[r] << shift(r);
  }
  return idx;
}

RegisterLayout RegisterLayout::concat(const RegisterLayout& other) const {
  std::vector<int> w = widths_;
  w.insert(w.end(), other.widths_.begin(), other.widths_.end());
  return RegisterLayout(std::move(w));
}

// ---------------------------------------------------------------- state

StateVector::StateVector(RegisterLayout layout, CVector amplitudes)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != layout_.dim()) {
    throw ContractError("state length " + std::to_string(amps_.size()) + " does not match layout dimension " +
                        std::to_string(layout_.dim()));
  }
}

StateVector StateVector::basis(const RegisterLayout& layout, std::size_t index) {
  if (index >= layout.dim()) throw ContractError("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(layout.dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(layout, std::move(v));
}

StateVector StateVector::basis(const RegisterLayout& layout, std::span<const std::size_t> values) {
  return basis(layout, layout.index_of(values));
}

bool StateVector::is_normalized(double tol) const { return std::abs(norm() - 1.0) <= tol; }

// ---------------------------------------------------------------- maps

LinearMap::LinearMap(std::size_t dim_in, std::size_t dim_out, Action action, bool unitary)
    : dim_in_(dim_in), dim_out_(dim_out), action_(std::move(action)), unitary_(unitary) {
  check_budget(dim_in, "LinearMap");
  check_budget(dim_out, "LinearMap");
  if (unitary && dim_in != dim_out) throw ContractError("unitary map must be square");
}

LinearMap LinearMap::identity(std::size_t dim) {
  return LinearMap(dim, dim, [](const CVector& v) { return v; }, true);
}

LinearMap LinearMap::zero(std::size_t dim_in, std::size_t dim_out) {
  const auto n = static_cast<Eigen::Index>(dim_out);
  return LinearMap(dim_in, dim_out, [n](const CVector&) { return CVector(CVector::Zero(n)); });
}

LinearMap LinearMap::from_matrix(CMatrix m, bool unitary) {
  const auto rows = static_cast<std::size_t>(m.rows());
  const auto cols = static_cast<std::size_t>(m.cols());
  auto shared = std::make_shared<const CMatrix>(std::move(m));
  return LinearMap(
      cols, rows, [shared](const CVector& v) { return CVector(*shared * v); }, unitary);
}

LinearMap LinearMap::permutation(std::size_t dim, std::function<std::size_t(std::size_t)> perm) {
  auto table = std::make_shared<std::vector<std::size_t>>(dim);
  std::vector<bool> hit(dim, false);
  for (std::size_t i = 0; i < dim; ++i) {
    const std::size_t j = perm(i);
    if (j >= dim || hit[j]) throw ContractError("permutation: map is not a bijection");
    hit[j] = true;
    (*table)[i] = j;
  }
  return LinearMap(
      dim, dim,
      [table](const CVector& v) {
        CVector out(v.size());
        for (std::size_t i = 0; i < table->size(); ++i) {
          out(static_cast<Eigen::Index>((*table)[i])) = v(static_cast<Eigen::Index>(i));
        }
        return out;
      },
      true);
}

LinearMap LinearMap::diagonal(std::size_t dim, std::function<Complex(std::size_t)> entry, bool unitary) {
  CVector d(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) d(static_cast<Eigen::Index>(i)) = entry(i);
  auto shared = std::make_shared<const CVector>(std::move(d));
  return LinearMap(
      dim, dim, [shared](const CVector& v) { return CVector(shared->cwiseProduct(v)); }, unitary);
}

CVector LinearMap::operator()(const CVector& v) const {
  if (static_cast<std::size_t>(v.size()) != dim_in_) {
    throw ContractError("apply: vector length " + std::to_string(v.size()) + " != map input dimension " +
                        std::to_string(dim_in_));
  }
  CVector out = action_(v);
  if (static_cast<std::size_t>(out.size()) != dim_out_) throw ContractError("apply: action returned wrong length");
  return out;
}

CMatrix LinearMap::dense() const {
  check_dense(std::max(dim_in_, dim_out_), "dense");
  CMatrix m(static_cast<Eigen::Index>(dim_out_), static_cast<Eigen::Index>(dim_in_));
  CVector e = CVector::Zero(static_cast<Eigen::Index>(dim_in_));
  for (std::size_t c = 0; c < dim_in_; ++c) {
    e(static_cast<Eigen::Index>(c)) = 1.0;
    m.col(static_cast<Eigen::Index>(c)) = (*this)(e);
    e(static_cast<Eigen::Index>(c)) = 0.0;
  }
  return m;
}

LinearMap LinearMap::then(const LinearMap& first, const LinearMap& second) {
  if (first.dim_out_ != second.dim_in_) throw ContractError("compose: dimension mismatch");
  return LinearMap(
      first.dim_in_, second.dim_out_, [first, second](const CVector& v) { return second(first(v)); },
      first.unitary_ && second.unitary_);
}

LinearMap LinearMap::operator-(const LinearMap& other) const {
  if (dim_in_ != other.dim_in_ || dim_out_ != other.dim_out_) throw ContractError("difference: dimension mismatch");
  LinearMap self = *this;
  return LinearMap(dim_in_, dim_out_, [self, other](const CVector& v) { return CVector(self(v) - other(v)); });
}

LinearMap LinearMap::scaled(Complex s) const {
  LinearMap self = *this;
  return LinearMap(
      dim_in_, dim_out_, [self, s](const CVector& v) { return CVector(s * self(v)); },
      unitary_ && std::abs(std::abs(s) - 1.0) < 1e-15);
}

LinearMap tensor_product(const LinearMap& a, const LinearMap& b) {
  const std::size_t din = a.dim_in() * b.dim_in();
  const std::size_t dout = a.dim_out() * b.dim_out();
  if (din > kMaxDim || dout > kMaxDim) {
    throw ResourceError("tensor_product: dimension " + std::to_string(std::max(din, dout)) + " exceeds budget 2^24");
  }
  return LinearMap(
      din, dout,
      [a, b](const CVector& v) {
        const auto ai = static_cast<Eigen::Index>(a.dim_in());
        const auto bi = static_cast<Eigen::Index>(b.dim_in());
        const auto bo = static_cast<Eigen::Index>(b.dim_out());
        const auto ao = static_cast<Eigen::Index>(a.dim_out());
        // Row r of `mid` holds B applied to the r-th block of v.
        CMatrix mid(ai, bo);
        for (Eigen::Index r = 0; r < ai; ++r) mid.row(r) = b(v.segment(r * bi, bi)).transpose();
        CVector out(ao * bo);
        for (Eigen::Index c = 0; c < bo; ++c) {
          const CVector col = a(mid.col(c));
          for (Eigen::Index r = 0; r < ao; ++r) out(r * bo + c) = col(r);
        }
        return out;
      },
      a.is_unitary() && b.is_unitary());
}

LinearMap embed(const RegisterLayout& layout, std::vector<std::size_t> regs, const LinearMap& local) {
  std::size_t local_dim = 1;
  std::vector<bool> chosen(layout.num_registers(), false);
  for (std::size_t r : regs) {
    if (r >= layout.num_registers()) throw ContractError("embed: register index " + std::to_string(r) + " out of layout");
    if (chosen[r]) throw ContractError("embed: register listed twice");
    chosen[r] = true;
    local_dim *= layout.register_dim(r);
  }
  if (local.dim_in() != local_dim || local.dim_out() != local_dim) {
    throw ContractError("embed: local map dimension " + std::to_string(local.dim_in()) +
                        " does not match registers (" + std::to_string(local_dim) + ")");
  }
  const std::size_t dim = layout.dim();
  const std::size_t rest_dim = dim / local_dim;
  std::vector<std::size_t> rest_regs;
  for (std::size_t r = 0; r < layout.num_registers(); ++r) {
    if (!chosen[r]) rest_regs.push_back(r);
  }
  // table[rest * local_dim + l] = full basis index.
  auto table = std::make_shared<std::vector<std::size_t>>(dim);
  for (std::size_t rest = 0; rest < rest_dim; ++rest) {
    std::size_t base = 0;
    std::size_t rem = rest;
    for (std::size_t k = rest_regs.size(); k-- > 0;) {
      const std::size_t rd = layout.register_dim(rest_regs[k]);
      base = layout.with_value(base, rest_regs[k], rem % rd);
      rem /= rd;
    }
    for (std::size_t l = 0; l < local_dim; ++l) {
      std::size_t idx = base;
      std::size_t lrem = l;
      for (std::size_t k = regs.size(); k-- > 0;) {
        const std::size_t rd = layout.register_dim(regs[k]);
        idx = layout.with_value(idx, regs[k], lrem % rd);
        lrem /= rd;
      }
      (*table)[rest * local_dim + l] = idx;
    }
  }
  return LinearMap(
      dim, dim,
      [table, local, local_dim, rest_dim](const CVector& v) {
        CVector out(v.size());
        CVector chunk(static_cast<Eigen::Index>(local_dim));
        for (std::size_t rest = 0; rest < rest_dim; ++rest) {
          const std::size_t* row = table->data() + rest * local_dim;
          for (std::size_t l = 0; l < local_dim; ++l) chunk(static_cast<Eigen::Index>(l)) = v(static_cast<Eigen::Index>(row[l]));
          const CVector img = local(chunk);
          for (std::size_t l = 0; l < local_dim; ++l) out(static_cast<Eigen::Index>(row[l])) = img(static_cast<Eigen::Index>(l));
        }
        return out;
      },
      local.is_unitary());
}

StateVector apply(const LinearMap& u, const StateVector& psi) {
  if (u.dim_in() != psi.dim()) {
    throw ContractError("apply: map input dimension " + std::to_string(u.dim_in()) + " != state length " +
                        std::to_string(psi.dim()));
  }
  CVector out = u(psi.amplitudes());
  if (u.dim_out() == psi.dim()) return StateVector(psi.layout(), std::move(out));
  // Output space has no declared layout; treat it as one register.
  const int q = static_cast<int>(std::lround(std::log2(static_cast<double>(u.dim_out()))));
  if ((std::size_t{1} << q) != u.dim_out()) throw ContractError("apply: output dimension is not a power of two");
  return StateVector(RegisterLayout({q}), std::move(out));
}

// ---------------------------------------------------------------- norms

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  // Largest eigenvalue of the smaller Gram matrix.
  const CMatrix gram = m.rows() >= m.cols() ? CMatrix(m.adjoint() * m) : CMatrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericError("spectral_norm: Hermitian eigensolver did not converge on a " + std::to_string(gram.rows()) +
                       "x" + std::to_string(gram.cols()) + " Gram matrix");
  }
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

double spectral_norm(const LinearMap& a) { return spectral_norm(a.dense()); }

namespace {

void check_orthonormal(const std::vector<StateVector>& basis, std::size_t dim, const Tolerances& tol) {
  if (basis.empty()) throw ContractError("domain basis is empty");
  if (basis.size() > kDenseMaxDim) throw ResourceError("domain basis larger than dense limit 4096");
  for (const auto& v : basis) {
    if (v.dim() != dim) throw ContractError("domain basis vector length does not match map dimension");
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i; j < basis.size(); ++j) {
      const Complex ip = basis[i].amplitudes().dot(basis[j].amplitudes());
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(ip - expected) > tol.orthonormality) {
        throw ContractError("domain basis is not orthonormal: <v" + std::to_string(i) + ", v" + std::to_string(j) +
                            "> = " + std::to_string(std::abs(ip)));
      }
    }
  }
}

}  // namespace

double spectral_norm(const LinearMap& a, const std::vector<StateVector>& domain_basis, const Tolerances& tol) {
  check_orthonormal(domain_basis, a.dim_in(), tol);
  CMatrix images(static_cast<Eigen::Index>(a.dim_out()), static_cast<Eigen::Index>(domain_basis.size()));
  for (std::size_t c = 0; c < domain_basis.size(); ++c) {
    images.col(static_cast<Eigen::Index>(c)) = a(domain_basis[c].amplitudes());
  }
  const CMatrix gram = images.adjoint() * images;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericError("restricted spectral_norm: eigensolver did not converge on " +
                       std::to_string(gram.rows()) + "-dimensional Gram matrix");
  }
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

double unitarity_defect(const LinearMap& u) {
  if (u.dim_in() != u.dim_out()) throw ContractError("unitarity_defect: map is not square");
  const CMatrix m = u.dense();
  const CMatrix defect = m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols());
  return spectral_norm(defect);
}

double restricted_difference_norm(const LinearMap& a, const LinearMap& b, const std::vector<StateVector>& domain_basis,
                                  const Tolerances& tol) {
  return spectral_norm(a - b, domain_basis, tol);
}

// ---------------------------------------------------------------- projection

CVector MeasurementProjection::project(const CVector& v) const {
  CVector out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!keep_(static_cast<std::size_t>(i))) out(i) = 0.0;
  }
  return out;
}

double MeasurementProjection::probability(const CVector& v) const {
  double p = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (keep_(static_cast<std::size_t>(i))) p += std::norm(v(i));
  }
  return p;
}

LinearMap MeasurementProjection::as_map(std::size_t dim) const {
  auto self = *this;
  return LinearMap::diagonal(dim, [self](std::size_t i) { return Complex(self.keeps(i) ? 1.0 : 0.0); }, false);
}

// ---------------------------------------------------------------- random

CMatrix haar_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(dim);
  CMatrix z(n, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      z(r, c) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex d = r(k, k);
    const double ad = std::abs(d);
    if (ad > 0.0) q.col(k) *= d / ad;
  }
  return q;
}

CVector random_state(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v(i) = Complex(re, im);
  }
  return v / v.norm();
}

}  // namespace qquery
