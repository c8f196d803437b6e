#include "cliffdyn/clifford.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace cliffdyn {

SpacePtr GeneratorSpace::allocate(std::size_t n_pos, std::size_t n_neg) {
  if (n_pos == 0 && n_neg == 0) throw InputError("allocate: zero-dimensional generator space");
  auto space = std::shared_ptr<GeneratorSpace>(new GeneratorSpace());
  space->n_pos_ = n_pos;
  space->signs_.assign(n_pos, +1);
  space->signs_.insert(space->signs_.end(), n_neg, -1);
  if (n_pos == n_neg) space->blocks_.push_back({"all", 0, n_pos + n_neg});
  return space;
}

SpacePtr GeneratorSpace::allocate_blocks(const std::vector<BlockRequest>& requests) {
  if (requests.empty()) throw InputError("allocate_blocks: no blocks requested");
  auto space = std::shared_ptr<GeneratorSpace>(new GeneratorSpace());
  std::size_t offset = 0;
  for (const auto& req : requests) {
    if (req.n_pairs == 0) throw InputError("allocate_blocks: block '" + req.label + "' is empty");
    for (const auto& b : space->blocks_) {
      if (b.label == req.label) throw InputError("allocate_blocks: duplicate label '" + req.label + "'");
    }
    const std::size_t half = 2 * req.n_pairs;
    space->signs_.insert(space->signs_.end(), half, +1);
    space->signs_.insert(space->signs_.end(), half, -1);
    space->blocks_.push_back({req.label, offset, 2 * half});
    offset += 2 * half;
    space->n_pos_ += half;
  }
  return space;
}

const Block& GeneratorSpace::block(std::string_view label) const {
  for (const auto& b : blocks_) {
    if (b.label == label) return b;
  }
  throw InputError("generator space has no block '" + std::string(label) + "'");
}

bool GeneratorSpace::has_block(std::string_view label) const {
  return std::any_of(blocks_.begin(), blocks_.end(), [&](const Block& b) { return b.label == label; });
}

ClVector::ClVector(SpacePtr space, CVector coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw InputError("ClVector: null generator space");
  if (static_cast<std::size_t>(coeffs_.size()) != space_->dim()) {
    throw InputError("ClVector: coefficient count does not match generator space");
  }
}

ClVector ClVector::zero(SpacePtr space) {
  const auto n = static_cast<Eigen::Index>(space->dim());
  return ClVector(std::move(space), CVector::Zero(n));
}

ClVector ClVector::generator(SpacePtr space, std::size_t k) {
  if (k >= space->dim()) throw std::out_of_range("generator index out of range");
  ClVector v = zero(std::move(space));
  v.coeffs_(static_cast<Eigen::Index>(k)) = 1.0;
  return v;
}

ClVector ClVector::conj() const { return ClVector(space_, coeffs_.conjugate()); }

double ClVector::max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

ClVector& ClVector::operator+=(const ClVector& other) {
  if (!space_) {
    *this = other;
    return *this;
  }
  require_same_space(*this, other);
  coeffs_ += other.coeffs_;
  return *this;
}

ClVector& ClVector::operator-=(const ClVector& other) {
  if (!space_) {
    *this = other;
    coeffs_ = -coeffs_;
    return *this;
  }
  require_same_space(*this, other);
  coeffs_ -= other.coeffs_;
  return *this;
}

ClVector& ClVector::operator*=(Complex s) {
  coeffs_ *= s;
  return *this;
}

void require_same_space(const ClVector& a, const ClVector& b) {
  if (!a.space() || !b.space()) throw InputError("ClVector without generator space");
  if (a.space() == b.space()) return;
  if (!a.space()->same_signature(*b.space())) throw InputError("ClVectors live on different generator spaces");
}

Complex bullet(const ClVector& a, const ClVector& b) {
  require_same_space(a, b);
  const auto& s = a.space()->signs();
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  Complex acc{0.0, 0.0};
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    acc += static_cast<double>(2 * s[static_cast<std::size_t>(k)]) * x(k) * y(k);
  }
  return acc;
}

HermitianMatrix::HermitianMatrix(CMatrix entries, double tol) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) throw InputError("HermitianMatrix: matrix is not square");
  if (entries_.rows() == 0) throw InputError("HermitianMatrix: empty matrix");
  if (!entries_.allFinite()) throw InputError("HermitianMatrix: non-finite entry");
  const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
  const double dev = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol * scale) throw InputError("HermitianMatrix: matrix is not Hermitian");
  // Symmetrize so downstream algebra sees an exactly Hermitian matrix.
  entries_ = 0.5 * (entries_ + entries_.adjoint()).eval();
}

namespace {

constexpr double kJacobiRelTol = 1e-13;
constexpr int kJacobiMaxSweeps = 50;

double off_norm(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition hermitian_eig(const CMatrix& h) { return hermitian_eig(HermitianMatrix(h)); }

EigenDecomposition hermitian_eig(const HermitianMatrix& h) {
  const Eigen::Index n = h.n();
  CMatrix a = h.entries();
  CMatrix v = CMatrix::Identity(n, n);
  const double threshold = kJacobiRelTol * std::max(a.norm(), std::numeric_limits<double>::min());

  int sweep = 0;
  while (off_norm(a) > threshold) {
    if (sweep == kJacobiMaxSweeps) throw NumericalError("hermitian_eig: Jacobi iteration did not converge");
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = std::abs(a(p, q));
        if (apq == 0.0) continue;
        const Complex phase = a(p, q) / apq;  // e^{iφ}
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // R restricted to (p,q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]].
        const Complex r_pp = c;
        const Complex r_pq = s;
        const Complex r_qp = -s * std::conj(phase);
        const Complex r_qq = c * std::conj(phase);
        // A <- A R (columns p, q).
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex akp = a(k, p), akq = a(k, q);
          a(k, p) = akp * r_pp + akq * r_qp;
          a(k, q) = akp * r_pq + akq * r_qq;
        }
        // A <- R† A (rows p, q).
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex apk = a(p, k), aqk = a(q, k);
          a(p, k) = std::conj(r_pp) * apk + std::conj(r_qp) * aqk;
          a(q, k) = std::conj(r_pq) * apk + std::conj(r_qq) * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
        for (Eigen::Index k = 0; k < n; ++k) {
          const Complex vkp = v(k, p), vkq = v(k, q);
          v(k, p) = vkp * r_pp + vkq * r_qp;
          v(k, q) = vkp * r_pq + vkq * r_qq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i).real() > a(j, j).real(); });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src).real();
    out.vectors.col(k) = v.col(src);
  }
  out.sweeps = sweep;
  return out;
}

StandardBasis standard_basis(const SpacePtr& space, const Block& block) {
  if (!space) throw InputError("standard_basis: null generator space");
  if (block.length == 0 || block.length % 4 != 0) {
    throw InputError("standard_basis: block needs n_pos = n_neg = 2n generators");
  }
  if (block.offset + block.length > space->dim()) throw InputError("standard_basis: block outside space");
  const std::size_t half = block.length / 2;
  for (std::size_t k = 0; k < block.length; ++k) {
    const int expected = k < half ? +1 : -1;
    if (space->sign(block.offset + k) != expected) {
      throw InputError("standard_basis: block is not laid out as positive then negative generators");
    }
  }
  StandardBasis basis;
  const std::size_t n = block.n_pairs();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t g0 = block.offset + 2 * i;
    const std::size_t h0 = block.offset + half + 2 * i;
    ClVector e = ClVector::zero(space);
    e.coeffs()(static_cast<Eigen::Index>(h0)) = 0.5;
    e.coeffs()(static_cast<Eigen::Index>(h0 + 1)) = Complex(0.0, 0.5);
    ClVector f = ClVector::zero(space);
    f.coeffs()(static_cast<Eigen::Index>(g0)) = 0.5;
    f.coeffs()(static_cast<Eigen::Index>(g0 + 1)) = Complex(0.0, 0.5);
    basis.e.push_back(std::move(e));
    basis.f.push_back(std::move(f));
  }
  return basis;
}

StandardBasis standard_basis(const SpacePtr& space) {
  if (!space) throw InputError("standard_basis: null generator space");
  if (space->n_pos() != space->n_neg() || space->n_pos() % 2 != 0) {
    throw InputError("standard_basis: signature must be (2n, 2n)");
  }
  return standard_basis(space, Block{"all", 0, space->dim()});
}

CMatrix GramResolution::gram() const {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = bullet(vectors[static_cast<std::size_t>(i)], vectors[static_cast<std::size_t>(j)].conj());
  return g;
}

CMatrix GramResolution::null_products() const {
  const auto n = static_cast<Eigen::Index>(vectors.size());
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      g(i, j) = bullet(vectors[static_cast<std::size_t>(i)], vectors[static_cast<std::size_t>(j)]);
  return g;
}

double GramResolution::residual() const { return (gram() - target.entries()).cwiseAbs().maxCoeff(); }

double GramResolution::null_residual() const { return null_products().cwiseAbs().maxCoeff(); }

GramResolution resolve_hermitian(const HermitianMatrix& h, const SpacePtr& space, const Block& block) {
  const Eigen::Index n = h.n();
  if (block.n_pairs() < static_cast<std::size_t>(n)) {
    throw InputError("resolve_hermitian: generator block too small for an " + std::to_string(n) + "x" +
                     std::to_string(n) + " matrix");
  }
  const StandardBasis basis = standard_basis(space, block);
  const EigenDecomposition eig = hermitian_eig(h);
  const double scale = eig.values.cwiseAbs().maxCoeff();
  const double zero_cut = kZeroEigenvalueRel * scale;

  std::vector<ClVector> columns;
  columns.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double lambda = eig.values(k);
    const auto ks = static_cast<std::size_t>(k);
    if (std::abs(lambda) <= zero_cut) {
      columns.push_back(basis.e[ks] + basis.f[ks]);
    } else if (lambda > 0.0) {
      columns.push_back(std::sqrt(lambda) * basis.f[ks]);
    } else {
      columns.push_back(std::sqrt(-lambda) * basis.e[ks]);
    }
  }

  GramResolution out;
  out.target = h;
  for (Eigen::Index i = 0; i < n; ++i) {
    ClVector c = ClVector::zero(space);
    for (Eigen::Index k = 0; k < n; ++k) c += eig.vectors(i, k) * columns[static_cast<std::size_t>(k)];
    out.vectors.push_back(std::move(c));
  }
  return out;
}

GramResolution resolve_hermitian(const HermitianMatrix& h, const SpacePtr& space) {
  if (!space) throw InputError("resolve_hermitian: null generator space");
  if (space->n_pos() != space->n_neg() || space->n_pos() % 2 != 0) {
    throw InputError("resolve_hermitian: signature must be (2n, 2n)");
  }
  return resolve_hermitian(h, space, Block{"all", 0, space->dim()});
}

Matrix2c PairResolution::x() const {
  Matrix2c m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = bullet(c[a], c[b].conj());
  return m;
}

Matrix2c PairResolution::p() const {
  Matrix2c m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = bullet(dstar[a], dstar[b].conj());
  return m;
}

Matrix2c PairResolution::mixed() const {
  Matrix2c m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = bullet(c[a], dstar[b]);
  return m;
}

PairResolution resolve_pair(const Matrix2c& x, const Matrix2c& p, const Matrix2c& mixed, const SpacePtr& space,
                            const Block& c_block, const Block& d_block, const Block& h_block) {
  if (!mixed.allFinite()) throw InputError("resolve_pair: non-finite mixed products");
  if (h_block.n_pairs() < 2) throw InputError("resolve_pair: h-block needs at least two basis pairs");
  const HermitianMatrix hx(x);
  const HermitianMatrix hp(p);
  const StandardBasis hb = standard_basis(space, h_block);

  const Matrix2c b = mixed.transpose();
  const HermitianMatrix x_rest(hx.entries() - CMatrix::Identity(2, 2));
  const HermitianMatrix p_rest(hp.entries() - CMatrix(b * b.adjoint()));
  const GramResolution rc = resolve_hermitian(x_rest, space, c_block);
  const GramResolution rd = resolve_hermitian(p_rest, space, d_block);

  PairResolution out;
  for (int a = 0; a < 2; ++a) {
    ClVector c = rc.vectors[static_cast<std::size_t>(a)] + hb.f[static_cast<std::size_t>(a)];
    ClVector d = rd.vectors[static_cast<std::size_t>(a)];
    for (int i = 0; i < 2; ++i) d += b(a, i) * hb.f[static_cast<std::size_t>(i)].conj();
    out.c.push_back(std::move(c));
    out.dstar.push_back(std::move(d));
  }
  return out;
}

PairResolution resolve_pair(const Matrix2c& x, const Matrix2c& p, const Matrix2c& mixed) {
  const SpacePtr space = GeneratorSpace::allocate_blocks({{"c", 2}, {"d", 2}, {"h", 2}});
  return resolve_pair(x, p, mixed, space, space->block("c"), space->block("d"), space->block("h"));
}

}  // namespace cliffdyn
