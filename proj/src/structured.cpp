#include "rtk/structured.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace rtk {

namespace {

CMatrix kron_chain(const std::vector<CMatrix>& factors) {
  // phi(A1 o ... o AN) = AN (x) ... (x) A1 with the first mode fastest.
  CMatrix out = factors.front();
  for (std::size_t n = 1; n < factors.size(); ++n) {
    CMatrix next = Eigen::kroneckerProduct(factors[n], out);
    out.swap(next);
  }
  return out;
}

void require_rank_one(const GcpdTensor& a, const char* what) {
  a.validate();
  if (a.rank() != 1) fail(ErrorCode::kNotRankOne, std::string(what) + " needs a rank-one tensor");
}

// Applies `m` along mode `mode` of column-major data with dims `dims`.
CMatrix apply_along(const CMatrix& data, const Dims& dims, int mode, const CMatrix& m) {
  if (m.cols() != dims[mode]) {
    fail(ErrorCode::kShapeMismatch, "mode product: matrix has " + std::to_string(m.cols()) +
                                        " columns, mode has dimension " + std::to_string(dims[mode]));
  }
  const Index before = numel(std::span<const Index>(dims.data(), mode));
  const Index after = data.size() / (before * dims[mode]);
  const Index out_dim = m.rows();
  CMatrix out(before * out_dim, after);
  for (Index a = 0; a < after; ++a) {
    Eigen::Map<const CMatrix> slice(data.data() + a * before * dims[mode], before, dims[mode]);
    Eigen::Map<CMatrix> dst(out.data() + a * before * out_dim, before, out_dim);
    dst.noalias() = slice * m.transpose();
  }
  return out;
}

}  // namespace

GcpdTensor::GcpdTensor(std::vector<std::vector<CMatrix>> t) : terms(std::move(t)) { validate(); }

void GcpdTensor::validate() const {
  if (terms.empty() || terms.front().empty()) fail(ErrorCode::kShapeMismatch, "GCPD needs at least one term and mode");
  const auto& first = terms.front();
  for (const auto& term : terms) {
    if (term.size() != first.size()) fail(ErrorCode::kShapeMismatch, "GCPD terms differ in order");
    for (std::size_t n = 0; n < term.size(); ++n) {
      if (term[n].rows() != first[n].rows() || term[n].cols() != first[n].cols() || term[n].size() == 0) {
        fail(ErrorCode::kShapeMismatch, "GCPD factor sizes differ in mode " + std::to_string(n));
      }
    }
  }
}

Shape GcpdTensor::shape() const {
  validate();
  Dims rows, cols;
  for (const auto& f : terms.front()) {
    rows.push_back(f.rows());
    cols.push_back(f.cols());
  }
  return Shape(rows, cols);
}

Dims GcpdVector::dims() const {
  if (terms.empty() || terms.front().empty()) fail(ErrorCode::kShapeMismatch, "empty GCPD vector");
  Dims d;
  for (const auto& v : terms.front()) d.push_back(v.size());
  return d;
}

PairedTensor outer(const std::vector<CMatrix>& factors) {
  if (factors.empty()) fail(ErrorCode::kShapeMismatch, "outer product of nothing");
  Dims rows, cols;
  for (const auto& f : factors) {
    rows.push_back(f.rows());
    cols.push_back(f.cols());
  }
  return PairedTensor(Shape(rows, cols), kron_chain(factors));
}

PairedTensor densify(const GcpdTensor& a) {
  PairedTensor out(a.shape());
  for (const auto& term : a.terms) out.unfolding() += kron_chain(term);
  return out;
}

PlainTensor densify(const GcpdVector& v) {
  const Dims dims = v.dims();
  PlainTensor out(dims);
  for (const auto& term : v.terms) {
    std::vector<CMatrix> cols(term.begin(), term.end());
    out.data() += kron_chain(cols);
  }
  return out;
}

GcpdTensor gcpd_einstein(const GcpdTensor& a, const GcpdTensor& b) {
  a.validate();
  b.validate();
  if (a.shape().col_dims != b.shape().row_dims) {
    fail(ErrorCode::kShapeMismatch, "GCPD product: " + a.shape().to_string() + " times " + b.shape().to_string());
  }
  GcpdTensor out;
  for (const auto& ta : a.terms) {
    for (const auto& tb : b.terms) {
      std::vector<CMatrix> term;
      for (std::size_t n = 0; n < ta.size(); ++n) term.push_back(ta[n] * tb[n]);
      out.terms.push_back(std::move(term));
    }
  }
  return out;
}

PlainTensor mode_product(const PlainTensor& x, int mode, const CMatrix& m) {
  if (mode < 0 || mode >= x.order()) fail(ErrorCode::kIndexOutOfRange, "mode product: bad mode");
  CMatrix data = apply_along(x.data(), x.dims(), mode, m);
  Dims dims = x.dims();
  dims[mode] = m.rows();
  return PlainTensor(dims, Eigen::Map<const CVector>(data.data(), data.size()));
}

PairedTensor row_mode_product(const PairedTensor& e, int mode, const CMatrix& m) {
  if (mode < 0 || mode >= e.order()) fail(ErrorCode::kIndexOutOfRange, "mode product: bad mode");
  // Columns of the unfolding act as one extra trailing mode.
  Dims dims = e.row_dims();
  dims.push_back(e.unfolding().cols());
  CMatrix data = apply_along(e.unfolding(), dims, mode, m);
  Dims rows = e.row_dims();
  rows[mode] = m.rows();
  return PairedTensor(Shape(rows, e.col_dims()), Eigen::Map<const CMatrix>(data.data(), numel(rows), e.unfolding().cols()));
}

PairedTensor col_mode_product(const PairedTensor& e, int mode, const CMatrix& m) {
  return transpose(row_mode_product(transpose(e), mode, m));
}

PairedTensor rankone_left_apply(const GcpdTensor& a, const PairedTensor& e) {
  require_rank_one(a, "rankone_left_apply");
  const auto& f = a.terms.front();
  if (a.shape().col_dims != e.row_dims()) {
    fail(ErrorCode::kShapeMismatch, "rankone_left_apply: " + a.shape().to_string() + " times " + e.shape().to_string());
  }
  PairedTensor out = e;
  for (int n = 0; n < e.order(); ++n) out = row_mode_product(out, n, f[n]);
  return out;
}

PairedTensor rankone_right_apply(const PairedTensor& e, const GcpdTensor& a) {
  require_rank_one(a, "rankone_right_apply");
  const auto& f = a.terms.front();
  if (a.shape().row_dims != e.col_dims()) {
    fail(ErrorCode::kShapeMismatch, "rankone_right_apply: " + e.shape().to_string() + " times " + a.shape().to_string());
  }
  PairedTensor out = e;
  for (int n = 0; n < e.order(); ++n) out = col_mode_product(out, n, f[n].transpose());
  return out;
}

double rankone_left_apply_flops(const GcpdTensor& a, const Shape& e) {
  require_rank_one(a, "rankone_left_apply_flops");
  double size = static_cast<double>(e.rows()) * static_cast<double>(e.cols());
  double flops = 0.0;
  const auto& f = a.terms.front();
  for (std::size_t n = 0; n < f.size(); ++n) {
    // Each mode product touches every entry once per output index of that mode.
    size = size / static_cast<double>(f[n].cols()) * static_cast<double>(f[n].rows());
    flops += size * static_cast<double>(f[n].cols());
  }
  return flops;
}

double dense_einstein_flops(const Shape& a, const Shape& b) {
  return static_cast<double>(a.rows()) * static_cast<double>(a.cols()) * static_cast<double>(b.cols());
}

PairedTensor pad_order(const PairedTensor& a, int order) {
  if (order < a.order()) fail(ErrorCode::kShapeMismatch, "cannot pad to a smaller order");
  Dims rows = a.row_dims(), cols = a.col_dims();
  rows.resize(order, 1);
  cols.resize(order, 1);
  return PairedTensor(Shape(rows, cols), a.unfolding());
}

namespace {

// index_map(i_a, i_b) = linear index of (i_a[n] * db[n] + i_b[n]) in the product dims.
std::vector<Index> kron_index_map(const Dims& da, const Dims& db) {
  const Index na = numel(da), nb = numel(db);
  Dims prod(da.size());
  for (std::size_t n = 0; n < da.size(); ++n) prod[n] = da[n] * db[n];
  std::vector<Index> map(na * nb);
  Dims ia(da.size()), ib(db.size()), ip(da.size());
  for (Index a = 0; a < na; ++a) {
    multi_index(a, da, ia);
    for (Index b = 0; b < nb; ++b) {
      multi_index(b, db, ib);
      for (std::size_t n = 0; n < da.size(); ++n) ip[n] = ia[n] * db[n] + ib[n];
      map[a * nb + b] = linear_index(ip, prod);
    }
  }
  return map;
}

}  // namespace

PairedTensor kron(const PairedTensor& a_in, const PairedTensor& b_in) {
  const int order = std::max(a_in.order(), b_in.order());
  const PairedTensor a = pad_order(a_in, order);
  const PairedTensor b = pad_order(b_in, order);
  Dims rows(order), cols(order);
  for (int n = 0; n < order; ++n) {
    rows[n] = a.row_dims()[n] * b.row_dims()[n];
    cols[n] = a.col_dims()[n] * b.col_dims()[n];
  }
  const auto rmap = kron_index_map(a.row_dims(), b.row_dims());
  const auto cmap = kron_index_map(a.col_dims(), b.col_dims());
  const Index br = b.unfolding().rows(), bc = b.unfolding().cols();
  PairedTensor out(Shape(rows, cols));
  for (Index ca = 0; ca < a.unfolding().cols(); ++ca) {
    for (Index cb = 0; cb < bc; ++cb) {
      const Index c = cmap[ca * bc + cb];
      for (Index ra = 0; ra < a.unfolding().rows(); ++ra) {
        const Complex av = a.unfolding()(ra, ca);
        if (av == Complex(0.0)) continue;
        for (Index rb = 0; rb < br; ++rb) out.unfolding()(rmap[ra * br + rb], c) = av * b.unfolding()(rb, cb);
      }
    }
  }
  return out;
}

PlainTensor vec(const PairedTensor& x) {
  // Mode n of the result has dimension J_n K_n with index k_n J_n + j_n.
  const int order = x.order();
  Dims dims(order);
  for (int n = 0; n < order; ++n) dims[n] = x.row_dims()[n] * x.col_dims()[n];
  PlainTensor out(dims);
  Dims j(order), k(order), v(order);
  for (Index c = 0; c < x.unfolding().cols(); ++c) {
    multi_index(c, x.col_dims(), k);
    for (Index r = 0; r < x.unfolding().rows(); ++r) {
      multi_index(r, x.row_dims(), j);
      for (int n = 0; n < order; ++n) v[n] = k[n] * x.row_dims()[n] + j[n];
      out.data()(linear_index(v, dims)) = x.unfolding()(r, c);
    }
  }
  return out;
}

PairedTensor unvec(const PlainTensor& y, const Shape& shape) {
  const int order = shape.order();
  Dims dims(order);
  for (int n = 0; n < order; ++n) dims[n] = shape.row_dims[n] * shape.col_dims[n];
  if (y.dims() != dims) {
    fail(ErrorCode::kShapeMismatch, "unvec: dims " + to_string(y.dims()) + " do not match " + shape.to_string());
  }
  PairedTensor out(shape);
  Dims j(order), k(order), v(order);
  for (Index c = 0; c < out.unfolding().cols(); ++c) {
    multi_index(c, shape.col_dims, k);
    for (Index r = 0; r < out.unfolding().rows(); ++r) {
      multi_index(r, shape.row_dims, j);
      for (int n = 0; n < order; ++n) v[n] = k[n] * shape.row_dims[n] + j[n];
      out.unfolding()(r, c) = y.data()(linear_index(v, dims));
    }
  }
  return out;
}

GcpdTensor gcpd_kron(const GcpdTensor& a, const GcpdTensor& b) {
  a.validate();
  b.validate();
  const std::size_t order = std::max(a.order(), b.order());
  auto padded = [order](std::vector<CMatrix> t) {
    t.resize(order, CMatrix::Ones(1, 1));
    return t;
  };
  GcpdTensor out;
  for (const auto& ta : a.terms) {
    const auto pa = padded(ta);
    for (const auto& tb : b.terms) {
      const auto pb = padded(tb);
      std::vector<CMatrix> term;
      for (std::size_t n = 0; n < order; ++n) term.push_back(Eigen::kroneckerProduct(pa[n], pb[n]).eval());
      out.terms.push_back(std::move(term));
    }
  }
  return out;
}

GcpdVector gcpd_vec(const GcpdTensor& a) {
  a.validate();
  GcpdVector out;
  for (const auto& term : a.terms) {
    std::vector<CVector> vs;
    for (const auto& f : term) vs.push_back(Eigen::Map<const CVector>(f.data(), f.size()));
    out.terms.push_back(std::move(vs));
  }
  return out;
}

PairedTensor transpose_permutation_tensor(const Dims& dims) {
  // (P^{i^j})^T (x) P^{i^j} has its single unit at row (j I + i), column (i I + j) per mode.
  const int order = static_cast<int>(dims.size());
  Dims sq(order);
  for (int n = 0; n < order; ++n) sq[n] = dims[n] * dims[n];
  PairedTensor p(Shape::square(sq));
  const Index total = numel(dims);
  Dims i(order), j(order), r(order), c(order);
  for (Index li = 0; li < total; ++li) {
    multi_index(li, dims, i);
    for (Index lj = 0; lj < total; ++lj) {
      multi_index(lj, dims, j);
      for (int n = 0; n < order; ++n) {
        r[n] = j[n] * dims[n] + i[n];
        c[n] = i[n] * dims[n] + j[n];
      }
      p.unfolding()(linear_index(r, sq), linear_index(c, sq)) = 1.0;
    }
  }
  return p;
}

GcpdTensor kronsum_tensor(const CMatrix& a, int order) {
  if (order < 1 || a.rows() != a.cols() || a.rows() < 1) {
    fail(ErrorCode::kShapeMismatch, "kronsum_tensor needs a square matrix and order >= 1");
  }
  const CMatrix eye = CMatrix::Identity(a.rows(), a.cols());
  GcpdTensor out;
  for (int n = 0; n < order; ++n) {
    std::vector<CMatrix> term(order, eye);
    term[n] = a.transpose();
    out.terms.push_back(std::move(term));
  }
  return out;
}

double rankone_norm(const GcpdTensor& a, NormKind which) {
  require_rank_one(a, "rankone_norm");
  double value = 1.0;
  for (const auto& f : a.terms.front()) {
    if (which == NormKind::kFrobenius) {
      value *= f.norm();
    } else {
      Eigen::BDCSVD<CMatrix> svd(f);
      value *= svd.singularValues()(0);
    }
  }
  return value;
}

}  // namespace rtk
