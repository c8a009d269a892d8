#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qalt {

/// Thrown when a register would exceed the configured dense-dimension cap.
struct DimCapError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed inputs (shape mismatches, invalid supports, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a numerical routine fails (eigensolver non-convergence, ...).
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A register of sites with per-site local dimensions. Site 0 is the most
/// significant digit of the flattened mixed-radix index, i.e. basis state
/// |s_0 s_1 ... s_{n-1}> has flat index ((s_0*d_1 + s_1)*d_2 + s_2)*...
struct RegisterShape {
  std::vector<int> dims;
  std::int64_t total_dim = 1;

  static constexpr std::int64_t kDefaultDimCap = std::int64_t{1} << 13;

  RegisterShape() = default;

  explicit RegisterShape(std::vector<int> site_dims,
                         std::int64_t dim_cap = kDefaultDimCap)
      : dims(std::move(site_dims)) {
    for (int d : dims) {
      if (d < 2) throw ValidationError("site dimension must be >= 2");
      total_dim *= d;
      if (total_dim > dim_cap)
        throw DimCapError("register dimension " + std::to_string(total_dim) +
                          " exceeds cap " + std::to_string(dim_cap));
    }
  }

  static RegisterShape uniform(int sites, int d,
                               std::int64_t dim_cap = kDefaultDimCap) {
    return RegisterShape(std::vector<int>(static_cast<std::size_t>(sites), d),
                         dim_cap);
  }
  static RegisterShape qubits(int n, std::int64_t cap = kDefaultDimCap) {
    return uniform(n, 2, cap);
  }
  static RegisterShape qutrits(int n, std::int64_t cap = kDefaultDimCap) {
    return uniform(n, 3, cap);
  }

  int n_sites() const { return static_cast<int>(dims.size()); }

  bool operator==(const RegisterShape& o) const { return dims == o.dims; }

  /// stride[i] = product of dims after site i (site 0 most significant).
  std::vector<std::int64_t> strides() const {
    std::vector<std::int64_t> s(dims.size(), 1);
    for (int i = n_sites() - 2; i >= 0; --i) s[i] = s[i + 1] * dims[i + 1];
    return s;
  }
};

/// Precomputed index decomposition for a site subset: every flat index splits
/// uniquely as rest_base[r] + sup_offset[s], where s enumerates the support
/// sites' joint state (support order, first listed site most significant) and
/// r enumerates the remaining sites. Built once, reused by embeddings, local
/// applications and partial traces.
class EmbeddingPlan {
 public:
  EmbeddingPlan(const RegisterShape& shape, std::vector<int> support)
      : support_(std::move(support)) {
    const int n = shape.n_sites();
    std::vector<bool> in_support(static_cast<std::size_t>(n), false);
    int prev = -1;
    for (int s : support_) {
      if (s < 0 || s >= n) throw ValidationError("support site out of range");
      if (s <= prev)
        throw ValidationError("support must be strictly increasing");
      in_support[static_cast<std::size_t>(s)] = true;
      prev = s;
    }
    const auto stride = shape.strides();

    sup_dim_ = 1;
    for (int s : support_) sup_dim_ *= shape.dims[static_cast<std::size_t>(s)];
    sup_offset_.resize(static_cast<std::size_t>(sup_dim_));
    for (std::int64_t v = 0; v < sup_dim_; ++v) {
      std::int64_t rem = v, off = 0;
      for (int k = static_cast<int>(support_.size()) - 1; k >= 0; --k) {
        const int site = support_[static_cast<std::size_t>(k)];
        const int d = shape.dims[static_cast<std::size_t>(site)];
        off += (rem % d) * stride[static_cast<std::size_t>(site)];
        rem /= d;
      }
      sup_offset_[static_cast<std::size_t>(v)] = off;
    }

    rest_dim_ = shape.total_dim / sup_dim_;
    rest_base_.resize(static_cast<std::size_t>(rest_dim_));
    std::vector<int> rest_sites;
    for (int i = 0; i < n; ++i)
      if (!in_support[static_cast<std::size_t>(i)]) rest_sites.push_back(i);
    for (std::int64_t r = 0; r < rest_dim_; ++r) {
      std::int64_t rem = r, base = 0;
      for (int k = static_cast<int>(rest_sites.size()) - 1; k >= 0; --k) {
        const int site = rest_sites[static_cast<std::size_t>(k)];
        const int d = shape.dims[static_cast<std::size_t>(site)];
        base += (rem % d) * stride[static_cast<std::size_t>(site)];
        rem /= d;
      }
      rest_base_[static_cast<std::size_t>(r)] = base;
    }
  }

  const std::vector<int>& support() const { return support_; }
  std::int64_t sup_dim() const { return sup_dim_; }
  std::int64_t rest_dim() const { return rest_dim_; }
  std::int64_t flat(std::int64_t rest, std::int64_t sup) const {
    return rest_base_[static_cast<std::size_t>(rest)] +
           sup_offset_[static_cast<std::size_t>(sup)];
  }
  std::int64_t base(std::int64_t rest) const {
    return rest_base_[static_cast<std::size_t>(rest)];
  }
  std::int64_t offset(std::int64_t sup) const {
    return sup_offset_[static_cast<std::size_t>(sup)];
  }

 private:
  std::vector<int> support_;
  std::int64_t sup_dim_ = 1;
  std::int64_t rest_dim_ = 1;
  std::vector<std::int64_t> sup_offset_;
  std::vector<std::int64_t> rest_base_;
};

}  // namespace qalt
