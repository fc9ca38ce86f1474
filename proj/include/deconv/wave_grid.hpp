#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace deconv {

enum class DealiasRule { two_thirds, none };

inline std::string_view to_string(DealiasRule r) {
  return r == DealiasRule::two_thirds ? "two_thirds" : "none";
}

inline DealiasRule parse_dealias_rule(std::string_view s) {
  if (s == "two_thirds" || s == "2/3") return DealiasRule::two_thirds;
  if (s == "none") return DealiasRule::none;
  throw ValidationError("unknown dealias rule '" + std::string(s) + "'");
}

/// Integer wavenumber lattice of the 2pi-periodic box at resolution K.
///
/// Coefficients are stored in the real-to-complex half-spectrum layout
/// K x K x (K/2+1): index (i1, i2, i3) holds k = (s(i1), s(i2), i3) with
/// s(i) = i for i <= K/2 and i - K otherwise. The k3 = 0 plane stores both
/// members of each conjugate pair; every other stored mode stands for itself
/// and its (unstored) negative.
///
/// Nyquist wavenumbers (|k_i| = K/2) are never retained. Under the two-thirds
/// rule a mode is retained iff 3|k_i| < K on every axis, which removes all
/// aliasing from quadratic products.
class WaveGrid {
 public:
  /// max_mode >= 0 additionally drops modes with any |k_i| > max_mode.
  WaveGrid(int K, DealiasRule rule, int max_mode = -1)
      : K_(K), nz_(K / 2 + 1), rule_(rule), max_mode_(max_mode) {
    if (K < 4 || K % 2 != 0)
      throw ValidationError("grid resolution K must be an even integer >= 4, got " +
                            std::to_string(K));
    const std::size_t n = stored_modes();
    kvec_.resize(n);
    k2_.resize(n);
    mask_.resize(n);
    weight_.resize(n);
    partner_.assign(n, -1);
    for (int i1 = 0; i1 < K_; ++i1) {
      for (int i2 = 0; i2 < K_; ++i2) {
        for (int i3 = 0; i3 < nz_; ++i3) {
          const std::size_t idx = index(i1, i2, i3);
          const std::array<int, 3> k{signed_wavenumber(i1), signed_wavenumber(i2), i3};
          kvec_[idx] = k;
          k2_[idx] = double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]);
          bool keep = true;
          for (int c = 0; c < 3; ++c) {
            const int a = k[c] < 0 ? -k[c] : k[c];
            if (2 * a == K_) keep = false;
            if (rule_ == DealiasRule::two_thirds && 3 * a >= K_) keep = false;
            if (max_mode_ >= 0 && a > max_mode_) keep = false;
          }
          mask_[idx] = keep;
          weight_[idx] = (i3 == 0 || 2 * i3 == K_) ? 1.0 : 2.0;
          if (i3 == 0) partner_[idx] = std::int64_t(index((K_ - i1) % K_, (K_ - i2) % K_, 0));
        }
      }
    }
  }

  int resolution() const noexcept { return K_; }
  int nz() const noexcept { return nz_; }
  DealiasRule rule() const noexcept { return rule_; }
  int max_mode() const noexcept { return max_mode_; }

  std::size_t stored_modes() const noexcept { return std::size_t(K_) * K_ * nz_; }
  std::size_t logical_modes() const noexcept { return std::size_t(K_) * K_ * K_; }
  std::size_t real_points() const noexcept { return std::size_t(K_) * K_ * K_; }

  std::size_t index(int i1, int i2, int i3) const noexcept {
    return (std::size_t(i1) * K_ + i2) * nz_ + i3;
  }

  /// Storage index of wavenumber k, or -1 when k (and -k) are not stored.
  /// For k3 < 0 the index of -k is returned with conjugated=true.
  std::int64_t find(std::array<int, 3> k, bool* conjugated = nullptr) const noexcept {
    bool conj = false;
    if (k[2] < 0) {
      k = {-k[0], -k[1], -k[2]};
      conj = true;
    }
    if (conjugated) *conjugated = conj;
    for (int c = 0; c < 3; ++c)
      if (k[c] <= -K_ / 2 || k[c] > K_ / 2) return -1;
    auto wrap = [this](int v) { return v < 0 ? v + K_ : v; };
    return std::int64_t(index(wrap(k[0]), wrap(k[1]), k[2]));
  }

  int signed_wavenumber(int i) const noexcept { return i <= K_ / 2 ? i : i - K_; }

  const std::array<int, 3>& wavevector(std::size_t idx) const { return kvec_[idx]; }
  double k2(std::size_t idx) const { return k2_[idx]; }
  /// Retention flag of the dealias rule (true at k = 0).
  bool mask(std::size_t idx) const { return mask_[idx]; }
  /// Retained and nonzero: the modes that carry dynamics.
  bool active(std::size_t idx) const { return mask_[idx] && k2_[idx] > 0.0; }
  /// Multiplicity of a stored mode in full-lattice sums (1 or 2).
  double weight(std::size_t idx) const { return weight_[idx]; }
  /// Storage index of -k for modes in the k3 = 0 plane, else -1.
  std::int64_t partner(std::size_t idx) const { return partner_[idx]; }

  /// Largest retained |k_i| on any axis.
  int max_retained_wavenumber() const noexcept {
    int m = 0;
    for (int a = 0; 2 * a < K_; ++a)
      if ((rule_ == DealiasRule::none || 3 * a < K_) && (max_mode_ < 0 || a <= max_mode_)) m = a;
    return m;
  }

  friend bool operator==(const WaveGrid& a, const WaveGrid& b) noexcept {
    return a.K_ == b.K_ && a.rule_ == b.rule_ && a.max_mode_ == b.max_mode_;
  }

 private:
  int K_;
  int nz_;
  DealiasRule rule_;
  int max_mode_;
  std::vector<std::array<int, 3>> kvec_;
  std::vector<double> k2_;
  std::vector<bool> mask_;
  std::vector<double> weight_;
  std::vector<std::int64_t> partner_;
};

using GridPtr = std::shared_ptr<const WaveGrid>;

inline GridPtr make_grid(int K, DealiasRule rule = DealiasRule::two_thirds,
                         int max_mode = -1) {
  return std::make_shared<const WaveGrid>(K, rule, max_mode);
}

}  // namespace deconv
