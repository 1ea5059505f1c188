#pragma once

// Exact two-photon states over a handful of spatial modes.
//
// Each photon carries a spatial wavefunction and a 2-dimensional internal
// vector (spectral/temporal degrees of freedom). A single-photon label is the
// pair (mode, internal basis index). Two-photon states are stored as
// amplitudes on unordered label pairs; a doubly occupied label carries the
// amplitude of the normalized |2> Fock state, so the squared norm is the plain
// sum of squared magnitudes.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace twocopy::fock {

using Complex = std::complex<double>;

inline constexpr double kPruneThreshold = 1e-15;
inline constexpr std::size_t kInternalDim = 2;

struct ModeId {
  std::uint8_t index = 0;
  friend auto operator<=>(const ModeId&, const ModeId&) = default;
};

class InternalVector {
 public:
  InternalVector() : components_{Complex{1.0, 0.0}, Complex{0.0, 0.0}} {}
  InternalVector(Complex e0, Complex e1);

  static InternalVector basis(std::size_t k);

  const std::array<Complex, kInternalDim>& components() const { return components_; }
  Complex operator[](std::size_t k) const { return components_[k]; }

 private:
  std::array<Complex, kInternalDim> components_;
};

/// Internal vector sqrt(v) e0 + sqrt(1-v) e1, whose squared overlap with e0 is v.
InternalVector overlap_from_visibility(double v);

class SinglePhotonWavefunction {
 public:
  SinglePhotonWavefunction(std::map<ModeId, Complex> amplitudes, InternalVector internal);

  const std::map<ModeId, Complex>& amplitudes() const { return amplitudes_; }
  const InternalVector& internal() const { return internal_; }

 private:
  std::map<ModeId, Complex> amplitudes_;
  InternalVector internal_;
};

struct Label {
  ModeId mode;
  std::uint8_t internal = 0;
  friend auto operator<=>(const Label&, const Label&) = default;
};

// Unordered pair, stored with first <= second.
struct LabelPair {
  Label first;
  Label second;
  friend auto operator<=>(const LabelPair&, const LabelPair&) = default;
};

LabelPair make_pair(Label a, Label b);

struct BeamSplitter {
  ModeId mode_a;
  ModeId mode_b;
  // Single-particle amplitudes transform as (u_a, u_b) -> matrix * (u_a, u_b).
  std::array<std::array<Complex, 2>, 2> matrix;
};

struct Phase {
  ModeId mode;
  double phi = 0.0;
};

class OpticalElement {
 public:
  static OpticalElement phase(ModeId mode, double phi);
  static OpticalElement beam_splitter(ModeId a, ModeId b,
                                      const std::array<std::array<Complex, 2>, 2>& matrix);
  /// (1/sqrt2)[[1,1],[1,-1]]
  static OpticalElement balanced_splitter(ModeId a, ModeId b);

  bool is_phase() const { return is_phase_; }
  const Phase& as_phase() const { return phase_; }
  const BeamSplitter& as_beam_splitter() const { return splitter_; }

 private:
  OpticalElement() = default;
  bool is_phase_ = true;
  Phase phase_{};
  BeamSplitter splitter_{};
};

/// Occupation counts indexed by mode.
using Occupation = std::vector<std::uint8_t>;

class TwoPhotonState {
 public:
  TwoPhotonState(std::size_t num_modes, std::map<LabelPair, Complex> amplitudes,
                 double prune_threshold = kPruneThreshold);

  std::size_t num_modes() const { return num_modes_; }
  const std::map<LabelPair, Complex>& amplitudes() const { return amplitudes_; }
  Complex amplitude(const LabelPair& pair) const;
  double prune_threshold() const { return prune_threshold_; }

  TwoPhotonState scaled(Complex factor) const;

 private:
  std::size_t num_modes_;
  std::map<LabelPair, Complex> amplitudes_;
  double prune_threshold_;
};

TwoPhotonState product_state(const SinglePhotonWavefunction& psi1,
                             const SinglePhotonWavefunction& psi2, std::size_t num_modes);

TwoPhotonState apply_element(const TwoPhotonState& state, const OpticalElement& elem);

double norm(const TwoPhotonState& state);

std::map<Occupation, double> occupation_probabilities(const TwoPhotonState& state);

}  // namespace twocopy::fock
