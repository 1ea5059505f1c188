#include "twocopy/fock.hpp"

#include <cmath>
#include <sstream>

#include "twocopy/error.hpp"

namespace twocopy::fock {
namespace {

constexpr double kUnitTolerance = 1e-12;
const double kSqrt2 = std::sqrt(2.0);

struct LabelAmplitude {
  Label label;
  Complex amplitude;
};

std::vector<LabelAmplitude> label_amplitudes(const SinglePhotonWavefunction& psi) {
  std::vector<LabelAmplitude> out;
  for (const auto& [mode, amp] : psi.amplitudes()) {
    for (std::uint8_t k = 0; k < kInternalDim; ++k) {
      Complex a = amp * psi.internal()[k];
      if (a != Complex{}) out.push_back({Label{mode, k}, a});
    }
  }
  return out;
}

void check_mode(ModeId mode, std::size_t num_modes) {
  if (mode.index >= num_modes) {
    std::ostringstream msg;
    msg << "mode " << int(mode.index) << " outside state with " << num_modes << " modes";
    throw ValidationError(msg.str());
  }
}

// Image of one label under the element: list of (label, coefficient).
std::vector<LabelAmplitude> transform_label(const Label& in, const OpticalElement& elem) {
  if (elem.is_phase()) {
    const auto& ph = elem.as_phase();
    if (in.mode == ph.mode) return {{in, std::polar(1.0, ph.phi)}};
    return {{in, Complex{1.0, 0.0}}};
  }
  const auto& bs = elem.as_beam_splitter();
  if (in.mode == bs.mode_a) {
    return {{Label{bs.mode_a, in.internal}, bs.matrix[0][0]},
            {Label{bs.mode_b, in.internal}, bs.matrix[1][0]}};
  }
  if (in.mode == bs.mode_b) {
    return {{Label{bs.mode_a, in.internal}, bs.matrix[0][1]},
            {Label{bs.mode_b, in.internal}, bs.matrix[1][1]}};
  }
  return {{in, Complex{1.0, 0.0}}};
}

void add_symmetric(std::map<LabelPair, Complex>& out, const Label& a, const Label& b, Complex t) {
  // t is an ordered-tensor contribution T_ab; convert to the pair amplitude.
  if (a == b) {
    out[make_pair(a, b)] += t;
  } else {
    // Both orders of an off-diagonal pair accumulate, each carries sqrt2/2.
    out[make_pair(a, b)] += t * (kSqrt2 / 2.0);
  }
}

}  // namespace

InternalVector::InternalVector(Complex e0, Complex e1) : components_{e0, e1} {
  double n = std::norm(e0) + std::norm(e1);
  if (std::abs(n - 1.0) > kUnitTolerance) {
    throw ValidationError("internal vector is not normalized");
  }
}

InternalVector InternalVector::basis(std::size_t k) {
  if (k >= kInternalDim) throw ValidationError("internal basis index out of range");
  return k == 0 ? InternalVector{1.0, 0.0} : InternalVector{0.0, 1.0};
}

InternalVector overlap_from_visibility(double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError("overlap must lie in [0, 1]");
  }
  return InternalVector{Complex{std::sqrt(v), 0.0}, Complex{std::sqrt(1.0 - v), 0.0}};
}

SinglePhotonWavefunction::SinglePhotonWavefunction(std::map<ModeId, Complex> amplitudes,
                                                   InternalVector internal)
    : amplitudes_(std::move(amplitudes)), internal_(internal) {
  double n = 0.0;
  for (const auto& [mode, a] : amplitudes_) n += std::norm(a);
  if (std::abs(n - 1.0) > kUnitTolerance) {
    throw ValidationError("single-photon wavefunction is not normalized");
  }
}

LabelPair make_pair(Label a, Label b) {
  if (b < a) std::swap(a, b);
  return LabelPair{a, b};
}

OpticalElement OpticalElement::phase(ModeId mode, double phi) {
  OpticalElement e;
  e.is_phase_ = true;
  e.phase_ = Phase{mode, phi};
  return e;
}

OpticalElement OpticalElement::beam_splitter(ModeId a, ModeId b,
                                             const std::array<std::array<Complex, 2>, 2>& m) {
  if (a == b) throw ValidationError("beam splitter needs two distinct modes");
  // M^dagger M == I
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Complex s = std::conj(m[0][i]) * m[0][j] + std::conj(m[1][i]) * m[1][j];
      double expected = i == j ? 1.0 : 0.0;
      if (std::abs(s - expected) > kUnitTolerance) {
        throw ValidationError("beam splitter matrix is not unitary");
      }
    }
  }
  OpticalElement e;
  e.is_phase_ = false;
  e.splitter_ = BeamSplitter{a, b, m};
  return e;
}

OpticalElement OpticalElement::balanced_splitter(ModeId a, ModeId b) {
  const double h = 1.0 / kSqrt2;
  return beam_splitter(a, b, {{{Complex{h}, Complex{h}}, {Complex{h}, Complex{-h}}}});
}

TwoPhotonState::TwoPhotonState(std::size_t num_modes, std::map<LabelPair, Complex> amplitudes,
                               double prune_threshold)
    : num_modes_(num_modes), prune_threshold_(prune_threshold) {
  for (auto& [pair, amp] : amplitudes) {
    check_mode(pair.first.mode, num_modes);
    check_mode(pair.second.mode, num_modes);
    if (pair.second < pair.first) throw ValidationError("label pair not in canonical order");
    if (std::abs(amp) >= prune_threshold_) amplitudes_.emplace(pair, amp);
  }
}

Complex TwoPhotonState::amplitude(const LabelPair& pair) const {
  auto it = amplitudes_.find(pair);
  return it == amplitudes_.end() ? Complex{} : it->second;
}

TwoPhotonState TwoPhotonState::scaled(Complex factor) const {
  std::map<LabelPair, Complex> out;
  for (const auto& [pair, amp] : amplitudes_) out.emplace(pair, amp * factor);
  return TwoPhotonState(num_modes_, std::move(out), prune_threshold_);
}

TwoPhotonState product_state(const SinglePhotonWavefunction& psi1,
                             const SinglePhotonWavefunction& psi2, std::size_t num_modes) {
  for (const auto* psi : {&psi1, &psi2}) {
    for (const auto& [mode, a] : psi->amplitudes()) check_mode(mode, num_modes);
  }
  auto u1 = label_amplitudes(psi1);
  auto u2 = label_amplitudes(psi2);

  // a†_1 a†_2 |0> = sum_{l,m} u1_l u2_m a†_l a†_m |0>
  std::map<LabelPair, Complex> amps;
  for (const auto& x : u1) {
    for (const auto& y : u2) {
      Complex t = x.amplitude * y.amplitude;
      if (x.label == y.label) {
        amps[make_pair(x.label, y.label)] += t * kSqrt2;
      } else {
        amps[make_pair(x.label, y.label)] += t;
      }
    }
  }
  double n = 0.0;
  for (const auto& [pair, a] : amps) n += std::norm(a);
  // n == 1 + |<psi1|psi2>|^2
  const double scale = 1.0 / std::sqrt(n);
  for (auto& [pair, a] : amps) a *= scale;
  return TwoPhotonState(num_modes, std::move(amps));
}

TwoPhotonState apply_element(const TwoPhotonState& state, const OpticalElement& elem) {
  if (elem.is_phase()) {
    check_mode(elem.as_phase().mode, state.num_modes());
  } else {
    check_mode(elem.as_beam_splitter().mode_a, state.num_modes());
    check_mode(elem.as_beam_splitter().mode_b, state.num_modes());
  }

  std::map<LabelPair, Complex> out;
  for (const auto& [pair, amp] : state.amplitudes()) {
    // Symmetric tensor entries: T_ll = c, T_lm = T_ml = c / sqrt2.
    const auto image_a = transform_label(pair.first, elem);
    const auto image_b = transform_label(pair.second, elem);
    const bool diagonal = pair.first == pair.second;
    const Complex t = diagonal ? amp : amp / kSqrt2;
    for (const auto& a : image_a) {
      for (const auto& b : image_b) {
        Complex contrib = t * a.amplitude * b.amplitude;
        add_symmetric(out, a.label, b.label, contrib);
        if (!diagonal) add_symmetric(out, b.label, a.label, contrib);
      }
    }
  }
  return TwoPhotonState(state.num_modes(), std::move(out), state.prune_threshold());
}

double norm(const TwoPhotonState& state) {
  double n = 0.0;
  for (const auto& [pair, a] : state.amplitudes()) n += std::norm(a);
  return n;
}

std::map<Occupation, double> occupation_probabilities(const TwoPhotonState& state) {
  std::map<Occupation, double> probs;
  for (const auto& [pair, a] : state.amplitudes()) {
    Occupation occ(state.num_modes(), 0);
    ++occ[pair.first.mode.index];
    ++occ[pair.second.mode.index];
    probs[occ] += std::norm(a);
  }
  return probs;
}

}  // namespace twocopy::fock
