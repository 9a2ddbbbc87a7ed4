#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arealaw/dynamics.hpp"
#include "arealaw/lattice.hpp"
#include "arealaw/linalg.hpp"

namespace arealaw {

struct CorrelationValue {
  double value = 0.0;
  bool normalized = false;  // an operator had norm > 1 and was rescaled
};

/// |<XY> - <X><Y>| in a pure state; supports must be disjoint.
CorrelationValue connected_correlation(const Lattice& lattice, const Vector& state,
                                       const SiteOperator& X, const SiteOperator& Y);

struct GapClustering {
  double v = 0.0;
  double xi = 0.0;
};

/// v = 2 J 5^s and xi = 10 v / gap.
GapClustering gap_clustering_params(double J, int s, double gap);

enum class EnvelopeMode { exponential, polynomial };

std::string to_string(EnvelopeMode mode);
EnvelopeMode parse_envelope_mode(const std::string& name);

/// Gamma(l, |X|) = c1 |X| e^{-l/xi}            (exponential)
///               = c1 / (l - xi ln|X|)^nu      (polynomial, nu > s)
struct Envelope {
  EnvelopeMode mode = EnvelopeMode::exponential;
  double c1 = 1.0;
  double xi = 1.0;
  double nu = 0.0;
  int s = 1;

  Envelope() = default;
  Envelope(EnvelopeMode mode, double c1, double xi, double nu, int s);
};

double gamma_eval(const Envelope& env, double l, double size);

struct CorrelationSample {
  int l = 0;            // Chebyshev separation of the two supports
  int support = 0;      // |X| = |Y|
  double measured = 0.0;
};

struct DecayOptions {
  std::vector<int> sizes{1, 2};
  std::vector<int> separations;  // empty: every feasible separation
  EnvelopeMode mode = EnvelopeMode::exponential;
  int xi_points = 200;
  double xi_min = 0.02;
  double xi_max = 200.0;
  int nu_points = 120;
  double nu_step = 0.1;
  double floor = 1e-14;  // samples below this are ignored in the fit objective
};

struct CorrelationProfile {
  std::vector<CorrelationSample> samples;
  bool found = false;
  Envelope envelope;
  double objective = 0.0;  // sum of log(envelope / measured)
  std::string message;
};

/// Largest connected correlation over traceless Pauli strings on two
/// contiguous blocks of a chain, for every (size, separation) cell.
std::vector<CorrelationSample> measure_decay(const Lattice& lattice, const Vector& state,
                                             const DecayOptions& options);

/// Smallest dominating envelope on a grid over xi (and nu); see DecayOptions.
CorrelationProfile fit_envelope(const std::vector<CorrelationSample>& samples, int s,
                                const DecayOptions& options);

CorrelationProfile decay_profile(const Lattice& lattice, const Vector& state,
                                 const DecayOptions& options);

/// Gamma(sample) >= measured for every sample.
bool envelope_dominates(const Envelope& env, const std::vector<CorrelationSample>& samples);

}  // namespace arealaw
