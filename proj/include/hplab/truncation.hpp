#ifndef HPLAB_TRUNCATION_HPP
#define HPLAB_TRUNCATION_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hplab/core.hpp"
#include "hplab/linalg.hpp"
#include "hplab/parallel.hpp"
#include "hplab/rng.hpp"
#include "hplab/sampling.hpp"

namespace hplab {

enum class SamplerKind { haar, hp_rejection, hp_mh };

inline std::string_view to_string(SamplerKind k) {
  switch (k) {
    case SamplerKind::haar: return "haar";
    case SamplerKind::hp_rejection: return "hp_rejection";
    case SamplerKind::hp_mh: return "hp_mh";
  }
  return "?";
}

inline std::optional<SamplerKind> parse_sampler_kind(std::string_view s) {
  if (s == "haar") return SamplerKind::haar;
  if (s == "hp_rejection") return SamplerKind::hp_rejection;
  if (s == "hp_mh") return SamplerKind::hp_mh;
  return std::nullopt;
}

/// Eigenvalues of the top-left n x n corner of a unitary.
inline PointConfiguration truncation_spectrum(const ComplexMatrix& u, int n) {
  return eigenvalues(truncate(u, n));
}

/// `count` eigenvalue configurations of n x n truncations of U drawn from
/// the Hua-Pickrell law on U(n+m).
///
/// Independent samplers give sample i its own substream i; the MH sampler
/// splits the ensemble over `mh.chains` chains, chain c on substream c.
/// Either way the output is identical for every worker count.
inline std::vector<PointConfiguration> sample_truncation_ensemble(const HPParams& p, int count,
                                                                  SamplerKind sampler,
                                                                  const RngStream& rng,
                                                                  const MHConfig& mh = {},
                                                                  int workers = 1) {
  p.validate();
  require(count >= 1, "sample_truncation_ensemble: count must be >= 1");
  if (sampler == SamplerKind::haar)
    require(p.delta == Complex{0.0, 0.0}, "haar sampler only realizes delta = 0");
  if (sampler == SamplerKind::hp_rejection)
    require(p.delta.real() >= 0.0, "rejection sampler requires Re(delta) >= 0");

  const int dim = p.dim();
  std::vector<PointConfiguration> out(static_cast<std::size_t>(count));

  if (sampler != SamplerKind::hp_mh) {
    parallel_for(out.size(), workers, [&](std::size_t i) {
      RngStream s = rng.substream(i);
      const ComplexMatrix u = sampler == SamplerKind::haar
                                  ? sample_haar_unitary(dim, s)
                                  : sample_hua_pickrell_rejection(dim, p.delta, s);
      out[i] = truncation_spectrum(u, p.n);
    });
    return out;
  }

  mh.validate();
  const auto chains = static_cast<std::size_t>(std::min(mh.chains, count));
  parallel_for(chains, workers, [&](std::size_t c) {
    const std::size_t lo = out.size() * c / chains;
    const std::size_t hi = out.size() * (c + 1) / chains;
    RngStream s = rng.substream(c);
    const auto states = sample_hua_pickrell_mh(dim, p.delta, static_cast<int>(hi - lo), mh, s);
    for (std::size_t i = lo; i < hi; ++i) out[i] = truncation_spectrum(states[i - lo], p.n);
  });
  return out;
}

}  // namespace hplab

#endif  // HPLAB_TRUNCATION_HPP
