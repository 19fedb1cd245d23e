#include "dstomo/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dstomo/rng.hpp"

namespace dstomo {

namespace {

std::array<std::pair<double, double>, 4> window_edges(const DetectorLayout& layout) {
  if (!(layout.delta_xi > 0.0)) throw std::invalid_argument("delta_xi must be positive");
  std::array<std::pair<double, double>, 4> edges;
  for (int i = 0; i < 4; ++i) {
    const double c = layout.xi[static_cast<std::size_t>(i)];
    edges[static_cast<std::size_t>(i)] = {c - layout.delta_xi, c + layout.delta_xi};
  }
  auto sorted = edges;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i + 1 < 4; ++i)
    if (sorted[static_cast<std::size_t>(i)].second > sorted[static_cast<std::size_t>(i) + 1].first)
      throw std::invalid_argument("detector windows overlap");
  return edges;
}

// Simpson rule on [a, b] with n subintervals (n even).
template <typename F>
double simpson(const F& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
  return acc * h / 3.0;
}

}  // namespace

std::array<double, 4> ideal_probabilities(const BlochState& rho, const Povm4& povm) {
  if (!rho.is_physical()) throw std::invalid_argument("Bloch vector exceeds unit length");
  std::array<double, 4> p;
  for (int i = 0; i < 4; ++i) {
    const auto& el = povm.elements[static_cast<std::size_t>(i)];
    p[static_cast<std::size_t>(i)] = el.weight * 0.5 * (1.0 + dot(el.s, rho.r));
  }
  return p;
}

PositionSampler::PositionSampler(const BlochState& rho, const DetectorLayout& layout,
                                 double grid_spacing) {
  if (!rho.is_physical()) throw std::invalid_argument("Bloch vector exceeds unit length");
  const SlitConfig cfg{layout.delta};
  grid_ = default_grid(layout.zeta0, cfg, grid_spacing);

  const auto pdf = [&](double xi) {
    return detection_pdf(rho, {xi, layout.zeta0}, cfg);
  };

  // Cumulative mass at cell boundaries; per-cell Simpson keeps the window
  // masses of the tabulated distribution accurate to ~h^2 of a cell edge cut.
  cdf_.resize(grid_.n);
  cdf_[0] = 0.0;
  double prev = pdf(grid_.xi(0));
  for (std::size_t j = 1; j < grid_.n; ++j) {
    const double mid = pdf(grid_.xi(j - 1) + 0.5 * grid_.spacing);
    const double cur = pdf(grid_.xi(j));
    cdf_[j] = cdf_[j - 1] + grid_.spacing / 6.0 * (prev + 4.0 * mid + cur);
    prev = cur;
  }
  total_mass_ = cdf_.back();

  const std::size_t guide_size = 1 << 15;
  guide_.assign(guide_size + 1, 0);
  guide_scale_ = static_cast<double>(guide_size);
  std::size_t j = 0;
  for (std::size_t k = 0; k <= guide_size; ++k) {
    const double target = total_mass_ * static_cast<double>(k) / static_cast<double>(guide_size);
    while (j + 1 < grid_.n && cdf_[j + 1] < target) ++j;
    guide_[k] = static_cast<std::uint32_t>(j);
  }

  const auto edges = window_edges(layout);
  for (int i = 0; i < 4; ++i) {
    const auto [lo, hi] = edges[static_cast<std::size_t>(i)];
    window_prob_[static_cast<std::size_t>(i)] = simpson(pdf, lo, hi, 64) / total_mass_;
  }
}

double PositionSampler::sample_one(std::mt19937_64& engine) const {
  return transform(uniform01(engine));
}

std::vector<double> PositionSampler::sample(std::size_t n, std::uint64_t seed) const {
  std::vector<double> out;
  out.reserve(n);
  std::array<double, 1024> buf;
  for (std::uint64_t block = 0; out.size() < n; ++block) {
    std::mt19937_64 engine(block_seed(seed, block));
    std::size_t left = std::min(kBlockSize, n - out.size());
    while (left > 0) {
      const std::size_t take = std::min(left, buf.size());
      for (std::size_t i = 0; i < take; ++i) buf[i] = uniform01(engine);
      for (std::size_t i = 0; i < take; ++i) out.push_back(transform(buf[i]));
      left -= take;
    }
  }
  return out;
}

double PositionSampler::window_probability(int i) const {
  if (i < 0 || i > 3) throw std::invalid_argument("window index must be in 0..3");
  return window_prob_[static_cast<std::size_t>(i)];
}

double PositionSampler::acceptance_probability() const {
  return window_prob_[0] + window_prob_[1] + window_prob_[2] + window_prob_[3];
}

std::vector<double> sample_positions(const BlochState& rho, const DetectorLayout& layout,
                                     std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  return PositionSampler(rho, layout).sample(n, seed);
}

CountRecord bin_counts(const std::vector<double>& positions, const DetectorLayout& layout) {
  const auto edges = window_edges(layout);
  CountRecord rec;
  rec.n_total = positions.size();
  for (const double xi : positions) {
    bool hit = false;
    for (int i = 0; i < 4; ++i) {
      const auto& [lo, hi] = edges[static_cast<std::size_t>(i)];
      if (xi >= lo && xi <= hi) {
        ++rec.n[static_cast<std::size_t>(i)];
        hit = true;
        break;
      }
    }
    if (!hit) ++rec.n_discarded;
  }
  return rec;
}

namespace {

// Tally one position; returns true when it landed in a window.
inline bool tally(double xi, const std::array<std::pair<double, double>, 4>& edges,
                  CountRecord& rec) {
  for (int w = 0; w < 4; ++w) {
    const auto& [lo, hi] = edges[static_cast<std::size_t>(w)];
    if (xi >= lo && xi <= hi) {
      ++rec.n[static_cast<std::size_t>(w)];
      return true;
    }
  }
  ++rec.n_discarded;
  return false;
}

}  // namespace

CountRecord simulate_counts(const BlochState& rho, const DetectorLayout& layout,
                            std::uint64_t n_total, std::uint64_t seed) {
  const PositionSampler sampler(rho, layout);
  const auto edges = window_edges(layout);
  CountRecord rec;
  rec.n_total = n_total;
  // three passes per chunk (fill, transform, bin) so the inverse-CDF table
  // walks pipeline without the binning branches in the way
  std::array<double, 1024> ubuf, xbuf;
  std::uint64_t done = 0;
  for (std::uint64_t block = 0; done < n_total; ++block) {
    std::mt19937_64 engine(block_seed(seed, block));
    std::uint64_t left = std::min<std::uint64_t>(PositionSampler::kBlockSize, n_total - done);
    done += left;
    while (left > 0) {
      const std::size_t take = std::min<std::uint64_t>(left, ubuf.size());
      for (std::size_t i = 0; i < take; ++i) ubuf[i] = uniform01(engine);
      for (std::size_t i = 0; i < take; ++i) xbuf[i] = sampler.transform(ubuf[i]);
      for (std::size_t i = 0; i < take; ++i) tally(xbuf[i], edges, rec);
      left -= take;
    }
  }
  return rec;
}

std::vector<CountRecord> simulate_to_accepted(const BlochState& rho, const DetectorLayout& layout,
                                              const std::vector<std::uint64_t>& targets,
                                              std::uint64_t seed, std::uint64_t max_total) {
  if (targets.empty()) return {};
  if (!std::is_sorted(targets.begin(), targets.end()))
    throw std::invalid_argument("accepted-count targets must be ascending");
  const PositionSampler sampler(rho, layout);
  const auto edges = window_edges(layout);

  std::vector<CountRecord> out;
  CountRecord rec;
  std::size_t next = 0;
  std::array<double, 1024> ubuf, xbuf;
  for (std::uint64_t block = 0; next < targets.size() && rec.n_total < max_total; ++block) {
    std::mt19937_64 engine(block_seed(seed, block));
    std::uint64_t left = std::min<std::uint64_t>(PositionSampler::kBlockSize, max_total - rec.n_total);
    while (left > 0 && next < targets.size()) {
      const std::size_t take = std::min<std::uint64_t>(left, ubuf.size());
      for (std::size_t i = 0; i < take; ++i) ubuf[i] = uniform01(engine);
      for (std::size_t i = 0; i < take; ++i) xbuf[i] = sampler.transform(ubuf[i]);
      for (std::size_t i = 0; i < take; ++i) {
        ++rec.n_total;
        if (tally(xbuf[i], edges, rec) && rec.accepted() >= targets[next]) {
          out.push_back(rec);
          if (++next == targets.size()) break;
        }
      }
      left -= take;
    }
  }
  while (out.size() < targets.size()) out.push_back(rec);  // max_total hit early
  return out;
}

LinearInversion linear_invert(const std::array<double, 4>& p_hat, const Povm4& povm,
                              bool artificial_balance) {
  LinearInversion result;

  if (artificial_balance) {
    // Rescale counts as if the weights had been equal, then renormalize and
    // apply the ideal-frame formula r = 3 sum p_i s_i.
    std::array<double, 4> scaled;
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
      const auto& el = povm.elements[static_cast<std::size_t>(i)];
      if (!(el.weight > 0.0)) throw std::invalid_argument("POVM weights must be positive");
      scaled[static_cast<std::size_t>(i)] = p_hat[static_cast<std::size_t>(i)] * 0.5 / el.weight;
      total += scaled[static_cast<std::size_t>(i)];
    }
    Vec3 r{};
    for (int i = 0; i < 4; ++i)
      r += povm.elements[static_cast<std::size_t>(i)].s * (3.0 * scaled[static_cast<std::size_t>(i)] / total);
    result.r_hat = r;
    return result;
  }

  // Least squares on p_i = c_i (1 + s_i.r)/2: rows a_i = c_i s_i / 2,
  // rhs b_i = p_i - c_i/2, solved through the eigendecomposition of A^T A
  // so coplanar measurement vectors are detected and reported.
  std::array<std::array<double, 3>, 3> ata{};
  Vec3 atb{};
  for (int i = 0; i < 4; ++i) {
    const auto& el = povm.elements[static_cast<std::size_t>(i)];
    const Vec3 a = el.s * (0.5 * el.weight);
    const double b = p_hat[static_cast<std::size_t>(i)] - 0.5 * el.weight;
    const double av[3] = {a.x, a.y, a.z};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) ata[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] += av[r] * av[c];
    atb += a * b;
  }

  const SymEig3 eig = sym_eig3(ata);
  const double cutoff = 1e-12 * std::max(eig.values[2], 1e-300);
  Vec3 r{};
  for (int k = 0; k < 3; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    if (eig.values[ks] <= cutoff) {
      result.rank_deficient = true;
      result.noninformative.push_back(eig.vectors[ks]);
      continue;
    }
    r += eig.vectors[ks] * (dot(eig.vectors[ks], atb) / eig.values[ks]);
  }
  result.r_hat = r;
  return result;
}

ProjectedState project_physical(const Vec3& r_hat) {
  const double len = norm(r_hat);
  if (len <= 1.0) return {BlochState{r_hat}, false};
  return {BlochState{r_hat * (1.0 / len)}, true};
}

namespace {

BlochState mle_impl(const std::array<double, 4>& freq, const Povm4& povm, const MleOptions& opts,
                    std::vector<double>* trace_out) {
  std::array<Mat2, 4> effect;
  for (int i = 0; i < 4; ++i) {
    const auto& el = povm.elements[static_cast<std::size_t>(i)];
    effect[static_cast<std::size_t>(i)] = Mat2::from_bloch(el.s) * el.weight;
  }

  Mat2 rho = Mat2::identity() * 0.5;
  Mat2 best = rho;
  double prev_ll = -std::numeric_limits<double>::infinity();
  if (trace_out) trace_out->clear();

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    std::array<double, 4> tr;
    bool starved = false;
    for (int i = 0; i < 4; ++i) {
      tr[static_cast<std::size_t>(i)] = (effect[static_cast<std::size_t>(i)] * rho).trace().real();
      if (tr[static_cast<std::size_t>(i)] < 1e-14 && freq[static_cast<std::size_t>(i)] > 0.0)
        starved = true;
    }
    if (starved) {
      // an observed outcome has zero predicted probability: pull the iterate
      // back toward the maximally mixed state
      rho = rho * (1.0 - 1e-9) + Mat2::identity() * (0.5e-9);
      for (int i = 0; i < 4; ++i)
        tr[static_cast<std::size_t>(i)] = (effect[static_cast<std::size_t>(i)] * rho).trace().real();
    }

    double ll = 0.0;
    for (int i = 0; i < 4; ++i)
      if (freq[static_cast<std::size_t>(i)] > 0.0)
        ll += freq[static_cast<std::size_t>(i)] * std::log(tr[static_cast<std::size_t>(i)]);
    if (ll < prev_ll) break;  // fixed point passed within rounding; keep best
    if (trace_out) trace_out->push_back(ll);
    best = rho;
    if (ll - prev_ll < opts.tol) break;
    prev_ll = ll;

    Mat2 r_op{};
    for (int i = 0; i < 4; ++i)
      r_op = r_op + effect[static_cast<std::size_t>(i)] *
                        (freq[static_cast<std::size_t>(i)] / tr[static_cast<std::size_t>(i)]);
    Mat2 next = r_op * rho * r_op;
    const double t = next.trace().real();
    if (!(t > 0.0)) break;
    rho = next * (1.0 / t);
  }

  Vec3 r = best.bloch();
  const double len = norm(r);
  if (len > 1.0) r = r * (1.0 / len);
  return BlochState{r};
}

}  // namespace

BlochState mle_reconstruct(const CountRecord& counts, const Povm4& povm, const MleOptions& opts,
                           std::vector<double>* likelihood_trace) {
  const double total = static_cast<double>(counts.accepted());
  if (!(total >= 1.0)) throw std::invalid_argument("need at least one accepted count");
  std::array<double, 4> freq;
  for (int i = 0; i < 4; ++i)
    freq[static_cast<std::size_t>(i)] = static_cast<double>(counts.n[static_cast<std::size_t>(i)]) / total;
  return mle_impl(freq, povm, opts, likelihood_trace);
}

BlochState mle_reconstruct(const std::array<double, 4>& frequencies, const Povm4& povm,
                           const MleOptions& opts, std::vector<double>* likelihood_trace) {
  return mle_impl(frequencies, povm, opts, likelihood_trace);
}

double fidelity(const BlochState& a, const BlochState& b) {
  const double a2 = std::min(dot(a.r, a.r), 1.0);
  const double b2 = std::min(dot(b.r, b.r), 1.0);
  const double f = 0.5 * (1.0 + dot(a.r, b.r) + std::sqrt((1.0 - a2) * (1.0 - b2)));
  return std::clamp(f, 0.0, 1.0);
}

double trace_distance(const BlochState& a, const BlochState& b) {
  return std::clamp(0.5 * norm(a.r - b.r), 0.0, 1.0);
}

BlochState random_pure_state(std::mt19937_64& engine) {
  double g0, g1, g2, g3;
  gaussian_pair(engine, g0, g1);
  gaussian_pair(engine, g2, g3);
  Vec3 v{g0, g1, g2};
  const double len = norm(v);
  if (len < 1e-12) return BlochState{{0.0, 0.0, 1.0}};
  return BlochState{v * (1.0 / len)};
}

BlochState random_mixed_state(std::mt19937_64& engine) {
  const BlochState dir = random_pure_state(engine);
  const double radius = std::cbrt(uniform01(engine));
  return BlochState{dir.r * radius};
}

}  // namespace dstomo
