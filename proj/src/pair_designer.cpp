#include "mixel/pair_designer.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <string>

#include "mixel/errors.hpp"

namespace mixel {

std::string_view to_string(PairMode m) noexcept { return m == PairMode::Attract ? "attract" : "repel"; }

PairMode pair_mode_from_string(std::string_view s) {
  if (s == "attract") return PairMode::Attract;
  if (s == "repel") return PairMode::Repel;
  throw ConfigError("unknown pair mode '" + std::string(s) + "'");
}

namespace {

// Unbiased draw in [0, bound) straight from the engine output, so the stream
// does not depend on the standard library's distribution implementation.
std::size_t draw_below(std::mt19937_64& rng, std::size_t bound) {
  const std::uint64_t range = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = rng();
  while (x >= limit) {
    x = rng();
  }
  return static_cast<std::size_t>(x % range);
}

std::size_t factorial_capped(std::size_t n, std::size_t cap) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) {
    f *= i;
    if (f >= cap) {
      return cap;
    }
  }
  return f;
}

PixelGrid lock_for(const PixelGrid& key, PairMode mode) { return mode == PairMode::Attract ? complement(key) : key; }

struct Selection {
  std::vector<std::size_t> members;
  double score = std::numeric_limits<double>::infinity();
};

// Greedy selection of k candidates among the first n.
Selection greedy_select(std::size_t k, std::size_t n, const std::vector<double>& within,
                        const std::vector<std::vector<double>>& cross, const std::vector<Permutation>& perms) {
  Selection sel;
  double running = 0.0;
  std::vector<bool> taken(n, false);
  while (sel.members.size() < k) {
    std::size_t best = n;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[c]) continue;
      double s = std::max(running, within[c]);
      for (auto m : sel.members) {
        s = std::max(s, cross[c][m]);
      }
      if (s < best_score || (s == best_score && perms[c] < perms[best])) {
        best = c;
        best_score = s;
      }
    }
    taken[best] = true;
    sel.members.push_back(best);
    running = best_score;
  }
  sel.score = running;
  return sel;
}

}  // namespace

std::vector<Permutation> sample_row_permutations(std::size_t n, std::size_t count, std::uint64_t seed) {
  if (count > factorial_capped(n, count + 1)) {
    throw ConfigError("requested " + std::to_string(count) + " distinct permutations of " + std::to_string(n) +
                      " rows, only " + std::to_string(factorial_capped(n, count + 1)) + " exist");
  }
  std::mt19937_64 rng(seed);
  std::set<Permutation> seen;
  std::vector<Permutation> out;
  out.reserve(count);
  while (out.size() < count) {
    Permutation p = identity_permutation(n);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(p[i - 1], p[draw_below(rng, i)]);
    }
    if (seen.insert(p).second) {
      out.push_back(std::move(p));
    }
  }
  return out;
}

PairSet generate_pair_set(const PairSetRequest& request) {
  if (request.k == 0) {
    throw ConfigError("pair count k must be at least 1");
  }
  if (request.k > request.candidates) {
    throw ConfigError("k = " + std::to_string(request.k) + " exceeds candidates = " + std::to_string(request.candidates));
  }
  if (!is_power_of_two(request.order)) {
    throw SizeError("Hadamard order " + std::to_string(request.order) + " is not a power of two");
  }
  if (request.order < 4) {
    throw ConfigError("order must be at least 4 to have distinguishable row permutations");
  }

  const auto base = sylvester_hadamard(request.order);
  const auto perms = sample_row_permutations(request.order, request.candidates, request.seed);
  const std::size_t n = perms.size();

  std::vector<PixelGrid> keys;
  keys.reserve(n);
  for (const auto& p : perms) {
    keys.push_back(permute_rows(base, p));
  }

  // |ncc| is invariant under negating either side, so one key/key peak covers
  // all four key/lock combinations between two pairs.
  std::vector<double> within(n);
  std::vector<std::vector<double>> cross(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    within[i] = agnosticism_peak(keys[i], keys[i], true, kPairScoreNormalization);
    for (std::size_t j = i + 1; j < n; ++j) {
      cross[i][j] = cross[j][i] = agnosticism_peak(keys[i], keys[j], false, kPairScoreNormalization);
    }
  }

  Selection best;
  for (std::size_t prefix = request.k; prefix <= n; ++prefix) {
    auto sel = greedy_select(request.k, prefix, within, cross, perms);
    if (sel.score < best.score) {
      best = std::move(sel);
    }
  }

  PairSet set;
  set.seed = request.seed;
  set.mode = request.mode;
  for (auto idx : best.members) {
    set.pairs.push_back({keys[idx], lock_for(keys[idx], request.mode), perms[idx]});
  }
  const auto score = score_pairs(set.pairs);
  set.score = score.worst;
  set.mean_score = score.mean;
  return set;
}

PairScore score_pairs(const std::vector<SurfacePair>& pairs, Normalization norm) {
  PairScore out;
  double total = 0.0;
  std::size_t comparisons = 0;
  auto record = [&](double peak) {
    out.worst = std::max(out.worst, peak);
    total += peak;
    ++comparisons;
  };
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    record(agnosticism_peak(pairs[i].key, pairs[i].lock, true, norm));
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      const PixelGrid* left[] = {&pairs[i].key, &pairs[i].lock};
      const PixelGrid* right[] = {&pairs[j].key, &pairs[j].lock};
      double peak = 0.0;
      for (const auto* a : left) {
        for (const auto* b : right) {
          peak = std::max(peak, agnosticism_peak(*a, *b, false, norm));
        }
      }
      record(peak);
    }
  }
  out.mean = comparisons ? total / static_cast<double>(comparisons) : 0.0;
  return out;
}

PixelGrid extract_block(const PixelGrid& grid, std::size_t row0, std::size_t col0, std::size_t rows, std::size_t cols) {
  if (row0 + rows > grid.rows() || col0 + cols > grid.cols()) {
    throw RangeError("block exceeds grid bounds");
  }
  PixelGrid block(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      block.set(r, c, grid(row0 + r, col0 + c));
    }
  }
  return block;
}

CanvasLayout canvas_compile(const PixelGrid& token, const AssignmentGrid& assignments) {
  if (token.empty() || token.rows() != token.cols()) {
    throw DomainError("canvas token must be square");
  }
  if (orthogonality_defect(token) != 0.0) {
    throw DomainError("canvas token must be a Hadamard matrix");
  }
  if (assignments.rows == 0 || assignments.cols == 0 || assignments.cells.size() != assignments.rows * assignments.cols) {
    throw ShapeError("assignment grid is empty or inconsistent");
  }

  const std::size_t t = token.rows();
  Permutation shift(t);
  for (std::size_t i = 0; i < t; ++i) {
    shift[i] = (i + 1) % t;
  }
  const PixelGrid attract = complement(token);
  const PixelGrid agnostic = t > 1 ? permute_rows(token, shift) : PixelGrid(1, 1);

  CanvasLayout layout{token, assignments.rows, assignments.cols, assignments,
                      PixelGrid(assignments.rows * t, assignments.cols * t)};
  for (std::size_t mr = 0; mr < assignments.rows; ++mr) {
    for (std::size_t mc = 0; mc < assignments.cols; ++mc) {
      const PixelGrid* fill = &agnostic;
      switch (assignments.at(mr, mc)) {
        case Interaction::Attract:
          fill = &attract;
          break;
        case Interaction::Repel:
          fill = &token;
          break;
        case Interaction::Agnostic:
          break;
      }
      for (std::size_t r = 0; r < t; ++r) {
        for (std::size_t c = 0; c < t; ++c) {
          layout.canvas.set(mr * t + r, mc * t + c, (*fill)(r, c));
        }
      }
    }
  }
  return layout;
}

std::vector<double> measure_metapixels(const CanvasLayout& layout) {
  const std::size_t t = layout.token.rows();
  std::vector<double> out;
  out.reserve(layout.meta_rows * layout.meta_cols);
  for (std::size_t mr = 0; mr < layout.meta_rows; ++mr) {
    for (std::size_t mc = 0; mc < layout.meta_cols; ++mc) {
      out.push_back(ncc_at(extract_block(layout.canvas, mr * t, mc * t, t, t), layout.token, {0, 0}));
    }
  }
  return out;
}

}  // namespace mixel
