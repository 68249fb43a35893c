#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ltbt/errors.hpp"
#include "ltbt/lts.hpp"

namespace ltbt {

/// Reproducible pseudo-random LTS: each of the n*n*k candidate
/// transitions is kept with the given density, drawn from a seeded
/// mt19937 with an explicit threshold compare (no distribution objects,
/// so the bytes are identical across platforms). Actions are a, b, c...
inline std::string gen_random_aut(std::uint32_t states, std::uint32_t actions, double density,
                                  std::uint64_t seed) {
  if (states == 0) throw error("gen-random: need at least one state");
  if (actions == 0 || actions > 26) throw error("gen-random: action count must be in [1,26]");
  if (!(density >= 0.0 && density <= 1.0)) throw error("gen-random: density must be in [0,1]");

  std::mt19937 rng{std::uint32_t(seed)};
  const std::uint64_t threshold = std::uint64_t(density * 4294967296.0);
  std::vector<std::string> lines;
  for (std::uint32_t p = 0; p < states; ++p)
    for (std::uint32_t a = 0; a < actions; ++a)
      for (std::uint32_t q = 0; q < states; ++q)
        if (std::uint64_t(rng()) < threshold)
          lines.push_back("(" + std::to_string(p) + ",\"" + std::string(1, char('a' + a)) +
                          "\"," + std::to_string(q) + ")");

  std::string out = "des (0," + std::to_string(lines.size()) + "," + std::to_string(states) + ")\n";
  for (const auto& l : lines) out += l + "\n";
  return out;
}

/// Same, parsed, with the full k-letter alphabet declared even when some
/// letter labels no transition.
inline Lts gen_random_lts(std::uint32_t states, std::uint32_t actions, double density,
                          std::uint64_t seed) {
  std::vector<Action> alphabet;
  for (std::uint32_t a = 0; a < actions; ++a) alphabet.emplace_back(std::string(1, char('a' + a)));
  return parse_aut(gen_random_aut(states, actions, density, seed), alphabet);
}

}  // namespace ltbt
