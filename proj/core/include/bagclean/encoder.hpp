#pragma once

#include <cstdint>

#include "bagclean/types.hpp"

namespace bagclean::encoder {

struct EncoderConfig {
  int d_s = 64;
  std::uint64_t hash_seed = 0;
  int d_e = 50;
};

// Agent state: pooled already-selected representations, the candidate
// representation, and the relation embedding, in that order.
struct StateVector {
  Vec selected_part;
  Vec candidate_part;
  Vec relation_part;

  Vec flatten() const;
  std::size_t dim() const {
    return selected_part.size() + candidate_part.size() +
           relation_part.size();
  }
};

// Returns the instance's precomputed repr verbatim when present, otherwise a
// deterministic hashed bag-of-words projection of its tokens into d_s
// dimensions (signed feature hashing, seeded by config.hash_seed).
Vec encode_instance(const Instance& instance, const EncoderConfig& config);

// Elementwise e2_emb - e1_emb (head + relation ~= tail orientation).
Vec relation_embedding(const Vec& e1_emb, const Vec& e2_emb);

// selected_part is the elementwise mean of `selected` (zero vector when the
// list is empty, dimension taken from `candidate`).
StateVector build_state(const std::vector<Vec>& selected, const Vec& candidate,
                        const Vec& rel);

}  // namespace bagclean::encoder
