#include "bagclean/encoder.hpp"

namespace bagclean::encoder {

namespace {

// FNV-1a 64-bit over the token bytes, seeded.
std::uint64_t hash_token(const std::string& tok, std::uint64_t seed) {
  std::uint64_t h = 14695981039346656037ULL ^ (seed * 0x9e3779b97f4a7c15ULL);
  for (unsigned char c : tok) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

Vec StateVector::flatten() const {
  Vec out;
  out.reserve(dim());
  out.insert(out.end(), selected_part.begin(), selected_part.end());
  out.insert(out.end(), candidate_part.begin(), candidate_part.end());
  out.insert(out.end(), relation_part.begin(), relation_part.end());
  return out;
}

Vec encode_instance(const Instance& instance, const EncoderConfig& config) {
  if (instance.repr) {
    if (static_cast<int>(instance.repr->size()) != config.d_s) {
      throw DimensionError("encode_instance: precomputed repr has dimension " +
                           std::to_string(instance.repr->size()) +
                           ", expected " + std::to_string(config.d_s));
    }
    return *instance.repr;
  }
  Vec out(static_cast<std::size_t>(config.d_s), 0.0);
  for (const auto& tok : instance.tokens) {
    const std::uint64_t h = hash_token(tok, config.hash_seed);
    const std::size_t idx = h % static_cast<std::uint64_t>(config.d_s);
    const double sign = ((h >> 32) & 1ULL) ? 1.0 : -1.0;
    out[idx] += sign;
  }
  return out;
}

Vec relation_embedding(const Vec& e1_emb, const Vec& e2_emb) {
  if (e1_emb.size() != e2_emb.size()) {
    throw DimensionError("relation_embedding: entity embedding dims differ");
  }
  Vec out(e1_emb.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = e2_emb[i] - e1_emb[i];
  return out;
}

StateVector build_state(const std::vector<Vec>& selected, const Vec& candidate,
                        const Vec& rel) {
  StateVector s;
  s.selected_part = mean_of(selected, candidate.size());
  s.candidate_part = candidate;
  s.relation_part = rel;
  return s;
}

}  // namespace bagclean::encoder
