#include "bagclean/types.hpp"

namespace bagclean {

int relation_index(const DatasetMeta& meta, const std::string& relation) {
  for (std::size_t i = 0; i < meta.relations.size(); ++i) {
    if (meta.relations[i] == relation) return static_cast<int>(i);
  }
  throw LookupError("unknown relation: " + relation);
}

}  // namespace bagclean
