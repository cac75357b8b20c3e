#pragma once
/**
 * @brief Shared, lazily built artifacts for the level-11 testbed.
 */

#include "modsym/pipeline.hpp"

namespace testbed {

inline modsym::Workspace& workspace() {
  static modsym::Workspace ws{[] {
    modsym::RunConfig c;
#ifdef MODSYM_TEST_CACHE
    c.cache_dir = MODSYM_TEST_CACHE;
#endif
    return c;
  }()};
  return ws;
}

inline const modsym::HyperbolicContext& context() { return workspace().context(); }

inline modsym::EnumerationResult enumeration(double T) { return workspace().enumeration(T); }

inline const modsym::SymbolTable& symbols(const modsym::EnumerationResult& e) { return workspace().symbols(e); }

inline const modsym::QExpansion& coefficients(modsym::i64 M) { return workspace().coefficients(M); }

}  // namespace testbed
