#include "qmve/profile.hpp"

// Everything is inline; the translation unit exists so the header has a home
// in the build graph.

namespace qmve {}
