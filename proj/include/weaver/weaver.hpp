#pragma once

// Umbrella header: exact and floating-point kernels for the weaver's
// distribution W(n, p), its geometric triangle, the limit distribution
// ("weaver's hem" / binomial cascade), a brute-force enumeration oracle, and
// a reproducible progressive-sampling Monte Carlo engine.

#include "weaver/choice_vector.hpp"
#include "weaver/component.hpp"
#include "weaver/distribution.hpp"
#include "weaver/errors.hpp"
#include "weaver/format.hpp"
#include "weaver/hem.hpp"
#include "weaver/moments.hpp"
#include "weaver/numeric.hpp"
#include "weaver/oracle.hpp"
#include "weaver/process.hpp"
#include "weaver/rng.hpp"
#include "weaver/triangle.hpp"
