#pragma once

#include "ktree/common.hpp"
#include "ktree/params.hpp"

namespace ktree::exactprob {

// Pr[x + y = z] for x, y uniform on <s>. Exactly (d - |z|)/d^2 with
// d = 2*floor(s/2)+1. Requires |z| <= 2*floor(s/2); outside that the
// formula would go negative while the true probability is 0.
ExactRational probSumToZ(const RangeSpec& r, const Int& z);

// Pr[x + y in <s*p>], with the target range passed as `sub`.
ExactRational probSumInRange(const RangeSpec& r, const RangeSpec& sub);

// Max-ratio distance between the uniform distribution on <s*p> and the sum
// of two uniforms on <s> conditioned on landing in <s*p>. Always >= 1.
ExactRational mrDistFromUnif(const RangeSpec& r, const RangeSpec& sub);

// Pr[w + x in <s*p> and w + y in <s*p>] for w, x, y uniform on <s>.
ExactRational probSumWithTwoRVInRange(const RangeSpec& r, const RangeSpec& sub);

// Max-ratio distance between U_{sp} x U_{sp} and the joint distribution of
// (w+x, w+y) conditioned on both landing in <s*p>. Always >= 1.
ExactRational mrDistFromPairUnif(const RangeSpec& r, const RangeSpec& sub);

// Pr[(x + y) mod m, centered, lands in <m*p>] for odd m; the centered sum of
// two uniforms on Z_m is itself uniform, so this is |<m*p>| / m.
ExactRational probSumModInRange(const Int& m, const RangeSpec& sub);

// Conveniences taking the filter parameter instead of a prebuilt sub-range.
// The rational forms keep the sub-range floor exact; the PrecReal forms
// floor s*p with the snap semantics of RangeSpec::fromReal.
ExactRational probSumInRange(const RangeSpec& r, const ExactRational& p);
ExactRational mrDistFromUnif(const RangeSpec& r, const ExactRational& p);
ExactRational probSumWithTwoRVInRange(const RangeSpec& r, const ExactRational& p);
ExactRational mrDistFromPairUnif(const RangeSpec& r, const ExactRational& p);
ExactRational probSumModInRange(const Int& m, const ExactRational& p);
ExactRational probSumInRange(const RangeSpec& r, const PrecReal& p);
ExactRational mrDistFromUnif(const RangeSpec& r, const PrecReal& p);
ExactRational probSumWithTwoRVInRange(const RangeSpec& r, const PrecReal& p);
ExactRational mrDistFromPairUnif(const RangeSpec& r, const PrecReal& p);
ExactRational probSumModInRange(const Int& m, const PrecReal& p);

}  // namespace ktree::exactprob
