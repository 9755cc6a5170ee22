#include "ktree/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

namespace ktree::oracle {

namespace {

long asLong(const Int& v, const char* what) {
    if (!v.fits_slong_p()) throw ResourceError(std::string(what) + " too large for enumeration");
    return v.get_si();
}

void checkRange(const RangeSpec& r) {
    if (2 * r.floorHalf > kMaxBruteRange)
        throw ResourceError("range too large for brute-force enumeration (s <= 400)");
}

}  // namespace

unsigned long SumHistogram::countAt(const Int& z) const {
    Int idx = z + 2 * floorHalf;
    if (idx < 0 || idx >= Int(counts.size())) return 0;
    return counts[idx.get_ui()];
}

SumHistogram sumHistogram(const RangeSpec& r) {
    checkRange(r);
    long h = asLong(r.floorHalf, "range");
    SumHistogram hist;
    hist.floorHalf = r.floorHalf;
    hist.counts.assign(static_cast<size_t>(4 * h + 1), 0);
    for (long x = -h; x <= h; ++x)
        for (long y = -h; y <= h; ++y) hist.counts[static_cast<size_t>(x + y + 2 * h)]++;
    hist.total = r.cardinality * r.cardinality;
    return hist;
}

ExactRational probSumToZBrute(const RangeSpec& r, const Int& z) {
    SumHistogram hist = sumHistogram(r);
    return makeRational(hist.countAt(z), hist.total);
}

ExactRational probSumInRangeBrute(const RangeSpec& r, const RangeSpec& sub) {
    SumHistogram hist = sumHistogram(r);
    long t = asLong(sub.floorHalf, "sub-range");
    Int inRange = 0;
    for (long z = -t; z <= t; ++z) inRange += hist.countAt(Int(z));
    return makeRational(inRange, hist.total);
}

ExactRational mrDistFromUnifBrute(const RangeSpec& r, const RangeSpec& sub) {
    SumHistogram hist = sumHistogram(r);
    long t = asLong(sub.floorHalf, "sub-range");
    Int total = 0;
    for (long z = -t; z <= t; ++z) total += hist.countAt(Int(z));
    if (total == 0) throw DomainError("conditioned sum distribution has empty support");
    ExactRational u = makeRational(1, sub.cardinality);
    ExactRational lambda = 1;
    for (long z = -t; z <= t; ++z) {
        ExactRational mass = makeRational(hist.countAt(Int(z)), total);
        if (mass == 0) throw DomainError("conditioned sum distribution not fully supported");
        ExactRational ratio1 = mass / u, ratio2 = u / mass;
        if (ratio1 > lambda) lambda = ratio1;
        if (ratio2 > lambda) lambda = ratio2;
    }
    return lambda;
}

ExactRational probSumWithTwoRVInRangeBrute(const RangeSpec& r, const RangeSpec& sub) {
    checkRange(r);
    long h = asLong(r.floorHalf, "range");
    long t = asLong(sub.floorHalf, "sub-range");
    // For each w, scan x to count the admissible window; y mirrors x.
    Int pairs = 0;
    for (long w = -h; w <= h; ++w) {
        Int cnt = 0;
        for (long x = -h; x <= h; ++x)
            if (std::labs(w + x) <= t) ++cnt;
        pairs += cnt * cnt;
    }
    Int d3 = r.cardinality * r.cardinality * r.cardinality;
    return makeRational(pairs, d3);
}

ExactRational mrDistFromPairUnifBrute(const RangeSpec& r, const RangeSpec& sub) {
    checkRange(r);
    long h = asLong(r.floorHalf, "range");
    long t = asLong(sub.floorHalf, "sub-range");
    // Joint counts c(z1,z2) = #{w : w, z1-w, z2-w all in <s>}, scanned over
    // the whole support of the conditioned pair distribution.
    Int total = 0;
    long minCount = -1, maxCount = -1;
    for (long z1 = -t; z1 <= t; ++z1) {
        for (long z2 = -t; z2 <= t; ++z2) {
            long c = 0;
            for (long w = -h; w <= h; ++w)
                if (std::labs(z1 - w) <= h && std::labs(z2 - w) <= h) ++c;
            total += c;
            if (minCount < 0 || c < minCount) minCount = c;
            if (maxCount < 0 || c > maxCount) maxCount = c;
        }
    }
    if (total == 0 || minCount <= 0)
        throw DomainError("conditioned pair distribution has empty support");
    ExactRational u = makeRational(1, sub.cardinality * sub.cardinality);
    ExactRational maxMass = makeRational(maxCount, total);
    ExactRational minMass = makeRational(minCount, total);
    ExactRational lambda1 = maxMass / u, lambda2 = u / minMass;
    return lambda1 >= lambda2 ? lambda1 : lambda2;
}

ExactRational probSumModInRangeBrute(const Int& m, const RangeSpec& sub) {
    if (m < 3 || mpz_even_p(m.get_mpz_t()))
        throw ParamError("centered mod-m sum requires odd m >= 3");
    if (m > kMaxBruteRange) throw ResourceError("modulus too large for brute-force enumeration");
    long mm = asLong(m, "modulus");
    long h = (mm - 1) / 2;
    long t = asLong(sub.floorHalf, "sub-range");
    Int hits = 0;
    for (long x = -h; x <= h; ++x) {
        for (long y = -h; y <= h; ++y) {
            long s = x + y;
            if (s > h) s -= mm;
            if (s < -h) s += mm;
            if (std::labs(s) <= t) ++hits;
        }
    }
    return makeRational(hits, m * m);
}

ExactRational probSumWithTwoRVInRangeLiteral(const RangeSpec& r, const RangeSpec& sub) {
    long h = asLong(r.floorHalf, "range");
    if (h > 40) throw ResourceError("literal triple loop limited to s <= 80");
    long t = asLong(sub.floorHalf, "sub-range");
    Int hits = 0;
    for (long w = -h; w <= h; ++w)
        for (long x = -h; x <= h; ++x)
            for (long y = -h; y <= h; ++y)
                if (std::labs(w + x) <= t && std::labs(w + y) <= t) ++hits;
    Int d3 = r.cardinality * r.cardinality * r.cardinality;
    return makeRational(hits, d3);
}

ExactRational mrDistFromPairUnifLiteral(const RangeSpec& r, const RangeSpec& sub) {
    long h = asLong(r.floorHalf, "range");
    if (h > 40) throw ResourceError("literal triple loop limited to s <= 80");
    long t = asLong(sub.floorHalf, "sub-range");
    std::map<std::pair<long, long>, long> joint;
    Int total = 0;
    for (long w = -h; w <= h; ++w)
        for (long x = -h; x <= h; ++x)
            for (long y = -h; y <= h; ++y)
                if (std::labs(w + x) <= t && std::labs(w + y) <= t) {
                    joint[{w + x, w + y}]++;
                    total += 1;
                }
    Int gridSize = sub.cardinality * sub.cardinality;
    if (Int(joint.size()) != gridSize)
        throw DomainError("conditioned pair distribution not supported on the full grid");
    ExactRational u = makeRational(1, gridSize);
    ExactRational lambda = 1;
    for (const auto& [zz, c] : joint) {
        ExactRational mass = makeRational(c, total);
        ExactRational ratio1 = mass / u, ratio2 = u / mass;
        if (ratio1 > lambda) lambda = ratio1;
        if (ratio2 > lambda) lambda = ratio2;
    }
    return lambda;
}

ConvolutionExpectation convolutionExpectation(const std::vector<RangeSpec>& ranges) {
    if (ranges.empty()) throw ParamError("empty range chain");
    if (ranges[0].cardinality > (Int(1) << 21))
        throw ResourceError("convolution oracle limited to leaf ranges <= 2^21");
    long h0 = asLong(ranges[0].floorHalf, "leaf range");

    // Counts of 2^d-tuples passing all filters so far, by their sum; the
    // masses are counts / card0^(2^d).
    std::vector<Int> counts(static_cast<size_t>(2 * h0 + 1), 1);
    long half = h0;

    ConvolutionExpectation out;
    Int denom = ranges[0].cardinality;
    {
        Int mass = 0;
        for (const Int& c : counts) mass += c;
        out.levelPassProb.push_back(makeRational(mass, denom));
    }
    for (size_t d = 1; d < ranges.size(); ++d) {
        long nextHalf = asLong(ranges[d].floorHalf, "level range");
        std::vector<Int> next(static_cast<size_t>(2 * nextHalf + 1), 0);
        for (long z = -nextHalf; z <= nextHalf; ++z) {
            Int acc = 0;
            long xLo = std::max(-half, z - half), xHi = std::min(half, z + half);
            for (long x = xLo; x <= xHi; ++x)
                acc += counts[static_cast<size_t>(x + half)] *
                       counts[static_cast<size_t>(z - x + half)];
            next[static_cast<size_t>(z + nextHalf)] = acc;
        }
        counts.swap(next);
        half = nextHalf;
        denom = denom * denom;
        Int mass = 0;
        for (const Int& c : counts) mass += c;
        out.levelPassProb.push_back(makeRational(mass, denom));
    }
    out.tupleZeroProb = makeRational(counts[static_cast<size_t>(half)], denom);
    return out;
}

ConvolutionExpectation convolutionExpectation(const LevelRanges& levels) {
    std::vector<RangeSpec> ranges;
    for (unsigned d = 0; d <= levels.logK(); ++d) ranges.push_back(levels.at(d));
    return convolutionExpectation(ranges);
}

ExactRational expectedZeroCount(const ConvolutionExpectation& conv, unsigned long n,
                                unsigned long k) {
    return ExactRational(intPow(Int(n), k)) * conv.tupleZeroProb;
}

ExactRational expectedTotalSize(const ConvolutionExpectation& conv, unsigned long n,
                                unsigned long k) {
    unsigned L = checkedLogK(Int(k));
    if (conv.levelPassProb.size() != L + 1)
        throw DomainError("convolution chain does not match k");
    ExactRational total = 0;
    for (unsigned d = 0; d <= L; ++d) {
        Int lists = Int(k) >> d;
        total += ExactRational(lists * intPow(Int(n), 1ul << d)) * conv.levelPassProb[d];
    }
    return total;
}

FourTupleEnumeration enumerateFourTuples(const LevelRanges& levels) {
    if (levels.k() != 4) throw ParamError("four-tuple enumeration requires k = 4");
    const Int& m = levels.m();
    if (m > 128) throw ResourceError("four-tuple enumeration limited to m <= 128");
    long h = asLong(levels.at(0).floorHalf, "m/2");
    long tau1 = asLong(levels.at(1).floorHalf, "tau1");
    long tau2 = asLong(levels.at(2).floorHalf, "tau2");

    // Literal nested loops over <m>^4. Skipping the inner loops once a
    // level-1 filter fails drops only tuples that are already disqualified.
    Int pairsPassing = 0, quadsPassing = 0, zeroQuads = 0;
    for (long x1 = -h; x1 <= h; ++x1) {
        for (long x2 = -h; x2 <= h; ++x2) {
            long z1 = x1 + x2;
            if (std::labs(z1) > tau1) continue;
            pairsPassing += 1;
            for (long x3 = -h; x3 <= h; ++x3) {
                for (long x4 = -h; x4 <= h; ++x4) {
                    long z2 = x3 + x4;
                    if (std::labs(z2) > tau1) continue;
                    if (std::labs(z1 + z2) > tau2) continue;
                    quadsPassing += 1;
                    if (z1 + z2 == 0) zeroQuads += 1;
                }
            }
        }
    }

    Int card = levels.at(0).cardinality;
    Int card2 = card * card, card4 = card2 * card2;
    FourTupleEnumeration out;
    out.level1PassProb = makeRational(pairsPassing, card2);
    out.level2PassProb = makeRational(quadsPassing, card4);
    out.tupleZeroProb = makeRational(zeroQuads, card4);
    return out;
}

std::uint64_t naiveZeroCount(const InputLists& lists, const ProblemParams& params) {
    params.validate();
    unsigned L = params.logK();
    double cost = std::pow(static_cast<double>(params.n), static_cast<double>(params.k));
    if (cost > 1e8) throw ResourceError("naive zero count limited to n^k <= 10^8");

    LevelRanges levels(params.m, params.k, params.precisionBits);
    bool reduceAll = params.mode == Mode::CenteredModSum && params.m <= (Int(1) << (L + 1));
    Int half = (params.m - 1) / 2;

    // Depth-first over index tuples; fold completed sibling subtrees upward
    // and prune on the first failed threshold (filters are conjunctive, so
    // pruned extensions cannot count).
    std::uint64_t count = 0;
    std::function<void(unsigned long, const std::vector<Int>&)> walk =
        [&](unsigned long pos, const std::vector<Int>& stack) {
            if (pos == params.k) {
                if (stack.size() == 1 && stack.back() == 0) ++count;
                return;
            }
            for (unsigned long i = 0; i < params.n; ++i) {
                std::vector<Int> local = stack;
                local.push_back(lists.lists[pos][i]);
                unsigned long completed = pos + 1;
                unsigned d = 1;
                bool ok = true;
                while (completed % 2 == 0 && ok) {
                    Int sum = local[local.size() - 2] + local[local.size() - 1];
                    if (params.mode == Mode::CenteredModSum && (d == 1 || reduceAll)) {
                        if (sum > half) sum -= params.m;
                        if (sum < -half) sum += params.m;
                    }
                    if (abs(sum) > levels.tau(d)) {
                        ok = false;
                    } else {
                        local.pop_back();
                        local.pop_back();
                        local.push_back(sum);
                    }
                    completed /= 2;
                    ++d;
                }
                if (ok) walk(pos + 1, local);
            }
        };
    walk(0, {});
    return count;
}

std::vector<ElementRecord> naiveMerge(const std::vector<ElementRecord>& la,
                                      const std::vector<ElementRecord>& lb, const Int& tau,
                                      MergeMode mode, const Int& modulus) {
    std::vector<ElementRecord> out;
    Int half = mode == MergeMode::CenteredMod ? Int((modulus - 1) / 2) : Int(0);
    for (std::uint64_t i = 0; i < la.size(); ++i) {
        for (std::uint64_t j = 0; j < lb.size(); ++j) {
            Int v = la[i].value + lb[j].value;
            if (mode == MergeMode::CenteredMod) {
                if (v > half) v -= modulus;
                if (v < -half) v += modulus;
            }
            if (abs(v) <= tau) out.push_back({v, i, j});
        }
    }
    std::sort(out.begin(), out.end(), [](const ElementRecord& a, const ElementRecord& b) {
        if (a.value != b.value) return a.value < b.value;
        if (a.leftIndex != b.leftIndex) return a.leftIndex < b.leftIndex;
        return a.rightIndex < b.rightIndex;
    });
    return out;
}

}  // namespace ktree::oracle
