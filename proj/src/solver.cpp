#include "ktree/solver.hpp"

#include <algorithm>
#include <cassert>
#include <istream>
#include <ostream>
#include <random>

namespace ktree {

namespace {

// Values fit machine words when |a + b| <= m stays below 2^62.
bool fitsNarrow(const Int& m) { return mpz_sizeinbase(m.get_mpz_t(), 2) <= 62; }

struct BitSource {
    std::mt19937_64 engine;
    explicit BitSource(std::uint64_t seed) : engine(seed) {}
    std::uint64_t word() { return engine(); }
};

// One uniform draw from [0, card) by rejection: sample ceil(B/64) words,
// truncate to B = bits(card) bits, retry on overflow. Word consumption is
// identical for the narrow and wide paths.
Int drawUniform(BitSource& src, const Int& card) {
    size_t bits = mpz_sizeinbase(card.get_mpz_t(), 2);
    size_t words = (bits + 63) / 64;
    std::uint64_t topMask = (bits % 64) ? ((std::uint64_t(1) << (bits % 64)) - 1) : ~std::uint64_t(0);
    std::vector<std::uint64_t> buf(words);
    while (true) {
        for (size_t i = 0; i < words; ++i) buf[i] = src.word();
        buf[words - 1] &= topMask;
        Int v = 0;
        for (size_t i = words; i-- > 0;) {
            v <<= 64;
            v += Int(buf[i]);
        }
        if (v < card) return v;
    }
}

struct Rec64 {
    std::int64_t value;
    std::uint32_t left, right;
};

struct RecWide {
    Int value;
    std::uint32_t left, right;
};

std::int64_t toNarrow(const Int& v) { return mpz_get_si(v.get_mpz_t()); }

template <typename Rec>
bool canonicalLess(const Rec& a, const Rec& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.left != b.left) return a.left < b.left;
    return a.right < b.right;
}

// Sum windows that survive |reduce(a+b)| <= tau. Plain mode: one window.
// Centered mod mode: up to three, merged if they touch.
template <typename V>
std::vector<std::pair<V, V>> sumWindows(const V& tau, bool reduce, const V& modulus) {
    std::vector<std::pair<V, V>> w;
    w.emplace_back(-tau, tau);
    if (reduce) {
        w.emplace_back(modulus - tau, modulus + tau);
        w.emplace_back(-modulus - tau, -modulus + tau);
    }
    std::sort(w.begin(), w.end());
    std::vector<std::pair<V, V>> merged;
    for (auto& iv : w) {
        if (!merged.empty() && iv.first <= merged.back().second) {
            if (iv.second > merged.back().second) merged.back().second = iv.second;
        } else {
            merged.push_back(iv);
        }
    }
    return merged;
}

template <typename Rec, typename V>
std::vector<Rec> mergeLevel(const std::vector<Rec>& la, const std::vector<Rec>& lb, const V& tau,
                            bool reduce, const V& modulus, const V& half,
                            std::uint64_t elementBudget, unsigned level) {
    // Sort the second list once, binary-search a contiguous window per
    // element of the first list.
    std::vector<std::uint32_t> order(lb.size());
    for (std::uint32_t i = 0; i < lb.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::uint32_t x, std::uint32_t y) { return lb[x].value < lb[y].value; });
    std::vector<V> sortedVals(lb.size());
    for (size_t i = 0; i < lb.size(); ++i) sortedVals[i] = lb[order[i]].value;

    auto windows = sumWindows<V>(tau, reduce, modulus);
    std::vector<Rec> out;
    std::uint64_t produced = 0;
    for (std::uint32_t ai = 0; ai < la.size(); ++ai) {
        const V& a = la[ai].value;
        for (const auto& [wlo, whi] : windows) {
            V blo = wlo - a, bhi = whi - a;
            auto lo = std::lower_bound(sortedVals.begin(), sortedVals.end(), blo);
            auto hi = std::upper_bound(sortedVals.begin(), sortedVals.end(), bhi);
            produced += static_cast<std::uint64_t>(hi - lo);
            if (produced > elementBudget)
                throw ResourceError("memory cap exceeded while merging at level " +
                                    std::to_string(level));
            for (auto it = lo; it != hi; ++it) {
                std::uint32_t bi = order[static_cast<size_t>(it - sortedVals.begin())];
                V v = a + lb[bi].value;
                if (reduce) {
                    if (v > half) v -= modulus;
                    if (v < -half) v += modulus;
                }
                assert(v <= tau && -v <= tau);  // level range invariant
                out.push_back(Rec{v, ai, bi});
            }
        }
    }
    std::sort(out.begin(), out.end(), canonicalLess<Rec>);
    return out;
}

template <typename Rec, typename V>
struct Engine {
    std::vector<std::vector<std::vector<Rec>>> levels;  // [d][i] -> list

    RunTrace run(const ProblemParams& params, const std::vector<std::vector<V>>& input,
                 const LevelRanges& ranges, bool reduceAll, const V& modulus, const V& half,
                 const SolverLimits& limits) {
        unsigned L = params.logK();
        RunTrace trace;
        trace.reducedAllLevels = reduceAll;
        trace.levelListSizes.assign(L + 1, {});

        levels.resize(L + 1);
        levels[0].resize(params.k);
        for (unsigned long i = 0; i < params.k; ++i) {
            levels[0][i].resize(params.n);
            for (unsigned long j = 0; j < params.n; ++j)
                levels[0][i][j] = Rec{input[i][j], static_cast<std::uint32_t>(j), 0};
            trace.levelListSizes[0].push_back(params.n);
        }
        std::uint64_t total = static_cast<std::uint64_t>(params.k) * params.n;
        if (total > limits.maxTotalElements)
            throw ResourceError("memory cap exceeded by input lists");

        for (unsigned d = 1; d <= L; ++d) {
            unsigned long lists = params.k >> d;
            levels[d].resize(lists);
            bool levelEmpty = true;
            V tau = convertTau(ranges.tau(d));
            bool reduce = params.mode == Mode::CenteredModSum && (d == 1 || reduceAll);
            for (unsigned long i = 0; i < lists; ++i) {
                const auto& left = levels[d - 1][2 * i];
                const auto& right = levels[d - 1][2 * i + 1];
                if (left.empty() || right.empty()) {
                    levels[d][i] = {};
                } else {
                    levels[d][i] = mergeLevel<Rec, V>(left, right, tau, reduce, modulus, half,
                                                      limits.maxTotalElements - total, d);
                }
                total += levels[d][i].size();
                trace.levelListSizes[d].push_back(levels[d][i].size());
                levelEmpty = levelEmpty && levels[d][i].empty();
            }
            if (levelEmpty) {
                for (unsigned dd = d + 1; dd <= L; ++dd) {
                    levels[dd].resize(params.k >> dd);
                    trace.levelListSizes[dd].assign(params.k >> dd, 0);
                }
                break;
            }
        }

        finalize(trace, L, params);
        return trace;
    }

    static V convertTau(const Int& tau);

    void finalize(RunTrace& trace, unsigned L, const ProblemParams& params) {
        trace.totalSize = 0;
        trace.maxLevelSize = 0;
        for (const auto& level : trace.levelListSizes) {
            std::uint64_t levelTotal = 0;
            for (std::uint64_t s : level) levelTotal += s;
            trace.totalSize += levelTotal;
            trace.maxLevelSize = std::max(trace.maxLevelSize, levelTotal);
        }
        const auto& root = levels[L][0];
        for (const Rec& rec : root)
            if (rec.value == V(0)) trace.zeroCount++;
        trace.success = trace.zeroCount >= 1;
        if (trace.success) {
            // Root list is in canonical order; take the first zero and walk
            // the provenance indices down to the leaves.
            size_t zi = 0;
            while (root[zi].value != V(0)) ++zi;
            trace.solutionIndices.assign(params.k, 0);
            collectLeaves(L, 0, static_cast<std::uint32_t>(zi), 0, trace.solutionIndices);
        }
    }

    void collectLeaves(unsigned d, unsigned long listIdx, std::uint32_t recIdx,
                       unsigned long leafBase, std::vector<std::uint64_t>& out) {
        const Rec& rec = levels[d][listIdx][recIdx];
        if (d == 0) {
            out[leafBase] = static_cast<std::uint64_t>(rec.left) + 1;  // 1-based
            return;
        }
        collectLeaves(d - 1, 2 * listIdx, rec.left, leafBase, out);
        collectLeaves(d - 1, 2 * listIdx + 1, rec.right, leafBase + (1ul << (d - 1)), out);
    }
};

template <>
std::int64_t Engine<Rec64, std::int64_t>::convertTau(const Int& tau) {
    return toNarrow(tau);
}

template <>
Int Engine<RecWide, Int>::convertTau(const Int& tau) {
    return tau;
}

bool shouldReduceAllLevels(const ProblemParams& params) {
    // p >= 1/2 iff m <= 2^(log k + 1); exact integer test.
    return params.mode == Mode::CenteredModSum && params.m <= (Int(1) << (params.logK() + 1));
}

}  // namespace

InputLists generateLists(const ProblemParams& params, std::uint64_t seed) {
    params.validate();
    InputLists out;
    out.m = params.m;
    out.k = params.k;
    out.n = params.n;
    out.mode = params.mode;
    out.seed = seed;
    Int floorHalf = params.m / 2;
    Int card = 2 * floorHalf + 1;
    BitSource src(seed);
    out.lists.resize(params.k);
    for (unsigned long i = 0; i < params.k; ++i) {
        out.lists[i].reserve(params.n);
        for (unsigned long j = 0; j < params.n; ++j)
            out.lists[i].push_back(drawUniform(src, card) - floorHalf);
    }
    return out;
}

RunTrace runKTree(const ProblemParams& params, const InputLists& lists,
                  const SolverLimits& limits) {
    params.validate();
    if (lists.k != params.k || lists.n != params.n || lists.m != params.m)
        throw ParamError("input lists do not match the problem parameters");
    Int floorHalf = params.m / 2;
    for (const auto& list : lists.lists)
        for (const Int& v : list)
            if (abs(v) > floorHalf) throw ParamError("input value outside <m>");

    LevelRanges ranges(params.m, params.k, params.precisionBits);
    bool reduceAll = shouldReduceAllLevels(params);

    if (fitsNarrow(params.m) && !limits.forceWideValues) {
        std::vector<std::vector<std::int64_t>> input(params.k);
        for (unsigned long i = 0; i < params.k; ++i)
            for (const Int& v : lists.lists[i]) input[i].push_back(toNarrow(v));
        Engine<Rec64, std::int64_t> engine;
        std::int64_t modulus = params.mode == Mode::CenteredModSum ? toNarrow(params.m) : 0;
        std::int64_t half = params.mode == Mode::CenteredModSum ? (modulus - 1) / 2 : 0;
        return engine.run(params, input, ranges, reduceAll, modulus, half, limits);
    }
    Engine<RecWide, Int> engine;
    Int modulus = params.mode == Mode::CenteredModSum ? params.m : Int(0);
    Int half = params.mode == Mode::CenteredModSum ? Int((params.m - 1) / 2) : Int(0);
    return engine.run(params, lists.lists, ranges, reduceAll, modulus, half, limits);
}

bool verifySolution(const InputLists& lists, const std::vector<std::uint64_t>& indices,
                    const ProblemParams& params) {
    params.validate();
    if (indices.size() != params.k) return false;
    for (std::uint64_t idx : indices)
        if (idx < 1 || idx > params.n) return false;

    LevelRanges ranges(params.m, params.k, params.precisionBits);
    bool reduceAll = shouldReduceAllLevels(params);
    Int half = (params.m - 1) / 2;

    std::vector<Int> sums;
    sums.reserve(params.k);
    for (unsigned long i = 0; i < params.k; ++i)
        sums.push_back(lists.lists[i][indices[i] - 1]);
    unsigned L = params.logK();
    for (unsigned d = 1; d <= L; ++d) {
        std::vector<Int> next;
        next.reserve(sums.size() / 2);
        for (size_t i = 0; i + 1 < sums.size(); i += 2) {
            Int v = sums[i] + sums[i + 1];
            if (params.mode == Mode::CenteredModSum && (d == 1 || reduceAll)) {
                if (v > half) v -= params.m;
                if (v < -half) v += params.m;
            }
            if (abs(v) > ranges.tau(d)) return false;
            next.push_back(v);
        }
        sums.swap(next);
    }
    return sums[0] == 0;
}

std::vector<ElementRecord> merge(const std::vector<ElementRecord>& la,
                                 const std::vector<ElementRecord>& lb, const Int& tau,
                                 MergeMode mode, const Int& modulus) {
    if (tau < 0) throw ParamError("tau must be >= 0");
    if (mode == MergeMode::CenteredMod && (modulus < 3 || mpz_even_p(modulus.get_mpz_t())))
        throw ParamError("centered mod merge requires odd modulus >= 3");
    if (la.size() > std::uint32_t(-1) || lb.size() > std::uint32_t(-1))
        throw ResourceError("merge input list too large");

    std::vector<RecWide> a(la.size()), b(lb.size());
    for (size_t i = 0; i < la.size(); ++i)
        a[i] = RecWide{la[i].value, static_cast<std::uint32_t>(i), 0};
    for (size_t i = 0; i < lb.size(); ++i)
        b[i] = RecWide{lb[i].value, static_cast<std::uint32_t>(i), 0};
    bool reduce = mode == MergeMode::CenteredMod;
    Int half = reduce ? Int((modulus - 1) / 2) : Int(0);
    auto recs = mergeLevel<RecWide, Int>(a, b, tau, reduce, modulus, half,
                                         std::uint64_t(1) << 31, 0);
    std::vector<ElementRecord> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.push_back({r.value, r.left, r.right});
    return out;
}

namespace {

void writeU32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

void writeU64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t readU32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw DomainError("truncated dump");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t readU64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw DomainError("truncated dump");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void writeMagnitude(std::ostream& os, const Int& v) {
    size_t count = 0;
    std::vector<unsigned char> bytes((mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8);
    if (v != 0) mpz_export(bytes.data(), &count, -1, 1, 0, 0, v.get_mpz_t());
    writeU32(os, static_cast<std::uint32_t>(count));
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(count));
}

Int readMagnitude(std::istream& is) {
    std::uint32_t count = readU32(is);
    std::vector<unsigned char> bytes(count);
    is.read(reinterpret_cast<char*>(bytes.data()), count);
    if (!is) throw DomainError("truncated dump");
    Int v = 0;
    if (count) mpz_import(v.get_mpz_t(), count, -1, 1, 0, 0, bytes.data());
    return v;
}

void writeValue(std::ostream& os, const Int& v) {
    char sign = v < 0 ? -1 : (v > 0 ? 1 : 0);
    os.put(sign);
    writeMagnitude(os, abs(v));
}

Int readValue(std::istream& is) {
    int sign = is.get();
    if (sign == std::istream::traits_type::eof()) throw DomainError("truncated dump");
    Int v = readMagnitude(is);
    if (static_cast<signed char>(sign) < 0) v = -v;
    return v;
}

constexpr std::uint32_t kDumpVersion = 1;

}  // namespace

void dumpInputLists(const InputLists& in, std::ostream& os) {
    os.write("KTRE", 4);
    writeU32(os, kDumpVersion);
    writeMagnitude(os, in.m);
    writeU32(os, static_cast<std::uint32_t>(in.k));
    writeU64(os, in.n);
    os.put(in.mode == Mode::CenteredModSum ? 1 : 0);
    writeU64(os, in.seed);
    for (const auto& list : in.lists)
        for (const Int& v : list) writeValue(os, v);
}

InputLists loadInputLists(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "KTRE") throw DomainError("bad input-lists dump magic");
    if (readU32(is) != kDumpVersion) throw DomainError("unsupported dump version");
    InputLists in;
    in.m = readMagnitude(is);
    in.k = readU32(is);
    in.n = readU64(is);
    int mode = is.get();
    in.mode = mode == 1 ? Mode::CenteredModSum : Mode::IntegerSum;
    in.seed = readU64(is);
    in.lists.assign(in.k, {});
    for (auto& list : in.lists) {
        list.reserve(in.n);
        for (std::uint64_t j = 0; j < in.n; ++j) list.push_back(readValue(is));
    }
    return in;
}

void dumpRunTrace(const RunTrace& trace, std::ostream& os) {
    os.write("KTRT", 4);
    writeU32(os, kDumpVersion);
    writeU32(os, static_cast<std::uint32_t>(trace.levelListSizes.size()));
    for (const auto& level : trace.levelListSizes) {
        writeU32(os, static_cast<std::uint32_t>(level.size()));
        for (std::uint64_t s : level) writeU64(os, s);
    }
    writeU64(os, trace.totalSize);
    writeU64(os, trace.maxLevelSize);
    os.put(trace.success ? 1 : 0);
    writeU64(os, trace.zeroCount);
    os.put(trace.reducedAllLevels ? 1 : 0);
    writeU32(os, static_cast<std::uint32_t>(trace.solutionIndices.size()));
    for (std::uint64_t idx : trace.solutionIndices) writeU64(os, idx);
}

RunTrace loadRunTrace(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "KTRT") throw DomainError("bad run-trace dump magic");
    if (readU32(is) != kDumpVersion) throw DomainError("unsupported dump version");
    RunTrace trace;
    std::uint32_t levels = readU32(is);
    trace.levelListSizes.resize(levels);
    for (auto& level : trace.levelListSizes) {
        std::uint32_t count = readU32(is);
        level.resize(count);
        for (auto& s : level) s = readU64(is);
    }
    trace.totalSize = readU64(is);
    trace.maxLevelSize = readU64(is);
    trace.success = is.get() == 1;
    trace.zeroCount = readU64(is);
    trace.reducedAllLevels = is.get() == 1;
    std::uint32_t idxCount = readU32(is);
    trace.solutionIndices.resize(idxCount);
    for (auto& idx : trace.solutionIndices) idx = readU64(is);
    if (!is) throw DomainError("truncated dump");
    return trace;
}

}  // namespace ktree
