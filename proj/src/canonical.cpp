#include "bootperc/canonical.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <stdexcept>

namespace bootperc {

CanonicalSpec CanonicalSpec::standard(int d, int r, int radius) {
    CanonicalSpec spec;
    spec.d = d;
    spec.r = r;
    spec.radius = radius;
    spec.regime = r <= d ? Regime::Supercritical : Regime::Subcritical;
    spec.center = origin_site(d);
    const int isize = spec.regime == Regime::Supercritical ? r - 1 : 2 * d - r + 1;
    for (int i = d - isize; i < d; ++i) spec.orientation.push_back(i);
    spec.signs.assign(spec.orientation.size(), +1);
    return spec;
}

void CanonicalSpec::validate() const {
    if (d < 1) throw std::invalid_argument("canonical spec: dimension must be >= 1");
    if (r < 2 || r > 2 * d) throw std::invalid_argument("canonical spec: 2 <= r <= 2d required");
    if (radius < 0) throw std::invalid_argument("canonical spec: radius must be >= 0");
    const bool super = regime == Regime::Supercritical;
    if (super && r > d) throw std::invalid_argument("canonical spec: supercritical needs r <= d");
    if (!super && r <= d) throw std::invalid_argument("canonical spec: subcritical needs r > d");
    const std::size_t isize = static_cast<std::size_t>(super ? r - 1 : 2 * d - r + 1);
    if (orientation.size() != isize)
        throw std::invalid_argument("canonical spec: orientation size does not match regime");
    if (signs.size() != orientation.size())
        throw std::invalid_argument("canonical spec: one sign per orientation coordinate");
    for (std::size_t i = 0; i < orientation.size(); ++i) {
        if (orientation[i] < 0 || orientation[i] >= d)
            throw std::invalid_argument("canonical spec: orientation coordinate out of range");
        if (i > 0 && orientation[i] <= orientation[i - 1])
            throw std::invalid_argument("canonical spec: orientation must be strictly increasing");
        if (signs[i] != 1 && signs[i] != -1)
            throw std::invalid_argument("canonical spec: signs must be +-1");
    }
    if (center.dim() != d) throw std::invalid_argument("canonical spec: center dimension mismatch");
}

std::vector<int> CanonicalSpec::alignment() const {
    std::vector<int> out;
    for (int i = 0; i < d; ++i) {
        if (!std::binary_search(orientation.begin(), orientation.end(), i)) out.push_back(i);
    }
    return out;
}

std::vector<Site> canonical_set(const CanonicalSpec& spec) {
    spec.validate();
    const bool super = spec.regime == CanonicalSpec::Regime::Supercritical;
    std::vector<Site> out;
    for (const Site& off : ball_offsets(spec.d, spec.radius)) {
        bool ok = true;
        std::size_t oi = 0;
        for (int i = 0; i < spec.d && ok; ++i) {
            const bool oriented = oi < spec.orientation.size() && spec.orientation[oi] == i;
            if (oriented) {
                if (off[i] != 0 && off[i] != spec.signs[oi]) ok = false;
                ++oi;
            } else if (!super) {
                if (off[i] != 0) ok = false;
            }
        }
        if (!ok) continue;
        Site y = spec.center;
        for (int i = 0; i < spec.d; ++i) y[i] += off[i];
        out.push_back(std::move(y));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<CanonicalSpec> all_canonical_specs(int d, int r, int radius) {
    if (r < 2 || r > d) throw std::invalid_argument("all_canonical_specs: needs 2 <= r <= d");
    std::vector<CanonicalSpec> out;
    const int isize = r - 1;
    std::vector<int> pick(static_cast<std::size_t>(isize));
    // iterate subsets of [d] of size r-1 in lexicographic order
    for (int i = 0; i < isize; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        for (int signbits = 0; signbits < (1 << isize); ++signbits) {
            CanonicalSpec spec;
            spec.d = d;
            spec.r = r;
            spec.radius = radius;
            spec.regime = CanonicalSpec::Regime::Supercritical;
            spec.center = origin_site(d);
            spec.orientation = pick;
            for (int i = 0; i < isize; ++i)
                spec.signs.push_back((signbits >> i) & 1 ? -1 : +1);
            out.push_back(std::move(spec));
        }
        int i = isize - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == d - isize + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < isize; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

static int l1(const Site& x) {
    int norm = 0;
    for (int i = 0; i < x.dim(); ++i) norm += std::abs(x[i]);
    return norm;
}

static bool adjacent(const Site& a, const Site& b) {
    int diff = 0;
    for (int i = 0; i < a.dim(); ++i) diff += std::abs(a[i] - b[i]);
    return diff == 1;
}

std::vector<SemiCanonicalSet> enumerate_semi_canonical(int d, int r, int t) {
    if (t < 2) throw std::invalid_argument("enumerate_semi_canonical: needs t >= 2");
    if (r < 2 || r > d) throw std::invalid_argument("enumerate_semi_canonical: needs 2 <= r <= d");
    std::vector<SemiCanonicalSet> out;
    std::set<std::vector<Site>> seen;
    for (const CanonicalSpec& spec : all_canonical_specs(d, r, t)) {
        const std::vector<Site> base = canonical_set(spec);
        const std::set<Site> base_set(base.begin(), base.end());

        // Extreme sites: the degree-1 members +-t e_j for alignment coords j.
        // For each, the replacement rule offers the site itself or any other
        // neighbour (within B_t) of its unique in-set neighbour.
        struct Slot {
            Site extreme;
            std::vector<Site> choices;
        };
        std::vector<Slot> slots;
        for (const int j : spec.alignment()) {
            for (const int sign : {+1, -1}) {
                Slot slot;
                slot.extreme = origin_site(d);
                slot.extreme[j] = sign * t;
                Site hinge;  // unique neighbour of the extreme site inside the set
                int hinge_count = 0;
                for (const Site& y : base) {
                    if (adjacent(slot.extreme, y)) {
                        hinge = y;
                        ++hinge_count;
                    }
                }
                if (hinge_count != 1)
                    throw std::logic_error("extreme site does not have a unique in-set neighbour");
                slot.choices.push_back(slot.extreme);
                for (int i = 0; i < d; ++i) {
                    for (const int s : {+1, -1}) {
                        Site cand = hinge;
                        cand[i] += s;
                        if (l1(cand) > t) continue;
                        if (base_set.count(cand)) continue;
                        slot.choices.push_back(cand);
                    }
                }
                slots.push_back(std::move(slot));
            }
        }

        // All combinations of one choice per slot.
        std::vector<std::size_t> idx(slots.size(), 0);
        while (true) {
            SemiCanonicalSet scs;
            scs.base = spec;
            std::set<Site> sites = base_set;
            bool valid = true;
            for (std::size_t s = 0; s < slots.size(); ++s) {
                const Site& chosen = slots[s].choices[idx[s]];
                scs.extremes.push_back(chosen);
                if (chosen != slots[s].extreme) {
                    sites.erase(slots[s].extreme);
                    if (!sites.insert(chosen).second) valid = false;
                }
            }
            if (valid) {
                scs.sites.assign(sites.begin(), sites.end());
                if (seen.insert(scs.sites).second) out.push_back(std::move(scs));
            }
            std::size_t s = 0;
            while (s < idx.size() && ++idx[s] == slots[s].choices.size()) {
                idx[s] = 0;
                ++s;
            }
            if (s == idx.size()) break;
        }
    }
    return out;
}

std::vector<std::vector<Site>> enumerate_modified_minimal(int d, int r, int t) {
    if (r < 2 || r > d) throw std::invalid_argument("enumerate_modified_minimal: needs 2 <= r <= d");
    if (t < 0) throw std::invalid_argument("enumerate_modified_minimal: needs t >= 0");
    const int span = d - r + 1;
    std::vector<std::vector<Site>> out;
    std::vector<int> pick(static_cast<std::size_t>(span));
    for (int i = 0; i < span; ++i) pick[static_cast<std::size_t>(i)] = i;
    while (true) {
        std::vector<Site> set;
        for (const Site& off : ball_offsets(d, t)) {
            bool ok = true;
            for (int i = 0; i < d && ok; ++i) {
                if (off[i] != 0 && !std::binary_search(pick.begin(), pick.end(), i)) ok = false;
            }
            if (ok) set.push_back(off);
        }
        std::sort(set.begin(), set.end());
        out.push_back(std::move(set));
        int i = span - 1;
        while (i >= 0 && pick[static_cast<std::size_t>(i)] == d - span + i) --i;
        if (i < 0) break;
        ++pick[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < span; ++j)
            pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

}  // namespace bootperc
