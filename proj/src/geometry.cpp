#include "bootperc/geometry.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace bootperc {

Site origin_site(int d) {
    return Site(std::vector<Coord>(static_cast<std::size_t>(d), 0));
}

CompatibilityFunction CompatibilityFunction::all_free(int d) {
    return CompatibilityFunction{std::vector<CompatTag>(static_cast<std::size_t>(d), CompatTag::Free)};
}

static std::vector<int> coords_with_tag(const CompatibilityFunction& c, CompatTag t) {
    std::vector<int> out;
    for (int i = 0; i < c.dim(); ++i) {
        if (c(i) == t) out.push_back(i);
    }
    return out;
}

std::vector<int> CompatibilityFunction::pos() const { return coords_with_tag(*this, CompatTag::Pos); }
std::vector<int> CompatibilityFunction::neg() const { return coords_with_tag(*this, CompatTag::Neg); }
std::vector<int> CompatibilityFunction::fixed() const { return coords_with_tag(*this, CompatTag::Fixed); }
std::vector<int> CompatibilityFunction::free_coords() const { return coords_with_tag(*this, CompatTag::Free); }

CompatibilityFunction restrict_coord(const CompatibilityFunction& c, int i) {
    if (i < 0 || i >= c.dim()) throw std::invalid_argument("restrict_coord: coordinate out of range");
    CompatibilityFunction out = c;
    out.tags[static_cast<std::size_t>(i)] = CompatTag::Fixed;
    return out;
}

bool is_above(const Site& x, const Site& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("is_above: dimension mismatch");
    for (int i = 0; i < x.dim(); ++i) {
        if (x[i] > 0 && y[i] < x[i]) return false;
        if (x[i] < 0 && y[i] > x[i]) return false;
    }
    return true;
}

bool is_compatible(const Site& x, const Site& y, const CompatibilityFunction& c) {
    if (x.dim() != y.dim() || x.dim() != c.dim())
        throw std::invalid_argument("is_compatible: dimension mismatch");
    for (int i = 0; i < x.dim(); ++i) {
        const Coord delta = y[i] - x[i];
        switch (c(i)) {
            case CompatTag::Pos:
                if (delta < 0) return false;
                break;
            case CompatTag::Neg:
                if (delta > 0) return false;
                break;
            case CompatTag::Fixed:
                if (delta != 0) return false;
                break;
            case CompatTag::Free:
                break;
        }
    }
    return true;
}

static void ball_offsets_rec(int d, int budget, std::vector<Coord>& cur, std::vector<Site>& out) {
    const int at = static_cast<int>(cur.size());
    if (at == d) {
        out.emplace_back(cur);
        return;
    }
    const int rest = d - at - 1;
    for (Coord v = -budget; v <= budget; ++v) {
        const int used = std::abs(v);
        if (rest == 0 && used > budget) continue;
        cur.push_back(v);
        ball_offsets_rec(d, budget - used, cur, out);
        cur.pop_back();
    }
}

std::vector<Site> ball_offsets(int d, int radius) {
    if (d < 1) throw std::invalid_argument("ball_offsets: dimension must be >= 1");
    if (radius < 0) throw std::invalid_argument("ball_offsets: radius must be >= 0");
    std::vector<Site> out;
    std::vector<Coord> cur;
    cur.reserve(static_cast<std::size_t>(d));
    ball_offsets_rec(d, radius, cur, out);
    return out;
}

std::int64_t ball_size(int d, int radius) {
    return static_cast<std::int64_t>(ball_offsets(d, radius).size());
}

std::shared_ptr<const Lattice> Lattice::make_torus(int d, int n) {
    if (d < 1) throw std::invalid_argument("torus: dimension must be >= 1");
    if (n < 3) throw std::invalid_argument("torus: side length must be >= 3");
    auto lat = std::shared_ptr<Lattice>(new Lattice());
    lat->kind_ = Kind::Torus;
    lat->d_ = d;
    lat->n_ = n;
    lat->strides_.resize(static_cast<std::size_t>(d));
    std::int64_t s = 1;
    for (int i = 0; i < d; ++i) {
        lat->strides_[static_cast<std::size_t>(i)] = s;
        if (s > (1LL << 40) / n) throw std::invalid_argument("torus: site count too large");
        s *= n;
    }
    lat->count_ = s;
    lat->build_adjacency();
    return lat;
}

std::shared_ptr<const Lattice> Lattice::make_window(int d, int t) {
    if (d < 1) throw std::invalid_argument("window: dimension must be >= 1");
    if (t < 0) throw std::invalid_argument("window: radius must be >= 0");
    auto lat = std::shared_ptr<Lattice>(new Lattice());
    lat->kind_ = Kind::Window;
    lat->d_ = d;
    lat->t_ = t;
    lat->sites_ = ball_offsets(d, t);
    lat->count_ = static_cast<std::int64_t>(lat->sites_.size());
    lat->build_adjacency();
    return lat;
}

bool Lattice::contains(const Site& x) const {
    if (x.dim() != d_) return false;
    if (kind_ == Kind::Torus) {
        for (int i = 0; i < d_; ++i) {
            if (x[i] < 0 || x[i] >= n_) return false;
        }
        return true;
    }
    int norm = 0;
    for (int i = 0; i < d_; ++i) norm += std::abs(x[i]);
    return norm <= t_;
}

std::int64_t Lattice::index_of(const Site& x) const {
    if (!contains(x)) throw std::invalid_argument("index_of: site not in lattice");
    if (kind_ == Kind::Torus) {
        std::int64_t idx = 0;
        for (int i = 0; i < d_; ++i) idx += x[i] * strides_[static_cast<std::size_t>(i)];
        return idx;
    }
    const auto it = std::lower_bound(sites_.begin(), sites_.end(), x);
    return static_cast<std::int64_t>(it - sites_.begin());
}

Site Lattice::site_at(std::int64_t idx) const {
    if (idx < 0 || idx >= count_) throw std::invalid_argument("site_at: index out of range");
    if (kind_ == Kind::Torus) {
        Site x = origin_site(d_);
        std::int64_t rest = idx;
        for (int i = 0; i < d_; ++i) {
            x[i] = static_cast<Coord>(rest % n_);
            rest /= n_;
        }
        return x;
    }
    return sites_[static_cast<std::size_t>(idx)];
}

int Lattice::l1_norm(const Site& x) const {
    if (x.dim() != d_) throw std::invalid_argument("l1_norm: dimension mismatch");
    int norm = 0;
    if (kind_ == Kind::Torus) {
        for (int i = 0; i < d_; ++i) {
            const int v = ((x[i] % n_) + n_) % n_;
            norm += std::min(v, n_ - v);
        }
    } else {
        for (int i = 0; i < d_; ++i) norm += std::abs(x[i]);
    }
    return norm;
}

int Lattice::distance(const Site& x, const Site& y) const {
    if (x.dim() != d_ || y.dim() != d_) throw std::invalid_argument("distance: dimension mismatch");
    int dist = 0;
    for (int i = 0; i < d_; ++i) {
        if (kind_ == Kind::Torus) {
            const int v = (((x[i] - y[i]) % n_) + n_) % n_;
            dist += std::min(v, n_ - v);
        } else {
            dist += std::abs(x[i] - y[i]);
        }
    }
    return dist;
}

std::vector<Lattice::Neighbour> Lattice::neighbours(const Site& x) const {
    if (!contains(x)) throw std::invalid_argument("neighbours: site not in lattice");
    std::vector<Neighbour> out;
    out.reserve(static_cast<std::size_t>(2 * d_));
    for (int i = 0; i < d_; ++i) {
        for (const int sign : {+1, -1}) {
            Site y = x;
            y[i] += sign;
            if (kind_ == Kind::Torus) {
                y[i] = ((y[i] % n_) + n_) % n_;
                out.push_back({std::move(y), false});
            } else {
                const bool ext = !contains(y);
                out.push_back({std::move(y), ext});
            }
        }
    }
    return out;
}

void Lattice::build_adjacency() {
    adjacency_.assign(static_cast<std::size_t>(count_ * 2 * d_), -1);
    for (std::int64_t idx = 0; idx < count_; ++idx) {
        const Site x = site_at(idx);
        for (int a = 0; a < d_; ++a) {
            for (const int sign : {+1, -1}) {
                Site y = x;
                y[a] += sign;
                std::int64_t nidx = -1;
                if (kind_ == Kind::Torus) {
                    y[a] = ((y[a] % n_) + n_) % n_;
                    nidx = index_of(y);
                } else if (contains(y)) {
                    nidx = index_of(y);
                }
                adjacency_[static_cast<std::size_t>(idx * 2 * d_ + 2 * a + (sign > 0 ? 0 : 1))] = nidx;
            }
        }
    }
}

std::vector<Site> ball_sites(const Lattice& lat, const Site& center, int radius) {
    if (radius < 0) throw std::invalid_argument("ball_sites: radius must be >= 0");
    if (!lat.contains(center)) throw std::invalid_argument("ball_sites: center not in lattice");
    const int d = lat.dim();
    if (lat.is_torus() && 2 * radius >= lat.side())
        throw std::invalid_argument("ball_sites: ball wraps onto itself (2*radius >= n)");
    std::vector<Site> out;
    for (const Site& off : ball_offsets(d, radius)) {
        Site y = center;
        for (int i = 0; i < d; ++i) y[i] += off[i];
        if (lat.is_torus()) {
            for (int i = 0; i < d; ++i) y[i] = ((y[i] % lat.side()) + lat.side()) % lat.side();
            out.push_back(std::move(y));
        } else if (lat.contains(y)) {
            out.push_back(std::move(y));
        }
    }
    return out;
}

std::vector<Site> sphere_sites(const Lattice& lat, const Site& center, int radius) {
    std::vector<Site> out;
    for (Site& y : ball_sites(lat, center, radius)) {
        if (lat.distance(y, center) == radius) out.push_back(std::move(y));
    }
    return out;
}

}  // namespace bootperc
