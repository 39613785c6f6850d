#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "navgraph/metric.hpp"

namespace navgraph {

/// Deletable 2-approximate nearest-neighbor structure over a fixed subset of
/// P. Members can be erased and re-inserted; queries only see present ones.
///
/// Backed by a vantage-point tree with small leaf buckets. Each subtree keeps
/// an upper bound on its present members, so subtrees known to be empty are
/// pruned; erase() leaves the bounds alone and clear() resets them. A query
/// walks the tree in order of distance lower bounds, kept in a bucket queue whose
/// buckets are the ranges [2^k, 2^(k+1)). Keys never decrease during a walk,
/// so a point in the lowest non-empty bucket, or in any lower one, is within
/// a factor 2 of every pending bound and can be reported as a 2-ANN. Consecutive queries for the
/// same element resume the walk, as long as nothing was re-inserted in
/// between.
template <Metric M>
class DynamicAnnHelper {
public:
    using point_type = typename M::point_type;

    /// With start_empty set, the helper begins as if clear() had been called.
    DynamicAnnHelper(const M& space, const PointSet<M>& points, std::span<const Index> members,
                     bool start_empty = false)
        : space_(&space), points_(&points), state_(points.size(), kAbsent), node_of_(points.size(), -1),
          buckets_(kBuckets) {
        std::vector<Index> work(members.begin(), members.end());
        for (Index m : work) {
            if (m >= points.size()) throw std::domain_error("DynamicAnnHelper: member out of range");
            if (state_[m] != kAbsent) throw std::domain_error("DynamicAnnHelper: duplicate member");
            state_[m] = start_empty ? kCleared : kPresent;
        }
        nodes_.reserve(work.size() / kLeafSize * 2 + 1);
        root_ = build(work, 0, work.size(), -1);
        leaf_items_ = std::move(work);
        leaf_points_.reserve(leaf_items_.size());
        for (Index m : leaf_items_) leaf_points_.push_back(points[m]);
        if (start_empty) {
            for (Node& node : nodes_) node.count = 0;
        } else {
            present_ = leaf_items_.size();
        }
    }

    std::size_t size() const { return present_; }
    bool empty() const { return present_ == 0; }

    bool contains(Index p) const { return p < state_.size() && state_[p] == kPresent; }

    void erase(Index p) {
        if (checked_state(p) != kPresent) return;
        state_[p] = kErased;
        --present_;
    }

    void insert(Index p) {
        const char state = checked_state(p);
        if (state == kPresent) return;
        if (state == kCleared) {
            for (int v = node_of_[p]; v >= 0; v = nodes_[static_cast<std::size_t>(v)].parent) {
                ++nodes_[static_cast<std::size_t>(v)].count;
            }
        }
        state_[p] = kPresent;
        ++present_;
        ++generation_;
    }

    /// Erases every member and resets the subtree bounds to zero.
    void clear() {
        for (Index m : leaf_items_) state_[m] = kCleared;
        for (Node& node : nodes_) node.count = 0;
        present_ = 0;
        ++generation_;
    }

    /// A present member within twice the distance of the nearest present one.
    std::optional<Neighbor> approx_nearest(const point_type& q) {
        if (present_ == 0 || root_ < 0) return std::nullopt;
        if (!cursor_valid_ || cursor_generation_ != generation_ || !(cursor_query_ == q)) {
            reset_cursor(q);
        } else if (last_ && state_[last_->index] == kPresent) {
            return last_;
        }
        last_.reset();
        for (;;) {
            while (!ready_.empty()) {
                const Neighbor y = ready_.back();
                ready_.pop_back();
                if (state_[y.index] != kPresent) continue;
                last_ = y;
                return last_;
            }
            const Entry* top = pop();
            if (top == nullptr) break;
            const Entry e = *top;
            if (e.is_point()) {
                const Index p = e.point();
                if (state_[p] != kPresent) continue;
                last_ = Neighbor{p, e.key};
                return last_;
            }
            const Node& node = nodes_[static_cast<std::size_t>(e.tag)];
            if (node.count == 0) continue;
            if (node.inside < 0) {
                for (std::uint32_t k = node.first; k < node.last; ++k) {
                    const Index p = leaf_items_[k];
                    if (state_[p] != kPresent) continue;
                    const double dp = space_->distance(leaf_points_[k], q);
                    ++distance_evaluations_;
                    if (bucket_of(dp) <= current_) {
                        ready_.push_back(Neighbor{p, dp});
                    } else {
                        push({dp, static_cast<std::int64_t>(~std::int64_t{p})});
                    }
                }
                continue;
            }
            const Index v = leaf_items_[node.first];
            const double dv = space_->distance(leaf_points_[node.first], q);
            ++distance_evaluations_;
            if (nodes_[static_cast<std::size_t>(node.inside)].count > 0) {
                push({std::max(e.key, dv - node.radius), node.inside});
            }
            if (node.outside >= 0 && nodes_[static_cast<std::size_t>(node.outside)].count > 0) {
                push({std::max(e.key, node.radius - dv), node.outside});
            }
            if (state_[v] == kPresent) {
                if (bucket_of(dv) <= current_) {
                    last_ = Neighbor{v, dv};
                    return last_;
                }
                push({dv, static_cast<std::int64_t>(~std::int64_t{v})});
            }
        }
        return std::nullopt;
    }

    /// approx_nearest followed by erase of the answer.
    std::optional<Neighbor> extract(const point_type& q) {
        const auto y = approx_nearest(q);
        if (y) {
            state_[y->index] = kErased;
            --present_;
        }
        return y;
    }

    std::uint64_t distance_evaluations() const { return distance_evaluations_; }

private:
    static constexpr char kAbsent = 0;
    static constexpr char kPresent = 1;
    static constexpr char kErased = 2;   // absent from queries, still counted
    static constexpr char kCleared = 3;  // absent from queries and from the counts
    static constexpr std::size_t kLeafSize = 16;

    /// Internal nodes own leaf_items_[first] as vantage point; leaves own the
    /// range [first, last).
    struct Node {
        std::uint32_t first = 0;
        std::uint32_t last = 0;
        double radius = 0.0;  // median distance from the vantage point
        int inside = -1;      // D(vantage, x) <= radius; -1 marks a leaf
        int outside = -1;     // D(vantage, x) >= radius
        int parent = -1;
        std::uint32_t count = 0;  // upper bound on present members in the subtree
    };

    struct Entry {
        double key = 0.0;   // lower bound (subtree) or exact distance (point)
        std::int64_t tag;   // node id for a subtree, ~index for a point

        bool is_point() const { return tag < 0; }
        Index point() const { return static_cast<Index>(~tag); }
    };

    /// Buckets are indexed by the IEEE-754 biased exponent, so bucket k
    /// holds keys in [2^(k-1023), 2^(k-1022)); zero lands in bucket 0.
    static constexpr std::size_t kBuckets = 2048;

    static std::size_t bucket_of(double key) {
        if (!(key > 0.0)) return 0;
        return static_cast<std::size_t>(std::bit_cast<std::uint64_t>(key) >> 52) & 0x7ff;
    }

    int build(std::vector<Index>& work, std::size_t begin, std::size_t end, int parent) {
        if (begin >= end) return -1;
        const int id = static_cast<int>(nodes_.size());
        Node node;
        node.first = static_cast<std::uint32_t>(begin);
        node.last = static_cast<std::uint32_t>(end);
        node.parent = parent;
        node.count = static_cast<std::uint32_t>(end - begin);
        nodes_.push_back(node);
        node_of_[work[begin]] = id;
        if (end - begin <= kLeafSize) {
            for (std::size_t k = begin + 1; k < end; ++k) node_of_[work[k]] = id;
            return id;
        }
        const point_type& v = (*points_)[work[begin]];
        const std::size_t lo = begin + 1;
        std::vector<std::pair<double, Index>> keyed;
        keyed.reserve(end - lo);
        for (std::size_t k = lo; k < end; ++k) keyed.emplace_back(space_->distance(v, (*points_)[work[k]]), work[k]);
        const std::size_t mid = keyed.size() / 2;
        std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(mid), keyed.end());
        for (std::size_t k = 0; k < keyed.size(); ++k) work[lo + k] = keyed[k].second;
        const std::size_t split = lo + mid + 1;  // [lo, split) inside, [split, end) outside
        const int inside = build(work, lo, split, id);
        const int outside = build(work, split, end, id);
        nodes_[id].radius = keyed[mid].first;
        nodes_[id].inside = inside;
        nodes_[id].outside = outside;
        return id;
    }

    char checked_state(Index p) const {
        if (p >= state_.size() || state_[p] == kAbsent) {
            throw std::domain_error("DynamicAnnHelper: index is not a member");
        }
        return state_[p];
    }

    void push(Entry e) {
        const std::size_t b = bucket_of(e.key);
        if (buckets_[b].empty()) {
            touched_.push_back(b);
            occupied_[b / 64] |= std::uint64_t{1} << (b % 64);
        }
        buckets_[b].push_back(e);
    }

    /// Removes and returns an entry of the lowest non-empty bucket; the
    /// pointer stays valid until the next push.
    const Entry* pop() {
        std::size_t word = current_ / 64;
        std::uint64_t bits = occupied_[word] & (~std::uint64_t{0} << (current_ % 64));
        while (bits == 0) {
            if (++word == occupied_.size()) return nullptr;
            bits = occupied_[word];
        }
        current_ = word * 64 + static_cast<std::size_t>(std::countr_zero(bits));
        auto& bucket = buckets_[current_];
        popped_ = bucket.back();
        bucket.pop_back();
        if (bucket.empty()) occupied_[word] &= ~(std::uint64_t{1} << (current_ % 64));
        return &popped_;
    }

    void reset_cursor(const point_type& q) {
        for (std::size_t b : touched_) buckets_[b].clear();
        touched_.clear();
        occupied_.fill(0);
        current_ = 0;
        ready_.clear();
        last_.reset();
        cursor_query_ = q;
        cursor_generation_ = generation_;
        cursor_valid_ = true;
        push({0.0, root_});
    }

    const M* space_;
    const PointSet<M>* points_;
    std::vector<Node> nodes_;
    std::vector<Index> leaf_items_;
    std::vector<point_type> leaf_points_;  // copies of the members, in leaf_items_ order
    std::vector<char> state_;
    std::vector<int> node_of_;  // node holding each member
    int root_ = -1;
    std::size_t present_ = 0;
    std::uint64_t generation_ = 0;

    std::vector<std::vector<Entry>> buckets_;
    std::vector<std::size_t> touched_;
    std::array<std::uint64_t, kBuckets / 64> occupied_{};
    std::size_t current_ = 0;
    Entry popped_{0.0, 0};
    point_type cursor_query_{};
    std::uint64_t cursor_generation_ = 0;
    bool cursor_valid_ = false;
    std::vector<Neighbor> ready_;  // points already known to be valid answers
    std::optional<Neighbor> last_;
    std::uint64_t distance_evaluations_ = 0;
};

}  // namespace navgraph
