#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "motifcast/ingest.hpp"

namespace motifcast {

/// Largest motif size the fixed-capacity containers below can hold.
inline constexpr std::size_t kMaxMotifSize = 5;

using TypeId = std::uint32_t;
using Label = std::uint8_t;

class MotifError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LabelPair {
    Label src = 0;
    Label dst = 0;
    friend bool operator==(const LabelPair&, const LabelPair&) = default;
    friend auto operator<=>(const LabelPair&, const LabelPair&) = default;
};

/// Node- and time-anonymous code of a temporal motif: the event sequence
/// relabeled by order of first node appearance. The first pair is always
/// (0, 1).
class MotifCode {
public:
    MotifCode() = default;
    MotifCode(std::initializer_list<LabelPair> pairs);

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }
    const LabelPair& operator[](std::size_t i) const { return pairs_[i]; }
    std::span<const LabelPair> pairs() const { return {pairs_.data(), size_}; }

    /// Number of distinct labels (nodes).
    std::size_t label_count() const;

    void push_back(LabelPair p);

    /// `s0>d0,s1>d1,...`
    std::string to_string() const;
    static MotifCode parse(const std::string& text);

    std::uint64_t key() const;

    friend bool operator==(const MotifCode& a, const MotifCode& b) {
        return a.size_ == b.size_ && std::equal(a.pairs_.begin(), a.pairs_.begin() + a.size_, b.pairs_.begin());
    }
    friend bool operator<(const MotifCode& a, const MotifCode& b) {
        return std::lexicographical_compare(a.pairs_.begin(), a.pairs_.begin() + a.size_, b.pairs_.begin(),
                                            b.pairs_.begin() + b.size_);
    }

private:
    std::array<LabelPair, kMaxMotifSize> pairs_{};
    std::size_t size_ = 0;
};

/// Canonical code of a temporally ordered (src, dst) sequence. Throws
/// MotifError when the pattern is empty, contains a self-loop, is longer
/// than `ell_max`, or some pair shares no node with the pairs before it.
MotifCode canonical_type(std::span<const std::pair<NodeId, NodeId>> pattern, std::size_t ell_max = kMaxMotifSize);

/// All canonical connected codes with exactly `ell` events, ascending
/// lexicographic order.
std::vector<MotifCode> enumerate_types(std::size_t ell);

/// The type vocabulary for sizes 1..ell_max.
///
/// Index order: by size, then lexicographic code order within a size, so
/// index 0 is the single-event type (0>1). The child table maps a type and
/// an appended label pair to the resulting type in O(1).
class MotifVocabulary {
public:
    explicit MotifVocabulary(std::size_t ell_max);

    std::size_t size() const { return codes_.size(); }
    std::size_t ell_max() const { return ell_max_; }
    const MotifCode& code(TypeId t) const { return codes_.at(t); }
    std::size_t type_size(TypeId t) const { return codes_[t].size(); }
    std::size_t label_count(TypeId t) const { return label_counts_[t]; }
    std::optional<TypeId> index_of(const MotifCode& code) const;

    static constexpr TypeId single_event_type() { return 0; }

    /// Type reached by appending the event (a, b), where labels equal to
    /// label_count(t) denote a node new to the motif. nullopt if the event
    /// is invalid (self-loop, two new nodes) or t is already full.
    std::optional<TypeId> child(TypeId t, Label a, Label b) const;

    /// Number of distinct valid one-event extensions of t.
    std::size_t child_count(TypeId t) const { return child_counts_[t]; }

    /// `index<TAB>size<TAB>code` per line.
    void write(std::ostream& out) const;

private:
    static constexpr TypeId kNoChild = ~TypeId{0};
    std::size_t slot(TypeId t, Label a, Label b) const;

    std::size_t ell_max_;
    std::vector<MotifCode> codes_;
    std::vector<std::size_t> label_counts_;
    std::unordered_map<std::uint64_t, TypeId> index_;
    std::vector<std::vector<TypeId>> children_;
    std::vector<std::size_t> child_counts_;
};

struct InstanceEvent {
    NodeId src = 0;
    NodeId dst = 0;
    double time = 0.0;
};

/// A concrete motif occurrence. nodes()[label] is the node bound to label.
class MotifInstance {
public:
    MotifInstance() = default;

    /// Size-1 instance of a single event.
    static MotifInstance single(NodeId src, NodeId dst, double time);

    TypeId type() const { return type_; }
    std::size_t size() const { return size_; }
    double last_time() const { return last_time_; }
    std::span<const NodeId> nodes() const { return {nodes_.data(), node_count_}; }
    std::span<const InstanceEvent> events() const { return {events_.data(), size_}; }

    std::optional<Label> label_of(NodeId n) const;
    bool touches(NodeId n) const { return label_of(n).has_value(); }

    /// The raw (src, dst) sequence of the events.
    std::vector<std::pair<NodeId, NodeId>> pattern() const;

private:
    friend MotifInstance extend(const MotifVocabulary&, const MotifInstance&, NodeId, NodeId, double);

    TypeId type_ = 0;
    std::array<NodeId, kMaxMotifSize + 1> nodes_{};
    std::size_t node_count_ = 0;
    std::array<InstanceEvent, kMaxMotifSize> events_{};
    std::size_t size_ = 0;
    double last_time_ = 0.0;
};

/// True iff the event shares a node with m, arrives within delta_c of
/// m's last event and m is not full. New nodes are allowed.
bool can_extend_observed(const MotifInstance& m, NodeId src, NodeId dst, double time, double delta_c,
                         std::size_t ell_max);
inline bool can_extend_observed(const MotifInstance& m, const Event& e, double delta_c, std::size_t ell_max) {
    return can_extend_observed(m, e.src, e.dst, static_cast<double>(e.time), delta_c, ell_max);
}

/// Ordered pairs (a, b), a != b, over m's own nodes (label order). Empty
/// when m is full.
std::vector<std::pair<NodeId, NodeId>> candidate_extensions(const MotifInstance& m, std::size_t ell_max);

/// m plus the event (src, dst, time). Throws MotifError when the event is
/// disconnected from m, is a self-loop, or m is full.
MotifInstance extend(const MotifVocabulary& vocab, const MotifInstance& m, NodeId src, NodeId dst, double time);

/// Open motif instances with a node adjacency index and an expiry index.
///
/// Slots are stable handles; a freed slot is reused by a later insert.
/// Iteration order is ascending slot order.
class OpenMotifPool {
public:
    using Slot = std::uint32_t;

    explicit OpenMotifPool(std::size_t ell_max) : ell_max_(ell_max) {}

    Slot insert(const MotifInstance& m);
    void erase(Slot s);
    /// Replaces the instance at s in place (same slot).
    void replace(Slot s, const MotifInstance& m);

    const MotifInstance& at(Slot s) const { return records_[s].instance; }
    bool live(Slot s) const { return s < records_.size() && records_[s].live; }
    std::size_t size() const { return live_count_; }
    bool empty() const { return live_count_ == 0; }
    std::size_t ell_max() const { return ell_max_; }

    /// Drops instances with now - last_time > delta_c or size >= ell_max.
    /// Returns the number removed.
    std::size_t prune(double now, double delta_c);

    /// Live slots touching a or b, ascending, without duplicates.
    void collect_touching(NodeId a, NodeId b, std::vector<Slot>& out) const;

    std::vector<Slot> live_slots() const;

    template <class F>
    void for_each(F&& f) const {
        for (Slot s = 0; s < records_.size(); ++s) {
            if (records_[s].live) f(s, records_[s].instance);
        }
    }

    /// Both indexes reference exactly the live instances.
    bool indexes_consistent() const;

private:
    struct Record {
        MotifInstance instance;
        bool live = false;
    };

    void index(Slot s);
    void unindex(Slot s);

    std::size_t ell_max_;
    std::vector<Record> records_;
    std::vector<Slot> free_;
    std::size_t live_count_ = 0;
    std::unordered_map<NodeId, std::vector<Slot>> by_node_;
    std::set<std::pair<double, Slot>> by_last_time_;
    std::set<Slot> full_;
};

inline std::size_t prune(OpenMotifPool& pool, double now, double delta_c) { return pool.prune(now, delta_c); }

/// One extension observed while replaying a stream.
struct ObservedTransition {
    OpenMotifPool::Slot slot = 0;
    TypeId source = 0;
    TypeId target = 0;
    double waiting = 0.0;  // event time minus the source instance's last_time
};

/// Chronological replay of an event stream against an open-motif pool.
///
/// For each event: prune at the event time, collect every open instance the
/// event can extend, and extend all of them. With no candidate the event is
/// cold and its size-1 instance enters the pool.
class MotifTracker {
public:
    MotifTracker(const MotifVocabulary& vocab, double delta_c);

    /// Returns the transitions caused by e; empty means e was cold. The
    /// span is valid until the next call.
    std::span<const ObservedTransition> observe(const Event& e);

    const OpenMotifPool& pool() const { return pool_; }
    OpenMotifPool& pool() { return pool_; }
    OpenMotifPool take_pool() && { return std::move(pool_); }

private:
    const MotifVocabulary* vocab_;
    double delta_c_;
    OpenMotifPool pool_;
    std::vector<OpenMotifPool::Slot> scratch_;
    std::vector<ObservedTransition> transitions_;
};

}  // namespace motifcast
