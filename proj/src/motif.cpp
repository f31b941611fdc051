#include "motifcast/motif.hpp"

#include <sstream>

namespace motifcast {

// ---------------------------------------------------------------------------
// MotifCode

MotifCode::MotifCode(std::initializer_list<LabelPair> pairs) {
    for (const auto& p : pairs) push_back(p);
}

std::size_t MotifCode::label_count() const {
    Label max_label = 0;
    for (std::size_t i = 0; i < size_; ++i) {
        max_label = std::max({max_label, pairs_[i].src, pairs_[i].dst});
    }
    return size_ == 0 ? 0 : static_cast<std::size_t>(max_label) + 1;
}

void MotifCode::push_back(LabelPair p) {
    if (size_ == kMaxMotifSize) throw MotifError("motif code exceeds capacity");
    pairs_[size_++] = p;
}

std::string MotifCode::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < size_; ++i) {
        if (i) out += ',';
        out += std::to_string(pairs_[i].src);
        out += '>';
        out += std::to_string(pairs_[i].dst);
    }
    return out;
}

MotifCode MotifCode::parse(const std::string& text) {
    MotifCode code;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        auto gt = item.find('>');
        if (gt == std::string::npos) throw MotifError("bad motif code item: " + item);
        int s = std::stoi(item.substr(0, gt));
        int d = std::stoi(item.substr(gt + 1));
        if (s < 0 || d < 0 || s > 255 || d > 255) throw MotifError("label out of range: " + item);
        code.push_back({static_cast<Label>(s), static_cast<Label>(d)});
    }
    return code;
}

std::uint64_t MotifCode::key() const {
    // 4 bits per label is enough for kMaxMotifSize + 1 labels.
    std::uint64_t k = size_;
    for (std::size_t i = 0; i < size_; ++i) {
        k = (k << 8) | (static_cast<std::uint64_t>(pairs_[i].src) << 4) | pairs_[i].dst;
    }
    return k;
}

// ---------------------------------------------------------------------------
// Canonical typing and enumeration

MotifCode canonical_type(std::span<const std::pair<NodeId, NodeId>> pattern, std::size_t ell_max) {
    if (pattern.empty()) throw MotifError("empty pattern");
    if (pattern.size() > std::min(ell_max, kMaxMotifSize)) {
        throw MotifError("pattern has " + std::to_string(pattern.size()) + " events, limit " +
                         std::to_string(std::min(ell_max, kMaxMotifSize)));
    }
    std::array<NodeId, kMaxMotifSize + 1> seen{};
    std::size_t seen_n = 0;
    auto lookup = [&](NodeId n) -> int {
        for (std::size_t i = 0; i < seen_n; ++i) {
            if (seen[i] == n) return static_cast<int>(i);
        }
        return -1;
    };
    MotifCode code;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        auto [u, v] = pattern[i];
        if (u == v) throw MotifError("self-loop in pattern");
        int lu = lookup(u);
        int lv = lookup(v);
        if (i > 0 && lu < 0 && lv < 0) throw MotifError("pattern is disconnected at event " + std::to_string(i));
        if (lu < 0) {
            seen[seen_n] = u;
            lu = static_cast<int>(seen_n++);
        }
        if (lv < 0) {
            seen[seen_n] = v;
            lv = static_cast<int>(seen_n++);
        }
        code.push_back({static_cast<Label>(lu), static_cast<Label>(lv)});
    }
    return code;
}

namespace {

// Appends every valid one-event extension of `code` to `out`.
void grow(const MotifCode& code, std::vector<MotifCode>& out) {
    const auto n = static_cast<Label>(code.label_count());
    for (Label a = 0; a <= n; ++a) {
        for (Label b = 0; b <= n; ++b) {
            if (a == b) continue;
            MotifCode next = code;
            next.push_back({a, b});
            out.push_back(next);
        }
    }
}

}  // namespace

std::vector<MotifCode> enumerate_types(std::size_t ell) {
    if (ell < 1) throw std::invalid_argument("motif size must be at least 1");
    if (ell > kMaxMotifSize) throw std::invalid_argument("motif size exceeds " + std::to_string(kMaxMotifSize));
    std::vector<MotifCode> level{MotifCode{{0, 1}}};
    for (std::size_t size = 2; size <= ell; ++size) {
        std::vector<MotifCode> next;
        for (const auto& code : level) grow(code, next);
        level = std::move(next);
    }
    std::sort(level.begin(), level.end());
    return level;
}

// ---------------------------------------------------------------------------
// MotifVocabulary

MotifVocabulary::MotifVocabulary(std::size_t ell_max) : ell_max_(ell_max) {
    if (ell_max < 1 || ell_max > kMaxMotifSize) {
        throw std::invalid_argument("ell_max must lie in [1, " + std::to_string(kMaxMotifSize) + "]");
    }
    for (std::size_t size = 1; size <= ell_max; ++size) {
        for (auto& code : enumerate_types(size)) {
            index_.emplace(code.key(), static_cast<TypeId>(codes_.size()));
            label_counts_.push_back(code.label_count());
            codes_.push_back(code);
        }
    }
    children_.resize(codes_.size());
    child_counts_.assign(codes_.size(), 0);
    for (TypeId t = 0; t < codes_.size(); ++t) {
        if (codes_[t].size() >= ell_max_) continue;
        const std::size_t n = label_counts_[t];
        children_[t].assign((n + 1) * (n + 1), kNoChild);
        for (Label a = 0; a <= n; ++a) {
            for (Label b = 0; b <= n; ++b) {
                if (a == b) continue;
                MotifCode next = codes_[t];
                next.push_back({a, b});
                children_[t][slot(t, a, b)] = index_.at(next.key());
                ++child_counts_[t];
            }
        }
    }
}

std::size_t MotifVocabulary::slot(TypeId t, Label a, Label b) const {
    return static_cast<std::size_t>(a) * (label_counts_[t] + 1) + b;
}

std::optional<TypeId> MotifVocabulary::index_of(const MotifCode& code) const {
    auto it = index_.find(code.key());
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<TypeId> MotifVocabulary::child(TypeId t, Label a, Label b) const {
    if (t >= codes_.size() || children_[t].empty()) return std::nullopt;
    const std::size_t n = label_counts_[t];
    if (a > n || b > n || a == b) return std::nullopt;
    TypeId c = children_[t][slot(t, a, b)];
    if (c == kNoChild) return std::nullopt;
    return c;
}

void MotifVocabulary::write(std::ostream& out) const {
    for (TypeId t = 0; t < codes_.size(); ++t) {
        out << t << '\t' << codes_[t].size() << '\t' << codes_[t].to_string() << '\n';
    }
}

// ---------------------------------------------------------------------------
// MotifInstance

MotifInstance MotifInstance::single(NodeId src, NodeId dst, double time) {
    if (src == dst) throw MotifError("self-loop cannot start a motif");
    MotifInstance m;
    m.type_ = MotifVocabulary::single_event_type();
    m.nodes_[0] = src;
    m.nodes_[1] = dst;
    m.node_count_ = 2;
    m.events_[0] = {src, dst, time};
    m.size_ = 1;
    m.last_time_ = time;
    return m;
}

std::optional<Label> MotifInstance::label_of(NodeId n) const {
    for (std::size_t i = 0; i < node_count_; ++i) {
        if (nodes_[i] == n) return static_cast<Label>(i);
    }
    return std::nullopt;
}

std::vector<std::pair<NodeId, NodeId>> MotifInstance::pattern() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) out.emplace_back(events_[i].src, events_[i].dst);
    return out;
}

bool can_extend_observed(const MotifInstance& m, NodeId src, NodeId dst, double time, double delta_c,
                         std::size_t ell_max) {
    if (m.size() >= ell_max) return false;
    if (time - m.last_time() > delta_c) return false;
    return m.touches(src) || m.touches(dst);
}

std::vector<std::pair<NodeId, NodeId>> candidate_extensions(const MotifInstance& m, std::size_t ell_max) {
    std::vector<std::pair<NodeId, NodeId>> out;
    if (m.size() >= ell_max) return out;
    auto nodes = m.nodes();
    out.reserve(nodes.size() * (nodes.size() - 1));
    for (NodeId a : nodes) {
        for (NodeId b : nodes) {
            if (a != b) out.emplace_back(a, b);
        }
    }
    return out;
}

MotifInstance extend(const MotifVocabulary& vocab, const MotifInstance& m, NodeId src, NodeId dst, double time) {
    if (src == dst) throw MotifError("self-loop cannot extend a motif");
    if (m.size() >= vocab.ell_max()) throw MotifError("motif instance is already full");
    if (time < m.last_time()) throw MotifError("extension event precedes the motif's last event");
    auto ls = m.label_of(src);
    auto ld = m.label_of(dst);
    if (!ls && !ld) throw MotifError("extension event is disconnected from the motif");

    MotifInstance out = m;
    auto fresh = [&](NodeId n) {
        out.nodes_[out.node_count_] = n;
        return static_cast<Label>(out.node_count_++);
    };
    Label a = ls ? *ls : fresh(src);
    Label b = ld ? *ld : fresh(dst);
    auto next = vocab.child(m.type(), a, b);
    if (!next) throw MotifError("no vocabulary type for the extended motif");
    out.type_ = *next;
    out.events_[out.size_++] = {src, dst, time};
    out.last_time_ = time;
    return out;
}

// ---------------------------------------------------------------------------
// OpenMotifPool

OpenMotifPool::Slot OpenMotifPool::insert(const MotifInstance& m) {
    Slot s;
    if (!free_.empty()) {
        s = free_.back();
        free_.pop_back();
    } else {
        s = static_cast<Slot>(records_.size());
        records_.emplace_back();
    }
    records_[s].instance = m;
    records_[s].live = true;
    ++live_count_;
    index(s);
    return s;
}

void OpenMotifPool::erase(Slot s) {
    if (!live(s)) return;
    unindex(s);
    records_[s].live = false;
    --live_count_;
    free_.push_back(s);
}

void OpenMotifPool::replace(Slot s, const MotifInstance& m) {
    if (!live(s)) throw std::logic_error("replace on a dead pool slot");
    unindex(s);
    records_[s].instance = m;
    index(s);
}

void OpenMotifPool::index(Slot s) {
    const MotifInstance& m = records_[s].instance;
    for (NodeId n : m.nodes()) by_node_[n].push_back(s);
    by_last_time_.emplace(m.last_time(), s);
    if (m.size() >= ell_max_) full_.insert(s);
}

void OpenMotifPool::unindex(Slot s) {
    const MotifInstance& m = records_[s].instance;
    for (NodeId n : m.nodes()) {
        auto it = by_node_.find(n);
        if (it == by_node_.end()) continue;
        auto& list = it->second;
        auto pos = std::find(list.begin(), list.end(), s);
        if (pos != list.end()) {
            *pos = list.back();
            list.pop_back();
        }
        if (list.empty()) by_node_.erase(it);
    }
    by_last_time_.erase({m.last_time(), s});
    full_.erase(s);
}

std::size_t OpenMotifPool::prune(double now, double delta_c) {
    std::size_t removed = 0;
    while (!by_last_time_.empty()) {
        auto [last, s] = *by_last_time_.begin();
        if (!(now - last > delta_c)) break;
        erase(s);
        ++removed;
    }
    while (!full_.empty()) {
        erase(*full_.begin());
        ++removed;
    }
    return removed;
}

void OpenMotifPool::collect_touching(NodeId a, NodeId b, std::vector<Slot>& out) const {
    out.clear();
    if (auto it = by_node_.find(a); it != by_node_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    if (auto it = by_node_.find(b); it != by_node_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

std::vector<OpenMotifPool::Slot> OpenMotifPool::live_slots() const {
    std::vector<Slot> out;
    out.reserve(live_count_);
    for_each([&](Slot s, const MotifInstance&) { out.push_back(s); });
    return out;
}

bool OpenMotifPool::indexes_consistent() const {
    std::size_t node_refs = 0;
    for (const auto& [node, list] : by_node_) {
        for (Slot s : list) {
            if (!live(s) || !records_[s].instance.touches(node)) return false;
        }
        node_refs += list.size();
    }
    std::size_t expected_refs = 0;
    std::size_t expected_full = 0;
    for (Slot s = 0; s < records_.size(); ++s) {
        if (!records_[s].live) continue;
        const auto& m = records_[s].instance;
        expected_refs += m.nodes().size();
        if (!by_last_time_.count({m.last_time(), s})) return false;
        if (m.size() >= ell_max_) {
            ++expected_full;
            if (!full_.count(s)) return false;
        }
    }
    return node_refs == expected_refs && by_last_time_.size() == live_count_ && full_.size() == expected_full;
}

// ---------------------------------------------------------------------------
// MotifTracker

MotifTracker::MotifTracker(const MotifVocabulary& vocab, double delta_c)
    : vocab_(&vocab), delta_c_(delta_c), pool_(vocab.ell_max()) {}

std::span<const ObservedTransition> MotifTracker::observe(const Event& e) {
    const auto now = static_cast<double>(e.time);
    transitions_.clear();
    pool_.prune(now, delta_c_);
    pool_.collect_touching(e.src, e.dst, scratch_);
    for (auto s : scratch_) {
        const MotifInstance& m = pool_.at(s);
        if (!can_extend_observed(m, e, delta_c_, vocab_->ell_max())) continue;
        MotifInstance next = extend(*vocab_, m, e.src, e.dst, now);
        transitions_.push_back({s, m.type(), next.type(), now - m.last_time()});
        pool_.replace(s, next);
    }
    if (transitions_.empty()) pool_.insert(MotifInstance::single(e.src, e.dst, now));
    return transitions_;
}

}  // namespace motifcast
