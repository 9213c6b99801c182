#ifndef AGENTCHECK_STATE_SET_HPP
#define AGENTCHECK_STATE_SET_HPP

#include <bit>
#include <cstdint>
#include <vector>

namespace agentcheck {

using StateId = std::uint32_t;

/// Fixed-universe set of states backed by a bit vector.
class StateSet {
 public:
  StateSet() = default;
  explicit StateSet(std::size_t universe, bool full = false)
      : size_(universe), words_((universe + 63) / 64, full ? ~0ULL : 0ULL) {
    trim();
  }

  std::size_t universe() const { return size_; }

  bool contains(StateId s) const { return (words_[s >> 6] >> (s & 63)) & 1ULL; }
  void insert(StateId s) { words_[s >> 6] |= 1ULL << (s & 63); }
  void erase(StateId s) { words_[s >> 6] &= ~(1ULL << (s & 63)); }
  void set(StateId s, bool value) { value ? insert(s) : erase(s); }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    for (auto w : words_)
      if (w) return false;
    return true;
  }

  StateSet& operator&=(const StateSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }
  StateSet& operator|=(const StateSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  /// Set difference.
  StateSet& operator-=(const StateSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  StateSet operator~() const {
    StateSet r = *this;
    for (auto& w : r.words_) w = ~w;
    r.trim();
    return r;
  }

  friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
  friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
  friend StateSet operator-(StateSet a, const StateSet& b) { return a -= b; }
  bool operator==(const StateSet&) const = default;

  bool is_subset_of(const StateSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  /// Members in increasing order.
  std::vector<StateId> members() const {
    std::vector<StateId> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto w = words_[i];
      while (w) {
        out.push_back(static_cast<StateId>(i * 64 + std::countr_zero(w)));
        w &= w - 1;
      }
    }
    return out;
  }

 private:
  void trim() {
    if (size_ % 64 && !words_.empty()) words_.back() &= (1ULL << (size_ % 64)) - 1;
  }

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace agentcheck

#endif  // AGENTCHECK_STATE_SET_HPP
