#pragma once

// First-in first-out node storage for one search level. Nodes beyond the
// in-memory limit go to an anonymous temporary file; reading returns them
// in insertion order.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <vector>

#include "qapbb/subproblem.hpp"

namespace qapbb {

struct FrontierNode {
  NodeKey key;
  /// Index into the caller's group registry.
  std::uint32_t group = 0;
};

class NodeQueue {
 public:
  /// `memory_limit` nodes are kept in memory before spilling.
  NodeQueue(int n, std::size_t memory_limit);

  void push(FrontierNode node);
  std::size_t size() const noexcept { return spilled_ + buffer_.size(); }
  bool empty() const noexcept { return size() == 0; }
  std::size_t spilled() const noexcept { return spilled_; }

  /// Moves up to `max` nodes, oldest first, into `out` (cleared first).
  /// Returns false once the queue is exhausted.
  bool pop_batch(std::vector<FrontierNode>& out, std::size_t max);

 private:
  struct FileCloser {
    void operator()(std::FILE* f) const noexcept { std::fclose(f); }
  };

  void spill();
  std::size_t record_size() const noexcept { return static_cast<std::size_t>(n_) + 4; }

  int n_;
  std::size_t memory_limit_;
  std::vector<FrontierNode> buffer_;
  std::size_t buffer_read_ = 0;
  std::unique_ptr<std::FILE, FileCloser> file_;
  std::size_t spilled_ = 0;
  std::size_t file_read_ = 0;
  bool reading_ = false;
};

}  // namespace qapbb
