#include "qapbb/frontier.hpp"

#include <algorithm>
#include <cstring>

#include "qapbb/error.hpp"

namespace qapbb {

NodeQueue::NodeQueue(int n, std::size_t memory_limit)
    : n_(n), memory_limit_(std::max<std::size_t>(1, memory_limit)) {}

void NodeQueue::push(FrontierNode node) {
  if (reading_) throw Error(Errc::invalid_argument, "push after reading started");
  buffer_.push_back(std::move(node));
  if (buffer_.size() >= memory_limit_) spill();
}

void NodeQueue::spill() {
  if (!file_) {
    file_.reset(std::tmpfile());
    if (!file_) throw Error(Errc::io_error, "cannot create frontier spill file");
  }
  std::vector<unsigned char> record(record_size());
  for (const auto& node : buffer_) {
    const auto states = node.key.states();
    for (int i = 0; i < n_; ++i) record[i] = static_cast<unsigned char>(states[i]);
    std::memcpy(record.data() + n_, &node.group, 4);
    if (std::fwrite(record.data(), 1, record.size(), file_.get()) != record.size()) {
      throw Error(Errc::io_error, "frontier spill write failed");
    }
  }
  spilled_ += buffer_.size();
  buffer_.clear();
}

bool NodeQueue::pop_batch(std::vector<FrontierNode>& out, std::size_t max) {
  out.clear();
  if (!reading_) {
    reading_ = true;
    if (file_ && std::fseek(file_.get(), 0, SEEK_SET) != 0) {
      throw Error(Errc::io_error, "frontier spill rewind failed");
    }
  }
  std::vector<unsigned char> record(record_size());
  while (out.size() < max && file_read_ < spilled_) {
    if (std::fread(record.data(), 1, record.size(), file_.get()) != record.size()) {
      throw Error(Errc::io_error, "frontier spill read failed");
    }
    std::vector<VarState> states(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) states[i] = static_cast<VarState>(record[i]);
    FrontierNode node{NodeKey::from_states(std::move(states)), 0};
    std::memcpy(&node.group, record.data() + n_, 4);
    out.push_back(std::move(node));
    ++file_read_;
  }
  while (out.size() < max && buffer_read_ < buffer_.size()) {
    out.push_back(std::move(buffer_[buffer_read_++]));
  }
  return !out.empty();
}

}  // namespace qapbb
