#include <bit>

#include "noisybeep/apps.hpp"

namespace nbeep {

std::size_t ceil_log2(std::size_t n) noexcept { return n <= 1 ? 0 : std::bit_width(n - 1); }

namespace {

class MISNode final : public BeepNode {
 public:
  MISNode(std::size_t bits, std::uint64_t seed) : bits_(bits), rng_(seed) {}

  NodeAction next_action() override {
    const std::size_t pos = t_ % phase_len();
    if (pos == 0) {
      if (status_ != Status::Undecided) return NodeAction::Terminate;
      number_ = rng_() & mask();
      candidate_ = true;
    }
    if (status_ != Status::Undecided) {
      // Joined this phase: only the announce round remains.
      return pos == bits_ + 1 && status_ == Status::In ? NodeAction::Beep : NodeAction::Listen;
    }
    if (pos < bits_) return candidate_ && bit(pos) ? NodeAction::Beep : NodeAction::Listen;
    if (pos == bits_) return candidate_ ? NodeAction::Beep : NodeAction::Listen;
    return NodeAction::Listen;
  }

  void absorb(Observation obs) override {
    const std::size_t pos = t_ % phase_len();
    ++t_;
    if (status_ != Status::Undecided) return;
    if (pos < bits_) {
      if (candidate_ && !bit(pos) && heard_beep(obs)) candidate_ = false;
    } else if (pos == bits_) {
      if (candidate_ && obs == Observation::Alone) status_ = Status::In;
    } else if (heard_beep(obs)) {
      status_ = Status::Out;
    }
  }

  std::int64_t output() const override {
    return status_ == Status::In ? 1 : status_ == Status::Out ? 0 : -1;
  }

 private:
  enum class Status { Undecided, In, Out };
  std::size_t phase_len() const { return bits_ + 2; }
  std::uint64_t mask() const { return bits_ >= 64 ? ~0ULL : (1ULL << bits_) - 1; }
  bool bit(std::size_t pos) const { return (number_ >> (bits_ - 1 - pos)) & 1U; }

  std::size_t bits_;
  Rng rng_;
  std::uint64_t t_ = 0;
  std::uint64_t number_ = 0;
  bool candidate_ = false;
  Status status_ = Status::Undecided;
};

class MISProtocol final : public BeepProtocol {
 public:
  explicit MISProtocol(std::size_t n_bound)
      : bits_(std::min<std::size_t>(62, 2 * ceil_log2(n_bound) + 2)), phases_(6 * ceil_log2(n_bound) + 16) {}
  std::string name() const override { return "mis"; }
  Model model() const override { return Model::BcdLcd; }
  std::size_t length() const override { return phases_ * (bits_ + 2); }
  std::unique_ptr<BeepNode> make_node(NodeId, std::uint64_t seed) const override {
    return std::make_unique<MISNode>(bits_, seed);
  }

 private:
  std::size_t bits_;
  std::size_t phases_;
};

}  // namespace

std::unique_ptr<BeepProtocol> mis_protocol(std::size_t n_bound) { return std::make_unique<MISProtocol>(n_bound); }

}  // namespace nbeep
