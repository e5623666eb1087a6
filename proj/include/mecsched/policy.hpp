#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>

#include "mecsched/dynamics.hpp"
#include "mecsched/error.hpp"

namespace mecsched {

enum class PolicyKind : std::uint8_t { lyapunov, mec_only, local_only };

inline std::string_view to_string(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::mec_only: return "mec_only";
    case PolicyKind::local_only: return "local_only";
    case PolicyKind::lyapunov: break;
  }
  return "lyapunov";
}

inline PolicyKind parse_policy(std::string_view s) {
  if (s == "lyapunov") return PolicyKind::lyapunov;
  if (s == "mec_only") return PolicyKind::mec_only;
  if (s == "local_only") return PolicyKind::local_only;
  throw std::invalid_argument("unknown policy '" + std::string(s) + "' (expected lyapunov, mec_only or local_only)");
}

// v_param weighs transmitted data against queue length. Data enters the cost
// in bits, so V is expressed per bit.
struct PolicySpec {
  PolicyKind kind = PolicyKind::lyapunov;
  double v_param = 0.0;

  void validate() const {
    if (!(v_param >= 0.0) || !std::isfinite(v_param))
      throw std::invalid_argument("v_param must be a finite non-negative number");
  }
};

// Fixed-capacity set of at most five actions, in canonical order.
class ActionSet {
 public:
  constexpr ActionSet() = default;
  constexpr ActionSet(std::initializer_list<Action> actions) {
    for (Action a : actions) items_[size_++] = a;
  }
  constexpr const Action* begin() const noexcept { return items_.data(); }
  constexpr const Action* end() const noexcept { return items_.data() + size_; }
  constexpr std::size_t size() const noexcept { return size_; }
  constexpr bool contains(Action a) const noexcept {
    for (Action x : *this)
      if (x == a) return true;
    return false;
  }

 private:
  std::array<Action, 5> items_{};
  std::size_t size_ = 0;
};

// The admissible decisions for each system case.
constexpr ActionSet feasible_actions(std::uint32_t s_local, std::uint32_t s_mec, std::size_t q_len) noexcept {
  if (q_len == 0 || (s_local != 0 && s_mec != 0)) return {Action::idle};
  if (s_local == 0 && s_mec == 0) {
    if (q_len >= 2)
      return {Action::idle, Action::local_head, Action::mec_head, Action::local_head_mec_second,
              Action::mec_head_local_second};
    return {Action::idle, Action::local_head, Action::mec_head};
  }
  if (s_mec == 0) return {Action::idle, Action::mec_head};  // device busy
  return {Action::idle, Action::local_head};                // server busy
}

// Data shipped by `action` given the head (and second) task.
inline double transmitted_bits(Action action, std::span<const TaskProfile> heads) {
  const auto t = to_tuple(action);
  auto need = [&](std::size_t i) -> const TaskProfile& {
    if (i >= heads.size())
      throw ContractViolation(std::string("action ") + std::string(to_string(action)) + " needs task " +
                              std::to_string(i + 1) + " but only " + std::to_string(heads.size()) + " supplied");
    return heads[i];
  };
  double bits = 0.0;
  if (t.u_l1) bits += need(0).local_bits;
  if (t.u_c1) bits += need(0).mec_bits;
  if (t.u_l2) bits += need(1).local_bits;
  if (t.u_c2) bits += need(1).mec_bits;
  return bits;
}

// Per-slot drift-plus-penalty objective: -Q U + V D.
inline double action_cost(Action action, std::span<const TaskProfile> heads, std::size_t q_len, double v) {
  return -static_cast<double>(q_len) * scheduled_count(action) + v * transmitted_bits(action, heads);
}

namespace detail {

inline std::span<const TaskProfile> queue_heads(const SystemState& state, std::array<TaskProfile, 2>& buf) {
  const std::size_t n = std::min<std::size_t>(2, state.queue.size());
  for (std::size_t i = 0; i < n; ++i) buf[i] = state.queue[i];
  return {buf.data(), n};
}

}  // namespace detail

// Exhaustive argmin over the feasible set. Ties: larger U, then fewer bits,
// then head-to-device, then canonical tuple order.
inline Action lyapunov_decide(const SystemState& state, double v) {
  const auto actions = feasible_actions(state.s_local, state.s_mec, state.q_len());
  std::array<TaskProfile, 2> buf;
  const auto heads = detail::queue_heads(state, buf);

  auto key = [&](Action a) {
    const auto t = to_tuple(a);
    return std::make_tuple(action_cost(a, heads, state.q_len(), v), -scheduled_count(a),
                           transmitted_bits(a, heads), t.u_l1 ? 0 : 1, static_cast<int>(a));
  };
  Action best = *actions.begin();
  auto best_key = key(best);
  for (Action a : actions) {
    auto k = key(a);
    if (k < best_key) {
      best = a;
      best_key = k;
    }
  }
  return best;
}

inline Action decide(const PolicySpec& policy, const SystemState& state) {
  const std::size_t q = state.q_len();
  switch (policy.kind) {
    case PolicyKind::mec_only:
      return (state.s_mec == 0 && q >= 1) ? Action::mec_head : Action::idle;
    case PolicyKind::local_only:
      return (state.s_local == 0 && q >= 1) ? Action::local_head : Action::idle;
    case PolicyKind::lyapunov:
      break;
  }
  return lyapunov_decide(state, policy.v_param);
}

}  // namespace mecsched
