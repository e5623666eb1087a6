#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mecsched/catalog.hpp"
#include "mecsched/error.hpp"
#include "mecsched/workload.hpp"

namespace mecsched {

struct SystemParams {
  double slot_seconds = 0.2;   // Delta
  double cycles_per_bit = 1.0; // W
  double f_local_hz = 1e9;
  double f_mec_hz = 10e9;
  double rate_bps = 500e6;     // R

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(name) + " must be a positive finite number");
    };
    positive(slot_seconds, "slot_seconds");
    positive(cycles_per_bit, "cycles_per_bit");
    positive(f_local_hz, "f_local_hz");
    positive(f_mec_hz, "f_mec_hz");
    positive(rate_bps, "rate_bps");
  }
};

// The five admissible scheduling tuples (u_l1, u_l2, u_c1, u_c2), in the
// order they are listed for the model. "Head" is the oldest queued task.
enum class Action : std::uint8_t {
  idle,                   // (0,0,0,0)
  local_head,             // (1,0,0,0)
  mec_head,               // (0,0,1,0)
  local_head_mec_second,  // (1,0,0,1)
  mec_head_local_second,  // (0,1,1,0)
};

inline constexpr std::array<Action, 5> kAllActions{Action::idle, Action::local_head, Action::mec_head,
                                                   Action::local_head_mec_second,
                                                   Action::mec_head_local_second};

struct ActionTuple {
  int u_l1, u_l2, u_c1, u_c2;
  friend bool operator==(const ActionTuple&, const ActionTuple&) = default;
};

constexpr ActionTuple to_tuple(Action a) noexcept {
  switch (a) {
    case Action::local_head: return {1, 0, 0, 0};
    case Action::mec_head: return {0, 0, 1, 0};
    case Action::local_head_mec_second: return {1, 0, 0, 1};
    case Action::mec_head_local_second: return {0, 1, 1, 0};
    case Action::idle: break;
  }
  return {0, 0, 0, 0};
}

inline Action from_tuple(const ActionTuple& t) {
  for (Action a : kAllActions)
    if (to_tuple(a) == t) return a;
  throw ContractViolation("tuple is not one of the five admissible scheduling decisions");
}

// U(t).
constexpr int scheduled_count(Action a) noexcept {
  const auto t = to_tuple(a);
  return t.u_l1 + t.u_l2 + t.u_c1 + t.u_c2;
}

constexpr bool uses_local(Action a) noexcept {
  const auto t = to_tuple(a);
  return t.u_l1 + t.u_l2 > 0;
}

constexpr bool uses_mec(Action a) noexcept {
  const auto t = to_tuple(a);
  return t.u_c1 + t.u_c2 > 0;
}

constexpr std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::local_head: return "(1,0,0,0)";
    case Action::mec_head: return "(0,0,1,0)";
    case Action::local_head_mec_second: return "(1,0,0,1)";
    case Action::mec_head_local_second: return "(0,1,1,0)";
    case Action::idle: break;
  }
  return "(0,0,0,0)";
}

// D_lt: tau times the number of distinct requested contents outside the cache.
inline double uncached_distinct_bits(const Task& task, const CacheConfig& cache, const ContentCatalog& catalog) {
  std::vector<ContentIndex> missing;
  missing.reserve(task.contents.size());
  for (ContentIndex c : task.contents) {
    catalog.check_index(c);
    if (c > cache.capacity) missing.push_back(c);
  }
  std::sort(missing.begin(), missing.end());
  const auto distinct = std::unique(missing.begin(), missing.end()) - missing.begin();
  return catalog.size_bits() * static_cast<double>(distinct);
}

// D_ct = D(t): the whole assembled task is shipped.
inline double mec_bits(const Task& task, const ContentCatalog& catalog) noexcept {
  return task.total_bits(catalog);
}

namespace detail {

// ceil() that treats values within 1e-9 (relative) of an integer as that
// integer, so 2.0000000000000004 from rounding does not become 3.
inline std::uint32_t slot_ceiling(double x) {
  if (!std::isfinite(x) || x > 4e9) throw ContractViolation("slot count overflow");
  const double nearest = std::round(x);
  const double c = std::abs(x - nearest) <= 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
  return static_cast<std::uint32_t>(std::max(1.0, c));
}

}  // namespace detail

// N_c = ceil(D W / (f_c Delta) + D / (R Delta)).
inline std::uint32_t slots_mec(double total_bits, const SystemParams& p) {
  return detail::slot_ceiling(total_bits * p.cycles_per_bit / (p.f_mec_hz * p.slot_seconds) +
                              total_bits / (p.rate_bps * p.slot_seconds));
}

// N_l = ceil(D W / (f_l Delta) + D_lt / (R Delta)); the compute term uses the full task.
inline std::uint32_t slots_local(double total_bits, double uncached_bits, const SystemParams& p) {
  return detail::slot_ceiling(total_bits * p.cycles_per_bit / (p.f_local_hz * p.slot_seconds) +
                              uncached_bits / (p.rate_bps * p.slot_seconds));
}

inline std::uint32_t slots_mec(const Task& task, const ContentCatalog& catalog, const SystemParams& p) {
  return slots_mec(mec_bits(task, catalog), p);
}

inline std::uint32_t slots_local(const Task& task, const CacheConfig& cache, const ContentCatalog& catalog,
                                 const SystemParams& p) {
  return slots_local(mec_bits(task, catalog), uncached_distinct_bits(task, cache, catalog), p);
}

// Everything the scheduler and state machine need about a queued task,
// evaluated once when the task arrives.
struct TaskProfile {
  std::uint64_t id = 0;
  std::uint64_t arrival_slot = 0;
  std::uint32_t k = 0;
  double mec_bits = 0.0;    // D_ct
  double local_bits = 0.0;  // D_lt
  std::uint32_t slots_mec = 1;
  std::uint32_t slots_local = 1;
};

inline TaskProfile profile(const Task& task, const CacheConfig& cache, const ContentCatalog& catalog,
                           const SystemParams& p) {
  TaskProfile tp;
  tp.id = task.id;
  tp.arrival_slot = task.arrival_slot;
  tp.k = static_cast<std::uint32_t>(task.k());
  tp.mec_bits = mec_bits(task, catalog);
  tp.local_bits = uncached_distinct_bits(task, cache, catalog);
  tp.slots_mec = slots_mec(tp.mec_bits, p);
  tp.slots_local = slots_local(tp.mec_bits, tp.local_bits, p);
  return tp;
}

enum class Mode : std::uint8_t { local, mec };

struct InService {
  std::uint64_t task_id = 0;
  std::uint64_t arrival_slot = 0;
  Mode mode = Mode::local;
  std::uint64_t assigned_slot = 0;
  std::uint64_t completion_slot = 0;
};

struct CompletionEvent {
  std::uint64_t task_id = 0;
  std::uint64_t arrival_slot = 0;
  std::uint64_t completion_slot = 0;
  Mode mode = Mode::local;

  // (completion - arrival + 1) slots.
  std::uint64_t delay_slots() const noexcept { return completion_slot - arrival_slot + 1; }
};

struct SystemState {
  std::deque<TaskProfile> queue;  // FIFO, front is the oldest task
  std::uint32_t s_local = 0;      // S_l
  std::uint32_t s_mec = 0;        // S_c
  std::optional<InService> in_service_local;
  std::optional<InService> in_service_mec;

  std::size_t q_len() const noexcept { return queue.size(); }
  std::size_t in_service_count() const noexcept {
    return static_cast<std::size_t>(in_service_local.has_value()) + static_cast<std::size_t>(in_service_mec.has_value());
  }
};

struct StepOutcome {
  std::vector<CompletionEvent> completions;
  double transmitted_bits = 0.0;
  int scheduled = 0;  // U(t)
  int arrived = 0;    // A(t)
  std::size_t q_before = 0;
  std::size_t q_after = 0;
};

// Drift inequality Q(t+1)^2 <= Q^2 + U^2 + A^2 - 2 Q (U - A), exact in integers.
constexpr bool drift_inequality_holds(std::int64_t q, std::int64_t u, std::int64_t a, std::int64_t q_next) noexcept {
  return q_next * q_next <= q * q + u * u + a * a - 2 * q * (u - a);
}

namespace detail {

inline void advance_processor(std::uint32_t& counter, std::optional<InService>& record, std::uint64_t slot,
                              std::vector<CompletionEvent>& done) {
  counter = counter > 0 ? counter - 1 : 0;
  if (counter == 0 && record) {
    done.push_back({record->task_id, record->arrival_slot, slot, record->mode});
    record.reset();
  }
}

inline void assign_processor(std::uint32_t& counter, std::optional<InService>& record, const TaskProfile& task,
                             Mode mode, std::uint32_t slots, std::uint64_t slot, std::vector<CompletionEvent>& done) {
  counter = slots - 1;
  const std::uint64_t completion = slot + slots - 1;
  if (counter == 0) {
    done.push_back({task.id, task.arrival_slot, completion, mode});
  } else {
    record = InService{task.id, task.arrival_slot, mode, slot, completion};
  }
}

}  // namespace detail

// True iff `a` may be executed from (s_local, s_mec, q_len); mirrors the case analysis.
constexpr bool is_feasible(Action a, std::uint32_t s_local, std::uint32_t s_mec, std::size_t q_len) noexcept {
  if (static_cast<std::size_t>(scheduled_count(a)) > q_len) return false;
  if (uses_local(a) && s_local != 0) return false;
  if (uses_mec(a) && s_mec != 0) return false;
  return true;
}

// One slot of the model: dispatch per `action`, advance the busy counters,
// then append the arrival. Mutates `state` in place.
inline StepOutcome step(SystemState& state, Action action, std::optional<TaskProfile> arrival, std::uint64_t slot) {
  const std::size_t q = state.q_len();
  if (static_cast<std::size_t>(scheduled_count(action)) > q)
    throw ContractViolation("action schedules " + std::to_string(scheduled_count(action)) + " tasks but queue holds " +
                            std::to_string(q));
  if (!is_feasible(action, state.s_local, state.s_mec, q))
    throw ContractViolation(std::string("action ") + std::string(to_string(action)) +
                            " is infeasible: target processor is busy");

  StepOutcome out;
  out.q_before = q;
  out.scheduled = scheduled_count(action);
  out.arrived = arrival.has_value() ? 1 : 0;

  const auto t = to_tuple(action);
  std::optional<TaskProfile> to_local;
  std::optional<TaskProfile> to_mec;
  // Head first, then the second task.
  if (t.u_l1 || t.u_c1) {
    TaskProfile head = state.queue.front();
    state.queue.pop_front();
    (t.u_l1 ? to_local : to_mec) = head;
  }
  if (t.u_l2 || t.u_c2) {
    TaskProfile second = state.queue.front();
    state.queue.pop_front();
    (t.u_l2 ? to_local : to_mec) = second;
  }

  if (to_local) {
    out.transmitted_bits += to_local->local_bits;
    detail::assign_processor(state.s_local, state.in_service_local, *to_local, Mode::local, to_local->slots_local, slot,
                             out.completions);
  } else {
    detail::advance_processor(state.s_local, state.in_service_local, slot, out.completions);
  }
  if (to_mec) {
    out.transmitted_bits += to_mec->mec_bits;
    detail::assign_processor(state.s_mec, state.in_service_mec, *to_mec, Mode::mec, to_mec->slots_mec, slot,
                             out.completions);
  } else {
    detail::advance_processor(state.s_mec, state.in_service_mec, slot, out.completions);
  }

  if (arrival) state.queue.push_back(*arrival);
  out.q_after = state.q_len();
  return out;
}

}  // namespace mecsched
