//  Copyright 2026 The latwin Authors
//
//  Licensed under the Apache License, Version 2.0 (the "License");
//  you may not use this file except in compliance with the License.
//  You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
//  Unless required by applicable law or agreed to in writing, software
//  distributed under the License is distributed on an "AS IS" BASIS,
//  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//  See the License for the specific language governing permissions and
//  limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "latwin/engine.hpp"
#include "latwin/lattice.hpp"
#include "latwin/trace.hpp"

namespace latwin {

enum class Modality { possibly, definitely };

const char* to_string(Modality m);
Modality modality_from_string(const std::string& name);

/// Conjunction of one local predicate per process, read from payloads.
struct Property {
  std::string name;
  std::vector<std::string> locals;  // locals[k] names the predicate of P_k
  Modality modality = Modality::definitely;
};

/// Throws SchemaError unless every local names a predicate in `schema`.
void check_schema(const Property& prop, const std::vector<std::string>& schema);

struct DetectionOutcome {
  bool holds = false;
  std::optional<Cut> witness;  // a satisfying node, possibly only
  std::vector<Cut> cut_set;    // definitely: satisfying nodes blocking c_min
};

/// Conjunction of the payload booleans at `c`. SchemaError when a predicate
/// is missing from a payload or the property arity differs from the view.
bool eval_cgs(const Cut& c, const Property& prop, const LatWinView& view);

/// Possibly: some node satisfies. Definitely: the view is nonempty and no
/// precede-path from c_min to c_max runs through non-satisfying nodes only.
DetectionOutcome detect(const Property& prop, const LatWinView& view);

/// Maximal runs of consecutive states on which a process's local predicate
/// holds. An occurrence of the property is one run per process and is
/// named by the first index of each run.
using Occurrence = std::vector<StateIndex>;

class IntervalIndex {
 public:
  static constexpr StateIndex kFalse = UINT32_MAX;

  IntervalIndex(const Trace& trace, const Property& prop);

  std::size_t dimension() const { return start_.size(); }
  /// First index of the run containing s^(k)_i, or kFalse.
  StateIndex run_start(ProcessId k, StateIndex i) const {
    return i < start_[k].size() ? start_[k][i] : kFalse;
  }
  /// Last index of the run beginning at `first`.
  StateIndex run_end(ProcessId k, StateIndex first) const;
  /// (first, last) pairs per process in index order.
  const std::vector<std::vector<std::pair<StateIndex, StateIndex>>>& runs()
      const {
    return runs_;
  }

  /// Occurrence of a satisfying cut, nullopt when some coordinate is false.
  std::optional<Occurrence> occurrence_of(const Cut& cut) const;
  bool in_box(const Cut& cut, const Occurrence& occ) const;

 private:
  std::vector<std::vector<StateIndex>> start_;
  std::vector<std::vector<std::pair<StateIndex, StateIndex>>> runs_;
};

/// Occurrences the view detects under `modality`: possibly when a node lies
/// in the occurrence's box, definitely when every c_min to c_max path
/// enters the box. Sorted.
std::vector<Occurrence> windowed_occurrences(Modality modality,
                                             const LatWinView& view,
                                             const IntervalIndex& index);

/// Occurrences whose runs are pairwise not ordered end-before-start over the
/// whole trace; a superset of everything any checker can detect.
std::vector<Occurrence> candidate_occurrences(const Trace& trace,
                                              const IntervalIndex& index);

/// Unbounded-window checker evaluated in closed form. Tracks the delivered
/// maxima M and the greatest CGS T <= M; the lattice of CGSs below T is
/// exactly what an engine with unlimited windows would hold.
class PrefixBaseline {
 public:
  PrefixBaseline(const Trace& trace, const IntervalIndex& index,
                 std::vector<Occurrence> candidates);

  /// Records delivery of s^(k)_i, in order per process, and re-evaluates
  /// the candidates not yet detected.
  void advance(ProcessId k, StateIndex i);

  /// Candidates whose verdict has been true at some step so far, sorted.
  std::vector<Occurrence> detected(Modality modality) const;

  const std::optional<Cut>& top() const { return top_; }
  /// Verdict on the CGSs below `top` for one occurrence.
  bool holds(const Occurrence& occ, const Cut& top, Modality modality) const;

 private:
  const Trace& trace_;
  const IntervalIndex& index_;
  std::vector<Occurrence> candidates_;
  std::vector<bool> hit_possibly_;
  std::vector<bool> hit_definitely_;
  std::vector<std::int64_t> delivered_;
  std::optional<Cut> top_;
};

/// Greatest CGS componentwise below `bound`.
Cut greatest_cgs_below(const Trace& trace, Cut bound);

}  // namespace latwin
