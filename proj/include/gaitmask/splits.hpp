#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gaitmask/errors.hpp"
#include "gaitmask/rng.hpp"
#include "gaitmask/types.hpp"

namespace gaitmask {

enum class Task { identity, sex };

inline const char* task_name(Task t) { return t == Task::identity ? "identity" : "sex"; }

inline Task task_from_name(const std::string& name) {
  if (name == "identity") return Task::identity;
  if (name == "sex") return Task::sex;
  raise(Errc::invalid_params, "unknown task '" + name + "'");
}

struct SampleRef {
  int subject = 0;  // index into Dataset::subjects
  int sample = 0;   // index into Subject::samples
};

struct Split {
  std::vector<SampleRef> train;
  std::vector<SampleRef> test;
};

namespace detail {

// Round-half-up on the train side, guarded so neither side is empty.
inline std::size_t train_count(double fraction, std::size_t n) {
  auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  if (k < 1) k = 1;
  if (k > n - 1) k = n - 1;
  return k;
}

}  // namespace detail

// Identity task: every subject appears in both sets; per subject,
// round(fraction*n) samples go to train, the rest to test.
inline Split split_identity(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0)
    raise(Errc::invalid_params, "train fraction must be in (0, 1)");
  Split split;
  for (std::size_t si = 0; si < ds.subjects.size(); ++si) {
    const auto& subj = ds.subjects[si];
    const std::size_t n = subj.samples.size();
    if (n < 2)
      raise(Errc::too_few_samples,
            "subject '" + subj.subject_id + "' has fewer than 2 samples");
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    Rng rng(derive_seed(seed, "identity-split", si));
    rng.shuffle(order);
    std::size_t k = detail::train_count(fraction, n);
    for (std::size_t i = 0; i < n; ++i) {
      SampleRef ref{static_cast<int>(si), order[i]};
      (i < k ? split.train : split.test).push_back(ref);
    }
  }
  return split;
}

// Sex task: subjects are partitioned (no subject spans both sets),
// sex-stratified; all of a subject's samples follow the subject.
inline Split split_sex(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0)
    raise(Errc::invalid_params, "train fraction must be in (0, 1)");
  std::vector<int> by_sex[2];
  for (std::size_t si = 0; si < ds.subjects.size(); ++si)
    by_sex[ds.subjects[si].sex == Sex::female ? 0 : 1].push_back(static_cast<int>(si));
  for (int s = 0; s < 2; ++s)
    if (by_sex[s].size() < 2)
      raise(Errc::single_sex_side,
            std::string("need at least 2 subjects of sex ") + (s == 0 ? "F" : "M") +
                " so both sides contain the class");

  Split split;
  for (int s = 0; s < 2; ++s) {
    Rng rng(derive_seed(seed, "sex-split", static_cast<std::uint64_t>(s)));
    std::vector<int> subjects = by_sex[s];
    rng.shuffle(subjects);
    std::size_t k = detail::train_count(fraction, subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      auto& side = i < k ? split.train : split.test;
      int si = subjects[i];
      for (std::size_t t = 0; t < ds.subjects[static_cast<std::size_t>(si)].samples.size(); ++t)
        side.push_back(SampleRef{si, static_cast<int>(t)});
    }
  }
  return split;
}

inline Split make_split(const Dataset& ds, Task task, double fraction, std::uint64_t seed) {
  return task == Task::identity ? split_identity(ds, fraction, seed)
                                : split_sex(ds, fraction, seed);
}

}  // namespace gaitmask
