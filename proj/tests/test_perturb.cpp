#include <catch2/catch.hpp>

#include <cmath>

#include "gaitmask/perturb.hpp"
#include "gaitmask/sinusoid.hpp"
#include "gaitmask/synth.hpp"
#include "oracles.hpp"

using namespace gaitmask;

namespace {

GaitSample channel_sample(std::vector<double> values) {
  GaitSample s;
  s.subject_id = "S";
  s.sample_id = "T";
  s.frame_rate_hz = 250.0;
  for (double v : values) {
    Pose p(1);
    p[0] = {v, 0.0, 0.0};
    s.frames.push_back(p);
  }
  return s;
}

bool samples_equal(const GaitSample& a, const GaitSample& b) {
  if (a.frame_count() != b.frame_count() || a.marker_count() != b.marker_count()) return false;
  for (std::size_t t = 0; t < a.frame_count(); ++t)
    for (std::size_t j = 0; j < a.marker_count(); ++j)
      if (!(a.frames[t][j] == b.frames[t][j])) return false;
  return true;
}

}  // namespace

TEST_CASE("pipeline text format parses and round-trips") {
  Pipeline p = Pipeline::parse(
      "# comment\n"
      "remove-variations method=interpolation w=3\n"
      "coarsen-macro step=1000\n"
      "body-part part=legs mode=keep\n"
      "static-pose mode=first\n"
      "normalize mode=y_axis\n");
  REQUIRE(p.steps.size() == 5);
  CHECK(p.steps[0].kind == PerturbKind::remove_variations);
  CHECK(p.steps[0].method == SmoothMethod::interpolation);
  CHECK(p.steps[0].window == 3);
  CHECK(p.steps[2].part == BodyPart::legs);
  CHECK(p.steps[2].mode == MaskMode::keep);

  Pipeline again = Pipeline::parse(p.format());
  REQUIRE(again.steps.size() == p.steps.size());
  CHECK(again.format() == p.format());

  SECTION("inline ';' separators") {
    Pipeline q = Pipeline::parse("identity; coarsen-micro modulus=10");
    REQUIRE(q.steps.size() == 2);
    CHECK(q.steps[1].kind == PerturbKind::coarsen_micro);
  }

  SECTION("unknown operator -> InvalidParams") {
    try {
      Pipeline::parse("blur radius=3");
      FAIL("expected InvalidParams");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_params);
    }
  }

  SECTION("out-of-range parameter -> InvalidParams") {
    try {
      Pipeline::parse("remove-variations method=rolling_average w=2");
      FAIL("expected InvalidParams");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_params);
    }
  }

  SECTION("unknown body part -> UnknownPart") {
    try {
      Pipeline::parse("body-part part=tail mode=keep");
      FAIL("expected UnknownPart");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::unknown_part);
    }
  }
}

TEST_CASE("ideal_trajectory smooths per the window contract") {
  SECTION("constant channel is unchanged by any method") {
    GaitSample s = channel_sample({5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0, 5.0});
    for (auto m : {SmoothMethod::rolling_average, SmoothMethod::interpolation})
      for (int w : {1, 3}) {
        GaitSample out = ideal_trajectory(s, m, w);
        for (const auto& f : out.frames) CHECK(f[0].x == 5.0);
      }
  }

  SECTION("rolling_average w=1 on [0,3,0] -> interior 1.0") {
    GaitSample out = ideal_trajectory(channel_sample({0.0, 3.0, 0.0}), SmoothMethod::rolling_average, 1);
    CHECK(out.frames[1][0].x == Approx(1.0));
  }

  SECTION("interpolation w=1 on [0,3,0] -> interior 0.0") {
    GaitSample out = ideal_trajectory(channel_sample({0.0, 3.0, 0.0}), SmoothMethod::interpolation, 1);
    CHECK(out.frames[1][0].x == Approx(0.0).margin(1e-15));
    CHECK(out.frames[0][0].x == 0.0);  // boundary copied
    CHECK(out.frames[2][0].x == 0.0);
  }

  SECTION("window too large for the sample -> WindowTooLarge") {
    try {
      ideal_trajectory(channel_sample({1.0, 2.0, 3.0}), SmoothMethod::rolling_average, 3);
      FAIL("expected WindowTooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::window_too_large);
    }
  }
}

TEST_CASE("remove_trajectories is the exact complement of ideal_trajectory") {
  SECTION("channel [0,3,0] rolling_average w=1 -> interior 2.0") {
    GaitSample out =
        remove_trajectories(channel_sample({0.0, 3.0, 0.0}), SmoothMethod::rolling_average, 1);
    CHECK(out.frames[1][0].x == Approx(2.0));
  }

  SECTION("constant channel -> all zeros") {
    GaitSample out = remove_trajectories(channel_sample({7.0, 7.0, 7.0, 7.0}),
                                         SmoothMethod::rolling_average, 1);
    for (const auto& f : out.frames) CHECK(f[0].x == 0.0);
  }

  SECTION("ideal + residual reconstructs the sample exactly (100 random samples)") {
    Rng rng(101);
    for (int rep = 0; rep < 100; ++rep) {
      GaitSample s = oracle::random_smooth_sample(rng, 30, 3);
      for (auto m : {SmoothMethod::rolling_average, SmoothMethod::interpolation})
        for (int w : {1, 3}) {
          GaitSample ideal = ideal_trajectory(s, m, w);
          GaitSample res = remove_trajectories(s, m, w);
          for (std::size_t t = 0; t < s.frame_count(); ++t)
            for (std::size_t j = 0; j < s.marker_count(); ++j)
              for (int a = 0; a < 3; ++a) {
                double sum = ideal.frames[t][j].axis(a) + res.frames[t][j].axis(a);
                REQUIRE(sum == s.frames[t][j].axis(a));
              }
        }
    }
  }
}

TEST_CASE("coarsening keeps the chosen digit range") {
  SECTION("macro quantization examples") {
    GaitSample s = channel_sample({1234.567});
    CHECK(coarsen_macro(s, 100.0).frames[0][0].x == 1200.0);
    CHECK(coarsen_macro(s, 1000.0).frames[0][0].x == 1000.0);
    CHECK(coarsen_macro(channel_sample({-250.3}), 100.0).frames[0][0].x == -300.0);
  }

  SECTION("micro remainder examples") {
    CHECK(coarsen_micro(channel_sample({1234.567}), 100.0).frames[0][0].x ==
          Approx(34.567).margin(1e-12));
    CHECK(coarsen_micro(channel_sample({-250.3}), 100.0).frames[0][0].x ==
          Approx(49.7).margin(1e-12));
  }

  SECTION("macro + micro = identity, exactly, for shared step (100 random samples)") {
    Rng rng(102);
    for (int rep = 0; rep < 100; ++rep) {
      GaitSample s = oracle::random_smooth_sample(rng, 12, 2);
      for (double k : {1.0, 10.0, 100.0, 1000.0}) {
        GaitSample mac = coarsen_macro(s, k);
        GaitSample mic = coarsen_micro(s, k);
        for (std::size_t t = 0; t < s.frame_count(); ++t)
          for (std::size_t j = 0; j < s.marker_count(); ++j)
            for (int a = 0; a < 3; ++a)
              REQUIRE(mac.frames[t][j].axis(a) + mic.frames[t][j].axis(a) ==
                      s.frames[t][j].axis(a));
      }
    }
  }

  SECTION("macro output is a multiple of the step; micro output lies in [0, modulus)") {
    Rng rng(103);
    GaitSample s = oracle::random_smooth_sample(rng, 20, 3);
    for (double k : {10.0, 100.0}) {
      GaitSample mac = coarsen_macro(s, k);
      GaitSample mic = coarsen_micro(s, k);
      for (std::size_t t = 0; t < s.frame_count(); ++t)
        for (std::size_t j = 0; j < s.marker_count(); ++j)
          for (int a = 0; a < 3; ++a) {
            double m = mac.frames[t][j].axis(a) / k;
            CHECK(m == std::floor(m));
            CHECK(mic.frames[t][j].axis(a) >= 0.0);
            CHECK(mic.frames[t][j].axis(a) < k);
          }
    }
    // Near-zero corner: remainder must stay inside [0, modulus).
    GaitSample tiny = coarsen_micro(channel_sample({-1e-15, 1e-300, -0.337}), 100.0);
    for (const auto& f : tiny.frames) {
      CHECK(f[0].x >= 0.0);
      CHECK(f[0].x < 100.0);
    }
  }
}

TEST_CASE("body part masking") {
  Dataset ds = synth::generate_dataset(2, 2, 5, 0.0);
  const GaitSample& s = ds.subjects[0].samples[0];
  const BodyPartMap& map = ds.body_parts;

  SECTION("remove legs zeroes exactly the leg markers") {
    GaitSample out = body_part_mask(s, map, BodyPart::legs, MaskMode::remove);
    for (std::size_t j = 0; j < s.marker_count(); ++j)
      for (std::size_t t = 0; t < s.frame_count(); ++t) {
        if (map.group_of[j] == BodyPart::legs) {
          CHECK(out.frames[t][j] == Vec3{});
        } else {
          CHECK(out.frames[t][j] == s.frames[t][j]);
        }
      }
  }

  SECTION("keep head leaves only head markers nonzero") {
    GaitSample out = body_part_mask(s, map, BodyPart::head, MaskMode::keep);
    for (std::size_t j = 0; j < s.marker_count(); ++j) {
      if (map.group_of[j] == BodyPart::head) {
        CHECK(out.frames[0][j] == s.frames[0][j]);
      } else {
        CHECK(out.frames[0][j] == Vec3{});
      }
    }
  }

  SECTION("keep(p) then remove(p) zeroes everything; keep(p) + remove(p) = original") {
    for (int pi = 0; pi < kBodyPartCount; ++pi) {
      auto part = static_cast<BodyPart>(pi);
      GaitSample kept = body_part_mask(s, map, part, MaskMode::keep);
      GaitSample removed = body_part_mask(s, map, part, MaskMode::remove);
      GaitSample both = body_part_mask(kept, map, part, MaskMode::remove);
      for (std::size_t t = 0; t < s.frame_count(); ++t)
        for (std::size_t j = 0; j < s.marker_count(); ++j) {
          CHECK(both.frames[t][j] == Vec3{});
          for (int a = 0; a < 3; ++a)
            REQUIRE(kept.frames[t][j].axis(a) + removed.frames[t][j].axis(a) ==
                    s.frames[t][j].axis(a));
        }
    }
  }
}

TEST_CASE("static pose, resampling, motion extraction") {
  SECTION("static_pose examples") {
    GaitSample s = channel_sample({0.0, 2.0, 4.0});
    CHECK(static_pose(s, PoseMode::average).frames[0][0].x == Approx(2.0));
    CHECK(static_pose(s, PoseMode::first).frames[0][0].x == 0.0);
    GaitSample one = channel_sample({3.0});
    CHECK(samples_equal(static_pose(one, PoseMode::average), one));
    CHECK(samples_equal(static_pose(one, PoseMode::first), one));
  }

  SECTION("resample_static: ramp 0..99 -> [0, 11, 22, ..., 99]") {
    std::vector<double> ramp(100);
    for (int i = 0; i < 100; ++i) ramp[static_cast<std::size_t>(i)] = i;
    GaitSample out = resample_static(channel_sample(ramp), 10);
    REQUIRE(out.frame_count() == 10);
    for (int k = 0; k < 10; ++k)
      CHECK(out.frames[static_cast<std::size_t>(k)][0].x == Approx(11.0 * k).margin(1e-12));
    CHECK(out.frames[0][0].x == 0.0);
    CHECK(out.frames[9][0].x == 99.0);
  }

  SECTION("constant sample resamples to 10 identical frames") {
    GaitSample out = resample_static(channel_sample(std::vector<double>(50, 4.5)), 10);
    REQUIRE(out.frame_count() == 10);
    for (const auto& f : out.frames) CHECK(f[0].x == 4.5);
  }

  SECTION("motion_extraction examples") {
    GaitSample constant = channel_sample(std::vector<double>(10, 3.0));
    GaitSample dc = motion_extraction(constant);
    REQUIRE(dc.frame_count() == 9);
    for (const auto& f : dc.frames) CHECK(f[0].x == 0.0);

    std::vector<double> ramp(100);
    for (int i = 0; i < 100; ++i) ramp[static_cast<std::size_t>(i)] = i;
    GaitSample dr = motion_extraction(channel_sample(ramp));
    REQUIRE(dr.frame_count() == 99);
    for (const auto& f : dr.frames) CHECK(f[0].x == 1.0);

    try {
      motion_extraction(channel_sample({1.0}));
      FAIL("expected TooFewFrames");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::too_few_frames);
    }
  }

  SECTION("cumulative sum of motion extraction reconstructs the sample") {
    Rng rng(104);
    GaitSample s = oracle::random_smooth_sample(rng, 25, 2);
    GaitSample diff = motion_extraction(s);
    GaitSample rebuilt = s;
    for (std::size_t t = 1; t < s.frame_count(); ++t)
      for (std::size_t j = 0; j < s.marker_count(); ++j)
        for (int a = 0; a < 3; ++a)
          rebuilt.frames[t][j].axis(a) =
              rebuilt.frames[t - 1][j].axis(a) + diff.frames[t - 1][j].axis(a);
    for (std::size_t t = 0; t < s.frame_count(); ++t)
      for (std::size_t j = 0; j < s.marker_count(); ++j)
        for (int a = 0; a < 3; ++a)
          CHECK(rebuilt.frames[t][j].axis(a) ==
                Approx(s.frames[t][j].axis(a)).margin(1e-9));
  }
}

TEST_CASE("normalize pools statistics over the sequence") {
  Rng rng(105);
  GaitSample s = oracle::random_smooth_sample(rng, 40, 4);

  SECTION("all_axes: pooled per-axis mean 0, std 1") {
    GaitSample out = normalize(s, NormMode::all_axes);
    for (int a = 0; a < 3; ++a) {
      double sum = 0.0, sq = 0.0;
      double n = static_cast<double>(out.frame_count() * out.marker_count());
      for (const auto& f : out.frames)
        for (const auto& p : f) {
          sum += p.axis(a);
          sq += p.axis(a) * p.axis(a);
        }
      double mean = sum / n;
      double var = sq / n - mean * mean;
      CHECK(mean == Approx(0.0).margin(1e-9));
      CHECK(std::sqrt(var) == Approx(1.0).margin(1e-9));
    }
  }

  SECTION("applying all_axes twice equals applying once") {
    GaitSample once = normalize(s, NormMode::all_axes);
    GaitSample twice = normalize(once, NormMode::all_axes);
    for (std::size_t t = 0; t < s.frame_count(); ++t)
      for (std::size_t j = 0; j < s.marker_count(); ++j)
        for (int a = 0; a < 3; ++a)
          CHECK(twice.frames[t][j].axis(a) ==
                Approx(once.frames[t][j].axis(a)).margin(1e-9));
  }

  SECTION("y_axis mode leaves x and z bit-identical") {
    GaitSample out = normalize(s, NormMode::y_axis);
    for (std::size_t t = 0; t < s.frame_count(); ++t)
      for (std::size_t j = 0; j < s.marker_count(); ++j) {
        REQUIRE(out.frames[t][j].x == s.frames[t][j].x);
        REQUIRE(out.frames[t][j].z == s.frames[t][j].z);
        CHECK(out.frames[t][j].y != s.frames[t][j].y);
      }
  }

  SECTION("per_dimension: constant channels are centered to zero") {
    GaitSample c = channel_sample({5.0, 5.0, 5.0, 5.0});
    GaitSample out = normalize(c, NormMode::per_dimension);
    for (const auto& f : out.frames) CHECK(f[0].x == 0.0);
  }

  SECTION("all_axes is invariant to prior positive per-axis affine maps") {
    GaitSample scaled = s;
    for (auto& f : scaled.frames)
      for (auto& p : f) {
        p.x = 3.0 * p.x + 17.0;
        p.y = 0.5 * p.y - 4.0;
        p.z = 10.0 * p.z + 100.0;
      }
    GaitSample a = normalize(s, NormMode::all_axes);
    GaitSample b = normalize(scaled, NormMode::all_axes);
    for (std::size_t t = 0; t < s.frame_count(); ++t)
      for (std::size_t j = 0; j < s.marker_count(); ++j)
        for (int ax = 0; ax < 3; ++ax)
          CHECK(b.frames[t][j].axis(ax) == Approx(a.frames[t][j].axis(ax)).margin(1e-9));
  }
}

TEST_CASE("pipeline composition rules") {
  Dataset ds = synth::generate_dataset(2, 2, 6, 0.5);
  const GaitSample& s = ds.subjects[0].samples[0];

  SECTION("[identity] leaves the sample untouched") {
    Pipeline p = Pipeline::parse("identity");
    CHECK(samples_equal(apply_pipeline(s, p, ds.body_parts), s));
  }

  SECTION("[body-part keep legs, coarsen-macro 1000]: masked markers stay zero, legs quantized") {
    Pipeline p = Pipeline::parse("body-part part=legs mode=keep\ncoarsen-macro step=1000");
    GaitSample out = apply_pipeline(s, p, ds.body_parts);
    for (std::size_t j = 0; j < s.marker_count(); ++j)
      for (std::size_t t = 0; t < s.frame_count(); ++t)
        for (int a = 0; a < 3; ++a) {
          double v = out.frames[t][j].axis(a);
          if (ds.body_parts.group_of[j] != BodyPart::legs) {
            CHECK(v == 0.0);
          } else {
            CHECK(v / 1000.0 == std::floor(v / 1000.0));
          }
        }
  }

  SECTION("static-pose then motion-extraction -> InvalidComposition") {
    Pipeline p = Pipeline::parse("static-pose mode=average\nmotion-extraction");
    try {
      p.validate();
      FAIL("expected InvalidComposition");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::invalid_composition);
    }
  }

  SECTION("static-pose then normalize / coarsen is allowed") {
    CHECK_NOTHROW(Pipeline::parse("static-pose mode=average\nnormalize mode=all_axes").validate());
    CHECK_NOTHROW(Pipeline::parse("static-pose mode=first\ncoarsen-micro modulus=10").validate());
    GaitSample out = apply_pipeline(
        s, Pipeline::parse("static-pose mode=average\nnormalize mode=all_axes"), ds.body_parts);
    CHECK(out.frame_count() == 1);
  }

  SECTION("equalize at sample scope -> ScopeMismatch") {
    Pipeline p = Pipeline::parse("equalize-frequency");
    try {
      apply_pipeline(s, p, ds.body_parts);
      FAIL("expected ScopeMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::scope_mismatch);
    }
  }

  SECTION("frame-local operators are deterministic") {
    Pipeline p = Pipeline::parse("remove-trajectories method=rolling_average w=3\n"
                                 "coarsen-micro modulus=10\nnormalize mode=per_dimension");
    GaitSample a = apply_pipeline(s, p, ds.body_parts);
    GaitSample b = apply_pipeline(s, p, ds.body_parts);
    CHECK(samples_equal(a, b));
  }
}
