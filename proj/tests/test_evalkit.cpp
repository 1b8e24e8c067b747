#include <doctest.h>

#include <vector>

#include "ctr/evalkit.hpp"
#include "ctr/geometry.hpp"

using namespace ctr;

namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
  const std::vector<Vec2> pts{{x0, y1}, {x1, y1}, {x1, y0}, {x0, y0}};
  return validate_polygon(pts, {0, 1, 2, 3});
}

}  // namespace

TEST_CASE("match_detections basics") {
  const std::vector<Polygon> gts{rect(0, 0, 10, 10)};

  SUBCASE("identical polygons match") {
    const std::vector<Polygon> preds{rect(0, 0, 10, 10)};
    const auto m = match_detections(preds, gts);
    REQUIRE(m.size() == 1);
    CHECK(m[0].iou == doctest::Approx(1.0));
  }
  SUBCASE("below-threshold IoU stays unmatched") {
    const std::vector<Polygon> preds{rect(0, 0, 4.9, 10)};  // IoU 0.49
    CHECK(match_detections(preds, gts, 0.5).empty());
  }
  SUBCASE("two predictions on one ground truth yield one match") {
    const std::vector<Polygon> preds{rect(0, 0, 10, 10), rect(1, 0, 10, 10)};
    const auto m = match_detections(preds, gts, 0.5);
    REQUIRE(m.size() == 1);
    CHECK(m[0].pred == 0);  // higher IoU wins
  }
}

TEST_CASE("prf conventions") {
  {
    const Prf r = prf(1, 1, 1);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
    CHECK(r.f_measure == 1.0);
  }
  {
    const Prf r = prf(1, 2, 1);
    CHECK(r.precision == doctest::Approx(0.5));
    CHECK(r.recall == doctest::Approx(1.0));
    CHECK(r.f_measure == doctest::Approx(2.0 / 3.0));
  }
  {
    const Prf r = prf(0, 0, 1);
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f_measure == 0.0);
  }
  {
    const Prf r = prf(0, 0, 0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
  }
}

TEST_CASE("evaluate aggregates over images") {
  const std::vector<std::vector<Polygon>> gts{{rect(0, 0, 10, 10), rect(20, 0, 30, 10)},
                                              {rect(0, 0, 8, 8)}};
  const std::vector<std::vector<Polygon>> preds{{rect(0, 0, 10, 10)},
                                                {rect(100, 100, 108, 108)}};
  const EvalReport report = evaluate(preds, gts, 0.5);
  CHECK(report.total_matches == 1);
  CHECK(report.total_preds == 2);
  CHECK(report.total_gts == 3);
  CHECK(report.overall.precision == doctest::Approx(0.5));
  CHECK(report.overall.recall == doctest::Approx(1.0 / 3.0));
}
