#include "ctr/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ctr/error.hpp"
#include "ctr/rng.hpp"

namespace ctr {

namespace {

struct Box {
  Vec2 lo, hi;
  bool separated(const Box& o, double gap) const {
    return lo.x > o.hi.x + gap || o.lo.x > hi.x + gap || lo.y > o.hi.y + gap ||
           o.lo.y > hi.y + gap;
  }
};

}  // namespace

std::vector<CorpusImage> build_corpus(const CorpusConfig& config) {
  std::vector<CorpusImage> out;
  out.reserve(config.images);
  const double margin = 8.0;
  const double gap = 14.0;

  for (int img = 0; img < config.images; ++img) {
    Rng rng(Rng::mix(config.seed, std::uint64_t(img) + 1));
    CorpusImage image;
    image.width = config.width;
    image.height = config.height;

    const int want =
        config.min_instances + int(rng.below(std::uint64_t(config.max_instances -
                                                           config.min_instances + 1)));
    std::vector<Box> placed;
    for (int k = 0; k < want; ++k) {
      bool done = false;
      for (int attempt = 0; attempt < 40 && !done; ++attempt) {
        RibbonParams rp;
        rp.height = rng.uniform(config.min_height, config.max_height);
        const double aspect = rng.uniform(config.min_aspect, config.max_aspect);
        rp.width = rp.height * aspect;
        rp.curvature = rng.uniform(0.0, config.max_curvature);
        rp.curvature = std::min(rp.curvature, config.curvature_aspect_cap * aspect);
        rp.boundary_points = config.boundary_points;
        rp.seed = rng.next();
        Polygon ribbon;
        try {
          ribbon = generate_ribbon(rp);
        } catch (const Error&) {
          continue;
        }
        const double angle = config.rotate ? rng.uniform(0.0, 2.0 * std::numbers::pi) : 0.0;
        Polygon spun = transform_polygon(ribbon, angle, {0.0, 0.0});
        const Vec2 lo = spun.bbox_min();
        const Vec2 hi = spun.bbox_max();
        const Vec2 size = hi - lo;
        if (size.x > config.width - 2.0 * margin || size.y > config.height - 2.0 * margin)
          continue;
        const double tx = rng.uniform(margin - lo.x, config.width - margin - size.x - lo.x);
        const double ty = rng.uniform(margin - lo.y, config.height - margin - size.y - lo.y);
        Polygon placed_poly = transform_polygon(spun, 0.0, {tx, ty});
        Box box{placed_poly.bbox_min(), placed_poly.bbox_max()};
        bool clear = true;
        for (const Box& other : placed)
          if (!box.separated(other, gap)) { clear = false; break; }
        if (!clear) continue;
        placed.push_back(box);
        image.instances.push_back(std::move(placed_poly));
        done = true;
      }
    }
    out.push_back(std::move(image));
  }
  return out;
}

}  // namespace ctr
