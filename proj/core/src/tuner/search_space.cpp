#include "selbench/tuner/search_space.hpp"

#include <cmath>

namespace selbench::tuner {

using recsys::Algorithm;

void SearchSpace::validate() const {
  for (const auto& [name, dist] : dimensions) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Fixed>) {
            return;
          } else {
            if constexpr (!std::is_same_v<T, IntRange>) {
              if (!std::isfinite(d.low) || !std::isfinite(d.high)) {
                throw ConfigError("search space '" + name + "': bounds must be finite");
              }
            }
            if (!(d.low < d.high)) {
              throw ConfigError("search space '" + name + "': low must be < high");
            }
            if constexpr (std::is_same_v<T, LogRealRange>) {
              if (!(d.low > 0)) throw ConfigError("search space '" + name + "': log range needs low > 0");
            }
          }
        },
        dist);
  }
}

bool SearchSpace::tunable() const {
  for (const auto& [_, dist] : dimensions) {
    if (!std::holds_alternative<Fixed>(dist)) return true;
  }
  return false;
}

void SearchSpace::set(const std::string& name, Distribution d) {
  for (auto& [n, existing] : dimensions) {
    if (n == name) {
      existing = std::move(d);
      return;
    }
  }
  dimensions.emplace_back(name, std::move(d));
}

SearchSpace SearchSpace::defaults(Algorithm algorithm, recsys::Weighting weighting) {
  SearchSpace s;
  s.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::als:
      s.set("factors", IntRange{16, 129});
      s.set("regularization", LogRealRange{1e-3, 1.0});
      s.set("confidence_alpha", RealRange{1.0, 100.0});
      s.set("iterations", IntRange{10, 31});
      break;
    case Algorithm::bpr:
      s.set("factors", IntRange{16, 129});
      s.set("learning_rate", LogRealRange{1e-4, 0.1});
      s.set("regularization", LogRealRange{1e-4, 0.1});
      s.set("epochs", IntRange{10, 101});
      break;
    case Algorithm::item_knn:
    case Algorithm::user_knn:
      s.set("weighting", Fixed{std::string(recsys::to_string(weighting))});
      s.set("neighbors", IntRange{5, 101});
      if (weighting == recsys::Weighting::bm25) {
        s.set("bm25_k1", RealRange{0.5, 3.0});
        s.set("bm25_b", RealRange{0.0, 1.0});
      }
      break;
    case Algorithm::popularity:
    case Algorithm::random:
      break;
  }
  return s;
}

nlohmann::json space_to_json(const SearchSpace& space) {
  auto dims = nlohmann::json::object();
  for (const auto& [name, dist] : space.dimensions) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, IntRange>) {
            dims[name] = {{"int", {d.low, d.high - 1}}};
          } else if constexpr (std::is_same_v<T, RealRange>) {
            dims[name] = {{"real", {d.low, d.high}}};
          } else if constexpr (std::is_same_v<T, LogRealRange>) {
            dims[name] = {{"log", {d.low, d.high}}};
          } else {
            std::visit([&](const auto& v) { dims[name] = v; }, d.value);
          }
        },
        dist);
  }
  return {{"algorithm", std::string(recsys::to_string(space.algorithm))}, {"dimensions", dims}};
}

SearchSpace space_from_json(const nlohmann::json& j, SearchSpace base) {
  // accept both the bare dimension map and the wrapped form space_to_json writes
  const auto& dims = j.contains("dimensions") && j["dimensions"].is_object() ? j["dimensions"] : j;
  for (const auto& [name, spec] : dims.items()) {
    if (spec.is_object()) {
      if (spec.contains("int")) {
        const auto lo = spec["int"].at(0).get<std::int64_t>();
        const auto hi = spec["int"].at(1).get<std::int64_t>();
        base.set(name, IntRange{lo, hi + 1});
      } else if (spec.contains("real")) {
        base.set(name, RealRange{spec["real"].at(0).get<double>(), spec["real"].at(1).get<double>()});
      } else if (spec.contains("log")) {
        base.set(name, LogRealRange{spec["log"].at(0).get<double>(), spec["log"].at(1).get<double>()});
      } else {
        throw ConfigError("search space '" + name + "': expected int, real or log");
      }
    } else {
      recsys::Hyperparameters one = recsys::params_from_json(nlohmann::json{{name, spec}});
      base.set(name, Fixed{one.at(name)});
    }
  }
  base.validate();
  return base;
}

recsys::RecommenderConfig sample_config(const SearchSpace& space, Rng& rng) {
  recsys::RecommenderConfig config;
  config.algorithm = space.algorithm;
  for (const auto& [name, dist] : space.dimensions) {
    config.params[name] = std::visit(
        [&](const auto& d) -> recsys::ParamValue {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, IntRange>) {
            const auto width = static_cast<std::uint64_t>(d.high - d.low);
            return d.low + static_cast<std::int64_t>(rng.below(width));
          } else if constexpr (std::is_same_v<T, RealRange>) {
            return rng.uniform(d.low, d.high);
          } else if constexpr (std::is_same_v<T, LogRealRange>) {
            return std::exp(rng.uniform(std::log(d.low), std::log(d.high)));
          } else {
            return d.value;
          }
        },
        dist);
  }
  return config;
}

}  // namespace selbench::tuner
