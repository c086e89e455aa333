// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers as arguments to run
// a subset, e.g. `selbench_acceptance 1 3 6`.
//
// Criteria 2, 4, 5 and 8 need MovieLens-100k at
// $SELBENCH_DATA_ROOT/ml-100k/u.data (tools/fetch_ml100k.sh).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "selbench/corpus/interactions.hpp"
#include "selbench/corpus/matrix.hpp"
#include "selbench/corpus/preprocess.hpp"
#include "selbench/pipeline/pipeline.hpp"
#include "selbench/recsys/factorization.hpp"
#include "selbench/recsys/model.hpp"
#include "selbench/stats/tests.hpp"
#include "selbench/strategy/evaluate.hpp"
#include "selbench/strategy/strategy.hpp"
#include "support.hpp"

namespace {

using namespace selbench;
using nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

fs::path data_root() {
  if (const char* env = std::getenv(pipeline::kDataRootEnv); env && *env) return env;
  return SELBENCH_DEFAULT_DATA_ROOT;
}

fs::path ml100k_path() {
  const auto p = data_root() / "ml-100k" / "u.data";
  if (!fs::exists(p)) {
    throw std::runtime_error("MovieLens-100k not found at " + p.string() +
                             " (run tools/fetch_ml100k.sh or set SELBENCH_DATA_ROOT)");
  }
  return p;
}

fs::path work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::current_path() / "acceptance-work";
    fs::remove_all(d);  // every run starts cold so runtimes are honest
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

// ---------------------------------------------------------------------------
// 1. Combinatorics
// ---------------------------------------------------------------------------

Outcome combinatorics() {
  const auto t0 = Clock::now();
  const auto all = strategy::enumerate_strategies(10, 5);
  bool ok = all.size() == 252;
  std::set<std::vector<std::uint8_t>> seen;
  for (std::size_t i = 0; ok && i < all.size(); ++i) {
    const auto& s = all[i];
    ok = s.id == i && s.indices.size() == 5 && std::is_sorted(s.indices.begin(), s.indices.end()) &&
         s.indices.back() < 10 && seen.insert(s.indices).second &&
         strategy::strategy_rank(s.indices, 10) == i && strategy::strategy_unrank(i, 10, 5) == s &&
         (i == 0 || std::lexicographical_compare(all[i - 1].indices.begin(), all[i - 1].indices.end(),
                                                 s.indices.begin(), s.indices.end()));
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 1.0, std::to_string(all.size()) + " strategies, ids bijective and lexicographic: " +
                                (ok ? "yes" : "no") + ", " + fmt(secs, 3) + " s (limit 1 s)"};
}

// ---------------------------------------------------------------------------
// 2. Preprocessing reproduction
// ---------------------------------------------------------------------------

Outcome preprocessing() {
  const auto path = ml100k_path();
  const auto t0 = Clock::now();
  const auto loaded = corpus::load_interactions(path, corpus::ColumnSchema::movielens_100k());
  corpus::BinarizeOptions opts;  // 0.6 of max, inclusive
  const auto kept = corpus::binarize(loaded.records, opts);
  const auto core = corpus::k_core(kept, 5);
  const auto stats = corpus::compute_stats(corpus::InteractionMatrix::from_records(core.records));
  const double secs = seconds_since(t0);
  const bool counts = stats.users == 943 && stats.items == 1203 && stats.interactions == 81697;
  return {counts && secs < 10.0,
          std::to_string(stats.users) + " users, " + std::to_string(stats.items) + " items, " +
              std::to_string(stats.interactions) + " interactions (want 943/1203/81697), " +
              fmt(secs, 3) + " s (limit 10 s)"};
}

// ---------------------------------------------------------------------------
// 3. Metric parity
// ---------------------------------------------------------------------------

// Conventional nDCG@n of one ranked list, written out directly.
double conventional_ndcg(std::span<const ItemIndex> top, std::span<const ItemIndex> relevant,
                         std::size_t n) {
  double dcg = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(relevant.begin(), relevant.end(), top[i]) != relevant.end()) {
      dcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
    }
  }
  double idcg = 0.0;
  for (std::size_t i = 0; i < std::min(n, relevant.size()); ++i) {
    idcg += 1.0 / std::log2(static_cast<double>(i) + 2.0);
  }
  return dcg / idcg;
}

// Ideal DCG by exhaustive search over hit patterns of length n with at most
// `n_relevant` hits.
long double brute_force_idcg(std::size_t n, std::size_t n_relevant) {
  long double best = 0.0L;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > n_relevant) continue;
    long double dcg = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) dcg += 1.0L / std::log2(static_cast<long double>(i) + 2.0L);
    }
    best = std::max(best, dcg);
  }
  return best;
}

Outcome metric_parity() {
  constexpr std::size_t K = 10, n = 5;
  const auto strategies = strategy::enumerate_strategies(K, n);
  std::vector<long double> ideal(64);
  for (std::size_t r = 1; r < ideal.size(); ++r) ideal[r] = brute_force_idcg(n, r);

  Rng rng(20240601, "acceptance-metric");
  std::size_t bit_equal = 0, instances = 0;
  double worst = 0.0;
  for (int inst = 0; instances < 1000; ++inst) {
    const std::size_t users = 1 + rng.below(30);
    const std::size_t items = 25 + rng.below(30);
    const auto train = testing::random_matrix(rng, users, items, 0.15, 0);
    // held-out items outside train; some users get none
    std::vector<std::vector<ItemIndex>> held(users);
    for (UserIndex u = 0; u < users; ++u) {
      for (ItemIndex i = 0; i < items; ++i) {
        if (!train.contains(u, i) && rng.uniform01() < 0.15) held[u].push_back(i);
      }
      if (rng.uniform01() < 0.1) held[u].clear();
    }
    const auto relevance = corpus::InteractionMatrix::from_rows(train.shared_maps(), held);
    const auto algorithm = inst % 2 ? recsys::Algorithm::random : recsys::Algorithm::item_knn;
    const auto model = recsys::fit(train, {algorithm, {{"neighbors", std::int64_t{5}}}, rng.next()});
    const std::vector<const corpus::InteractionMatrix*> exclude{&train};
    const auto ctx = strategy::build_eval_context(model, relevance, exclude, K, n);
    if (ctx.users.empty()) continue;
    ++instances;
    const auto scores = strategy::score_strategies(ctx, strategies);

    // conventional nDCG@5 from an independent recommend() call per user
    double sum = 0.0;
    std::size_t counted = 0;
    for (UserIndex u = 0; u < users; ++u) {
      if (held[u].empty()) continue;
      const auto list = recsys::recommend(model, u, train.row(u), n);
      sum += conventional_ndcg(list.items, relevance.row(u), n);
      ++counted;
    }
    const double conventional = sum / static_cast<double>(counted);
    if (conventional == scores.ndcg[0] && counted == scores.users) ++bit_equal;

    // brute-force reference for every strategy
    for (const auto& s : strategies) {
      long double total = 0.0L;
      for (const auto& ue : ctx.users) {
        long double dcg = 0.0L;
        for (std::size_t pos = 0; pos < n; ++pos) {
          const auto item = ue.top_k[s.indices[pos]];
          if (std::find(ue.relevant.begin(), ue.relevant.end(), item) != ue.relevant.end()) {
            dcg += 1.0L / std::log2(static_cast<long double>(pos) + 2.0L);
          }
        }
        total += dcg / ideal[std::min<std::size_t>(ue.relevant.size(), ideal.size() - 1)];
      }
      const auto mean = static_cast<double>(total / static_cast<long double>(ctx.users.size()));
      worst = std::max(worst, std::abs(mean - scores.ndcg[s.id]));
    }
  }
  const bool pass = bit_equal == instances && worst <= 1e-12;
  return {pass, "strategy 0 bit-equal to conventional nDCG@5 on " + std::to_string(bit_equal) + "/" +
                    std::to_string(instances) + " instances; max deviation from brute force " +
                    fmt(worst, 3) + " (limit 1e-12)"};
}

// ---------------------------------------------------------------------------
// 4 and 5. Study shape and generalization on ML-100k
// ---------------------------------------------------------------------------

json study_config(std::uint64_t seed, const fs::path& out) {
  return {{"seed", seed},
          {"K", 10},
          {"n", 5},
          {"repetitions", 1},
          {"trial_budget", 10},
          {"data_root", data_root().string()},
          {"output_dir", out.string()},
          {"datasets",
           {{{"name", "ml-100k"}, {"path", "ml-100k/u.data"}, {"format", "movielens-100k"},
             {"feedback", "explicit"}, {"rating_scale", {1, 5}}, {"threshold_fraction", 0.6},
             {"inclusive", true}, {"k_core", 5}, {"domain", "movies"}}}},
          {"algorithms",
           {{{"name", "item_knn_cosine"}, {"algorithm", "item_knn"}, {"weighting", "none"}},
            {{"name", "als"}, {"algorithm", "als"}},
            {{"name", "random"}, {"algorithm", "random"}}}}};
}

struct StudyRun {
  double seconds = 0.0;
  bool ok = false;
  std::map<std::string, strategy::StrategyScoreTable> tables;  // by algorithm
};

const StudyRun& study(std::uint64_t seed) {
  static std::map<std::uint64_t, StudyRun> runs;
  if (auto it = runs.find(seed); it != runs.end()) return it->second;
  ml100k_path();
  StudyRun run;
  const auto t0 = Clock::now();
  pipeline::Pipeline p(pipeline::config_from_json(study_config(seed, work_dir() / ("study-seed" + std::to_string(seed)))),
                       {});
  p.run_all();
  run.seconds = seconds_since(t0);
  run.ok = p.ok();
  for (auto& t : p.load_report_inputs().tables) run.tables[t.key.algorithm] = t;
  return runs[seed] = std::move(run);
}

Outcome study_shape() {
  const auto& run = study(1);
  if (!run.ok) return {false, "pipeline reported failed jobs"};
  bool pass = run.seconds < 30.0 * 60.0;
  std::string detail;
  for (const char* algo : {"item_knn_cosine", "als"}) {
    const auto& table = run.tables.at(algo);
    const auto position = strategy::strategy_position(table, 0, strategy::Split::test);
    const auto rb = strategy::relative_best(table, strategy::Split::test);
    const bool top_decile = position <= 25;  // top 10% of 252
    const bool ratio_ok = rb.ratio && *rb.ratio >= 0.99 && *rb.ratio <= 1.015;
    pass = pass && top_decile && ratio_ok;
    detail += std::string(algo) + ": top-n rank " + std::to_string(position) + "/252 (need <= 25), ratio " +
              (rb.ratio ? fmt(*rb.ratio, 6) : "undefined") + " (need [0.99, 1.015]); ";
  }
  return {pass, detail + "runtime " + fmt(run.seconds, 4) + " s (limit 1800 s)"};
}

double table_pearson(const strategy::StrategyScoreTable& t) {
  std::vector<double> val, test;
  for (const auto& r : t.rows) {
    val.push_back(r.ndcg_val);
    test.push_back(r.ndcg_test);
  }
  const auto r = stats::pearson(val, test);
  if (!r.pearson_r) throw std::runtime_error("correlation undefined for " + t.key.algorithm);
  return *r.pearson_r;
}

Outcome generalization() {
  // seeds fixed in advance; "over 3 seeds" is read as the mean r over them
  const std::vector<std::uint64_t> seeds = {1, 2, 3};
  bool pass = true;
  std::string detail;
  for (const char* algo : {"item_knn_cosine", "als", "random"}) {
    double sum = 0.0;
    std::string per_seed;
    for (auto seed : seeds) {
      const auto& run = study(seed);
      if (!run.ok) return {false, "pipeline failed for seed " + std::to_string(seed)};
      const double r = table_pearson(run.tables.at(algo));
      sum += r;
      per_seed += (per_seed.empty() ? "" : ", ") + fmt(r, 4);
    }
    const double mean = sum / static_cast<double>(seeds.size());
    const bool trained = std::string(algo) != "random";
    const bool ok = trained ? mean > 0.9 : std::abs(mean) < 0.2;
    pass = pass && ok;
    detail += std::string(algo) + " mean r " + fmt(mean, 4) + " [" + per_seed + "] (need " +
              (trained ? "> 0.9" : "|r| < 0.2") + "); ";
  }
  return {pass, detail};
}

// ---------------------------------------------------------------------------
// 6. Statistics oracle
// ---------------------------------------------------------------------------

Outcome statistics_oracle() {
  const auto fixture = json::parse(read_text_file(SELBENCH_FIXTURE_DIR "/friedman_reference.json"));
  double worst = 0.0;
  std::size_t cases = 0;
  for (const auto& c : fixture.at("cases")) {
    const auto& rows = c.at("scores");
    Eigen::MatrixXd m(rows.size(), rows[0].size());
    for (std::size_t b = 0; b < rows.size(); ++b) {
      for (std::size_t j = 0; j < rows[b].size(); ++j) m(b, j) = rows[b][j].get<double>();
    }
    worst = std::max(worst, std::abs(stats::friedman(m).statistic - c.at("statistic").get<double>()));
    ++cases;
  }
  // Demsar (2006), Table 5(a), alpha = 0.05
  const double published[] = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
  double worst_q = 0.0;
  for (std::size_t k = 2; k <= 10; ++k) {
    worst_q = std::max(worst_q, std::abs(stats::nemenyi_cd(k, 10, 0.05).q_alpha - published[k - 2]));
  }
  const bool pass = cases == 20 && worst <= 1e-9 && worst_q <= 5e-3;
  return {pass, "Friedman vs scipy on " + std::to_string(cases) + " matrices: max |diff| " + fmt(worst, 3) +
                    " (limit 1e-9); q_alpha k=2..10 max |diff| vs table " + fmt(worst_q, 3) +
                    " (limit 5e-3), k=2 -> " + fmt(stats::nemenyi_cd(2, 10, 0.05).q_alpha, 6)};
}

// ---------------------------------------------------------------------------
// 7. Numerical health
// ---------------------------------------------------------------------------

Outcome numerical_health() {
  Rng rng(7, "acceptance-numerics");
  std::size_t monotone = 0;
  double worst_increase = 0.0;
  for (int inst = 0; inst < 50; ++inst) {
    const auto m = testing::random_matrix(rng, 30, 30, rng.uniform(0.05, 0.3), 1);
    const double alpha = rng.uniform(1.0, 100.0);
    const double reg = std::exp(rng.uniform(std::log(1e-3), 0.0));
    const std::size_t f = 2 + rng.below(9);
    auto model = recsys::initialize_factors(30, 30, f, rng.next());
    const auto items = m.pattern().transposed();
    double prev = recsys::als_objective(m.pattern(), model, alpha, reg);
    bool ok = true;
    for (int sweep = 0; sweep < 10; ++sweep) {
      recsys::als_half_sweep(m.pattern(), model.item_factors, model.user_factors, alpha, reg, 1);
      recsys::als_half_sweep(items, model.user_factors, model.item_factors, alpha, reg, 1);
      const double next = recsys::als_objective(m.pattern(), model, alpha, reg);
      if (next > prev) {
        ok = false;
        worst_increase = std::max(worst_increase, (next - prev) / prev);
      }
      prev = next;
    }
    monotone += ok ? 1 : 0;
  }

  double worst_rel = 0.0;
  for (int point = 0; point < 100; ++point) {
    const auto f = static_cast<Eigen::Index>(1 + rng.below(32));
    auto draw = [&] {
      Eigen::VectorXd v(f);
      for (Eigen::Index k = 0; k < f; ++k) v(k) = rng.uniform(-1.0, 1.0);
      return v;
    };
    const Eigen::VectorXd u = draw(), p = draw(), n = draw();
    const double reg = rng.uniform(0.0, 0.1);
    const auto g = recsys::bpr_triple_gradient(u, p, n, reg);
    Eigen::VectorXd analytic(3 * f), numeric(3 * f);
    analytic << g.user, g.positive, g.negative;
    const double h = 1e-5;
    for (Eigen::Index k = 0; k < 3 * f; ++k) {
      Eigen::VectorXd up = u, pp = p, np = n, um = u, pm = p, nm = n;
      auto& plus = k < f ? up : (k < 2 * f ? pp : np);
      auto& minus = k < f ? um : (k < 2 * f ? pm : nm);
      plus(k % f) += h;
      minus(k % f) -= h;
      numeric(k) = (recsys::bpr_triple_loss(up, pp, np, reg) - recsys::bpr_triple_loss(um, pm, nm, reg)) / (2 * h);
    }
    const double scale = std::max(analytic.norm(), numeric.norm());
    worst_rel = std::max(worst_rel, scale > 0 ? (analytic - numeric).norm() / scale : 0.0);
  }
  const bool pass = monotone == 50 && worst_rel < 1e-4;
  return {pass, "ALS objective non-increasing on " + std::to_string(monotone) + "/50 instances" +
                    (worst_increase > 0 ? " (worst relative increase " + fmt(worst_increase, 3) + ")" : "") +
                    "; BPR gradient max relative error " + fmt(worst_rel, 3) + " over 100 points (limit 1e-4)"};
}

// ---------------------------------------------------------------------------
// 8. Determinism across worker counts
// ---------------------------------------------------------------------------

Outcome determinism() {
  ml100k_path();
  auto config_for = [&](const fs::path& out) {
    auto j = study_config(5, out);
    j["trial_budget"] = 2;
    j["algorithms"][1]["space"] = {{"factors", {{"int", {16, 32}}}}, {"iterations", {{"int", {10, 12}}}}};
    return pipeline::config_from_json(j);
  };
  const auto dir1 = work_dir() / "threads-1";
  const auto dir8 = work_dir() / "threads-8";
  pipeline::Pipeline one(config_for(dir1), {1});
  one.run_all();
  pipeline::Pipeline eight(config_for(dir8), {8});
  eight.run_all();
  if (!one.ok() || !eight.ok()) return {false, "pipeline reported failed jobs"};

  std::size_t compared = 0;
  std::vector<std::string> differing;
  for (const auto& entry : fs::recursive_directory_iterator(dir1)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), dir1);
    const auto name = rel.filename().string();
    if (name == "trials.csv" || name == ".key") continue;  // trials.csv logs wall-clock seconds
    std::string a = read_text_file(entry.path());
    std::string b = fs::exists(dir8 / rel) ? read_text_file(dir8 / rel) : std::string("<missing>");
    if (rel == "manifest.json") {
      a = pipeline::deterministic_manifest(json::parse(a)).dump();
      b = pipeline::deterministic_manifest(json::parse(b)).dump();
    }
    ++compared;
    if (a != b) differing.push_back(rel.string());
  }
  std::string detail = std::to_string(compared) + " artifacts compared (score tables, best configs, stats, reports, manifest without timestamps)";
  if (!differing.empty()) detail += "; differing: " + differing.front();
  return {differing.empty() && compared > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"combinatorics", combinatorics},
      {"preprocessing reproduction", preprocessing},
      {"metric parity", metric_parity},
      {"study shape on ML-100k", study_shape},
      {"generalization correlation", generalization},
      {"statistics oracle", statistics_oracle},
      {"numerical health", numerical_health},
      {"determinism across worker counts", determinism}};

  std::set<int> selected;
  for (int a = 1; a < argc; ++a) selected.insert(std::atoi(argv[a]));

  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const int id = static_cast<int>(c) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[c].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  [" << id << "] " << criteria[c].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (failures ? "FAILED " : "ALL PASSED ") << "(" << failures << " failing)" << std::endl;
  return failures ? 1 : 0;
}
