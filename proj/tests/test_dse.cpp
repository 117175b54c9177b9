#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "modex/dse.hpp"
#include "modex/error.hpp"
#include "modex/media_io.hpp"
#include "test_support.hpp"

using namespace modex;

namespace {

std::vector<std::vector<double>> pad4(std::vector<std::vector<double>> rows) {
  for (auto& row : rows) row.resize(4, 0.0);
  return rows;
}

ObjectiveVector make_obj(double rate, double psnr, double effort, double energy) {
  return ObjectiveVector{rate, psnr, effort, energy};
}

}  // namespace

TEST_CASE("dominates") {
  CHECK(dominates({1, 1, 1, 1}, {2, 2, 2, 2}));
  CHECK(!dominates({2, 2, 2, 2}, {1, 1, 1, 1}));
  CHECK(!dominates({1, 2, 1, 1}, {2, 1, 1, 1}));
  CHECK(!dominates({2, 1, 1, 1}, {1, 2, 1, 1}));
  CHECK(!dominates({1, 1, 1, 1}, {1, 1, 1, 1}));
  CHECK(dominates({1, 1, 1, 0.5}, {1, 1, 1, 1}));
}

TEST_CASE("nondominated_sort") {
  SUBCASE("hand-checked two-objective example") {
    const auto fronts = nondominated_sort(pad4({{1, 2}, {2, 1}, {3, 3}}));
    REQUIRE(fronts.size() == 2);
    CHECK(fronts[0] == std::vector<size_t>{0, 1});
    CHECK(fronts[1] == std::vector<size_t>{2});
  }

  SUBCASE("identical objectives land in a single front") {
    const auto fronts = nondominated_sort(pad4({{1, 1}, {1, 1}, {1, 1}}));
    REQUIRE(fronts.size() == 1);
    CHECK(fronts[0].size() == 3);
  }

  SUBCASE("matches the peeling oracle on random populations") {
    Rng rng(404);
    for (int trial = 0; trial < 50; ++trial) {
      const size_t n = 2 + rng.next_below(60);
      std::vector<std::vector<double>> objs(n, std::vector<double>(4));
      for (auto& row : objs) {
        for (double& v : row) {
          // Small grids force plenty of ties and duplicates.
          v = static_cast<double>(rng.next_below(trial % 2 ? 5 : 1000));
        }
      }
      const auto fronts = nondominated_sort(objs);
      const auto oracle = test::peel_fronts(objs);
      REQUIRE(fronts.size() == oracle.size());
      for (size_t f = 0; f < fronts.size(); ++f) {
        CHECK(std::set<size_t>(fronts[f].begin(), fronts[f].end()) ==
              std::set<size_t>(oracle[f].begin(), oracle[f].end()));
      }
    }
  }
}

TEST_CASE("crowding_distance") {
  constexpr double kInf = std::numeric_limits<double>::infinity();

  SUBCASE("fronts of one or two are all infinite") {
    CHECK(crowding_distance(pad4({{1, 2}})) == std::vector<double>{kInf});
    CHECK(crowding_distance(pad4({{1, 2}, {2, 1}})) ==
          std::vector<double>{kInf, kInf});
  }

  SUBCASE("three equally spaced points on one objective: middle gets 1.0") {
    const auto d = crowding_distance(pad4({{0.0}, {0.5}, {1.0}}));
    CHECK(d[0] == kInf);
    CHECK(d[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d[2] == kInf);
  }

  SUBCASE("identical values: boundary infinities, zero elsewhere") {
    const auto d = crowding_distance(pad4({{3, 3}, {3, 3}, {3, 3}, {3, 3}}));
    CHECK(d[0] == kInf);
    CHECK(d[3] == kInf);
    CHECK(d[1] == 0.0);
    CHECK(d[2] == 0.0);
  }
}

TEST_CASE("hypervolume") {
  SUBCASE("hand cases") {
    CHECK(hypervolume({}, {1, 1}) == 0.0);
    CHECK(hypervolume({{0, 0}}, {1, 1}) == 1.0);
    CHECK(hypervolume({{1, 2}, {2, 1}}, {3, 3}) == doctest::Approx(3.0));
    CHECK(hypervolume({{0, 0, 0}}, {1, 1, 1}) == doctest::Approx(1.0));
    // A dominated point adds nothing.
    CHECK(hypervolume({{1, 1}, {2, 2}}, {3, 3}) == doctest::Approx(4.0));
    // Points beyond the reference contribute nothing.
    CHECK(hypervolume({{4, 4}}, {3, 3}) == 0.0);
  }

  SUBCASE("matches the grid oracle on random 4-D instances") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
      const size_t n = 1 + rng.next_below(6);
      std::vector<std::vector<double>> points(n, std::vector<double>(4));
      for (auto& p : points) {
        for (double& v : p) v = static_cast<double>(rng.next_below(10));
      }
      const std::vector<double> reference(4, 9.0);
      CHECK(hypervolume(points, reference) ==
            doctest::Approx(test::grid_hypervolume(points, reference))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("pareto archive") {
  auto entry = [](double rate, double psnr, double effort, double energy) {
    return ArchiveEntry{exhaustive_genotype(), "g", make_obj(rate, psnr, effort, energy)};
  };

  SUBCASE("rejects dominated and duplicate entries, drops dominated holders") {
    ParetoArchive archive;
    CHECK(archive.insert(entry(10, 40, 100, 50)));
    CHECK(!archive.insert(entry(10, 40, 100, 50)));    // duplicate objectives
    CHECK(!archive.insert(entry(11, 40, 100, 50)));    // dominated
    CHECK(archive.insert(entry(9, 39, 100, 50)));      // incomparable
    CHECK(archive.insert(entry(9.5, 40.5, 100, 50)));  // dominates the first only
    CHECK(archive.size() == 2);
    // Mutual nondominance after every update.
    const auto objs = archive.objective_matrix();
    for (size_t i = 0; i < objs.size(); ++i) {
      for (size_t j = 0; j < objs.size(); ++j) {
        if (i != j) CHECK(!dominates(objs[i], objs[j]));
      }
    }
  }

  SUBCASE("capacity bound evicts the least crowded entry") {
    ParetoArchive archive(std::optional<size_t>{3});
    CHECK(archive.insert(entry(1, 50, 9, 9)));
    CHECK(archive.insert(entry(2, 51, 8, 9)));
    CHECK(archive.insert(entry(3, 52, 7, 9)));
    CHECK(archive.insert(entry(4, 53, 6, 9)));
    CHECK(archive.size() == 3);
  }
}

TEST_CASE("order_crossover") {
  Rng rng(12);

  SUBCASE("identical parents reproduce themselves") {
    const Genotype g = parse_genotype(test::kGenotypePb);
    for (int d = 0; d <= kMaxDepth; ++d) {
      auto [c1, c2] = order_crossover(g.at(d), g.at(d), rng);
      CHECK(c1 == g.at(d));
      CHECK(c2 == g.at(d));
    }
  }

  SUBCASE("children are always valid permutations with valid guards") {
    for (int trial = 0; trial < 100; ++trial) {
      const Genotype a = random_genotype(rng);
      const Genotype b = random_genotype(rng);
      for (int d = 0; d <= kMaxDepth; ++d) {
        auto [c1, c2] = order_crossover(a.at(d), b.at(d), rng);
        Genotype check_a = a;
        check_a.at(d) = c1;
        CHECK(validate_genotype(check_a).empty());
        Genotype check_b = b;
        check_b.at(d) = c2;
        CHECK(validate_genotype(check_b).empty());
      }
    }
  }

  SUBCASE("depth mismatch is rejected") {
    const Genotype g = exhaustive_genotype();
    CHECK_THROWS_AS(order_crossover(g.at(0), g.at(1), rng), DepthMismatchError);
  }

  SUBCASE("fixed seed reproduces children") {
    const Genotype a = random_genotype(rng);
    const Genotype b = random_genotype(rng);
    Rng r1(99), r2(99);
    const auto c1 = order_crossover(a.at(0), b.at(0), r1);
    const auto c2 = order_crossover(a.at(0), b.at(0), r2);
    CHECK(c1.first == c2.first);
    CHECK(c1.second == c2.second);
  }
}

TEST_CASE("mutate") {
  DseConfig config;
  Rng rng(8);

  SUBCASE("zero probabilities are the identity") {
    config.order_swap_prob = 0.0;
    config.guard_point_prob = 0.0;
    const Genotype g = random_genotype(rng);
    CHECK(mutate(g, rng, config) == g);
  }

  SUBCASE("outputs always validate; first two guards never change") {
    config.order_swap_prob = 0.9;
    config.guard_point_prob = 0.9;
    for (int trial = 0; trial < 200; ++trial) {
      const Genotype g = random_genotype(rng);
      const Genotype m = mutate(g, rng, config);
      CHECK(validate_genotype(m).empty());
      for (int d = 0; d <= kMaxDepth; ++d) {
        CHECK(m.at(d).guards[0].always);
        CHECK(m.at(d).guards[1].always);
      }
    }
  }
}

TEST_CASE("run_dse") {
  // A tiny but real campaign setup.
  const std::vector<Sequence> training = {
      synthesize_sequence(SynthKind::kMovingBlock, 64, 64, 2, 5)};
  const EnergyTable table = EnergyTable::built_in_default();
  DseConfig config;
  config.population_size = 8;
  config.generations = 3;
  config.qp = 30;
  config.seed = 7;
  config.threads = 1;
  config.codec.search_window = 2;

  SUBCASE("zero generations: archive is the nondominated subset of the initial population") {
    DseConfig zero = config;
    zero.generations = 0;
    const DseResult result = run_dse(zero, training, table);
    CHECK(result.evaluations <= 8);
    CHECK(result.generations_run == 0);
    CHECK(!result.archive.empty());
    // Every archive point is nondominated within the final population set.
    const auto objs = result.archive.objective_matrix();
    for (size_t i = 0; i < objs.size(); ++i) {
      for (size_t j = 0; j < objs.size(); ++j) {
        if (i != j) CHECK(!dominates(objs[i], objs[j]));
      }
    }
  }

  SUBCASE("same seed twice gives identical archives") {
    const DseResult a = run_dse(config, training, table);
    const DseResult b = run_dse(config, training, table);
    REQUIRE(a.archive.size() == b.archive.size());
    for (size_t i = 0; i < a.archive.size(); ++i) {
      CHECK(a.archive.entries()[i].genotype_text == b.archive.entries()[i].genotype_text);
      CHECK(a.archive.entries()[i].objectives == b.archive.entries()[i].objectives);
    }
  }

  SUBCASE("parallel evaluation changes nothing") {
    DseConfig parallel = config;
    parallel.threads = 3;
    const DseResult a = run_dse(config, training, table);
    const DseResult b = run_dse(parallel, training, table);
    REQUIRE(a.archive.size() == b.archive.size());
    for (size_t i = 0; i < a.archive.size(); ++i) {
      CHECK(a.archive.entries()[i].genotype_text == b.archive.entries()[i].genotype_text);
      CHECK(a.archive.entries()[i].objectives == b.archive.entries()[i].objectives);
    }
  }

  SUBCASE("archive minima match the explored minima (exhaustive point seeded)") {
    std::vector<ObjectiveVector> explored;
    DseObserver observer = [&](const GenerationInfo& info) {
      for (const Individual& ind : info.population) {
        explored.push_back(*ind.objectives);
      }
    };
    const DseResult result = run_dse(config, training, table, observer);
    double explored_min_rate = explored[0].rate_bits;
    double explored_max_psnr = explored[0].psnr;
    for (const ObjectiveVector& o : explored) {
      explored_min_rate = std::min(explored_min_rate, o.rate_bits);
      explored_max_psnr = std::max(explored_max_psnr, o.psnr);
    }
    double archive_min_rate = result.archive.entries()[0].objectives.rate_bits;
    double archive_max_psnr = result.archive.entries()[0].objectives.psnr;
    for (const ArchiveEntry& e : result.archive.entries()) {
      archive_min_rate = std::min(archive_min_rate, e.objectives.rate_bits);
      archive_max_psnr = std::max(archive_max_psnr, e.objectives.psnr);
    }
    CHECK(archive_min_rate <= explored_min_rate);
    CHECK(archive_max_psnr >= explored_max_psnr);
  }

  SUBCASE("archive stays mutually nondominated after every generation") {
    DseObserver observer = [&](const GenerationInfo& info) {
      const auto objs = info.archive.objective_matrix();
      for (size_t i = 0; i < objs.size(); ++i) {
        for (size_t j = 0; j < objs.size(); ++j) {
          if (i != j) CHECK(!dominates(objs[i], objs[j]));
        }
      }
    };
    run_dse(config, training, table, observer);
  }

  SUBCASE("configuration errors") {
    DseConfig bad = config;
    bad.population_size = 3;
    CHECK_THROWS_AS(run_dse(bad, training, table), ConfigError);
    CHECK_THROWS_AS(run_dse(config, {}, table), ConfigError);
  }
}

TEST_CASE("combine_across_qps") {
  auto archive_with = [](std::vector<ObjectiveVector> objs) {
    ParetoArchive archive;
    Rng rng(3);
    for (const ObjectiveVector& o : objs) {
      const Genotype g = random_genotype(rng);
      archive.insert(ArchiveEntry{g, serialize_genotype_line(g), o});
    }
    return archive;
  };

  SUBCASE("pure-rate anchor picks the minimum-rate point per qp") {
    std::map<int, ParetoArchive> archives;
    for (int qp : {10, 20, 30, 40}) {
      archives.emplace(qp, archive_with({make_obj(100 + qp, 50, 10, 5),
                                         make_obj(50 + qp, 45, 20, 6),
                                         make_obj(200 + qp, 55, 5, 4)}));
    }
    const SelectionAnchor rate_only{1.0, 0.0, 0.0, 0.0};
    const CombinedSolution combined = combine_across_qps(archives, rate_only);
    REQUIRE(combined.per_qp.size() == 4);
    for (int qp : {10, 20, 30, 40}) {
      const ParetoArchive& archive = archives.at(qp);
      double min_rate = archive.entries()[0].objectives.rate_bits;
      std::string expected = archive.entries()[0].genotype_text;
      for (const ArchiveEntry& e : archive.entries()) {
        if (e.objectives.rate_bits < min_rate) {
          min_rate = e.objectives.rate_bits;
          expected = e.genotype_text;
        }
      }
      CHECK(serialize_genotype_line(combined.per_qp.at(qp)) == expected);
    }
  }

  SUBCASE("singleton archives have only one possible combination") {
    std::map<int, ParetoArchive> archives;
    for (int qp : {10, 20, 30, 40}) {
      archives.emplace(qp, archive_with({make_obj(qp, 40, 1, 1)}));
    }
    const CombinedSolution a = combine_across_qps(archives, SelectionAnchor{});
    const CombinedSolution b = combine_across_qps(archives, SelectionAnchor{});
    CHECK(a == b);
    CHECK(a.per_qp.size() == 4);
  }

  SUBCASE("empty archive raises") {
    std::map<int, ParetoArchive> archives;
    archives.emplace(10, ParetoArchive{});
    CHECK_THROWS_AS(combine_across_qps(archives, SelectionAnchor{}), EmptyArchiveError);
  }
}

TEST_CASE("combined solution serialization round trip") {
  CombinedSolution combined;
  combined.per_qp[10] = parse_genotype(test::kGenotypePb);
  combined.per_qp[20] = parse_genotype(test::kGenotypePe);
  combined.per_qp[30] = exhaustive_genotype();
  combined.per_qp[40] = heuristic_genotype();
  const std::string text = serialize_combined(combined);
  CHECK(parse_combined(text) == combined);
  CHECK(serialize_combined(parse_combined(text)) == text);
  CHECK_THROWS_AS(parse_combined(""), ParseError);
  CHECK_THROWS_AS(parse_combined("O(0)={1}\n"), ParseError);
}
