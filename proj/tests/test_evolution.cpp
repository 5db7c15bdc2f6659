#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

using namespace symreg;
using test_support::make_dataset;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Eigen::MatrixXd col(std::initializer_list<double> v)
{
    Eigen::MatrixXd m(Eigen::Index(v.size()), 1);
    Eigen::Index i = 0;
    for (double x : v)
        m(i++, 0) = x;
    return m;
}

Eigen::VectorXd vec(std::initializer_list<double> v)
{
    Eigen::VectorXd out(Eigen::Index(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        out[i++] = x;
    return out;
}

/// Synthetic individual for selection tests; `key` doubles as a unique
/// printed form so hall-of-fame deduplication can tell members apart.
Individual synth(double mse_val, int compl_val, double key)
{
    Individual i;
    i.expr = Expr::param(key);
    i.measures.mse = mse_val;
    i.measures.ms_processed_e = mse_val;
    i.complexity = compl_val;
    i.valid = true;
    return i;
}

/// Independent minimization dominance for the brute-force oracle.
bool oracle_dominates(const std::vector<double>& a, const std::vector<double>& b)
{
    bool strict = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] > b[k]) return false;
        if (a[k] < b[k]) strict = true;
    }
    return strict;
}

/// O(n^2 m) front peeling, written without reference to the library code.
std::vector<int> oracle_ranks(const std::vector<std::vector<double>>& pts)
{
    std::vector<int> rank(pts.size(), -1);
    std::size_t assigned = 0;
    for (int level = 0; assigned < pts.size(); ++level) {
        std::vector<std::size_t> now;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (rank[i] != -1) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < pts.size() && !dominated; ++j)
                dominated = j != i && rank[j] == -1 && oracle_dominates(pts[j], pts[i]);
            if (!dominated) now.push_back(i);
        }
        for (auto i : now)
            rank[i] = level;
        assigned += now.size();
    }
    return rank;
}

Options small_options()
{
    Options o;
    o.n_vars = 1;
    o.fit.max_iterations = 10;
    return o;
}

} // namespace

TEST_CASE("individual instantiation")
{
    Options o = small_options();

    SECTION("a constant expression collapses and fits the target mean")
    {
        auto d = make_dataset(col({1.0, 2.0, 3.0}), vec({1.0, 2.0, 6.0}));
        Rng rng = Rng::stream(30, {1});
        auto ind = instantiate_individual(parse("cos(0.7)"), d, o, 4, rng);
        REQUIRE(ind.has_value());
        REQUIRE(ind->complexity == 1);
        REQUIRE(ind->n_params == 1);
        auto slots = param_slots(ind->expr);
        REQUIRE_THAT(*slots[0], WithinAbs(3.0, 1e-6)); // mean of y
        REQUIRE_THAT(ind->measures.minus_r2, WithinAbs(0.0, 1e-9));
        REQUIRE(ind->valid);
        REQUIRE(ind->age == 0);
        REQUIRE(ind->born == 4);
    }
    SECTION("a perfect variable model")
    {
        auto d = make_dataset(col({1.0, 2.0, 3.0}), vec({1.0, 2.0, 3.0}));
        Rng rng = Rng::stream(30, {2});
        auto ind = instantiate_individual(parse("v1"), d, o, 0, rng);
        REQUIRE(ind.has_value());
        REQUIRE(ind->measures.mse == 0.0);
        REQUIRE(ind->complexity == 1);
        REQUIRE(ind->n_params == 0);
    }
    SECTION("grammar violations are rejected")
    {
        Options banned = o;
        banned.grammar.banned_nestings = {{Op::Cos, Op::Cos}};
        auto d = make_dataset(col({1.0, 2.0}), vec({1.0, 2.0}));
        Rng rng = Rng::stream(30, {3});
        REQUIRE_FALSE(instantiate_individual(parse("cos(cos(v1))"), d, banned, 0, rng).has_value());
        REQUIRE(instantiate_individual(parse("cos(sin(v1))"), d, banned, 0, rng).has_value());
    }
    SECTION("references beyond the data columns are rejected")
    {
        auto d = make_dataset(col({1.0, 2.0}), vec({1.0, 2.0}));
        Rng rng = Rng::stream(30, {4});
        REQUIRE_FALSE(instantiate_individual(parse("v2"), d, o, 0, rng).has_value());
    }
    SECTION("oversized expressions are trimmed before fitting")
    {
        Options tight = o;
        tight.max_nodes = 3;
        auto d = make_dataset(col({1.0, 2.0, 3.0}), vec({2.0, 4.0, 6.0}));
        Rng rng = Rng::stream(30, {5});
        auto ind = instantiate_individual(parse("v1 + (v1 * (v1 + v1))"), d, tight, 0, rng);
        REQUIRE(ind.has_value());
        REQUIRE(ind->complexity <= 3);
    }
    SECTION("the constraint hook can veto a fitted candidate")
    {
        auto d = make_dataset(col({1.0, 2.0}), vec({1.0, 2.0}));
        Options vetoed = o;
        vetoed.constraint_hook = [](const Expr&, const Dataset&) { return false; };
        Rng rng = Rng::stream(30, {6});
        REQUIRE_FALSE(instantiate_individual(parse("v1"), d, vetoed, 0, rng).has_value());
    }
    SECTION("the singularity hook can veto a measured candidate")
    {
        auto d = make_dataset(col({1.0, 2.0}), vec({1.0, 2.0}));
        Options vetoed = o;
        vetoed.singularity_hook = [](const Expr&, const Dataset&) { return false; };
        Rng rng = Rng::stream(30, {7});
        REQUIRE_FALSE(instantiate_individual(parse("v1"), d, vetoed, 0, rng).has_value());
    }
}

TEST_CASE("non-dominated sorting")
{
    SECTION("hand-ranked example")
    {
        std::vector<std::vector<double>> pts = {{0, 2}, {1, 1}, {2, 0}, {2, 2}, {3, 3}};
        auto info = pareto_analyze(pts);
        REQUIRE(info.rank == std::vector<int>{0, 0, 0, 1, 2});
        REQUIRE(info.fronts.size() == 3);
    }
    SECTION("duplicates never dominate each other")
    {
        std::vector<std::vector<double>> pts = {{1, 1}, {1, 1}, {1, 1}};
        auto info = pareto_analyze(pts);
        REQUIRE(info.rank == std::vector<int>{0, 0, 0});
    }
    SECTION("agrees with the brute-force oracle on random populations")
    {
        for (std::uint64_t t = 0; t < 60; ++t) {
            Rng rng = Rng::stream(31, {t});
            std::size_t n = 1 + rng.index(64);
            std::size_t m = 2 + rng.index(2);
            std::vector<std::vector<double>> pts(n, std::vector<double>(m));
            for (auto& row : pts)
                for (auto& x : row)
                    x = double(rng.index(6)); // coarse grid forces plenty of ties
            auto info = pareto_analyze(pts);
            REQUIRE(info.rank == oracle_ranks(pts));

            std::vector<int> seen(n, 0);
            for (const auto& f : info.fronts)
                for (int i : f)
                    ++seen[std::size_t(i)];
            REQUIRE(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
        }
    }
}

TEST_CASE("crowding distance")
{
    SECTION("boundaries are infinite, the interior sums normalized gaps")
    {
        std::vector<std::vector<double>> pts = {{0, 2}, {1, 1}, {2, 0}};
        auto info = pareto_analyze(pts);
        REQUIRE(std::isinf(info.crowding[0]));
        REQUIRE(std::isinf(info.crowding[2]));
        REQUIRE_THAT(info.crowding[1], WithinRel(2.0, 1e-12));
        // fronts are ordered by descending crowding: boundaries first
        REQUIRE(info.fronts[0] == std::vector<int>{0, 2, 1});
    }
    SECTION("a lone point is a boundary")
    {
        auto info = pareto_analyze({{1.0, 2.0}});
        REQUIRE(std::isinf(info.crowding[0]));
    }
}

TEST_CASE("tournament selection")
{
    SelectionConfig cfg;
    cfg.tournament_objectives = {"mse"};

    SECTION("a pool of one always wins")
    {
        std::vector<Individual> pool{synth(1.0, 1, 0.5)};
        Rng rng = Rng::stream(32, {1});
        auto picked = tournament_select(pool, cfg, 3, rng);
        REQUIRE(picked.size() == 3);
        for (const auto& p : picked)
            REQUIRE(p.measures.mse == 1.0);
    }
    SECTION("a full-pool tournament always returns the best")
    {
        std::vector<Individual> pool;
        for (int i = 0; i < 6; ++i)
            pool.push_back(synth(double(6 - i), 1, double(i)));
        cfg.tournament_size = 6;
        Rng rng = Rng::stream(32, {2});
        auto picked = tournament_select(pool, cfg, 100, rng);
        REQUIRE(picked.size() == 100);
        for (const auto& p : picked)
            REQUIRE(p.measures.mse == 1.0);
    }
    SECTION("win frequency follows rank")
    {
        // With 6 contestants and tournaments of 3 drawn without replacement,
        // the best wins half the time and the two worst can never win.
        std::vector<Individual> pool;
        for (int i = 0; i < 6; ++i)
            pool.push_back(synth(double(i + 1), 1, double(i)));
        cfg.tournament_size = 3;
        Rng rng = Rng::stream(32, {3});
        auto picked = tournament_select(pool, cfg, 10000, rng);
        std::map<double, int> wins;
        for (const auto& p : picked)
            ++wins[p.measures.mse];
        REQUIRE(wins[1.0] > wins[2.0]);
        REQUIRE(wins[2.0] > wins[3.0]);
        REQUIRE(wins[3.0] > wins[4.0]);
        REQUIRE(wins[4.0] > 0);
        REQUIRE(wins.count(5.0) == 0);
        REQUIRE(wins.count(6.0) == 0);
        // expected shares 0.5 / 0.3 / 0.15 / 0.05
        REQUIRE(wins[1.0] > 4500);
        REQUIRE(wins[1.0] < 5500);
    }
    SECTION("unique winners enumerate the pool")
    {
        std::vector<Individual> pool;
        for (int i = 0; i < 6; ++i)
            pool.push_back(synth(double(i + 1), 1, double(i)));
        cfg.tournament_size = 3;
        Rng rng = Rng::stream(32, {4});
        auto picked = tournament_select(pool, cfg, 6, rng, true);
        std::set<double> got;
        for (const auto& p : picked)
            got.insert(p.measures.mse);
        REQUIRE(got == std::set<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0});
    }
}

TEST_CASE("survivor selection")
{
    SelectionConfig cfg; // objectives {ms_processed_e, compl}

    SECTION("a pool within capacity survives whole, one generation older")
    {
        Island isl;
        isl.capacity = 5;
        for (int i = 0; i < 3; ++i)
            isl.population.push_back(synth(double(i), i + 1, double(i)));
        Rng rng = Rng::stream(33, {1});
        auto next = select_next_generation(isl, cfg, rng);
        REQUIRE(next.population.size() == 3);
        for (const auto& ind : next.population)
            REQUIRE(ind.age == 1);
    }
    SECTION("invalid individuals are dropped regardless of capacity")
    {
        Island isl;
        isl.capacity = 5;
        isl.population.push_back(synth(1.0, 1, 0.0));
        Individual bad = synth(0.0, 1, 1.0);
        bad.valid = false;
        isl.population.push_back(bad);
        Rng rng = Rng::stream(33, {2});
        auto next = select_next_generation(isl, cfg, rng);
        REQUIRE(next.population.size() == 1);
        REQUIRE(next.population[0].valid);
    }
    SECTION("pure Pareto stage truncates front by front, cut by crowding")
    {
        cfg.pareto_ratio = 1.0;
        // F0 = {A(1,4), B(2,3), C(3,2), D(4,1)}, F1 = {E(2.5, 3.5 -> compl 4)}
        auto make_pool = [] {
            std::vector<Individual> p;
            p.push_back(synth(1.0, 4, 1.0)); // A
            p.push_back(synth(2.0, 3, 2.0)); // B
            p.push_back(synth(3.0, 2, 3.0)); // C
            p.push_back(synth(4.0, 1, 4.0)); // D
            p.push_back(synth(2.5, 4, 5.0)); // E, dominated by B
            return p;
        };
        {
            Island isl{0, make_pool(), 4};
            Rng rng = Rng::stream(33, {3});
            auto next = select_next_generation(isl, cfg, rng);
            std::set<double> got;
            for (const auto& ind : next.population)
                got.insert(ind.measures.mse);
            REQUIRE(got == std::set<double>{1.0, 2.0, 3.0, 4.0}); // whole first front
        }
        {
            Island isl{0, make_pool(), 3};
            Rng rng = Rng::stream(33, {4});
            auto next = select_next_generation(isl, cfg, rng);
            std::set<double> got;
            for (const auto& ind : next.population)
                got.insert(ind.measures.mse);
            // boundaries A and D survive on infinite crowding, then B by
            // stable order among the equal-crowding interior pair
            REQUIRE(got == std::set<double>{1.0, 2.0, 4.0});
        }
    }
    SECTION("pure tournament stage fills capacity with distinct survivors")
    {
        cfg.pareto_ratio = 0.0;
        cfg.tournament_size = 2;
        Island isl;
        isl.capacity = 4;
        for (int i = 0; i < 8; ++i)
            isl.population.push_back(synth(double(i), 8 - i, double(i)));
        Rng rng = Rng::stream(33, {5});
        auto next = select_next_generation(isl, cfg, rng);
        REQUIRE(next.population.size() == 4);
        std::set<double> distinct;
        for (const auto& ind : next.population) {
            distinct.insert(ind.measures.mse);
            REQUIRE(ind.age == 1);
        }
        REQUIRE(distinct.size() == 4);
    }
    SECTION("a mixed split respects the configured ratio")
    {
        cfg.pareto_ratio = 0.5;
        cfg.tournament_size = 2;
        Island isl;
        isl.capacity = 4;
        for (int i = 0; i < 10; ++i)
            isl.population.push_back(synth(double(i), 10 - i, double(i)));
        Rng rng = Rng::stream(33, {6});
        auto next = select_next_generation(isl, cfg, rng);
        REQUIRE(next.population.size() == 4);
    }
}

TEST_CASE("ring migration")
{
    auto make_islands = [](int n, int members) {
        std::vector<Island> islands(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            islands[std::size_t(i)].id = i;
            islands[std::size_t(i)].capacity = members;
            for (int k = 0; k < members; ++k)
                islands[std::size_t(i)].population.push_back(
                    synth(double(i * 100 + k), 1, double(i * 100 + k)));
        }
        return islands;
    };

    SECTION("two islands copy across, source intact")
    {
        auto islands = make_islands(2, 3);
        Rng rng = Rng::stream(34, {1});
        auto ev = migrate(islands, rng);
        REQUIRE(ev.from != ev.to);
        REQUIRE(ev.from >= 0);
        REQUIRE(islands[std::size_t(ev.from)].population.size() == 3);
        REQUIRE(islands[std::size_t(ev.to)].population.size() == 4);
        const auto& immigrant = islands[std::size_t(ev.to)].population.back();
        bool found = false;
        for (const auto& src : islands[std::size_t(ev.from)].population)
            found = found || expr_equal(src.expr, immigrant.expr);
        REQUIRE(found);
    }
    SECTION("migration on a five-island ring stays adjacent")
    {
        for (std::uint64_t t = 0; t < 1000; ++t) {
            auto islands = make_islands(5, 2);
            Rng rng = Rng::stream(34, {2, t});
            auto ev = migrate(islands, rng);
            REQUIRE(((ev.to == (ev.from + 1) % 5) || (ev.to == (ev.from + 4) % 5)));
            REQUIRE(islands[std::size_t(ev.from)].population.size() == 2);
            REQUIRE(islands[std::size_t(ev.to)].population.size() == 3);
        }
    }
    SECTION("degenerate archipelagos")
    {
        auto one = make_islands(1, 2);
        Rng rng = Rng::stream(34, {3});
        auto ev = migrate(one, rng);
        REQUIRE(ev.from == -1);
        REQUIRE(one[0].population.size() == 2);

        auto empty = make_islands(3, 0);
        auto ev2 = migrate(empty, rng);
        REQUIRE(ev2.from >= 0);
        for (const auto& isl : empty)
            REQUIRE(isl.population.empty());
    }
}

TEST_CASE("hall of fame updates")
{
    std::vector<std::string> objectives{"ms_processed_e", "compl"};

    SECTION("members stay mutually non-dominated and per-objective minima never rise")
    {
        std::vector<Individual> hof;
        Rng rng = Rng::stream(35, {1});
        double best_mse = std::numeric_limits<double>::infinity();
        double best_compl = std::numeric_limits<double>::infinity();
        for (int round = 0; round < 50; ++round) {
            std::vector<Individual> cand;
            for (int i = 0; i < 8; ++i)
                cand.push_back(synth(double(rng.index(100)), 1 + int(rng.index(10)),
                                     rng.uniform(0.0, 1.0)));
            hof_update(hof, cand, objectives);
            REQUIRE_FALSE(hof.empty());
            double mse_min = std::numeric_limits<double>::infinity();
            double compl_min = std::numeric_limits<double>::infinity();
            for (const auto& a : hof) {
                mse_min = std::min(mse_min, a.measures.ms_processed_e);
                compl_min = std::min(compl_min, double(a.complexity));
                for (const auto& b : hof) {
                    std::vector<double> pa{a.measures.ms_processed_e, double(a.complexity)};
                    std::vector<double> pb{b.measures.ms_processed_e, double(b.complexity)};
                    REQUIRE_FALSE(oracle_dominates(pa, pb));
                }
            }
            REQUIRE(mse_min <= best_mse);
            REQUIRE(compl_min <= best_compl);
            best_mse = mse_min;
            best_compl = compl_min;
        }
    }
    SECTION("duplicate printed forms keep the incumbent")
    {
        std::vector<Individual> hof;
        Individual incumbent = synth(1.0, 1, 7.0);
        incumbent.age = 5;
        hof_update(hof, {incumbent}, objectives);
        Individual challenger = synth(1.0, 1, 7.0); // same printed form
        challenger.age = 0;
        hof_update(hof, {challenger}, objectives);
        REQUIRE(hof.size() == 1);
        REQUIRE(hof[0].age == 5);
    }
    SECTION("invalid candidates are ignored")
    {
        std::vector<Individual> hof;
        Individual bad = synth(0.0, 1, 1.0);
        bad.valid = false;
        hof_update(hof, {bad}, objectives);
        REQUIRE(hof.empty());
    }
}

TEST_CASE("evolution runs")
{
    Eigen::MatrixXd X(16, 1);
    Eigen::VectorXd y(16);
    for (int i = 0; i < 16; ++i) {
        X(i, 0) = 0.25 * (i + 1);
        y[i] = 2.0 * X(i, 0) + 1.0;
    }
    auto data = make_dataset(X, y);

    Options base;
    base.n_islands = 2;
    base.island_capacity = 6;
    base.generations = 3;
    base.fit.max_iterations = 8;
    base.seed = 99;

    SECTION("zero generations still builds a hall of fame")
    {
        Options o = base;
        o.generations = 0;
        auto r = run(o, data);
        REQUIRE(r.generations_run == 0);
        REQUIRE(r.stop_reason == "generations");
        REQUIRE_FALSE(r.hall_of_fame.empty());
        REQUIRE(r.islands.size() == 2);
        for (const auto& isl : r.islands) {
            REQUIRE(isl.population.size() <= 6);
            for (const auto& ind : isl.population) {
                REQUIRE(ind.valid);
                REQUIRE(ind.age == 0);
                REQUIRE(ind.born == 0);
            }
        }
        for (const auto& m : r.hall_of_fame)
            REQUIRE(m.valid);
    }
    SECTION("identical seeds reproduce the run exactly")
    {
        auto a = run(base, data);
        auto b = run(base, data);
        REQUIRE(a.generations_run == b.generations_run);
        REQUIRE(a.hall_of_fame.size() == b.hall_of_fame.size());
        for (std::size_t i = 0; i < a.hall_of_fame.size(); ++i) {
            REQUIRE(print(a.hall_of_fame[i].expr) == print(b.hall_of_fame[i].expr));
            REQUIRE(a.hall_of_fame[i].measures.mse == b.hall_of_fame[i].measures.mse);
        }
        for (std::size_t i = 0; i < a.islands.size(); ++i) {
            REQUIRE(a.islands[i].population.size() == b.islands[i].population.size());
            for (std::size_t k = 0; k < a.islands[i].population.size(); ++k)
                REQUIRE(print(a.islands[i].population[k].expr) ==
                        print(b.islands[i].population[k].expr));
        }
    }
    SECTION("ages equal generation minus birth generation")
    {
        Options o = base;
        o.migration_interval = 1; // exercise immigration bookkeeping too
        o.inspect = [](int g, const std::vector<Island>& islands) {
            for (const auto& isl : islands) {
                REQUIRE(isl.population.size() <= std::size_t(isl.capacity));
                for (const auto& ind : isl.population)
                    REQUIRE(ind.age == g - ind.born);
            }
        };
        auto r = run(o, data);
        REQUIRE(r.generations_run == 3);
    }
    SECTION("a satisfied threshold stops the run")
    {
        Options o = base;
        o.generations = 50;
        o.stop_measure = "mse";
        o.stop_threshold = 1e30; // any member qualifies
        auto r = run(o, data);
        REQUIRE(r.stop_reason == "threshold");
        REQUIRE(r.generations_run == 1);
    }
    SECTION("an exhausted time budget stops the run")
    {
        Options o = base;
        o.generations = 50;
        o.time_limit_s = 1e-9;
        auto r = run(o, data);
        REQUIRE(r.stop_reason == "time_limit");
        REQUIRE(r.generations_run == 0);
    }
    SECTION("starting expressions join the initial population")
    {
        Options o = base;
        o.generations = 0;
        o.starting_expressions = {"2.0 * v1 + 1.0"};
        auto r = run(o, data);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& m : r.hall_of_fame)
            best = std::min(best, m.measures.mse);
        REQUIRE(best < 1e-16); // the seeded exact model must dominate
    }
    SECTION("invalid settings are rejected up front")
    {
        Options o = base;
        o.selection.pareto_ratio = 1.5;
        REQUIRE_THROWS_AS(run(o, data), ConfigError);
        o = base;
        o.selection.tournament_size = 1;
        REQUIRE_THROWS_AS(run(o, data), ConfigError);
        o = base;
        o.stop_measure = "bogus";
        REQUIRE_THROWS_AS(run(o, data), ConfigError);
        o = base;
        o.island_capacity = 0;
        REQUIRE_THROWS_AS(run(o, data), ConfigError);
    }
}
