// Continuous-query runtime: registration, window triggering, metrics.

#include <gtest/gtest.h>

#include <memory>
#include <string>

#include "prsp/bench.hpp"
#include "prsp/runtime.hpp"

#include "support/random_instances.hpp"

using namespace prsp;
using prsp_test::Rng;

namespace {

const char* kTestQuery =
    "REGISTER QUERY TestQuery AS\n"
    "SELECT ?obs\n"
    "FROM STREAM streams [ RANGE 5s STEP 5s ]\n"
    "WHERE { ?obs observedProperty AirTemperature. }\n";

std::string catch_all_query(const std::string& name, const std::string& range,
                            const std::string& step) {
  return "REGISTER QUERY " + name +
         " AS SELECT * FROM STREAM <http://ex/stream> [ RANGE " + range +
         " STEP " + step + " ] WHERE { ?s ?p ?o . }";
}

TimestampedTriple obs_item(std::int64_t ts, int id = 0) {
  return TimestampedTriple(
      Triple(Term::iri("http://ex/obs" + std::to_string(id)),
             Term::iri("observedProperty"), Term::iri("AirTemperature")),
      ts);
}

TimestampedTriple plain_item(std::int64_t ts, int id) {
  return TimestampedTriple(
      Triple(Term::iri("http://ex/s" + std::to_string(id)),
             Term::iri("http://ex/p"), Term::iri("http://ex/o")),
      ts);
}

/// Engine stub that fails on a chosen execute call but keeps working after.
class FlakyEngine final : public EnginePlugin {
 public:
  explicit FlakyEngine(int fail_on_call) : fail_on_(fail_on_call) {}

  void load(const Graph& g) override {
    inner_.load(g);
    loaded_ = true;
  }
  SolutionSet execute(const SparqlQuery& q) override {
    if (++calls_ == fail_on_)
      fail(Errc::EngineError, "synthetic failure on call " +
                                  std::to_string(calls_));
    return inner_.execute(q);
  }
  std::string name() const override { return "flaky"; }
  void reset() override {
    inner_.reset();
    loaded_ = false;
  }

 private:
  ReferenceEngine inner_;
  int fail_on_;
  int calls_ = 0;
  bool loaded_ = false;
};

}  // namespace

TEST(Register, GoldenQueryYieldsOneBinding) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  EXPECT_EQ(rq.name(), "TestQuery");
  ASSERT_EQ(rq.plan().windows.size(), 1u);
  EXPECT_EQ(rq.plan().windows[0].window, WindowSpec(5000, 5000));
}

TEST(Register, DuplicateNameRejected) {
  Runtime rt;
  rt.register_query(kTestQuery, reference_engine());
  try {
    rt.register_query(kTestQuery, reference_engine());
    FAIL() << "duplicate registration accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DuplicateRegistration);
  }
}

TEST(Register, ParserErrorsPropagate) {
  Runtime rt;
  EXPECT_THROW(rt.register_query("REGISTER NONSENSE", reference_engine()),
               Error);
}

TEST(Runtime, EmptyStreamProducesNoWindows) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  EXPECT_TRUE(rt.finish(rq).empty());
}

TEST(Feed, ArrivalPastCloseTriggersWindow) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  EXPECT_TRUE(rt.feed(rq, obs_item(1000, 1)).empty());
  EXPECT_TRUE(rt.feed(rq, obs_item(2000, 2)).empty());
  auto results = rt.feed(rq, obs_item(6000, 3));
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(results[0].window.index, 0);
  EXPECT_EQ(results[0].window.open_t, 0);
  EXPECT_EQ(results[0].window.close_t, 5000);
  EXPECT_EQ(results[0].solutions.rows.size(), 2u);  // obs1, obs2
  EXPECT_EQ(results[0].metrics.result_count, 2);
}

TEST(Feed, CloseBoundaryItemDoesNotTrigger) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  rt.feed(rq, obs_item(1000, 1));
  EXPECT_TRUE(rt.feed(rq, obs_item(5000, 2)).empty());  // close is inclusive
  auto results = rt.feed(rq, obs_item(5001, 3));
  ASSERT_EQ(results.size(), 1u);
  // the boundary item belongs inside window 0
  EXPECT_EQ(results[0].solutions.rows.size(), 2u);
}

TEST(Feed, OutOfOrderItemRejected) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  rt.feed(rq, obs_item(3000, 1));
  rt.feed(rq, obs_item(3000, 2));  // ties fine
  try {
    rt.feed(rq, obs_item(2999, 3));
    FAIL() << "out-of-order item accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::OutOfOrderItem);
  }
}

TEST(Finish, StreamEndingOnBoundaryEvaluatesFinalWindow) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  rt.feed(rq, obs_item(1000, 1));
  rt.feed(rq, obs_item(10'000, 2));  // ends exactly at window 1's close
  auto results = rt.finish(rq);
  ASSERT_EQ(results.size(), 1u);  // window 1; window 0 closed during feed? no:
  // feed at 10000 closed window 0 (close 5000 < 10000); finish closes window 1
  EXPECT_EQ(results[0].window.index, 1);
  EXPECT_EQ(results[0].window.close_t, 10'000);
  EXPECT_EQ(results[0].solutions.rows.size(), 1u);
}

TEST(Finish, PartialWindowDroppedWithoutFlush) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  rt.feed(rq, obs_item(1000, 1));
  rt.feed(rq, obs_item(7000, 2));  // mid-window for index 1
  auto results = rt.finish(rq);
  EXPECT_TRUE(results.empty());  // window 0 already emitted during feed
  EXPECT_TRUE(rt.finish(rq).empty());  // finish is idempotent
}

TEST(Finish, FlushEvaluatesTruncatedWindowMatchingOracle) {
  Runtime rt;
  RuntimeOptions opt;
  opt.flush_partial = true;
  RegisteredQuery& rq =
      rt.register_query(kTestQuery, reference_engine(), opt);
  rt.feed(rq, obs_item(1000, 1));
  rt.feed(rq, obs_item(6000, 2));
  rt.feed(rq, obs_item(7000, 3));
  auto results = rt.finish(rq);
  ASSERT_EQ(results.size(), 1u);  // the partial window 1
  EXPECT_EQ(results[0].window.index, 1);
  EXPECT_EQ(results[0].window.close_t, 10'000);

  // oracle over the truncated interval (5000, 7000]
  RdfStream truncated;
  truncated.push_back(obs_item(6000, 2));
  truncated.push_back(obs_item(7000, 3));
  Graph expected_graph = graph_in_range(truncated, 5000, 10'000);
  OracleEngine oracle;
  oracle.load(expected_graph);
  SolutionSet expected = oracle.execute(rq.plan().query);
  EXPECT_TRUE(results[0].solutions.bag_equal(expected));
}

TEST(Finish, FeedAfterFinishIsAnError) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  rt.feed(rq, obs_item(1000, 1));
  rt.finish(rq);
  try {
    rt.feed(rq, obs_item(2000, 2));
    FAIL() << "feed after finish accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidState);
  }
}

TEST(Runtime, SixtySecondStreamMatchesOraclePerWindow) {
  Scenario sc{3, 60'000, 1000, 5};
  RdfStream stream = generate_stream(sc);
  auto [q1, q1p] = fixture_queries();

  Runtime rt;
  RegisteredQuery& rq = rt.register_query(q1, reference_engine());
  std::vector<WindowResult> results = rt.replay(rq, stream);
  ASSERT_EQ(results.size(), 12u);

  OracleEngine oracle;
  for (const auto& r : results) {
    EXPECT_FALSE(r.error.has_value());
    oracle.load(r.window.graph);
    SolutionSet expected = oracle.execute(rq.plan().query);
    EXPECT_TRUE(r.solutions.bag_equal(expected))
        << "window " << r.window.index;
    EXPECT_EQ(r.metrics.result_count,
              static_cast<std::int64_t>(r.solutions.rows.size()));
    EXPECT_GE(r.metrics.et_ms, r.metrics.lt_ms + r.metrics.rt_ms);
    EXPECT_GE(r.metrics.lt_ms, 0.0);
    EXPECT_GE(r.metrics.rt_ms, 0.0);
  }
}

TEST(Runtime, ChunkedFeedingIsDeterministic) {
  Rng rng(103);
  prsp_test::Vocab vocab = prsp_test::Vocab::make(rng);
  RdfStream stream = prsp_test::random_stream(rng, vocab, 300, 30'000);

  std::string text = catch_all_query("Chunked", "4s", "2s");
  Runtime rt1, rt2;
  RegisteredQuery& a = rt1.register_query(text, reference_engine());
  RegisteredQuery& b = rt2.register_query(text, reference_engine());

  std::vector<WindowResult> one_by_one;
  for (const auto& item : stream) {
    auto r = rt1.feed(a, item);
    std::move(r.begin(), r.end(), std::back_inserter(one_by_one));
  }
  auto tail = rt1.finish(a);
  std::move(tail.begin(), tail.end(), std::back_inserter(one_by_one));

  std::vector<WindowResult> replayed = rt2.replay(b, stream);

  ASSERT_EQ(one_by_one.size(), replayed.size());
  for (std::size_t i = 0; i < replayed.size(); ++i) {
    EXPECT_EQ(one_by_one[i].window.index, replayed[i].window.index);
    EXPECT_EQ(one_by_one[i].window.open_t, replayed[i].window.open_t);
    EXPECT_EQ(one_by_one[i].window.close_t, replayed[i].window.close_t);
    EXPECT_EQ(one_by_one[i].window.graph, replayed[i].window.graph);
    EXPECT_TRUE(one_by_one[i].solutions.bag_equal(replayed[i].solutions));
  }
}

TEST(Runtime, EngineErrorsSurfacePerWindowWithoutAbort) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(
      catch_all_query("Flaky", "2s", "2s"), std::make_unique<FlakyEngine>(2));
  std::vector<WindowResult> results;
  for (int i = 1; i <= 8; ++i) {
    auto r = rt.feed(rq, plain_item(i * 1000, i));
    std::move(r.begin(), r.end(), std::back_inserter(results));
  }
  auto tail = rt.finish(rq);
  std::move(tail.begin(), tail.end(), std::back_inserter(results));

  ASSERT_EQ(results.size(), 4u);
  EXPECT_FALSE(results[0].error.has_value());
  ASSERT_TRUE(results[1].error.has_value());
  EXPECT_NE(results[1].error->find("EngineError"), std::string::npos);
  EXPECT_TRUE(results[1].solutions.rows.empty());
  EXPECT_EQ(results[1].metrics.result_count, 0);
  // later windows recover
  EXPECT_FALSE(results[2].error.has_value());
  EXPECT_EQ(results[2].solutions.rows.size(), 2u);
}

TEST(Runtime, SinkReceivesEveryResult) {
  Runtime rt;
  RegisteredQuery& rq =
      rt.register_query(catch_all_query("Sink", "2s", "2s"), reference_engine());
  int seen = 0;
  rt.set_sink(rq, [&](const WindowResult&) { ++seen; });
  for (int i = 1; i <= 6; ++i) rt.feed(rq, plain_item(i * 1000, i));
  rt.finish(rq);
  EXPECT_EQ(seen, 3);
}

TEST(Runtime, MultiStreamWindowsMergePerSpec) {
  // two streams with different windows share one trigger clock
  std::string text =
      "REGISTER QUERY Multi AS SELECT * "
      "FROM STREAM <http://ex/a> [ RANGE 5s STEP 5s ] "
      "FROM STREAM <http://ex/b> [ RANGE 3s STEP 3s ] "
      "WHERE { ?s ?p ?o . }";
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(text, reference_engine());

  RdfStream a, b;
  for (int i = 1; i <= 12; ++i) a.push_back(plain_item(i * 1000, 100 + i));
  for (int i = 1; i <= 12; ++i) b.push_back(plain_item(i * 1000, 200 + i));

  std::vector<WindowResult> results;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() || ib < b.size()) {
    bool take_a = ib >= b.size() ||
                  (ia < a.size() && a[ia].timestamp_ms <= b[ib].timestamp_ms);
    auto r = take_a ? rt.feed(rq, "http://ex/a", a[ia++])
                    : rt.feed(rq, "http://ex/b", b[ib++]);
    std::move(r.begin(), r.end(), std::back_inserter(results));
  }
  auto tail = rt.finish(rq);
  std::move(tail.begin(), tail.end(), std::back_inserter(results));

  // ticks: closes of (5s,5s) from 5000 and (3s,3s) from 3000, merged
  std::vector<std::int64_t> expected_ticks{3000, 5000, 6000, 9000, 10'000, 12'000};
  ASSERT_EQ(results.size(), expected_ticks.size());
  OracleEngine oracle;
  for (std::size_t i = 0; i < results.size(); ++i) {
    EXPECT_EQ(results[i].window.close_t, expected_ticks[i]);
    std::int64_t t = expected_ticks[i];
    // brute-force merged window: each stream filtered by its own range
    Graph expected = graph_from(prsp_test::naive_window_filter(a, t - 5000, t));
    for (const auto& triple : prsp_test::naive_window_filter(b, t - 3000, t))
      expected.insert(triple);
    EXPECT_EQ(results[i].window.graph, expected) << "tick " << t;
    oracle.load(expected);
    EXPECT_TRUE(
        results[i].solutions.bag_equal(oracle.execute(rq.plan().query)))
        << "tick " << t;
  }
}

TEST(Runtime, UnknownStreamRejected) {
  Runtime rt;
  RegisteredQuery& rq = rt.register_query(kTestQuery, reference_engine());
  try {
    rt.feed(rq, "http://ex/not-bound", obs_item(0, 1));
    FAIL() << "unknown stream accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownStream);
  }
}

TEST(Runtime, StaticGraphsMergeIntoEveryWindow) {
  Graph background;
  background.insert(Triple(Term::iri("http://ex/ctx"), Term::iri("http://ex/p"),
                           Term::iri("http://ex/o")));
  std::string text =
      "REGISTER QUERY WithStatic AS SELECT * "
      "FROM STREAM <http://ex/stream> [ RANGE 2s STEP 2s ] "
      "FROM <http://ex/background> "
      "WHERE { ?s <http://ex/p> ?o . }";

  Runtime rt;
  rt.add_static_graph("http://ex/background", background);
  RegisteredQuery& rq = rt.register_query(text, reference_engine());
  std::vector<WindowResult> results;
  for (std::int64_t ts : {1000, 2500, 4001}) {
    auto r = rt.feed(rq, plain_item(ts, static_cast<int>(ts)));
    std::move(r.begin(), r.end(), std::back_inserter(results));
  }
  auto tail = rt.finish(rq);
  std::move(tail.begin(), tail.end(), std::back_inserter(results));
  ASSERT_EQ(results.size(), 2u);
  // each window: its own stream item plus the background triple
  EXPECT_EQ(results[0].solutions.rows.size(), 2u);
  EXPECT_EQ(results[1].solutions.rows.size(), 2u);
}

TEST(Runtime, UnresolvedStaticGraphFailsAtRegistration) {
  Runtime rt;
  std::string text =
      "REGISTER QUERY Missing AS SELECT * "
      "FROM STREAM <http://ex/stream> [ RANGE 2s STEP 2s ] "
      "FROM <http://ex/nowhere> WHERE { ?s ?p ?o . }";
  try {
    rt.register_query(text, reference_engine());
    FAIL() << "unresolved static graph accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UnknownStaticGraph);
  }
}

TEST(Runtime, EngineIndependenceReferenceVsOracle) {
  Rng rng(107);
  prsp_test::Vocab vocab = prsp_test::Vocab::make(rng);
  RdfStream stream = prsp_test::random_stream(rng, vocab, 250, 20'000);
  std::string text = catch_all_query("EngineSwap", "3s", "1500ms");

  Runtime rt1, rt2;
  RegisteredQuery& a = rt1.register_query(text, reference_engine());
  RegisteredQuery& b = rt2.register_query(text, oracle_engine());
  auto ra = rt1.replay(a, stream);
  auto rb = rt2.replay(b, stream);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    EXPECT_EQ(ra[i].window.close_t, rb[i].window.close_t);
    EXPECT_TRUE(ra[i].solutions.bag_equal(rb[i].solutions)) << "window " << i;
  }
}
