#include <gtest/gtest.h>

#include "beergame/game.hpp"
#include "beergame/policies.hpp"
#include "beergame/trace_io.hpp"

using namespace beergame;

namespace {

Observation obs_with(int stage, Units inventory, Units incoming, Units in_transit, std::vector<Units> shipments) {
    Observation o;
    o.stage = stage;
    o.own_inventory = inventory;
    o.own_backlog = std::max<Units>(-inventory, 0);
    o.incoming_demand = incoming;
    o.in_transit = in_transit;
    o.supply_line = in_transit;
    o.past_shipments = std::move(shipments);
    o.period = static_cast<int>(o.past_shipments.size()) + 1;
    return o;
}

}  // namespace

TEST(TrackingDemand, OverstockedOrdersZero) {
    // S = 4, I* = 4 * 2 + 0 = 8, O* = 8 - 12 - 0 - 8 = -12.
    const auto d = tracking_demand_decide(obs_with(2, 12, 4, 8, {4, 4, 4}), {2, 3, 20, 4});
    EXPECT_EQ(d.order, 0);
}

TEST(TrackingDemand, AllZeroFixedPoint) {
    EXPECT_EQ(tracking_demand_decide(obs_with(2, 0, 0, 0, {0, 0, 0}), {2, 3, 20, 4}).order, 0);
}

TEST(TrackingDemand, ClampBranch) {
    // S = 8, B = 10: I* = 26, nothing on hand or in transit, O* = 26 -> 20.
    const auto d = tracking_demand_decide(obs_with(2, -10, 8, 0, {8, 8, 8}), {2, 3, 20, 4});
    EXPECT_EQ(d.order, 20);
}

TEST(TrackingDemand, ShortHistoryAndRounding) {
    // No history: S = prefill 4, I* = 8, O* = 8 - 5 - 0 = 3.
    EXPECT_EQ(tracking_demand_decide(obs_with(2, 5, 4, 0, {}), {2, 3, 20, 4}).order, 3);
    // Two records (3, 4): S = 3.5, I* = 7, O* = 7 - 1 = 6.
    EXPECT_EQ(tracking_demand_decide(obs_with(2, 1, 4, 0, {3, 4}), {2, 3, 20, 4}).order, 6);
    // Three records (1, 1, 2): S = 4/3, I* = 8/3 = 2.67, O* = 2.67 - 0 -> 3.
    EXPECT_EQ(tracking_demand_decide(obs_with(2, 0, 4, 0, {1, 1, 2}), {2, 3, 20, 4}).order, 3);
    // Half rounds away from zero: S = 1.25 over (1, 1, 1, 2) with window 4, L = 2 -> 2.5 -> 3.
    EXPECT_EQ(tracking_demand_decide(obs_with(2, 0, 4, 0, {1, 1, 1, 2}), {2, 4, 20, 4}).order, 3);
    // Only the last L_max shipments count.
    EXPECT_EQ(tracking_demand_decide(obs_with(2, 0, 4, 0, {20, 20, 1, 1, 1}), {2, 3, 20, 4}).order, 2);
}

TEST(TrackingDemand, DownstreamBacklogOnlyUnderSharing) {
    Observation o = obs_with(2, 0, 4, 0, {4, 4, 4});
    EXPECT_EQ(tracking_demand_decide(o, {2, 3, 20, 4}).order, 8);
    o.regime = Regime::shared;
    o.shared_view = SharedView{{0, 0, 0, 0}, {5, 0, 0, 0}};
    EXPECT_EQ(tracking_demand_decide(o, {2, 3, 20, 4}).order, 3);
}

TEST(TrackingDemand, OutputAlwaysWithinCapacity) {
    TrackingDemandPolicy a = TrackingDemandPolicy::for_stage(GameConfig{}, 1);
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto tr = run_game(GameConfig{}, {&a, &a, &a, &a}, seed, Regime::shared);
        for (const auto& p : tr.periods)
            for (const auto o : p.orders) {
                EXPECT_GE(o, 0);
                EXPECT_LE(o, 20);
            }
    }
}

TEST(TrackingDemand, SettledPipelineIsNotAFixedPoint) {
    // With demand d flowing through settled pipelines the in-transit sum is
    // already d * L, so O* = B - on_hand <= 0 whenever stock is non-negative.
    // Ordering d needs a standing backlog of d with nothing on hand.
    for (Units d = 1; d <= 8; ++d) {
        const std::vector<Units> shipped{d, d, d};
        for (Units on_hand = 0; on_hand <= 12; ++on_hand)
            EXPECT_EQ(tracking_demand_decide(obs_with(2, on_hand, d, 2 * d, shipped), {2, 3, 20, 4}).order, 0);
        EXPECT_EQ(tracking_demand_decide(obs_with(2, -d, d, 2 * d, shipped), {2, 3, 20, 4}).order, d);
    }
    GameConfig cfg;
    cfg.demand_min = cfg.demand_max = 4;
    TrackingDemandPolicy p = TrackingDemandPolicy::for_stage(cfg, 1);
    const auto tr = run_game(cfg, {&p, &p, &p, &p}, 1, Regime::isolated);
    EXPECT_EQ(tr.periods[0].orders, (StageArray{0, 0, 0, 0}));
}

TEST(TrackingDemand, IsolationLaw) {
    // Hidden state of other stages changes; the stage's own observation does
    // not, so neither does its decision.
    const GameConfig cfg;
    GameState a = initial_state(cfg), b = initial_state(cfg);
    b.stages[2].inventory = -40;
    b.stages[3].inbound = DelayLine(3, 17);
    TrackingDemandPolicy p = TrackingDemandPolicy::for_stage(cfg, 1);
    const auto oa = build_observation(a, {}, 1, Regime::isolated, 6, cfg);
    const auto ob = build_observation(b, {}, 1, Regime::isolated, 6, cfg);
    EXPECT_EQ(oa, ob);
    EXPECT_EQ(p.decide(oa).order, p.decide(ob).order);
}

TEST(Scripted, Examples) {
    Observation o = obs_with(1, 4, 5, 0, {});
    EXPECT_EQ(scripted_decide(o, ConstantRule{4}).order, 4);
    o.incoming_demand = 7;
    EXPECT_EQ(scripted_decide(o, MatchDemandRule{}).order, 7);
    o.incoming_demand = 5;
    EXPECT_EQ(scripted_decide(o, PanicRule{1.0, 0.0, 12}).order, 13);
    o.supply_line = 10;
    EXPECT_EQ(scripted_decide(o, PanicRule{1.0, 0.5, 12}).order, 8);
    o.supply_line = 100;
    EXPECT_EQ(scripted_decide(o, PanicRule{1.0, 0.5, 12}).order, 0);
    EXPECT_EQ(rule_id(PanicRule{1.0, 0.2, 12}), "panic(1,0.2,12)");
    EXPECT_EQ(rule_id(ConstantRule{4}), "constant(4)");
}

TEST(Replay, RecordedOrderAndGap) {
    AgentTranscript t;
    t.stage = 2;
    t.records.push_back({3, 2, "x", "", "", "[9]", 9, 0, 0});
    EXPECT_EQ(replay_decide(t, 3).order, 9);
    EXPECT_EQ(replay_decide(t, 3).rationale, "[9]");
    try {
        replay_decide(t, 4);
        FAIL();
    } catch (const ReplayGapError& e) {
        EXPECT_EQ(e.stage, 2);
        EXPECT_EQ(e.period, 4);
    }
}

TEST(Replay, RecordedGameRoundTrip) {
    ScriptedPolicy p(PanicRule{1.0, 0.2, 12});
    std::array<AgentTranscript, kNumStages> recorded;
    for (int i = 0; i < kNumStages; ++i) recorded[static_cast<std::size_t>(i)].stage = i + 1;
    const auto original = run_game(GameConfig{}, {&p, &p, &p, &p}, 31, Regime::shared,
                                   [&](const Observation& o, const PolicyDecision& d) {
                                       DecisionRecord r;
                                       r.period = o.period;
                                       r.stage = o.stage;
                                       r.parsed_order = d.order;
                                       recorded[static_cast<std::size_t>(o.stage - 1)].records.push_back(r);
                                   });
    ReplayPolicy r1(recorded[0], p.id()), r2(recorded[1], p.id()), r3(recorded[2], p.id()), r4(recorded[3], p.id());
    const auto replayed = run_game(GameConfig{}, {&r1, &r2, &r3, &r4}, 31, Regime::shared);
    EXPECT_EQ(serialize_trace(replayed), serialize_trace(original));

    recorded[2].records.erase(recorded[2].records.begin() + 5);
    ReplayPolicy gap(recorded[2]);
    EXPECT_THROW(run_game(GameConfig{}, {&r1, &r2, &gap, &r4}, 31, Regime::shared), ReplayGapError);
}
