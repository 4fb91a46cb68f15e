#include "doctest.h"
#include "helpers.hpp"
#include "nctmc/core/network.hpp"
#include "nctmc/errors.hpp"
#include "nctmc/experiments/systems.hpp"

using namespace nctmc;

TEST_SUITE("network") {

TEST_CASE("state change is products minus reactants") {
  const auto net = testutil::toy_network();
  CHECK(net.species_count() == 2);
  CHECK(net.reaction_count() == 4);
  CHECK(net.state_change(0) == State{1, 0});
  CHECK(net.state_change(1) == State{-1, 0});
  CHECK(net.state_change(2) == State{1, 0});
  CHECK(net.state_change(3) == State{0, -1});
}

TEST_CASE("construction validates shapes and signs") {
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {{"bad", {1, 2}, {0}}}), Error);
  CHECK_THROWS_AS(ReactionNetwork({"A"}, {{"bad", {-1}, {0}}}), Error);
  CHECK_THROWS_AS(ReactionNetwork({}, {}), Error);
}

TEST_CASE("reactions sharing a state change merge into one class") {
  const auto net = testutil::toy_network();
  const auto classes = build_equivalence_classes(net);
  // r0 and r2 share dS = (+1, 0); r1 and r3 stand alone.
  CHECK(classes.class_count() == 3);
  CHECK(classes.members(0) == std::vector<std::size_t>{0, 2});
  CHECK(classes.members(1) == std::vector<std::size_t>{1});
  CHECK(classes.members(2) == std::vector<std::size_t>{3});
  CHECK(classes.class_of(0) == 0);
  CHECK(classes.class_of(1) == 1);
  CHECK(classes.class_of(2) == 0);
  CHECK(classes.class_of(3) == 2);
  CHECK(classes.representative(0) == 0);
  CHECK(classes.state_change(0) == State{1, 0});
}

TEST_CASE("classes are ordered by smallest member") {
  const auto net = testutil::toy_network();
  const auto classes = build_equivalence_classes(net);
  std::size_t previous = 0;
  for (std::size_t k = 0; k < classes.class_count(); ++k) {
    CHECK(classes.members(k).front() >= previous);
    previous = classes.members(k).front();
  }
}

TEST_CASE("predator-prey merges its two hunting-with-conversion reactions") {
  const auto net = predator_prey_network();
  const auto classes = build_equivalence_classes(net);
  CHECK(net.reaction_count() == 9);
  CHECK(classes.class_count() == 8);
  // Reactions 3 (A_in) and 6 (A_breed) both have dS = (+1, 0, 0).
  CHECK(classes.class_of(3) == classes.class_of(6));
  std::size_t merged = classes.class_of(3);
  CHECK(classes.members(merged) == std::vector<std::size_t>{3, 6});
}

TEST_CASE("birth-death and temperature networks have singleton classes") {
  CHECK(build_equivalence_classes(birth_death_network()).class_count() == 2);
  CHECK(build_equivalence_classes(temperature_crn_network()).class_count() == 4);
}

TEST_CASE("find_by_delta and identify_reaction resolve jumps") {
  const auto net = testutil::toy_network();
  const auto classes = build_equivalence_classes(net);

  const std::size_t* k = classes.find_by_delta(State{1, 0});
  REQUIRE(k != nullptr);
  CHECK(*k == 0);
  CHECK(classes.find_by_delta(State{5, 5}) == nullptr);

  CHECK(identify_reaction(classes, State{3, 2}, State{4, 2}) == 0);
  CHECK(identify_reaction(classes, State{3, 2}, State{2, 2}) == 1);
  CHECK(identify_reaction(classes, State{3, 2}, State{3, 1}) == 2);
  CHECK_THROWS_AS(identify_reaction(classes, State{3, 2}, State{3, 2}), NoMatchingReaction);
  CHECK_THROWS_AS(identify_reaction(classes, State{3, 2}, State{9, 9}), NoMatchingReaction);
}

TEST_CASE("trajectory validation flags broken invariants") {
  const auto net = testutil::toy_network();
  const auto classes = build_equivalence_classes(net);

  Trajectory good;
  good.observations = {
      {0.0, {2, 1}, {}, 0},
      {0.5, {3, 1}, {}, 3},
      {1.2, {3, 0}, {}, std::nullopt},
  };
  CHECK(validate_trajectory(good, net, classes).empty());

  Trajectory decreasing_time = good;
  decreasing_time.observations[1].time = -0.1;
  CHECK_FALSE(validate_trajectory(decreasing_time, net, classes).empty());

  Trajectory wrong_jump = good;
  wrong_jump.observations[1].state = {9, 9};
  CHECK_FALSE(validate_trajectory(wrong_jump, net, classes).empty());

  Trajectory zero_jump = good;  // a no-op record matches no reaction
  zero_jump.observations[1].state = zero_jump.observations[0].state;
  CHECK_FALSE(validate_trajectory(zero_jump, net, classes).empty());

  Trajectory negative_count = good;
  negative_count.observations[1].state = {-1, 1};
  CHECK_FALSE(validate_trajectory(negative_count, net, classes).empty());
}

}
