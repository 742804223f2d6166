#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "vld/perception.hpp"
#include "vld/render.hpp"
#include "vld/rng.hpp"
#include "vld/world.hpp"

using namespace vld;

namespace {

ObjectTag tag(ObjectColor color, const char* label,
              ObjectCategory cat = ObjectCategory::container) {
    ObjectTag t;
    t.category = cat;
    t.color = color;
    t.label = label;
    return t;
}

NoiseStream quiet(std::uint64_t key = 0) { return NoiseStream(NoiseProfile{}, key); }

// flat wall world for geometric floor counting
WorldModel wall_world(int floors, double floor_height) {
    WorldModel w;
    Building b;
    b.footprint = {{-5, -30}, {5, -30}, {5, 30}, {-5, 30}};
    b.num_floors = floors;
    b.floor_height = floor_height;
    w.buildings.push_back(b);
    return w;
}

VisibleFeature feature(const std::string& id, ObjectTag deco, double occl = 0.0) {
    VisibleFeature f;
    f.window_id = id;
    f.pixel_box = {10, 20, 10, 20};
    f.decorations = {deco};
    f.occluded_fraction = occl;
    return f;
}

} // namespace

TEST_CASE("parse_request: oracle identity without noise") {
    auto noise = quiet();
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    RequestInterpretation out = parse_request("deliver to floor 4...", 4, pot, noise);
    CHECK(out.target_floor == 4);
    CHECK(out.target_object == pot);
    CHECK_FALSE(out.perturbed);
}

TEST_CASE("parse_request: forced floor offset +1") {
    NoiseProfile p;
    p.parse_error_rate = 1.0;
    p.parse_floor_offsets = {{1, 1.0}};
    p.parse_color_swap_weight = 0.0;
    NoiseStream noise(p, 0);
    RequestInterpretation out =
        parse_request("...", 4, tag(ObjectColor::green, "flower pot"), noise);
    CHECK(out.target_floor == 5);
    CHECK(out.perturbed);
}

TEST_CASE("parse_request: forced color swap changes only the color") {
    NoiseProfile p;
    p.parse_error_rate = 1.0;
    p.parse_floor_offsets = {};
    p.parse_color_swap_weight = 1.0;
    NoiseStream noise(p, 3);
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    RequestInterpretation out = parse_request("...", 4, pot, noise);
    CHECK(out.target_floor == 4);
    CHECK(out.target_object.color != ObjectColor::green);
    CHECK(out.target_object.label == "flower pot");
}

TEST_CASE("parse_request: binomial perturbation count at rate 0.5") {
    NoiseProfile p;
    p.parse_error_rate = 0.5;
    p.seed = 2024;
    NoiseStream noise(p, 0);
    int perturbed = 0;
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    for (int i = 0; i < 1000; ++i)
        if (parse_request("...", 4, pot, noise).perturbed) ++perturbed;
    CHECK(perturbed > 460);
    CHECK(perturbed < 540);
}

TEST_CASE("count_floors_exact: frustum band spanning floors 3-6 gives 4") {
    // floor mids at 1.5, 4.5, ..., band must cover [6, 18) to span floors
    // 3..6: camera at z=12 with half-band 6 -> standoff 6 at 90 vfov
    WorldModel w = wall_world(10, 3.0);
    DronePose pose{{-11, 0, 12}, 0.0};
    CHECK(count_floors_exact(w, pose, 1) == 4);
}

TEST_CASE("count_floors_exact matches a band-intersection oracle on random poses") {
    WorldModel w = wall_world(9, 3.3);
    Rng rng(8);
    CameraRig rig;
    double tan_v = std::tan(0.5 * rig.vfov_deg * M_PI / 180.0);
    for (int i = 0; i < 100; ++i) {
        double standoff = rng.uniform(3.0, 20.0);
        DronePose pose{{-5.0 - standoff, rng.uniform(-20, 20), rng.uniform(1.0, 40.0)}, 0.0};
        int got = count_floors_exact(w, pose, 1);
        // oracle: count mids inside [z - s*tan, z + s*tan)
        int expected = 0;
        for (int f = 1; f <= 9; ++f) {
            double mid = (f - 0.5) * 3.3;
            if (mid >= pose.position.z - standoff * tan_v &&
                mid < pose.position.z + standoff * tan_v)
                ++expected;
        }
        CHECK(got == expected);
    }
}

TEST_CASE("count_floors: refusal and offsets") {
    WorldModel w = wall_world(10, 3.0);
    DronePose pose{{-11, 0, 12}, 0.0};

    NoiseProfile refuse_all;
    refuse_all.refusal_rate = 1.0;
    NoiseStream ns1(refuse_all, 0);
    CHECK(count_floors(w, pose, 1, ns1).refused);

    NoiseProfile exact;
    NoiseStream ns2(exact, 0);
    FloorCountAnswer a = count_floors(w, pose, 1, ns2);
    CHECK_FALSE(a.refused);
    CHECK(a.floors_visible == 4);

    NoiseProfile shifted;
    shifted.floor_count_error_dist = {{2, 1.0}};
    NoiseStream ns3(shifted, 0);
    CHECK(count_floors(w, pose, 1, ns3).floors_visible == 6);
}

TEST_CASE("count_floors: no building in view") {
    WorldModel w = wall_world(10, 3.0);
    DronePose pose{{-11, 0, 12}, M_PI}; // facing away
    auto noise = quiet();
    CHECK_THROWS_AS(count_floors(w, pose, 1, noise), NoBuildingInViewError);
}

TEST_CASE("recognize_target: oracle identity and absence") {
    std::array<std::vector<VisibleFeature>, 5> features;
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    features[2].push_back(feature("target", pot));

    auto noise = quiet();
    RecognitionAnswer hit = recognize_target(features, pot, noise);
    CHECK(hit.found);
    CHECK(hit.view == 3);
    CHECK(hit.window_id == "target");
    REQUIRE(hit.pixel_box.has_value());

    auto noise2 = quiet();
    RecognitionAnswer miss =
        recognize_target(features, tag(ObjectColor::red, "vase"), noise2);
    CHECK_FALSE(miss.found);
    CHECK_FALSE(miss.pixel_box.has_value());
}

TEST_CASE("recognize_target: occluded target is not seen") {
    std::array<std::vector<VisibleFeature>, 5> features;
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    features[0].push_back(feature("target", pot, 0.6));
    auto noise = quiet();
    CHECK_FALSE(recognize_target(features, pot, noise).found);
}

TEST_CASE("recognize_target: forced false positive needs a same-color decoy") {
    NoiseProfile p;
    p.or_false_positive_rate = 1.0;
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    ObjectTag decoy_tag = tag(ObjectColor::green, "broom", ObjectCategory::household);

    std::array<std::vector<VisibleFeature>, 5> features;
    features[1].push_back(feature("decoy", decoy_tag));
    NoiseStream ns(p, 0);
    RecognitionAnswer a = recognize_target(features, pot, ns);
    CHECK(a.found);
    CHECK(a.window_id == "decoy");

    // no decoy in view: fp noise is a no-op
    std::array<std::vector<VisibleFeature>, 5> empty_views;
    ObjectTag other = tag(ObjectColor::red, "vase");
    empty_views[1].push_back(feature("red_one", other));
    NoiseStream ns2(p, 0);
    CHECK_FALSE(recognize_target(empty_views, pot, ns2).found);
}

TEST_CASE("recognize_target: false negative suppresses a true detection") {
    NoiseProfile p;
    p.or_false_negative_rate = 1.0;
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    std::array<std::vector<VisibleFeature>, 5> features;
    features[0].push_back(feature("target", pot));
    NoiseStream ns(p, 0);
    CHECK_FALSE(recognize_target(features, pot, ns).found);
}

TEST_CASE("recognize_target never fabricates a window id") {
    Rng rng(99);
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    NoiseProfile p;
    p.or_false_positive_rate = 0.5;
    p.or_false_negative_rate = 0.3;
    NoiseStream ns(p, 1);
    for (int trial = 0; trial < 300; ++trial) {
        std::array<std::vector<VisibleFeature>, 5> features;
        std::set<std::string> present;
        int n = rng.uniform_int(0, 6);
        for (int i = 0; i < n; ++i) {
            ObjectTag t = tag(static_cast<ObjectColor>(rng.uniform_int(0, 7)),
                              rng.bernoulli(0.3) ? "flower pot" : "broom");
            std::string id = "w" + std::to_string(i);
            features[static_cast<std::size_t>(rng.uniform_int(0, 4))].push_back(
                feature(id, t, rng.bernoulli(0.2) ? 0.7 : 0.0));
            present.insert(id);
        }
        RecognitionAnswer a = recognize_target(features, pot, ns);
        if (a.found) CHECK(present.count(a.window_id) == 1);
    }
}

TEST_CASE("noise streams are reproducible") {
    NoiseProfile p;
    p.or_false_positive_rate = 0.4;
    p.or_false_negative_rate = 0.4;
    p.refusal_rate = 0.3;
    p.parse_error_rate = 0.5;
    p.seed = 7;

    WorldModel w = wall_world(10, 3.0);
    DronePose pose{{-11, 0, 12}, 0.0};
    ObjectTag pot = tag(ObjectColor::green, "flower pot");
    std::array<std::vector<VisibleFeature>, 5> features;
    features[0].push_back(feature("t", pot));

    auto run_sequence = [&](std::uint64_t key) {
        NoiseStream ns(p, key);
        std::vector<int> results;
        for (int i = 0; i < 50; ++i) {
            results.push_back(parse_request("...", 3, pot, ns).target_floor);
            FloorCountAnswer fc = count_floors(w, pose, 1, ns);
            results.push_back(fc.refused ? -1 : fc.floors_visible);
            results.push_back(recognize_target(features, pot, ns).found ? 1 : 0);
        }
        return results;
    };
    CHECK(run_sequence(42) == run_sequence(42));
    CHECK(run_sequence(42) != run_sequence(43));
}

TEST_CASE("oracle answers equal the geometric oracle on fuzzed worlds with zero noise") {
    Rng rng(4);
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 200; ++seed) {
        WorldModel w = generate_world(seed);
        const Building& b = w.buildings[0];
        // pose at a random standoff in front of a random facade
        int facade = rng.uniform_int(0, static_cast<int>(b.footprint.size()) - 1);
        Vec2 a = b.footprint[static_cast<std::size_t>(facade)];
        Vec2 c = b.footprint[(static_cast<std::size_t>(facade) + 1) % b.footprint.size()];
        Vec2 n = b.facade_normal(facade);
        Vec2 mid = (a + c) * 0.5;
        double standoff = rng.uniform(6.0, 15.0);
        DronePose pose;
        pose.position = {mid.x + n.x * standoff, mid.y + n.y * standoff,
                         rng.uniform(1.0, b.height())};
        pose.yaw = std::atan2(-n.y, -n.x);

        auto noise = quiet(seed);
        FloorCountAnswer ans = count_floors(w, pose, 1, noise);
        CHECK_FALSE(ans.refused);
        CHECK(ans.floors_visible == count_floors_exact(w, pose, 1));
        ++checked;
    }
}

TEST_CASE("choose_direction: unique feasible candidate wins") {
    WorldModel w = wall_world(10, 3.0);
    ChoiceQuery q;
    q.pose = {{-20, 0, 12}, 0.0};
    q.distances = {0.2, 6.0, 0.2, 0.2, 0.2}; // only point 2 clears the deadlock bar
    q.bearings = {M_PI, M_PI, M_PI, M_PI, M_PI}; // away from the wall: safe
    auto ans = choose_direction(w, q, 1.0);
    REQUIRE(ans.has_value());
    CHECK(ans->point_index == 2);
}

TEST_CASE("choose_direction: symmetric candidates resolve to the middle") {
    WorldModel w; // empty world: everything feasible, no memory to score
    ChoiceQuery q;
    q.pose = {{0, 0, 10}, 0.0};
    q.distances = {5, 5, 5, 5, 5};
    q.bearings = {0.2, 0.1, 0.0, -0.1, -0.2};
    auto ans = choose_direction(w, q, 1.0);
    REQUIRE(ans.has_value());
    CHECK(ans->point_index == 3);
}

TEST_CASE("choose_direction refuses when nothing is safe") {
    WorldModel w = wall_world(10, 3.0);
    ChoiceQuery q;
    q.pose = {{-6.0, 0, 12}, 0.0}; // 1 m from the wall
    q.distances = {5, 5, 5, 5, 5};
    q.bearings = {0, 0, 0, 0, 0}; // every candidate flies into the facade
    auto ans = choose_direction(w, q, 1.0);
    CHECK_FALSE(ans.has_value());
}

TEST_CASE("center-only backend always answers 3") {
    WorldModel w = wall_world(10, 3.0);
    OracleBackendOptions opt;
    opt.center_only_choice = true;
    Backends b = make_oracle_backends(w, 4, tag(ObjectColor::green, "flower pot"), opt);
    ChoiceQuery q;
    q.distances = {9, 9, 0.1, 9, 9};
    q.bearings = {0, 0, 0, 0, 0};
    q.pose = {{-30, 0, 12}, 0.0};
    auto ans = b.choose(q);
    REQUIRE(ans.has_value());
    CHECK(ans->point_index == 3);
}

TEST_CASE("exploration memory counts unseen facade from candidate positions") {
    WorldModel w = wall_world(6, 3.0);
    ExplorationMemory mem = ExplorationMemory::for_building(w, 0);
    REQUIRE(mem.midpoints.size() > 100);

    Vec2 west_side{-20, 0};
    auto vis = mem.visible_from(w, west_side, 80.0);
    CHECK(vis.size() > 50);
    CHECK(mem.count_new(vis) == static_cast<int>(vis.size()));
    mem.mark_seen(vis);
    CHECK(mem.count_new(vis) == 0);

    // the east side is new territory
    auto vis_east = mem.visible_from(w, {20, 0}, 80.0);
    CHECK(mem.count_new(vis_east) > 0);
}
