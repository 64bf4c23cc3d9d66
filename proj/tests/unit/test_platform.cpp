#include <doctest.h>

#include <set>

#include "electwit/platform.hpp"
#include "electwit/rng.hpp"
#include "electwit/text.hpp"

using namespace electwit;

namespace {

Platform two_authors() {
    Platform p;
    p.register_author(AgentId("a"), "Alice");
    p.register_author(AgentId("b"), "Bob");
    return p;
}

const SimTime t0{1, 0};
const SimTime t1{1, 1};
const SimTime t2{1, 2};

}  // namespace

TEST_CASE("item ids render and parse strictly") {
    CHECK(ItemId{ItemKind::Post, 0}.str() == "p-0");
    CHECK(ItemId{ItemKind::Comment, 12}.str() == "c-12");
    CHECK(ItemId{ItemKind::Event, 3}.str() == "e-3");
    CHECK(ItemId::parse("p-7") == ItemId{ItemKind::Post, 7});
    CHECK_FALSE(ItemId::parse("p-07"));
    CHECK_FALSE(ItemId::parse("x-1"));
    CHECK_FALSE(ItemId::parse("p-"));
    CHECK_FALSE(ItemId::parse("p--1"));
    CHECK_FALSE(ItemId::parse(" p-1"));
}

TEST_CASE("clock labels run from 9:00") {
    CHECK(clock_label(0) == "9:00");
    CHECK(clock_label(8) == "17:00");
}

TEST_CASE("posts and comments receive sequential ids") {
    auto p = two_authors();
    CHECK(p.submit_post(AgentId("a"), "one", t0).item->id.str() == "p-0");
    CHECK(p.submit_post(AgentId("b"), "two", t0).item->id.str() == "p-1");
    CHECK(p.submit_comment(AgentId("b"), ItemId{ItemKind::Post, 0}, "re", t1).item->id.str() == "c-0");
    CHECK(p.submit_comment(AgentId("a"), ItemId{ItemKind::Comment, 0}, "re re", t2).item->id.str() == "c-1");
    CHECK(p.counts().interactions() == 4);
}

TEST_CASE("blank text is rejected and does not consume an id") {
    auto p = two_authors();
    auto s = p.submit_post(AgentId("a"), "  \n\t", t0);
    CHECK_FALSE(s.accepted());
    CHECK(s.rejection == RejectReason::EmptyText);
    CHECK(p.submit_post(AgentId("a"), "ok", t0).item->id.ordinal == 0);
}

TEST_CASE("unregistered authors cannot post or comment") {
    auto p = two_authors();
    CHECK(p.submit_post(AgentId("z"), "hi", t0).rejection == RejectReason::UnregisteredAuthor);
    p.submit_post(AgentId("a"), "hi", t0);
    CHECK(p.submit_comment(AgentId("z"), ItemId{ItemKind::Post, 0}, "hi", t1).rejection ==
          RejectReason::UnregisteredAuthor);
}

TEST_CASE("over-length text is truncated to 280 scalar values") {
    auto p = two_authors();
    std::string text;
    for (int i = 0; i < 300; ++i) text += "é";  // two bytes each
    auto s = p.submit_post(AgentId("a"), text, t0);
    REQUIRE(s.accepted());
    CHECK(s.truncated);
    CHECK(text::scalar_count(s.item->text) == kMaxMessageScalars);
    CHECK(s.item->text.size() == 2 * kMaxMessageScalars);

    auto exact = p.submit_post(AgentId("a"), std::string(280, 'x'), t0);
    CHECK_FALSE(exact.truncated);
}

TEST_CASE("invalid utf-8 is replaced before storage") {
    auto p = two_authors();
    auto s = p.submit_post(AgentId("a"), std::string("ok\xff\xfe"), t0);
    REQUIRE(s.accepted());
    CHECK(text::sanitize_utf8(s.item->text) == s.item->text);
    CHECK(s.item->text.rfind("ok", 0) == 0);
}

TEST_CASE("replies and likes need an existing, earlier target") {
    auto p = two_authors();
    CHECK(p.submit_comment(AgentId("a"), ItemId{ItemKind::Post, 0}, "x", t1).rejection == RejectReason::InvalidTarget);
    p.submit_post(AgentId("a"), "hello", t1);
    SUBCASE("same time is not visible") {
        CHECK(p.submit_like(AgentId("b"), ItemId{ItemKind::Post, 0}, t1).rejection == RejectReason::InvalidTarget);
        CHECK(p.submit_comment(AgentId("b"), ItemId{ItemKind::Post, 0}, "x", t1).rejection ==
              RejectReason::InvalidTarget);
    }
    SUBCASE("later time succeeds") {
        CHECK(p.submit_like(AgentId("b"), ItemId{ItemKind::Post, 0}, t2).accepted());
    }
    SUBCASE("events are never targets") {
        CHECK(p.submit_like(AgentId("b"), ItemId{ItemKind::Event, 0}, t2).rejection == RejectReason::InvalidTarget);
    }
}

TEST_CASE("second like by the same actor is a duplicate") {
    auto p = two_authors();
    p.submit_post(AgentId("a"), "hello", t0);
    const ItemId target{ItemKind::Post, 0};
    CHECK(p.submit_like(AgentId("b"), target, t1).accepted());
    CHECK(p.submit_like(AgentId("b"), target, t2).rejection == RejectReason::Duplicate);
    CHECK(p.submit_like(AgentId("a"), target, t2).accepted());  // self-like allowed
    CHECK(p.counts().likes == 2);
}

TEST_CASE("feed renders newest posts first with threaded comments") {
    auto p = two_authors();
    p.submit_post(AgentId("a"), "first", t0);                                  // p-0
    p.submit_post(AgentId("b"), "second\nline", t0);                           // p-1
    p.submit_comment(AgentId("b"), ItemId{ItemKind::Post, 0}, "reply", t1);     // c-0
    p.submit_comment(AgentId("a"), ItemId{ItemKind::Comment, 0}, "deeper", t2); // c-1
    p.submit_like(AgentId("b"), ItemId{ItemKind::Post, 0}, t1);
    p.submit_post(AgentId("a"), "third", t1);                                  // p-2

    // Hand-derived: p-2 (hour 1) first, then p-1 before p-0 (same hour, higher ordinal).
    const std::string expected_t2 =
        "FEED as of day 1 11:00 (4 items)\n"
        "[p-2] Alice (0♥): third\n"
        "[p-1] Bob (0♥): second\\nline\n"
        "[p-0] Alice (1♥): first\n"
        "  [c-0] Bob (0♥): reply\n";
    CHECK(p.render_feed(t2).rendered == expected_t2);
    CHECK(p.render_feed(t2).item_count == 4);

    const std::string expected_t1 =
        "FEED as of day 1 10:00 (2 items)\n"
        "[p-1] Bob (0♥): second\\nline\n"
        "[p-0] Alice (0♥): first\n";
    CHECK(p.render_feed(t1).rendered == expected_t1);

    CHECK(p.render_feed(SimTime{2, 0}).rendered.find("    [c-1] Alice (0♥): deeper\n") != std::string::npos);
    CHECK(p.render_feed(t0).rendered == "FEED as of day 1 9:00 (0 items)\n");
}

TEST_CASE("feed cap limits top-level posts") {
    auto p = two_authors();
    for (int i = 0; i < 5; ++i) p.submit_post(AgentId("a"), "m" + std::to_string(i), t0);
    const auto f = p.render_feed(t1, 2);
    CHECK(f.item_count == 2);
    CHECK(f.rendered.find("[p-4]") != std::string::npos);
    CHECK(f.rendered.find("[p-2]") == std::string::npos);
}

TEST_CASE("property: random submissions keep ids dense and texts bounded") {
    Rng rng(2024);
    Platform p;
    const std::vector<AgentId> authors{AgentId("a"), AgentId("b"), AgentId("c")};
    for (const auto& a : authors) p.register_author(a, a.str());
    std::size_t accepted_posts = 0, accepted_comments = 0, accepted_likes = 0;
    std::set<std::pair<std::string, ItemId>> liked;
    for (int i = 0; i < 2000; ++i) {
        const SimTime t{1 + i / 200, (i / 20) % 9};
        const auto& who = authors[static_cast<std::size_t>(rng.uniform_int(0, 2))];
        const auto op = rng.uniform_int(0, 2);
        const auto len = static_cast<std::size_t>(rng.uniform_int(0, 400));
        const std::string body(len, 'z');
        if (op == 0) {
            auto s = p.submit_post(who, body, t);
            CHECK(s.accepted() == (len > 0));
            if (s.accepted()) {
                CHECK(s.item->id.ordinal == accepted_posts++);
                CHECK(s.truncated == (len > kMaxMessageScalars));
            }
        } else {
            const ItemId target{rng.bernoulli(0.5) ? ItemKind::Post : ItemKind::Comment,
                                static_cast<std::uint64_t>(rng.uniform_int(0, 60))};
            const auto created = p.created_at(target);
            const bool visible = created && *created < t;
            if (op == 1) {
                auto s = p.submit_comment(who, target, body, t);
                CHECK(s.accepted() == (visible && len > 0));
                if (s.accepted()) CHECK(s.item->id.ordinal == accepted_comments++);
            } else {
                auto s = p.submit_like(who, target, t);
                const bool fresh = !liked.contains({who.str(), target});
                CHECK(s.accepted() == (visible && fresh));
                if (s.accepted()) {
                    liked.insert({who.str(), target});
                    ++accepted_likes;
                }
            }
        }
    }
    CHECK(p.counts().posts == accepted_posts);
    CHECK(p.counts().comments == accepted_comments);
    CHECK(p.counts().likes == accepted_likes);
    for (const auto& post : p.posts()) CHECK(text::scalar_count(post.text) <= kMaxMessageScalars);
    for (const auto& c : p.comments()) CHECK(text::scalar_count(c.text) <= kMaxMessageScalars);
}
