#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "electwit/ids.hpp"

namespace electwit {

inline constexpr std::size_t kMaxMessageScalars = 280;

struct Post {
    ItemId id;
    AgentId author;
    std::string text;
    SimTime time;
    int like_count = 0;
};

struct Comment {
    ItemId id;
    ItemId parent;
    AgentId author;
    std::string text;
    SimTime time;
    int like_count = 0;
};

struct Like {
    AgentId actor;
    ItemId target;
    SimTime time;
};

enum class RejectReason { EmptyText, InvalidTarget, Duplicate, UnregisteredAuthor, OverBudget, Malformed };

const char* to_string(RejectReason r);
std::optional<RejectReason> reject_reason_from_string(std::string_view s);

/// Outcome of one submission. Rejections are ordinary results, not errors.
template <class T>
struct Submission {
    std::optional<T> item;
    std::optional<RejectReason> rejection;
    bool truncated = false;

    bool accepted() const noexcept { return item.has_value(); }
};

struct Feed {
    std::string rendered;
    std::size_t item_count = 0;
};

struct PlatformCounts {
    std::size_t posts = 0;
    std::size_t comments = 0;
    std::size_t likes = 0;

    std::size_t interactions() const noexcept { return posts + comments + likes; }
};

/// Shared timeline state. Single writer; `render_feed` is const and may be
/// called from any number of readers once mutation for the hour is done.
///
/// A reply or like target is valid only if it was created strictly before
/// the acting time. Every action within one hour step carries the same
/// SimTime, so items created during the hour are invisible to that hour's
/// actions, which gives the engine its snapshot semantics for free.
class Platform {
public:
    void register_author(const AgentId& id, std::string display_name);
    bool is_registered(const AgentId& id) const;

    Submission<Post> submit_post(const AgentId& author, std::string_view text, SimTime time);
    Submission<Comment> submit_comment(const AgentId& author, ItemId parent, std::string_view text, SimTime time);
    Submission<Like> submit_like(const AgentId& actor, ItemId target, SimTime time);

    /// Deterministic rendering of everything created before `snapshot`.
    /// `max_posts` keeps only the newest threads (0 = unlimited).
    Feed render_feed(SimTime snapshot, std::size_t max_posts = 0) const;

    const std::vector<Post>& posts() const noexcept { return posts_; }
    const std::vector<Comment>& comments() const noexcept { return comments_; }
    const std::vector<Like>& likes() const noexcept { return likes_; }

    const Post* find_post(ItemId id) const;
    const Comment* find_comment(ItemId id) const;
    std::optional<AgentId> author_of(ItemId id) const;
    std::optional<SimTime> created_at(ItemId id) const;

    PlatformCounts counts() const noexcept { return {posts_.size(), comments_.size(), likes_.size()}; }

    ItemId next_post_id() const noexcept { return {ItemKind::Post, posts_.size()}; }
    ItemId next_comment_id() const noexcept { return {ItemKind::Comment, comments_.size()}; }

private:
    bool visible_at(ItemId id, SimTime time) const;
    const std::string& display_name(const AgentId& id) const;

    std::map<AgentId, std::string> authors_;
    std::vector<Post> posts_;
    std::vector<Comment> comments_;
    std::vector<Like> likes_;
    std::set<std::pair<AgentId, ItemId>> like_keys_;
};

}  // namespace electwit
