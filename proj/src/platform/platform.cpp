#include "electwit/platform.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "electwit/text.hpp"

namespace electwit {

const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::EmptyText: return "empty_text";
        case RejectReason::InvalidTarget: return "invalid_target";
        case RejectReason::Duplicate: return "duplicate";
        case RejectReason::UnregisteredAuthor: return "unregistered_author";
        case RejectReason::OverBudget: return "over_budget";
        case RejectReason::Malformed: return "malformed";
    }
    return "unknown";
}

std::optional<RejectReason> reject_reason_from_string(std::string_view s) {
    for (auto r : {RejectReason::EmptyText, RejectReason::InvalidTarget, RejectReason::Duplicate,
                   RejectReason::UnregisteredAuthor, RejectReason::OverBudget, RejectReason::Malformed}) {
        if (s == to_string(r)) return r;
    }
    return std::nullopt;
}

void Platform::register_author(const AgentId& id, std::string display_name) {
    authors_[id] = std::move(display_name);
}

bool Platform::is_registered(const AgentId& id) const { return authors_.contains(id); }

const std::string& Platform::display_name(const AgentId& id) const {
    auto it = authors_.find(id);
    return it != authors_.end() && !it->second.empty() ? it->second : id.str();
}

const Post* Platform::find_post(ItemId id) const {
    if (id.kind != ItemKind::Post || id.ordinal >= posts_.size()) return nullptr;
    return &posts_[id.ordinal];
}

const Comment* Platform::find_comment(ItemId id) const {
    if (id.kind != ItemKind::Comment || id.ordinal >= comments_.size()) return nullptr;
    return &comments_[id.ordinal];
}

std::optional<AgentId> Platform::author_of(ItemId id) const {
    if (const auto* p = find_post(id)) return p->author;
    if (const auto* c = find_comment(id)) return c->author;
    return std::nullopt;
}

std::optional<SimTime> Platform::created_at(ItemId id) const {
    if (const auto* p = find_post(id)) return p->time;
    if (const auto* c = find_comment(id)) return c->time;
    return std::nullopt;
}

bool Platform::visible_at(ItemId id, SimTime time) const {
    const auto created = created_at(id);
    return created && *created < time;
}

Submission<Post> Platform::submit_post(const AgentId& author, std::string_view raw, SimTime time) {
    Submission<Post> out;
    if (!is_registered(author)) {
        out.rejection = RejectReason::UnregisteredAuthor;
        return out;
    }
    const auto clean = text::sanitize_utf8(raw);
    if (text::is_blank(clean)) {
        out.rejection = RejectReason::EmptyText;
        return out;
    }
    auto cut = text::truncate_scalars(clean, kMaxMessageScalars);
    out.truncated = cut.truncated;
    posts_.push_back(Post{next_post_id(), author, std::move(cut.text), time, 0});
    out.item = posts_.back();
    return out;
}

Submission<Comment> Platform::submit_comment(const AgentId& author, ItemId parent, std::string_view raw,
                                             SimTime time) {
    Submission<Comment> out;
    if (!is_registered(author)) {
        out.rejection = RejectReason::UnregisteredAuthor;
        return out;
    }
    if (parent.kind == ItemKind::Event || !visible_at(parent, time)) {
        out.rejection = RejectReason::InvalidTarget;
        return out;
    }
    const auto clean = text::sanitize_utf8(raw);
    if (text::is_blank(clean)) {
        out.rejection = RejectReason::EmptyText;
        return out;
    }
    auto cut = text::truncate_scalars(clean, kMaxMessageScalars);
    out.truncated = cut.truncated;
    comments_.push_back(Comment{next_comment_id(), parent, author, std::move(cut.text), time, 0});
    out.item = comments_.back();
    return out;
}

Submission<Like> Platform::submit_like(const AgentId& actor, ItemId target, SimTime time) {
    Submission<Like> out;
    if (target.kind == ItemKind::Event || !visible_at(target, time)) {
        out.rejection = RejectReason::InvalidTarget;
        return out;
    }
    if (!like_keys_.emplace(actor, target).second) {
        out.rejection = RejectReason::Duplicate;
        return out;
    }
    if (target.kind == ItemKind::Post) {
        ++posts_[target.ordinal].like_count;
    } else {
        ++comments_[target.ordinal].like_count;
    }
    likes_.push_back(Like{actor, target, time});
    out.item = likes_.back();
    return out;
}

Feed Platform::render_feed(SimTime snapshot, std::size_t max_posts) const {
    std::vector<const Post*> visible;
    for (const auto& p : posts_) {
        if (p.time < snapshot) visible.push_back(&p);
    }
    std::sort(visible.begin(), visible.end(), [](const Post* a, const Post* b) {
        if (a->time != b->time) return a->time > b->time;
        return a->id.ordinal > b->id.ordinal;
    });
    if (max_posts != 0 && visible.size() > max_posts) visible.resize(max_posts);

    std::map<ItemId, int> like_counts;
    for (const auto& l : likes_) {
        if (l.time < snapshot) ++like_counts[l.target];
    }

    // Children per parent, ascending ordinal since comments_ is ordinal-ordered.
    std::map<ItemId, std::vector<const Comment*>> children;
    for (const auto& c : comments_) {
        if (c.time < snapshot) children[c.parent].push_back(&c);
    }

    std::string body;
    std::size_t count = 0;
    auto emit = [&](ItemId id, const AgentId& author, const std::string& msg, int depth) {
        const auto likes = like_counts.find(id);
        body.append(static_cast<std::size_t>(depth) * 2, ' ');
        body += fmt::format("[{}] {} ({}♥): {}\n", id.str(), display_name(author),
                            likes == like_counts.end() ? 0 : likes->second, text::escape_line(msg));
        ++count;
    };
    auto emit_thread = [&](auto&& self, ItemId parent, int depth) -> void {
        auto it = children.find(parent);
        if (it == children.end()) return;
        for (const auto* c : it->second) {
            emit(c->id, c->author, c->text, depth);
            self(self, c->id, depth + 1);
        }
    };
    for (const auto* p : visible) {
        emit(p->id, p->author, p->text, 0);
        emit_thread(emit_thread, p->id, 1);
    }
    Feed feed;
    feed.item_count = count;
    feed.rendered = fmt::format("FEED as of day {} {} ({} items)\n", snapshot.day, clock_label(snapshot.hour), count) + body;
    return feed;
}

}  // namespace electwit
