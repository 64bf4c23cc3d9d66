#include <fmt/format.h>

#include "electwit/runlog.hpp"

namespace electwit {

Platform replay_platform(const RunLog& log) {
    Platform platform;
    for (const auto& p : log.population) {
        if (p.role != Role::Eventor) platform.register_author(p.id, p.display_name);
    }
    auto diverged = [](const Record& r, const std::string& why) {
        return LoadError(LoadErrorKind::Domain, fmt::format("replay diverged at record {}: {}", r.seq, why));
    };
    for (const auto& r : log.records) {
        const auto* a = r.as<ActionRecord>();
        if (a == nullptr || !a->accepted) continue;
        switch (a->action) {
            case ActionKind::Post: {
                auto s = platform.submit_post(a->agent, a->text.value_or(""), r.time);
                if (!s.accepted()) throw diverged(r, "post rejected");
                if (!a->item || s.item->id != *a->item) throw diverged(r, "post id mismatch");
                if (s.item->text != a->text) throw diverged(r, "post text mismatch");
                break;
            }
            case ActionKind::Reply: {
                if (!a->target) throw diverged(r, "reply without target");
                auto s = platform.submit_comment(a->agent, *a->target, a->text.value_or(""), r.time);
                if (!s.accepted()) throw diverged(r, "reply rejected");
                if (!a->item || s.item->id != *a->item) throw diverged(r, "comment id mismatch");
                if (s.item->text != a->text) throw diverged(r, "comment text mismatch");
                break;
            }
            case ActionKind::Like: {
                if (!a->target) throw diverged(r, "like without target");
                auto s = platform.submit_like(a->agent, *a->target, r.time);
                if (!s.accepted()) throw diverged(r, "like rejected");
                break;
            }
            case ActionKind::Unknown: throw diverged(r, "accepted action of unknown kind");
        }
    }
    return platform;
}

}  // namespace electwit
