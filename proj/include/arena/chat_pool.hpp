#pragma once

// Shared gossip board: agents post at the end of their analysis and read the
// next morning. Messages are never visible on the day they are posted.

#include <algorithm>
#include <string>
#include <vector>

#include "arena/common.hpp"

namespace arena {

struct ChatMessage {
    int date = 0;  // posting day
    std::string author_id;
    std::string text;
    int visible_from = 0;  // always date + 1
};

class ChatPool {
public:
    // Stores the message with next-day visibility; empty text is an error.
    void post(ChatMessage msg) {
        if (msg.text.empty()) throw validation_error("chat pool: empty message");
        msg.visible_from = msg.date + 1;
        messages_.push_back(std::move(msg));
    }

    // Messages visible on `date`, newest first, at most `limit`.
    std::vector<ChatMessage> fetch(int date, std::size_t limit = 5) const {
        std::vector<ChatMessage> out;
        for (auto it = messages_.rbegin(); it != messages_.rend() && out.size() < limit; ++it)
            if (it->visible_from <= date) out.push_back(*it);
        return out;
    }

    std::size_t size() const { return messages_.size(); }
    const std::vector<ChatMessage>& all() const { return messages_; }

private:
    std::vector<ChatMessage> messages_;
};

} // namespace arena
