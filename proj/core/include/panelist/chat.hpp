#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace panelist {

enum class Role { System, User, Assistant };

std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view s);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

using Conversation = std::vector<ChatMessage>;

}  // namespace panelist
