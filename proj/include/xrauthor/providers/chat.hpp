#pragma once

#include <optional>
#include <string>
#include <vector>

namespace xrauthor::providers {

enum class Role { User, Assistant };

struct ChatMessage {
  Role role = Role::User;
  std::string text;
  // URL of an image to attach; honored only by image-capable providers.
  std::optional<std::string> image_ref;
};

struct ChatParams {
  int max_tokens = 4096;
  double temperature = 0.2;
};

struct ChatRequest {
  // Agent definition, sent verbatim.
  std::string system;
  // Machine output format instructions, appended after `system` on the wire.
  std::string output_contract;
  std::vector<ChatMessage> messages;
  ChatParams params;
};

struct TokenUsage {
  int input_tokens = 0;
  int output_tokens = 0;
};

struct ChatReply {
  std::string text;
  TokenUsage usage;
};

// Throws InvalidArgument unless messages are non-empty and alternate roles
// starting with the user.
void validate(const ChatRequest& request);

// The full system text a provider puts on the wire.
std::string wire_system_text(const ChatRequest& request);

// Stable content hash of (system, output_contract, messages); sampling
// parameters are excluded. Used to key mock fixtures.
std::string fixture_key(const ChatRequest& request);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;

  ChatReply chat(const ChatRequest& request);

  virtual bool supports_images() const = 0;
  virtual std::string name() const = 0;

 protected:
  virtual ChatReply do_chat(const ChatRequest& request) = 0;
};

}  // namespace xrauthor::providers
