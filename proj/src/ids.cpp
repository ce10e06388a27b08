#include "photonet/ids.hpp"

#include "photonet/errors.hpp"

namespace photonet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
    case ErrorKind::parse: return "parse";
    case ErrorKind::structural: return "structural";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::parameter: return "parameter";
    case ErrorKind::unknown_target: return "unknown target";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::coverage: return "coverage";
    case ErrorKind::domain: return "domain";
    case ErrorKind::infinite_loss: return "infinite loss";
    case ErrorKind::undefined_rate: return "undefined rate";
    case ErrorKind::undefined_density: return "undefined density";
    case ErrorKind::comparison: return "comparison";
  }
  return "unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return 2;
    case ErrorKind::usage: return 64;
    default: return 65;
  }
}

IdentityId::IdentityId(std::string token) : token_(std::move(token)) {
  if (token_.empty()) {
    throw Error(ErrorKind::precondition, "identity label must not be empty");
  }
}

PhotoId::PhotoId(std::string photo, std::optional<std::string> album)
    : photo_(std::move(photo)), album_(std::move(album)) {
  if (photo_.empty()) {
    throw Error(ErrorKind::precondition, "photo id must not be empty");
  }
  if (photo_.find('/') != std::string::npos) {
    throw Error(ErrorKind::precondition, "photo id must not contain '/': " + photo_);
  }
  if (album_) {
    if (album_->empty()) album_.reset();
    else if (album_->find('/') != std::string::npos) {
      throw Error(ErrorKind::precondition,
                  "album id must not contain '/': " + *album_);
    }
  }
}

PhotoId PhotoId::from_key(std::string_view key) {
  auto slash = key.find('/');
  if (slash == std::string_view::npos) return PhotoId(std::string(key));
  return PhotoId(std::string(key.substr(slash + 1)),
                 std::string(key.substr(0, slash)));
}

std::string PhotoId::key() const {
  return album_ ? *album_ + "/" + photo_ : photo_;
}

}  // namespace photonet
