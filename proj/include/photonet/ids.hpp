#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace photonet {

/// Opaque identity label. Never empty; compares bytewise.
class IdentityId {
 public:
  explicit IdentityId(std::string token);

  const std::string& str() const noexcept { return token_; }

  friend bool operator==(const IdentityId&, const IdentityId&) = default;
  friend std::strong_ordering operator<=>(const IdentityId& a,
                                          const IdentityId& b) {
    return a.token_.compare(b.token_) <=> 0;
  }
  friend std::ostream& operator<<(std::ostream& os, const IdentityId& id) {
    return os << id.token_;
  }

 private:
  std::string token_;
};

/// A photo, optionally qualified by the album it belongs to.
///
/// Photos are referenced in flat files by their key: `photo` when there is no
/// album, `album/photo` otherwise. Neither part may contain '/', so keys round-trip.
class PhotoId {
 public:
  explicit PhotoId(std::string photo, std::optional<std::string> album = {});

  /// Inverse of key(): everything before the first '/' is the album.
  static PhotoId from_key(std::string_view key);

  const std::string& photo() const noexcept { return photo_; }
  const std::optional<std::string>& album() const noexcept { return album_; }
  std::string key() const;

  friend bool operator==(const PhotoId&, const PhotoId&) = default;
  friend std::strong_ordering operator<=>(const PhotoId& a, const PhotoId& b) {
    if (auto c = a.photo_.compare(b.photo_) <=> 0; c != 0) return c;
    return a.album_ <=> b.album_;
  }
  friend std::ostream& operator<<(std::ostream& os, const PhotoId& p) {
    return os << p.key();
  }

 private:
  std::string photo_;
  std::optional<std::string> album_;
};

}  // namespace photonet

template <>
struct std::hash<photonet::IdentityId> {
  std::size_t operator()(const photonet::IdentityId& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};
