#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>

namespace tmkit {

// Index into one of the StaticModel collections. The tag keeps the four
// id spaces from mixing.
template <class Tag>
struct Id {
    std::uint32_t value = 0;

    constexpr std::size_t index() const { return value; }
    constexpr auto operator<=>(const Id&) const = default;
};

struct ThimacTag;
struct ActionTag;
struct ArcTag;
struct EventTag;

using ThimacId = Id<ThimacTag>;
using ActionId = Id<ActionTag>;
using ArcId = Id<ArcTag>;
using EventId = Id<EventTag>;

}  // namespace tmkit

template <class Tag>
struct std::hash<tmkit::Id<Tag>> {
    std::size_t operator()(const tmkit::Id<Tag>& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
