#pragma once

#include <span>
#include <string>
#include <string_view>

namespace tmkit {

struct SourceSpan {
    std::string file;
    int line = 1;    // 1-based
    int column = 1;  // 1-based

    bool operator==(const SourceSpan&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;  // TM[0-9]{4}
    std::string message;
    SourceSpan span;

    bool operator==(const Diagnostic&) const = default;
};

// Stable diagnostic codes. TM00xx model syntax and references, TM01xx
// scenarios, TM02xx validator rules.
namespace codes {
inline constexpr std::string_view kSyntax = "TM0001";
inline constexpr std::string_view kUnknownReference = "TM0002";
inline constexpr std::string_view kIllegalFlow = "TM0003";
inline constexpr std::string_view kDuplicateName = "TM0004";
inline constexpr std::string_view kAmbiguousPath = "TM0005";
inline constexpr std::string_view kBadRegion = "TM0006";
inline constexpr std::string_view kSelfTrigger = "TM0007";
inline constexpr std::string_view kBadLift = "TM0008";

inline constexpr std::string_view kScenarioSyntax = "TM0101";
inline constexpr std::string_view kUnknownEvent = "TM0102";
inline constexpr std::string_view kSlotOutOfHorizon = "TM0103";
inline constexpr std::string_view kPersistOnPotentialize = "TM0104";

inline constexpr std::string_view kNeverCreated = "TM0201";           // V1
inline constexpr std::string_view kIntraMachineTrigger = "TM0203";    // V3
inline constexpr std::string_view kMalformedRegion = "TM0204";        // V4
inline constexpr std::string_view kContainmentCycle = "TM0205";       // V5
inline constexpr std::string_view kEventIdentity = "TM0206";          // V6
inline constexpr std::string_view kDormantTrigger = "TM0301";
inline constexpr std::string_view kAmbiguousLift = "TM0302";
}  // namespace codes

bool is_valid_code(std::string_view code);
bool has_errors(std::span<const Diagnostic> diagnostics);

// "file:line:col: error TM0003: message". With color, severity is wrapped
// in ANSI escapes.
std::string format_diagnostic(const Diagnostic& d, bool color = false);

}  // namespace tmkit
