#include "rdal/errors.hpp"

namespace rdal {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Precondition: return "Precondition";
    case ErrorCode::InputError: return "InputError";
    case ErrorCode::ParameterError: return "ParameterError";
    case ErrorCode::EmptyVersionSpace: return "EmptyVersionSpace";
    case ErrorCode::ZeroMassRegion: return "ZeroMassRegion";
    case ErrorCode::WrongSetting: return "WrongSetting";
    case ErrorCode::RoundCapExceeded: return "RoundCapExceeded";
    }
    return "Unknown";
}

} // namespace rdal
