#include "ts2img/matrix.hpp"

#include <stdexcept>

namespace ts2img {

std::string encoder_kind_name(EncoderKind kind) {
    switch (kind) {
    case EncoderKind::None: return "none";
    case EncoderKind::Gaf: return "gaf";
    case EncoderKind::Mtf: return "mtf";
    case EncoderKind::Rp: return "rp";
    case EncoderKind::Gs: return "gs";
    case EncoderKind::Sp: return "sp";
    case EncoderKind::Sc: return "sc";
    }
    throw std::invalid_argument("unknown encoder kind");
}

std::string encoder_variant_name(EncoderVariant variant) {
    switch (variant) {
    case EncoderVariant::Original: return "original";
    case EncoderVariant::Modified: return "modified";
    case EncoderVariant::GsP255: return "p255";
    case EncoderVariant::GsP1: return "p1";
    case EncoderVariant::GsMinMax: return "minmax";
    }
    throw std::invalid_argument("unknown encoder variant");
}

}  // namespace ts2img
