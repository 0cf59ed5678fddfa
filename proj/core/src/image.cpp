#include "abcdquant/image.hpp"

namespace abcdq {

GrayImage luminance(const RasterImage& img) {
    GrayImage out(img.width(), img.height());
    const auto& px = img.pixels();
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            out.at(x, y) = luma(px[static_cast<std::size_t>(y) * img.width() + x]);
    return out;
}

double mask_iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw InvalidInput("mask_iou: dimension mismatch");
    std::size_t inter = 0, uni = 0;
    const auto& ba = a.bits();
    const auto& bb = b.bits();
    for (std::size_t i = 0; i < ba.size(); ++i) {
        const bool sa = ba[i] != 0, sb = bb[i] != 0;
        inter += (sa && sb) ? 1 : 0;
        uni += (sa || sb) ? 1 : 0;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace abcdq
