#include "blockspec/presets.hpp"

#include <cmath>
#include <cstdlib>

namespace blockspec {

namespace {

ModelSpec toeplitz(int d) {
    // Offset o carries one selfadjoint name; entry (i,j) holds name |i-j|.
    std::vector<BlockName> names;
    for (int o = 0; o < d; ++o)
        names.push_back(BlockName{std::string(1, static_cast<char>('A' + o)), true, {}, 0.0});
    std::vector<std::optional<BlockRef>> entries(static_cast<std::size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            entries[i * d + j] = BlockRef{std::abs(i - j), false, 1.0};
    BlockGrid grid(d, std::move(names), std::move(entries));
    ModelSpec spec{derive_sigma(grid), DimensionProfile::square(d), std::move(grid)};
    return spec;
}

WishartSpec marchenko_pastur(const Rational& lambda) {
    if (lambda.num() <= 0) throw ValidationError("mp:<lambda> needs lambda > 0");
    // Sizes M : N = q : p give N/M = lambda; the sqrt(1+lambda) tap rescales
    // the 1/(M+N) entry normalization to the classical 1/M one, so the
    // recovered law is Marchenko-Pastur(lambda) itself.
    const double scale = std::sqrt(1.0 + lambda.value());
    std::vector<BlockName> names{BlockName{"H", false, {}, 0.0}};
    std::vector<std::optional<BlockRef>> hgrid{BlockRef{0, false, scale}};
    return WishartSpec(1, 1, std::move(names), std::move(hgrid), {lambda.den()},
                       {lambda.num()});
}

std::string tap_label(int l, int half, bool split) {
    std::string s = "T" + std::to_string(l + 1);
    if (split) s += (half == 0 ? "a" : "b");
    return s;
}

WishartSpec mimo(int K, int L, int ratio, bool rect_blocks) {
    if (K < 1 || L < 1) throw ValidationError("mimo preset needs K >= 1 and L >= 1");
    if (ratio != 1 && ratio != 2)
        throw ValidationError("mimo preset supports receive/transmit ratios 1 and 2");
    const int s = K + L - 1;

    if (rect_blocks || ratio == 1) {
        // K x (K+L-1) banded grid; row k holds taps T1..TL starting at column k.
        std::vector<BlockName> names;
        for (int l = 0; l < L; ++l)
            names.push_back(BlockName{tap_label(l, 0, false), false, {}, 0.0});
        std::vector<std::optional<BlockRef>> hgrid(static_cast<std::size_t>(K) * s);
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) hgrid[k * s + (k + l)] = BlockRef{l, false, 1.0};
        return WishartSpec(K, s, std::move(names), std::move(hgrid),
                           std::vector<std::int64_t>(K, ratio),
                           std::vector<std::int64_t>(s, 1));
    }

    // ratio 2, square blocks: each tap splits into independent top/bottom
    // halves and each frame contributes two block rows.
    std::vector<BlockName> names;
    for (int l = 0; l < L; ++l)
        for (int half = 0; half < 2; ++half)
            names.push_back(BlockName{tap_label(l, half, true), false, {}, 0.0});
    std::vector<std::optional<BlockRef>> hgrid(static_cast<std::size_t>(2 * K) * s);
    for (int k = 0; k < K; ++k)
        for (int half = 0; half < 2; ++half)
            for (int l = 0; l < L; ++l)
                hgrid[(2 * k + half) * s + (k + l)] = BlockRef{2 * l + half, false, 1.0};
    return WishartSpec(2 * K, s, std::move(names), std::move(hgrid),
                       std::vector<std::int64_t>(2 * K, 1),
                       std::vector<std::int64_t>(s, 1));
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = text.find(sep, pos);
        parts.push_back(text.substr(pos, next - pos));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return parts;
}

}  // namespace

AnySpec preset(const std::string& name) {
    AnySpec out;
    if (name == "toeplitz3") out.model = toeplitz(3);
    else if (name == "toeplitz4") out.model = toeplitz(4);
    else if (name == "toeplitz5") out.model = toeplitz(5);
    else if (name == "semicircle") {
        std::vector<BlockName> names{BlockName{"A", true, {}, 0.0}};
        std::vector<std::optional<BlockRef>> entries{BlockRef{0, false, 1.0}};
        BlockGrid grid(1, std::move(names), std::move(entries));
        out.model = ModelSpec{derive_sigma(grid), DimensionProfile::square(1), std::move(grid)};
    } else if (name.rfind("mp:", 0) == 0) {
        out.wishart = marchenko_pastur(Rational::parse(name.substr(3)));
    } else if (name.rfind("mimo:", 0) == 0 || name.rfind("mimo-rect:", 0) == 0) {
        const bool rect = name.rfind("mimo-rect:", 0) == 0;
        const auto args = split(name.substr(rect ? 10 : 5), ',');
        if (args.size() != 3)
            throw ValidationError("mimo preset wants K,L,ratio, e.g. mimo:4,4,1");
        out.wishart = mimo(std::stoi(args[0]), std::stoi(args[1]), std::stoi(args[2]), rect);
    } else {
        throw ValidationError("unknown preset '" + name + "'\n" + preset_help());
    }
    return out;
}

std::string preset_help() {
    return "presets: semicircle | toeplitz3 | toeplitz4 | toeplitz5 | mp:<lambda> | "
           "mimo:<K>,<L>,<ratio> | mimo-rect:<K>,<L>,<ratio>";
}

}  // namespace blockspec
