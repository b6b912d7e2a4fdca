// SPDX-License-Identifier: Apache-2.0
#include "ocdl/dictionary_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ocdl {
namespace {

constexpr std::array<char, 4> kMagic = {'O', 'C', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kMaxDim = 1u << 16;

template <class U>
void put_le(std::ostream& out, U v)
{
    char b[sizeof(U)];
    for (std::size_t i = 0; i < sizeof(U); ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b, sizeof(U));
}

template <class U>
U get_le(std::istream& in)
{
    unsigned char b[sizeof(U)];
    in.read(reinterpret_cast<char*>(b), sizeof(U));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(U)))
        throw std::runtime_error("dictionary file: truncated");
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
        v |= static_cast<U>(b[i]) << (8 * i);
    return v;
}

}  // namespace

void write_dictionary(std::ostream& out, const Dictionary& d)
{
    if (d.num_filters < 1 || d.kernel_rows < 1 || d.kernel_cols < 1 || d.taps.size() != d.num_filters * d.filter_size())
        throw std::invalid_argument("write_dictionary: malformed dictionary");
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.num_filters));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.kernel_rows));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d.kernel_cols));
    for (Index i = 0; i < d.taps.size(); ++i)
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(d.taps[i]));
    if (!out)
        throw std::runtime_error("dictionary file: write failed");
}

Dictionary read_dictionary(std::istream& in)
{
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kMagic)
        throw std::runtime_error("dictionary file: bad magic");
    const auto version = get_le<std::uint32_t>(in);
    if (version != kVersion)
        throw std::runtime_error("dictionary file: unsupported version " + std::to_string(version));
    const auto m = get_le<std::uint32_t>(in);
    const auto kr = get_le<std::uint32_t>(in);
    const auto kc = get_le<std::uint32_t>(in);
    if (m < 1 || kr < 1 || kc < 1 || m > kMaxDim || kr > kMaxDim || kc > kMaxDim)
        throw std::runtime_error("dictionary file: bad dimensions");
    Dictionary d(m, kr, kc);
    for (Index i = 0; i < d.taps.size(); ++i)
        d.taps[i] = std::bit_cast<double>(get_le<std::uint64_t>(in));
    if (in.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("dictionary file: trailing bytes");
    return d;
}

void save_dictionary(const std::filesystem::path& path, const Dictionary& d)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error(path.string() + ": cannot open for writing");
    write_dictionary(out, d);
}

Dictionary load_dictionary(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error(path.string() + ": cannot open");
    return read_dictionary(in);
}

Image dictionary_grid(const Dictionary& d)
{
    const Index M = d.num_filters;
    const Index gc = static_cast<Index>(std::ceil(std::sqrt(static_cast<double>(M))));
    const Index gr = (M + gc - 1) / gc;
    const Index cell_r = d.kernel_rows + 1;
    const Index cell_c = d.kernel_cols + 1;
    Image grid = Image::Zero(gr * cell_r + 1, gc * cell_c + 1);
    for (Index m = 0; m < M; ++m) {
        Image f = d.filter_image(m);
        const double lo = f.minCoeff();
        const double hi = f.maxCoeff();
        f = hi > lo ? Image((f - lo) / (hi - lo)) : Image(Image::Constant(f.rows(), f.cols(), 0.5));
        grid.block((m / gc) * cell_r + 1, (m % gc) * cell_c + 1, d.kernel_rows, d.kernel_cols) = f;
    }
    return grid;
}

}  // namespace ocdl
