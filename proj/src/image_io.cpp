// SPDX-License-Identifier: Apache-2.0
#include "ocdl/data.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <stdexcept>

namespace ocdl {
namespace {

namespace fs = std::filesystem;

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

std::string lower_extension(const fs::path& p)
{
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

[[noreturn]] void fail(const fs::path& p, const std::string& what)
{
    throw std::runtime_error(p.string() + ": " + what);
}

Image from_channels(const std::vector<double>& v, Index rows, Index cols, int channels, double maxval)
{
    Image img(rows, cols);
    for (Index i = 0; i < rows * cols; ++i) {
        const double* px = v.data() + i * channels;
        img.data()[i] = (channels == 1 ? px[0] : kLumaR * px[0] + kLumaG * px[1] + kLumaB * px[2]) / maxval;
    }
    return img;
}

// Netpbm header tokens are separated by whitespace; '#' starts a comment.
long read_header_int(std::istream& in, const fs::path& p)
{
    int c = in.peek();
    while (c != EOF && (std::isspace(c) || c == '#')) {
        if (c == '#')
            in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
        else
            in.get();
        c = in.peek();
    }
    long v = -1;
    if (!(in >> v) || v < 0)
        fail(p, "malformed netpbm header");
    return v;
}

Image load_pnm(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        fail(p, "cannot open");
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || (magic[1] != '2' && magic[1] != '3' && magic[1] != '5' && magic[1] != '6'))
        fail(p, "unsupported netpbm type");
    const bool ascii = magic[1] == '2' || magic[1] == '3';
    const int channels = (magic[1] == '3' || magic[1] == '6') ? 3 : 1;
    const long cols = read_header_int(in, p);
    const long rows = read_header_int(in, p);
    const long maxval = read_header_int(in, p);
    if (cols < 1 || rows < 1 || maxval < 1 || maxval > 65535)
        fail(p, "bad netpbm dimensions or maxval");

    const std::size_t count = static_cast<std::size_t>(rows * cols * channels);
    std::vector<double> v(count);
    if (ascii) {
        for (auto& x : v) {
            long sample = 0;
            if (!(in >> sample))
                fail(p, "truncated pixel data");
            x = static_cast<double>(sample);
        }
    } else {
        in.get();  // single whitespace byte after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(count * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
        if (in.gcount() != static_cast<std::streamsize>(raw.size()))
            fail(p, "truncated pixel data");
        for (std::size_t i = 0; i < count; ++i)
            v[i] = bytes == 1 ? raw[i] : raw[2 * i] * 256.0 + raw[2 * i + 1];
    }
    return from_channels(v, rows, cols, channels, static_cast<double>(maxval));
}

Image load_png(const fs::path& p)
{
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, p.c_str()))
        fail(p, image.message);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    std::vector<png_byte> buf(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
        png_image_free(&image);
        fail(p, image.message);
    }
    const std::vector<double> v(buf.begin(), buf.end());
    return from_channels(v, image.height, image.width, color ? 3 : 1, 255.0);
}

std::vector<unsigned char> to_bytes(const Image& img)
{
    std::vector<unsigned char> out(static_cast<std::size_t>(img.size()));
    for (Index i = 0; i < img.size(); ++i)
        out[i] = static_cast<unsigned char>(std::lround(std::clamp(img.data()[i], 0.0, 1.0) * 255.0));
    return out;
}

}  // namespace

Image load_grayscale(const fs::path& path)
{
    if (!fs::is_regular_file(path))
        fail(path, "not a readable file");
    return lower_extension(path) == ".png" ? load_png(path) : load_pnm(path);
}

void save_grayscale(const fs::path& path, const Image& img)
{
    if (img.size() == 0)
        throw std::invalid_argument("save_grayscale: empty image");
    const std::vector<unsigned char> bytes = to_bytes(img);
    if (lower_extension(path) == ".png") {
        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        image.width = static_cast<png_uint_32>(img.cols());
        image.height = static_cast<png_uint_32>(img.rows());
        image.format = PNG_FORMAT_GRAY;
        if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr))
            fail(path, image.message);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(path, "cannot open for writing");
    out << "P5\n" << img.cols() << ' ' << img.rows() << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        fail(path, "write failed");
}

Mask load_mask(const fs::path& path)
{
    const Image img = load_grayscale(path);
    return (img > 0.0).cast<double>();
}

void save_mask(const fs::path& path, const Mask& w)
{
    validate_mask(w, shape_of(w));
    save_grayscale(path, w);
}

std::vector<fs::path> list_images(const fs::path& dir)
{
    if (!fs::is_directory(dir))
        throw std::runtime_error(dir.string() + ": not a directory");
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file())
            continue;
        const std::string name = e.path().filename().string();
        if (name.find(".mask.") != std::string::npos)
            continue;
        const std::string ext = lower_extension(e.path());
        if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm" || ext == ".png")
            out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ocdl
