// SPDX-License-Identifier: Apache-2.0
#include "doctest.h"
#include "oracles.hpp"

#include "ocdl/dictionary_io.hpp"

#include <cstring>
#include <limits>
#include <sstream>

using namespace ocdl;

namespace {

std::string serialize(const Dictionary& d)
{
    std::ostringstream out(std::ios::binary);
    write_dictionary(out, d);
    return out.str();
}

Dictionary parse(const std::string& bytes)
{
    std::istringstream in(bytes, std::ios::binary);
    return read_dictionary(in);
}

}  // namespace

TEST_CASE("dictionary file: bit-exact round trips")
{
    std::mt19937_64 rng(1);
    Dictionary odd(1, 1, 1);
    odd.taps[0] = -0.0;
    Dictionary special(2, 1, 2);
    special.taps << std::numeric_limits<double>::denorm_min(), 1.0 / 3.0, -1e300, 0.1;
    for (const Dictionary& d : {oracle::random_dictionary(4, 3, 5, rng), odd, special}) {
        const Dictionary back = parse(serialize(d));
        REQUIRE(back.num_filters == d.num_filters);
        CHECK(back.kernel_rows == d.kernel_rows);
        CHECK(back.kernel_cols == d.kernel_cols);
        CHECK(std::memcmp(back.taps.data(), d.taps.data(), sizeof(double) * d.taps.size()) == 0);
        CHECK(serialize(back) == serialize(d));
    }
}

TEST_CASE("dictionary file: header layout")
{
    Dictionary d(2, 3, 4);
    d.taps[0] = 1.0;
    const std::string b = serialize(d);
    CHECK(b.size() == 4 + 16 + 8 * 24);
    CHECK(b.substr(0, 4) == "OCDL");
    const unsigned char expect[] = {1, 0, 0, 0, 2, 0, 0, 0, 3, 0, 0, 0, 4, 0, 0, 0};
    CHECK(std::memcmp(b.data() + 4, expect, 16) == 0);
    // 1.0 = 0x3FF0000000000000, little-endian.
    CHECK(static_cast<unsigned char>(b[20 + 6]) == 0xF0);
    CHECK(static_cast<unsigned char>(b[20 + 7]) == 0x3F);
}

TEST_CASE("dictionary file: rejected inputs")
{
    std::mt19937_64 rng(2);
    const std::string good = serialize(oracle::random_dictionary(2, 2, 2, rng));
    std::string magic = good;
    magic[0] = 'X';
    CHECK_THROWS_AS(parse(magic), std::runtime_error);
    std::string version = good;
    version[4] = 2;
    CHECK_THROWS_AS(parse(version), std::runtime_error);
    std::string zero = good;
    zero[8] = 0;
    CHECK_THROWS_AS(parse(zero), std::runtime_error);
    CHECK_THROWS_AS(parse(good.substr(0, good.size() - 1)), std::runtime_error);
    CHECK_THROWS_AS(parse(good + "x"), std::runtime_error);
    CHECK_THROWS_AS(parse(""), std::runtime_error);
    CHECK_THROWS_AS(load_dictionary("/nonexistent/dict.ocdl"), std::runtime_error);
}

TEST_CASE("dictionary_grid: layout and normalization")
{
    std::mt19937_64 rng(3);
    const Dictionary d = oracle::random_dictionary(5, 3, 4, rng);
    const Image g = dictionary_grid(d);
    // 5 filters on a 3 x 3 grid of (3+1) x (4+1) cells plus a border.
    CHECK(g.rows() == 2 * 4 + 1);
    CHECK(g.cols() == 3 * 5 + 1);
    CHECK(g.minCoeff() == 0.0);
    CHECK(g.maxCoeff() == 1.0);
    CHECK(g.row(0).abs().maxCoeff() == 0.0);
    Dictionary flat_d(1, 2, 2);
    CHECK(dictionary_grid(flat_d).block(1, 1, 2, 2).minCoeff() == 0.5);
}
