#pragma once

#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "pcount/types.hpp"

namespace testing_support {

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240611);
    return gen;
}

inline pcount::u64 uniform(pcount::u64 lo, pcount::u64 hi) {
    return std::uniform_int_distribution<pcount::u64>(lo, hi)(rng());
}

inline long double uniform_real(long double lo, long double hi) {
    return std::uniform_real_distribution<long double>(lo, hi)(rng());
}

inline std::string i128_text(pcount::i128 v) {
    if (v == 0) return "0";
    const bool neg = v < 0;
    pcount::u128 u = neg ? static_cast<pcount::u128>(-(v + 1)) + 1 : static_cast<pcount::u128>(v);
    std::string s;
    while (u != 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    return neg ? "-" + s : s;
}

inline nlohmann::json load_fixtures() {
    std::ifstream in(PCOUNT_FIXTURES);
    if (!in) throw std::runtime_error("cannot open fixtures file");
    return nlohmann::json::parse(in);
}

inline std::string fixture(const std::string& fn, pcount::u64 n) {
    const auto doc = load_fixtures();
    for (const auto& v : doc["values"])
        if (v["function"] == fn && v["n"].get<pcount::u64>() == n) return v["value"].get<std::string>();
    throw std::runtime_error("missing fixture " + fn);
}

}  // namespace testing_support
