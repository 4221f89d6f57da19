#ifndef SICUT_TESTS_FIXTURES_HPP
#define SICUT_TESTS_FIXTURES_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sicut/model.hpp"

namespace fixtures {

struct Planted {
    sicut::Dataset data;
    sicut::Embedding embedding;
    std::vector<std::size_t> truth;
    std::vector<std::size_t> discriminating;
};

// Blob c shifts attribute c by `separation` standard deviations; the other attributes are noise.
// Point i belongs to blob i % blobs. Embedding coordinates are the blob centre plus unit noise.
inline Planted planted_blobs(std::size_t n, std::size_t blobs = 3, std::size_t noise_real = 4,
                             std::size_t noise_bool = 3, double separation = 5.0, std::uint64_t seed = 7) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    std::vector<sicut::Attribute> schema;
    for (std::size_t j = 0; j < blobs; ++j) {
        schema.push_back({"signal" + std::to_string(j), sicut::AttributeType::real});
    }
    for (std::size_t j = 0; j < noise_real; ++j) {
        schema.push_back({"noise" + std::to_string(j), sicut::AttributeType::real});
    }
    for (std::size_t j = 0; j < noise_bool; ++j) {
        schema.push_back({"flag" + std::to_string(j), sicut::AttributeType::boolean});
    }

    Planted out;
    std::vector<double> values;
    std::vector<sicut::Embedding::Point> coords;
    const double radius = 20.0;
    const double pi = std::acos(-1.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % blobs;
        out.truth.push_back(c);
        for (std::size_t j = 0; j < blobs; ++j) {
            values.push_back(unit(rng) + (j == c ? separation : 0.0));
        }
        for (std::size_t j = 0; j < noise_real; ++j) {
            values.push_back(unit(rng));
        }
        for (std::size_t j = 0; j < noise_bool; ++j) {
            values.push_back(coin(rng) ? 1.0 : 0.0);
        }
        const double angle = 2.0 * pi * static_cast<double>(c) / static_cast<double>(blobs);
        coords.push_back({radius * std::cos(angle) + unit(rng), radius * std::sin(angle) + unit(rng)});
    }
    for (std::size_t j = 0; j < blobs; ++j) {
        out.discriminating.push_back(j);
    }
    out.data = sicut::Dataset(std::move(schema), std::move(values));
    out.embedding = sicut::Embedding(std::move(coords));
    return out;
}

// Two blobs that differ only in attribute `signal` of `m` real attributes.
inline Planted two_blobs_one_signal(std::size_t n, std::size_t m, std::size_t signal, std::uint64_t seed = 11) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<sicut::Attribute> schema;
    for (std::size_t j = 0; j < m; ++j) {
        schema.push_back({"x" + std::to_string(j), sicut::AttributeType::real});
    }
    Planted out;
    std::vector<double> values;
    std::vector<sicut::Embedding::Point> coords;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = i % 2;
        out.truth.push_back(c);
        for (std::size_t j = 0; j < m; ++j) {
            values.push_back(unit(rng) + (j == signal ? (c == 0 ? -2.5 : 2.5) : 0.0));
        }
        coords.push_back({(c == 0 ? -15.0 : 15.0) + unit(rng), unit(rng)});
    }
    out.discriminating = {signal};
    out.data = sicut::Dataset(std::move(schema), std::move(values));
    out.embedding = sicut::Embedding(std::move(coords));
    return out;
}

// Mixed-type data with no planted structure, for property tests.
inline sicut::Dataset random_dataset(std::size_t n, std::size_t m_real, std::size_t m_bool, std::mt19937_64& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> shift(-3.0, 3.0);
    std::uniform_real_distribution<double> rate(0.1, 0.9);
    std::vector<sicut::Attribute> schema;
    std::vector<double> offsets;
    std::vector<double> rates;
    for (std::size_t j = 0; j < m_real; ++j) {
        schema.push_back({"r" + std::to_string(j), sicut::AttributeType::real});
        offsets.push_back(shift(rng));
    }
    for (std::size_t j = 0; j < m_bool; ++j) {
        schema.push_back({"b" + std::to_string(j), sicut::AttributeType::boolean});
        rates.push_back(rate(rng));
    }
    std::vector<double> values;
    for (std::size_t i = 0; i < n; ++i) {
        // A point-dependent drift gives nearby points correlated values.
        const double drift = static_cast<double>(i % 4);
        for (std::size_t j = 0; j < m_real; ++j) {
            values.push_back(offsets[j] + drift * (j % 2 == 0 ? 1.0 : -0.5) + unit(rng));
        }
        for (std::size_t j = 0; j < m_bool; ++j) {
            std::bernoulli_distribution flip(std::min(0.95, rates[j] + 0.1 * drift));
            values.push_back(flip(rng) ? 1.0 : 0.0);
        }
    }
    return sicut::Dataset(std::move(schema), std::move(values));
}

inline sicut::Embedding random_embedding(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<sicut::Embedding::Point> coords;
    for (std::size_t i = 0; i < n; ++i) {
        const double drift = static_cast<double>(i % 4) * 4.0;
        coords.push_back({drift + unit(rng), unit(rng)});
    }
    return sicut::Embedding(std::move(coords));
}

inline std::string to_csv(const sicut::Dataset& data) {
    std::string out;
    for (std::size_t j = 0; j < data.m(); ++j) {
        out += (j ? "," : "") + data.attribute(j).name;
    }
    out += "\n";
    char buf[32];
    for (std::size_t i = 0; i < data.n(); ++i) {
        for (std::size_t j = 0; j < data.m(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", data.at(i, j));
            out += (j ? "," : "") + std::string(buf);
        }
        out += "\n";
    }
    return out;
}

inline std::string to_csv(const sicut::Embedding& emb) {
    std::string out = "x,y\n";
    char buf[64];
    for (std::size_t i = 0; i < emb.n(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", emb[i].x, emb[i].y);
        out += buf;
    }
    return out;
}

}  // namespace fixtures

#endif
