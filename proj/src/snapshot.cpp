#include "bootperc/snapshot.hpp"

#include <nlohmann/json.hpp>
#include <stdexcept>

namespace bootperc {

static const char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const std::vector<std::uint8_t>& data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    for (std::size_t i = 0; i < data.size(); i += 3) {
        std::uint32_t buf = static_cast<std::uint32_t>(data[i]) << 16;
        if (i + 1 < data.size()) buf |= static_cast<std::uint32_t>(data[i + 1]) << 8;
        if (i + 2 < data.size()) buf |= static_cast<std::uint32_t>(data[i + 2]);
        out.push_back(kB64Alphabet[(buf >> 18) & 63]);
        out.push_back(kB64Alphabet[(buf >> 12) & 63]);
        out.push_back(i + 1 < data.size() ? kB64Alphabet[(buf >> 6) & 63] : '=');
        out.push_back(i + 2 < data.size() ? kB64Alphabet[buf & 63] : '=');
    }
    return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
    auto value_of = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    if (text.size() % 4 != 0) throw std::invalid_argument("base64: length must be a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4] = {0, 0, 0, 0};
        int pads = 0;
        for (int j = 0; j < 4; ++j) {
            const char c = text[i + j];
            if (c == '=') {
                if (i + 4 != text.size() || j < 2) throw std::invalid_argument("base64: bad padding");
                ++pads;
                continue;
            }
            if (pads > 0) throw std::invalid_argument("base64: data after padding");
            vals[j] = value_of(c);
            if (vals[j] < 0) throw std::invalid_argument("base64: invalid character");
        }
        const std::uint32_t buf = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                  (static_cast<std::uint32_t>(vals[1]) << 12) |
                                  (static_cast<std::uint32_t>(vals[2]) << 6) |
                                  static_cast<std::uint32_t>(vals[3]);
        out.push_back(static_cast<std::uint8_t>((buf >> 16) & 0xFF));
        if (pads < 2) out.push_back(static_cast<std::uint8_t>((buf >> 8) & 0xFF));
        if (pads < 1) out.push_back(static_cast<std::uint8_t>(buf & 0xFF));
    }
    return out;
}

nlohmann::json to_snapshot(const Configuration& c) {
    const Lattice& lat = c.lattice();
    std::vector<std::uint8_t> packed(static_cast<std::size_t>((lat.site_count() + 7) / 8), 0);
    for (std::int64_t i = 0; i < lat.site_count(); ++i) {
        if (c.infected().test(i))
            packed[static_cast<std::size_t>(i / 8)] |= static_cast<std::uint8_t>(1u << (i % 8));
    }
    nlohmann::json doc;
    doc["format"] = "bootperc-config";
    doc["version"] = 1;
    doc["kind"] = lat.is_torus() ? "torus" : "window";
    doc["d"] = lat.dim();
    if (lat.is_torus())
        doc["n"] = lat.side();
    else
        doc["t"] = lat.radius();
    doc["rule"] = {{"kind", c.rule().kind == Rule::Kind::Standard ? "standard" : "modified"},
                   {"r", c.rule().r}};
    doc["time"] = c.time();
    doc["bits"] = base64_encode(packed);
    return doc;
}

Configuration configuration_from_snapshot(const nlohmann::json& doc) {
    if (doc.value("format", "") != std::string("bootperc-config"))
        throw std::invalid_argument("snapshot: unexpected format tag");
    if (doc.value("version", 0) != 1) throw std::invalid_argument("snapshot: unsupported version");
    const int d = doc.at("d").get<int>();
    std::shared_ptr<const Lattice> lat;
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind == "torus")
        lat = Lattice::make_torus(d, doc.at("n").get<int>());
    else if (kind == "window")
        lat = Lattice::make_window(d, doc.at("t").get<int>());
    else
        throw std::invalid_argument("snapshot: unknown lattice kind");
    Rule rule;
    const std::string rk = doc.at("rule").at("kind").get<std::string>();
    if (rk == "standard")
        rule.kind = Rule::Kind::Standard;
    else if (rk == "modified")
        rule.kind = Rule::Kind::Modified;
    else
        throw std::invalid_argument("snapshot: unknown rule kind");
    rule.r = doc.at("rule").at("r").get<int>();

    const std::vector<std::uint8_t> packed = base64_decode(doc.at("bits").get<std::string>());
    if (packed.size() != static_cast<std::size_t>((lat->site_count() + 7) / 8))
        throw std::invalid_argument("snapshot: bit payload size mismatch");
    BitGrid bits(lat->site_count(), false);
    for (std::int64_t i = 0; i < lat->site_count(); ++i) {
        if (packed[static_cast<std::size_t>(i / 8)] >> (i % 8) & 1) bits.set(i);
    }
    return Configuration(std::move(lat), rule, std::move(bits), doc.value("time", 0));
}

}  // namespace bootperc
