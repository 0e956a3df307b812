#include "fpcomp/territory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace fpcomp {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <class T>
void put_le(std::ostream& os, T v) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    os.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
    unsigned char buf[sizeof(T)];
    is.read(reinterpret_cast<char*>(buf), sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(buf[i], buf[sizeof(T) - 1 - i]);
    }
    T v;
    std::memcpy(&v, buf, sizeof(T));
    return v;
}

constexpr char kMagic[4] = {'F', 'P', 'T', 'G'};

}  // namespace

void write_territory_binary(const std::filesystem::path& path, const TerritoryMap& map,
                            bool include_times) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    put_le<std::uint32_t>(os, 1);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.box.dim()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(map.k));
    put_le<std::uint32_t>(os, include_times ? 1u : 0u);
    put_le<std::uint64_t>(os, map.seed);
    for (int a = 0; a < map.box.dim(); ++a) put_le<std::int64_t>(os, map.box.lo[a]);
    for (int a = 0; a < map.box.dim(); ++a) put_le<std::int64_t>(os, map.box.hi[a]);
    for (std::int32_t w : map.winner) put_le<std::int16_t>(os, static_cast<std::int16_t>(w));
    if (include_times)
        for (double t : map.time) put_le<double>(os, t);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

TerritoryMap read_territory_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not a territory grid file: " + path.string());
    const auto version = get_le<std::uint32_t>(is);
    if (version != 1) throw std::runtime_error("unsupported territory grid version");
    const auto d = get_le<std::uint32_t>(is);
    TerritoryMap map;
    map.k = static_cast<std::int32_t>(get_le<std::uint32_t>(is));
    const auto flags = get_le<std::uint32_t>(is);
    map.seed = get_le<std::uint64_t>(is);
    map.box.lo.resize(d);
    map.box.hi.resize(d);
    for (auto& v : map.box.lo) v = get_le<std::int64_t>(is);
    for (auto& v : map.box.hi) v = get_le<std::int64_t>(is);
    map.box.validate();
    const std::int64_t n = map.box.size();
    map.winner.resize(n);
    for (auto& w : map.winner) w = get_le<std::int16_t>(is);
    if (flags & 1u) {
        map.time.resize(n);
        for (auto& t : map.time) t = get_le<double>(is);
    }
    if (!is) throw std::runtime_error("truncated territory grid file: " + path.string());
    return map;
}

void write_territory_csv(std::ostream& os, const TerritoryMap& map) {
    const int d = map.box.dim();
    for (int a = 0; a < d; ++a) os << 'c' << a << ',';
    os << "winner,time\n";
    LatticePoint p(d);
    for (std::int64_t idx = 0; idx < map.box.size(); ++idx) {
        map.box.point_of(idx, p);
        for (int a = 0; a < d; ++a) os << p[a] << ',';
        const std::int32_t w = map.winner[idx];
        if (w == kLabelTie)
            os << "tie";
        else if (w == kLabelUnreached)
            os << "unreached";
        else
            os << w;
        os << ',';
        if (map.time.empty() || map.time[idx] == kInfiniteTime)
            os << "inf";
        else
            os << map.time[idx];
        os << '\n';
    }
}

void write_ppm(const std::filesystem::path& path, const Image& img) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.rgb.data()),
             static_cast<std::streamsize>(img.rgb.size()));
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace fpcomp
