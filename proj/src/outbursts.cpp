#include "fpcomp/outbursts.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fpcomp/rng.hpp"

namespace fpcomp {

RadiusLaw RadiusLaw::constant(double r) {
    RadiusLaw law;
    law.kind = Kind::constant;
    law.value = r;
    law.validate();
    return law;
}

RadiusLaw RadiusLaw::exponential(double rate) {
    RadiusLaw law;
    law.kind = Kind::exponential;
    law.rate = rate;
    law.validate();
    return law;
}

RadiusLaw RadiusLaw::truncated_exponential(double rate, double cap) {
    RadiusLaw law;
    law.kind = Kind::truncated_exponential;
    law.rate = rate;
    law.cap = cap;
    law.validate();
    return law;
}

void RadiusLaw::validate() const {
    switch (kind) {
        case Kind::constant:
            if (!(value > 0.0)) throw std::invalid_argument("radius law: constant must be > 0");
            break;
        case Kind::exponential:
            if (!(rate > 0.0)) throw std::invalid_argument("radius law: rate must be > 0");
            break;
        case Kind::truncated_exponential:
            if (!(rate > 0.0) || !(cap > 0.0))
                throw std::invalid_argument("radius law: rate and cap must be > 0");
            break;
    }
}

double RadiusLaw::quantile(double u) const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::exponential:
            return -std::log1p(-u) / rate;
        case Kind::truncated_exponential:
            return -std::log1p(-u * (-std::expm1(-rate * cap))) / rate;
    }
    return 0.0;
}

double RadiusLaw::cdf(double r) const {
    if (r <= 0.0) return 0.0;
    switch (kind) {
        case Kind::constant:
            return r >= value ? 1.0 : 0.0;
        case Kind::exponential:
            return -std::expm1(-rate * r);
        case Kind::truncated_exponential:
            if (r >= cap) return 1.0;
            return std::expm1(-rate * r) / std::expm1(-rate * cap);
    }
    return 0.0;
}

double RadiusLaw::mean() const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::exponential:
            return 1.0 / rate;
        case Kind::truncated_exponential: {
            const double z = rate * cap;
            return (1.0 - (1.0 + z) * std::exp(-z)) / (rate * -std::expm1(-z));
        }
    }
    return 0.0;
}

double RadiusLaw::default_cap(double mass) const {
    switch (kind) {
        case Kind::constant:
            return value;
        case Kind::exponential:
            return -std::log(mass) / rate;
        case Kind::truncated_exponential:
            return cap;
    }
    return 0.0;
}

std::string RadiusLaw::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::constant: os << "constant(" << value << ")"; break;
        case Kind::exponential: os << "exponential(" << rate << ")"; break;
        case Kind::truncated_exponential: os << "truncexp(" << rate << "," << cap << ")"; break;
    }
    return os.str();
}

double RealBox::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= hi[a] - lo[a];
    return v;
}

bool RealBox::contains(std::span<const double> p) const {
    for (int a = 0; a < dim(); ++a)
        if (p[a] < lo[a] || p[a] > hi[a]) return false;
    return true;
}

double RealBox::distance(std::span<const double> p) const {
    double s = 0.0;
    for (int a = 0; a < dim(); ++a) {
        double d = 0.0;
        if (p[a] < lo[a]) d = lo[a] - p[a];
        else if (p[a] > hi[a]) d = p[a] - hi[a];
        s += d * d;
    }
    return std::sqrt(s);
}

void RealBox::validate() const {
    if (lo.size() != hi.size() || lo.size() < 2)
        throw std::invalid_argument("RealBox: dimension must be >= 2 and lo/hi consistent");
    for (int a = 0; a < dim(); ++a)
        if (!(lo[a] < hi[a])) throw std::invalid_argument("RealBox: empty extent");
}

RealBox RealBox::cube(int dim, double lo, double hi) {
    RealBox b;
    b.lo.assign(dim, lo);
    b.hi.assign(dim, hi);
    b.validate();
    return b;
}

OutburstEventSet simulate_outbursts(const RealBox& box, double t_cap, const RadiusLaw& law,
                                    std::uint64_t seed, double r_cap) {
    box.validate();
    law.validate();
    if (!(t_cap > 0.0)) throw std::invalid_argument("simulate_outbursts: t_cap must be > 0");
    if (box.dim() > 8) throw std::invalid_argument("simulate_outbursts: dimension > 8 unsupported");
    if (r_cap <= 0.0) r_cap = law.default_cap();

    OutburstEventSet ev;
    ev.box = box;
    ev.t_cap = t_cap;
    ev.r_cap = r_cap;
    ev.seed = seed;
    ev.dim = box.dim();
    ev.truncated_mass = 1.0 - law.cdf(r_cap);

    Rng rng(hash_u64(seed, 0x6f75746275727374ULL));
    const std::int64_t n = rng.next_poisson(box.volume() * t_cap);
    ev.centers.reserve(static_cast<std::size_t>(n) * ev.dim);
    ev.delays.reserve(n);
    ev.radii.reserve(n);
    for (std::int64_t i = 0; i < n; ++i) {
        // draw all coordinates regardless of thinning so the stream position
        // of later events does not depend on earlier radii being dropped
        std::array<double, 8> c;
        for (int a = 0; a < ev.dim; ++a) c[a] = rng.next_uniform(box.lo[a], box.hi[a]);
        const double delay = quantize_time(rng.next_uniform(0.0, t_cap));
        const double radius = law.quantile(rng.next_u01());
        if (radius > r_cap) {
            ++ev.dropped_by_radius;
            continue;
        }
        for (int a = 0; a < ev.dim; ++a) ev.centers.push_back(c[a]);
        ev.delays.push_back(delay);
        ev.radii.push_back(radius);
    }
    return ev;
}

namespace {

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

constexpr char kMagic[4] = {'F', 'P', 'O', 'B'};

}  // namespace

void write_events_binary(const std::filesystem::path& path, const OutburstEventSet& ev) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(kMagic, 4);
    put_le<std::uint32_t>(os, 1);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(ev.dim));
    put_le<std::int64_t>(os, ev.count());
    put_le<std::uint64_t>(os, ev.seed);
    put_le<double>(os, ev.t_cap);
    put_le<double>(os, ev.r_cap);
    put_le<double>(os, ev.truncated_mass);
    for (int a = 0; a < ev.dim; ++a) put_le<double>(os, ev.box.lo[a]);
    for (int a = 0; a < ev.dim; ++a) put_le<double>(os, ev.box.hi[a]);
    for (std::int64_t i = 0; i < ev.count(); ++i) {
        for (int a = 0; a < ev.dim; ++a) put_le<double>(os, ev.centers[i * ev.dim + a]);
        put_le<double>(os, ev.delays[i]);
        put_le<double>(os, ev.radii[i]);
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

OutburstEventSet read_events_binary(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not an outburst event file: " + path.string());
    if (get_le<std::uint32_t>(is) != 1) throw std::runtime_error("unsupported event file version");
    OutburstEventSet ev;
    ev.dim = static_cast<int>(get_le<std::uint32_t>(is));
    const std::int64_t n = get_le<std::int64_t>(is);
    ev.seed = get_le<std::uint64_t>(is);
    ev.t_cap = get_le<double>(is);
    ev.r_cap = get_le<double>(is);
    ev.truncated_mass = get_le<double>(is);
    ev.box.lo.resize(ev.dim);
    ev.box.hi.resize(ev.dim);
    for (auto& v : ev.box.lo) v = get_le<double>(is);
    for (auto& v : ev.box.hi) v = get_le<double>(is);
    ev.centers.resize(static_cast<std::size_t>(n) * ev.dim);
    ev.delays.resize(n);
    ev.radii.resize(n);
    for (std::int64_t i = 0; i < n; ++i) {
        for (int a = 0; a < ev.dim; ++a) ev.centers[i * ev.dim + a] = get_le<double>(is);
        ev.delays[i] = get_le<double>(is);
        ev.radii[i] = get_le<double>(is);
    }
    if (!is) throw std::runtime_error("truncated event file: " + path.string());
    return ev;
}

void write_events_csv(std::ostream& os, const OutburstEventSet& ev) {
    for (int a = 0; a < ev.dim; ++a) os << 'x' << a << ',';
    os << "delay,radius\n";
    for (std::int64_t i = 0; i < ev.count(); ++i) {
        for (int a = 0; a < ev.dim; ++a) os << ev.centers[i * ev.dim + a] << ',';
        os << ev.delays[i] << ',' << ev.radii[i] << '\n';
    }
}

}  // namespace fpcomp
