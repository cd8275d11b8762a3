#pragma once

// Field serialization.
//
// Binary layout (host byte order, little-endian on all supported targets):
//   char[8]   magic "HHFIELD1"
//   uint32    grid kind: 0 = BoxGrid3, 1 = CylGrid
//   uint32    Heisenberg N
//   uint32    rank (3 for box, 2 for cylinder)
//   uint64    shape[rank]        box: nx, ny, ntau   cyl: nr, ntau
//   double    extent[rank]       box: half_x, half_y, half_tau   cyl: r_max, tau_half
//   uint64    value count
//   double    values[count]      row-major, last axis (tau) fastest
//
// CSV layout: a header line followed by one node per line,
//   box: "x,y,tau,value"   cyl: "r,tau,value"

#include <array>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "heisenheat/grid.hpp"

namespace heisenheat {

namespace detail {
inline constexpr std::array<char, 8> kFieldMagic = {'H', 'H', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw std::runtime_error("read_field: truncated stream");
    return v;
}

inline void write_header(std::ostream& os, const BoxGrid3& g) {
    os.write(kFieldMagic.data(), kFieldMagic.size());
    put<std::uint32_t>(os, 0);
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, 3);
    put<std::uint64_t>(os, g.nx);
    put<std::uint64_t>(os, g.ny);
    put<std::uint64_t>(os, g.ntau);
    put<double>(os, g.half_x);
    put<double>(os, g.half_y);
    put<double>(os, g.half_tau);
}

inline void write_header(std::ostream& os, const CylGrid& g) {
    os.write(kFieldMagic.data(), kFieldMagic.size());
    put<std::uint32_t>(os, 1);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
    put<std::uint32_t>(os, 2);
    put<std::uint64_t>(os, g.nr);
    put<std::uint64_t>(os, g.ntau);
    put<double>(os, g.r_max);
    put<double>(os, g.tau_half);
}

inline void read_magic(std::istream& is) {
    std::array<char, 8> m{};
    is.read(m.data(), m.size());
    if (!is || m != kFieldMagic) throw std::runtime_error("read_field: bad magic");
}
}  // namespace detail

template <class Grid>
void write_field(std::ostream& os, const ScalarField<Grid>& u) {
    detail::write_header(os, u.grid);
    detail::put<std::uint64_t>(os, u.size());
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(u.size() * sizeof(double)));
}

template <class Grid>
ScalarField<Grid> read_field(std::istream& is);

template <>
inline BoxField read_field<BoxGrid3>(std::istream& is) {
    detail::read_magic(is);
    if (detail::get<std::uint32_t>(is) != 0) throw std::runtime_error("read_field: not a box field");
    if (detail::get<std::uint32_t>(is) != 1) throw std::runtime_error("read_field: box fields require N = 1");
    if (detail::get<std::uint32_t>(is) != 3) throw std::runtime_error("read_field: box rank must be 3");
    const auto nx = detail::get<std::uint64_t>(is);
    const auto ny = detail::get<std::uint64_t>(is);
    const auto nt = detail::get<std::uint64_t>(is);
    const auto lx = detail::get<double>(is);
    const auto ly = detail::get<double>(is);
    const auto lt = detail::get<double>(is);
    BoxGrid3 g(lx, ly, lt, static_cast<int>(nx), static_cast<int>(ny), static_cast<int>(nt));
    const auto count = detail::get<std::uint64_t>(is);
    if (count != g.size()) throw std::runtime_error("read_field: value count does not match shape");
    std::vector<double> v(count);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("read_field: truncated values");
    return BoxField(g, std::move(v));
}

template <>
inline CylField read_field<CylGrid>(std::istream& is) {
    detail::read_magic(is);
    if (detail::get<std::uint32_t>(is) != 1) throw std::runtime_error("read_field: not a cylinder field");
    const auto n = detail::get<std::uint32_t>(is);
    if (detail::get<std::uint32_t>(is) != 2) throw std::runtime_error("read_field: cylinder rank must be 2");
    const auto nr = detail::get<std::uint64_t>(is);
    const auto nt = detail::get<std::uint64_t>(is);
    const auto rmax = detail::get<double>(is);
    const auto th = detail::get<double>(is);
    CylGrid g(static_cast<int>(n), rmax, th, static_cast<int>(nr), static_cast<int>(nt));
    const auto count = detail::get<std::uint64_t>(is);
    if (count != g.size()) throw std::runtime_error("read_field: value count does not match shape");
    std::vector<double> v(count);
    is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error("read_field: truncated values");
    return CylField(g, std::move(v));
}

namespace detail {
inline std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace detail

inline void write_field_csv(std::ostream& os, const BoxField& u) {
    const auto& g = u.grid;
    os << "x,y,tau,value\n";
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            for (int k = 0; k < g.ntau; ++k)
                os << detail::fmt_double(g.x(i)) << ',' << detail::fmt_double(g.y(j)) << ','
                   << detail::fmt_double(g.tau(k)) << ',' << detail::fmt_double(u[g.index(i, j, k)]) << '\n';
}

inline void write_field_csv(std::ostream& os, const CylField& u) {
    const auto& g = u.grid;
    os << "r,tau,value\n";
    for (int j = 0; j < g.nr; ++j)
        for (int k = 0; k < g.ntau; ++k)
            os << detail::fmt_double(g.r(j)) << ',' << detail::fmt_double(g.tau(k)) << ','
               << detail::fmt_double(u[g.index(j, k)]) << '\n';
}

}  // namespace heisenheat
