#pragma once

#include "dynamics.hpp"

#include <iosfwd>
#include <string>

namespace lsa {

/// Identification stamped into every exported file.
struct Provenance {
    std::string digest;  ///< config digest, hex
    std::string version; ///< tool version
};

/// Columnar CSV: t_s, I_A, N_cm3, S_cm3, phi_rad, P_W, preceded by '#' header
/// lines carrying provenance, seed, dt and stride. Values use the shortest
/// round-trip decimal form, so reading back is lossless.
void write_trace_csv(std::ostream& os, const Trace& trace, const Provenance& prov);
Trace read_trace_csv(std::istream& is, Provenance* prov = nullptr);

/// Little-endian binary form: "LSATRACE", format version, dt, n, seed, stride,
/// digest, version string, integration counters, six columns, injection phases.
void write_trace_binary(std::ostream& os, const Trace& trace, const Provenance& prov);
Trace read_trace_binary(std::istream& is, Provenance* prov = nullptr);

void save_trace(const std::string& path, const Trace& trace, const Provenance& prov);
Trace load_trace(const std::string& path, Provenance* prov = nullptr);

inline constexpr std::uint32_t kTraceFormatVersion = 1;

} // namespace lsa
