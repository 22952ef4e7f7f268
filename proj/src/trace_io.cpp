#include "trace_io.hpp"

#include "csv.hpp"
#include "error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace lsa {

namespace {

static_assert(std::endian::native == std::endian::little, "binary trace format assumes a little-endian host");

constexpr char kMagic[8] = {'L', 'S', 'A', 'T', 'R', 'A', 'C', 'E'};
constexpr const char* kColumns = "t_s,I_A,N_cm3,S_cm3,phi_rad,P_W";

std::vector<std::vector<double>*> columns(Trace& t) {
    return {&t.time, &t.current, &t.carrier_density, &t.photon_density, &t.phase, &t.power};
}

void check_columns(const Trace& t) {
    const auto n = t.time.size();
    if (t.current.size() != n || t.carrier_density.size() != n || t.photon_density.size() != n ||
        t.phase.size() != n || t.power.size() != n)
        throw InvalidArgument("trace columns have unequal lengths");
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += ' ';
        out += format_double(v[i]);
    }
    return out;
}

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("not an integer: '" + std::string(s) + "'");
    return v;
}

std::uint64_t parse_uint(std::string_view s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw IoError("not an unsigned integer: '" + std::string(s) + "'");
    return v;
}

template <class T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_string(std::ostream& os, const std::string& s) {
    put(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void put_vector(std::ostream& os, const std::vector<double>& v) {
    os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

template <class T>
T get(std::istream& is) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw IoError("truncated binary trace");
    return v;
}

std::string get_string(std::istream& is) {
    const auto n = get<std::uint32_t>(is);
    if (n > (1u << 20))
        throw IoError("corrupt binary trace: string length " + std::to_string(n));
    std::string s(n, '\0');
    if (n && !is.read(s.data(), n))
        throw IoError("truncated binary trace");
    return s;
}

void get_vector(std::istream& is, std::vector<double>& v, std::uint64_t n) {
    v.resize(static_cast<std::size_t>(n));
    if (n && !is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double))))
        throw IoError("truncated binary trace");
}

bool ends_with(const std::string& s, const char* suffix) {
    const auto n = std::strlen(suffix);
    return s.size() >= n && s.compare(s.size() - n, n, suffix) == 0;
}

} // namespace

void write_trace_csv(std::ostream& os, const Trace& t, const Provenance& prov) {
    check_columns(t);
    os << "# lsa trace v" << kTraceFormatVersion << '\n'
       << "# digest=" << prov.digest << '\n'
       << "# version=" << prov.version << '\n'
       << "# seed=" << t.seed << '\n'
       << "# dt_s=" << format_double(t.dt) << '\n'
       << "# stride=" << t.stride << '\n'
       << "# steps=" << t.stats.steps << '\n'
       << "# photon_clamps=" << t.stats.photon_clamps << '\n'
       << "# carrier_clamps=" << t.stats.carrier_clamps << '\n'
       << "# floor_events=" << t.stats.floor_events << '\n'
       << "# injection_phases=" << join(t.injection_phases) << '\n'
       << kColumns << '\n';
    std::string line;
    for (std::size_t i = 0; i < t.size(); ++i) {
        line.clear();
        line += format_double(t.time[i]);
        for (const auto* col : {&t.current, &t.carrier_density, &t.photon_density, &t.phase, &t.power}) {
            line += ',';
            line += format_double((*col)[i]);
        }
        line += '\n';
        os << line;
    }
    if (!os)
        throw IoError("failed writing trace CSV");
}

Trace read_trace_csv(std::istream& is, Provenance* prov) {
    Trace t;
    Provenance pv;
    std::string line;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string_view val(line.c_str() + eq + 1);
            if (key == "digest")
                pv.digest = val;
            else if (key == "version")
                pv.version = val;
            else if (key == "seed")
                t.seed = parse_uint(val);
            else if (key == "dt_s")
                t.dt = parse_double(val);
            else if (key == "stride")
                t.stride = parse_int(val);
            else if (key == "steps")
                t.stats.steps = parse_int(val);
            else if (key == "photon_clamps")
                t.stats.photon_clamps = parse_int(val);
            else if (key == "carrier_clamps")
                t.stats.carrier_clamps = parse_int(val);
            else if (key == "floor_events")
                t.stats.floor_events = parse_int(val);
            else if (key == "injection_phases" && !val.empty())
                for (auto f : split_fields(val, ' '))
                    t.injection_phases.push_back(parse_double(f));
            continue;
        }
        if (!header_seen) {
            if (line != kColumns)
                throw IoError("trace CSV line " + std::to_string(lineno) + ": unexpected header '" + line + "'");
            header_seen = true;
            continue;
        }
        const auto fields = split_fields(line);
        if (fields.size() != 6)
            throw IoError("trace CSV line " + std::to_string(lineno) + ": expected 6 fields");
        auto cols = columns(t);
        for (std::size_t c = 0; c < 6; ++c)
            cols[c]->push_back(parse_double(fields[c]));
    }
    if (!header_seen)
        throw IoError("trace CSV has no column header");
    if (prov)
        *prov = pv;
    return t;
}

void write_trace_binary(std::ostream& os, const Trace& t, const Provenance& prov) {
    check_columns(t);
    os.write(kMagic, sizeof kMagic);
    put(os, kTraceFormatVersion);
    put(os, t.dt);
    put(os, static_cast<std::uint64_t>(t.size()));
    put(os, t.seed);
    put(os, t.stride);
    put_string(os, prov.digest);
    put_string(os, prov.version);
    put(os, t.stats.steps);
    put(os, t.stats.photon_clamps);
    put(os, t.stats.carrier_clamps);
    put(os, t.stats.floor_events);
    for (const auto* col : {&t.time, &t.current, &t.carrier_density, &t.photon_density, &t.phase, &t.power})
        put_vector(os, *col);
    put(os, static_cast<std::uint64_t>(t.injection_phases.size()));
    put_vector(os, t.injection_phases);
    if (!os)
        throw IoError("failed writing binary trace");
}

Trace read_trace_binary(std::istream& is, Provenance* prov) {
    char magic[sizeof kMagic];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw IoError("not a binary trace (bad magic)");
    const auto version = get<std::uint32_t>(is);
    if (version != kTraceFormatVersion)
        throw IoError("unsupported binary trace version " + std::to_string(version));
    Trace t;
    t.dt = get<double>(is);
    const auto n = get<std::uint64_t>(is);
    t.seed = get<std::uint64_t>(is);
    t.stride = get<std::int64_t>(is);
    Provenance pv;
    pv.digest = get_string(is);
    pv.version = get_string(is);
    t.stats.steps = get<std::int64_t>(is);
    t.stats.photon_clamps = get<std::int64_t>(is);
    t.stats.carrier_clamps = get<std::int64_t>(is);
    t.stats.floor_events = get<std::int64_t>(is);
    for (auto* col : columns(t))
        get_vector(is, *col, n);
    get_vector(is, t.injection_phases, get<std::uint64_t>(is));
    if (prov)
        *prov = pv;
    return t;
}

void save_trace(const std::string& path, const Trace& trace, const Provenance& prov) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw IoError("cannot open '" + path + "' for writing");
    if (ends_with(path, ".csv"))
        write_trace_csv(os, trace, prov);
    else
        write_trace_binary(os, trace, prov);
}

Trace load_trace(const std::string& path, Provenance* prov) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw IoError("cannot open '" + path + "'");
    char first = 0;
    is.get(first);
    is.unget();
    if (first == 'L')
        return read_trace_binary(is, prov);
    return read_trace_csv(is, prov);
}

} // namespace lsa
