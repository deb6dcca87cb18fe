#include "wpnav/wpds.hpp"

#include <cstring>
#include <fstream>

namespace wpnav {

namespace {

constexpr char kMagic[4] = {'W', 'P', 'D', 'S'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
}

}  // namespace

SlDataset SlDataset::prefix(std::int64_t n) const {
    if (n > count) throw std::invalid_argument("SlDataset::prefix: not enough samples");
    SlDataset out;
    out.count = n;
    out.images.assign(images.begin(), images.begin() + n * image_floats);
    out.labels.assign(labels.begin(), labels.begin() + n * label_floats);
    out.unreachable_warning = unreachable_warning;
    return out;
}

void save_wpds(const SlDataset& ds, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_wpds: cannot write " + path);
    out.write(kMagic, 4);
    write_pod<std::uint32_t>(out, kVersion);
    write_pod<std::uint64_t>(out, std::uint64_t(ds.count));
    write_pod<std::uint32_t>(out, kGoseloSize);
    write_pod<std::uint32_t>(out, kGoseloSize);
    write_pod<std::uint32_t>(out, kGoseloChannels);
    write_pod<std::uint32_t>(out, kWaypointCount);
    write_pod<std::uint32_t>(out, 2);
    for (std::int64_t i = 0; i < ds.count; ++i) {
        out.write(reinterpret_cast<const char*>(ds.image(i)),
                  std::streamsize(SlDataset::image_floats * sizeof(float)));
        out.write(reinterpret_cast<const char*>(ds.label(i)),
                  std::streamsize(SlDataset::label_floats * sizeof(float)));
    }
    if (!out) throw std::runtime_error("save_wpds: write failed for " + path);
}

SlDataset load_wpds(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_wpds: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_wpds: bad magic in " + path);
    if (read_pod<std::uint32_t>(in) != kVersion)
        throw std::runtime_error("load_wpds: unsupported version");
    const auto count = std::int64_t(read_pod<std::uint64_t>(in));
    const auto ih = read_pod<std::uint32_t>(in);
    const auto iw = read_pod<std::uint32_t>(in);
    const auto ic = read_pod<std::uint32_t>(in);
    const auto ln = read_pod<std::uint32_t>(in);
    const auto ld = read_pod<std::uint32_t>(in);
    if (ih != kGoseloSize || iw != kGoseloSize || ic != kGoseloChannels || ln != kWaypointCount ||
        ld != 2)
        throw std::runtime_error("load_wpds: unexpected shapes in " + path);
    SlDataset ds;
    ds.resize(count);
    for (std::int64_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(ds.image(i)),
                std::streamsize(SlDataset::image_floats * sizeof(float)));
        in.read(reinterpret_cast<char*>(ds.label(i)),
                std::streamsize(SlDataset::label_floats * sizeof(float)));
    }
    if (!in) throw std::runtime_error("load_wpds: truncated file " + path);
    return ds;
}

}  // namespace wpnav
