#include "wpnav/nn.hpp"

namespace wpnav::nn {

namespace {

constexpr char kMagic[4] = {'N', 'N', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ofstream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}

template <class T>
std::unique_ptr<Layer<T>> make_layer(LayerKind kind, const std::vector<std::uint32_t>& meta) {
    switch (kind) {
        case LayerKind::conv2d:
            if (meta.size() != 4) throw std::runtime_error("NNCK: bad conv2d meta");
            return std::make_unique<Conv2d<T>>(int(meta[0]), int(meta[1]), int(meta[2]),
                                               int(meta[3]));
        case LayerKind::fully_connected:
            if (meta.size() != 2) throw std::runtime_error("NNCK: bad fully_connected meta");
            return std::make_unique<FullyConnected<T>>(int(meta[0]), int(meta[1]));
        case LayerKind::global_avg_pool:
            return std::make_unique<GlobalAvgPool<T>>();
        case LayerKind::relu:
            return std::make_unique<ReLU<T>>();
        case LayerKind::tanh_act:
            return std::make_unique<Tanh<T>>();
    }
    throw std::runtime_error("NNCK: unknown layer kind");
}

}  // namespace

template <class T>
void save_network(Network<T>& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_network: cannot write " + path);
    out.write(kMagic, 4);
    write_u32(out, kVersion);
    write_u32(out, std::uint32_t(net.layers().size()));
    for (auto& l : net.layers()) {
        write_u32(out, std::uint32_t(l->kind()));
        const auto meta = l->meta();
        write_u32(out, std::uint32_t(meta.size()));
        for (auto m : meta) write_u32(out, m);
        auto ps = l->params();
        write_u32(out, std::uint32_t(ps.size()));
        for (auto* p : ps) {
            write_u32(out, std::uint32_t(p->shape.size()));
            for (int d : p->shape) write_u32(out, std::uint32_t(d));
            std::vector<float> buf(p->data.begin(), p->data.end());
            out.write(reinterpret_cast<const char*>(buf.data()),
                      std::streamsize(buf.size() * sizeof(float)));
        }
    }
    if (!out) throw std::runtime_error("save_network: write failed for " + path);
}

template <class T>
Network<T> load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_network: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_network: bad magic in " + path);
    if (read_u32(in) != kVersion) throw std::runtime_error("load_network: unsupported version");
    const std::uint32_t layer_count = read_u32(in);

    Network<T> net;
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        const auto kind = LayerKind(read_u32(in));
        std::vector<std::uint32_t> meta(read_u32(in));
        for (auto& m : meta) m = read_u32(in);
        auto layer = make_layer<T>(kind, meta);
        const std::uint32_t tensor_count = read_u32(in);
        auto ps = layer->params();
        if (tensor_count != ps.size())
            throw std::runtime_error("load_network: tensor count mismatch");
        for (auto* p : ps) {
            std::vector<int> shape(read_u32(in));
            for (auto& d : shape) d = int(read_u32(in));
            if (shape != p->shape) throw std::runtime_error("load_network: shape mismatch");
            std::vector<float> buf(p->data.size());
            in.read(reinterpret_cast<char*>(buf.data()),
                    std::streamsize(buf.size() * sizeof(float)));
            std::copy(buf.begin(), buf.end(), p->data.begin());
        }
        net.layers().push_back(std::move(layer));
    }
    if (!in) throw std::runtime_error("load_network: truncated file " + path);
    return net;
}

template void save_network<float>(Network<float>&, const std::string&);
template void save_network<double>(Network<double>&, const std::string&);
template Network<float> load_network<float>(const std::string&);
template Network<double> load_network<double>(const std::string&);

}  // namespace wpnav::nn
