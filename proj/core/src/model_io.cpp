#include "crfid/model_io.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "crfid/errors.hpp"

namespace crfid {

std::uint32_t crc32(const unsigned char* data, std::size_t len) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t c = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) c = table[(c ^ data[i]) & 0xFFu] ^ (c >> 8);
    return c ^ 0xFFFFFFFFu;
}

namespace {

constexpr std::array<unsigned char, 4> kMagic = {'C', 'R', 'F', 'M'};

struct Writer {
    std::vector<unsigned char> buf;

    void u8(std::uint8_t v) { buf.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        u64(bits);
    }
    void str(const std::string& s) {
        u64(s.size());
        buf.insert(buf.end(), s.begin(), s.end());
    }
    void vec(const std::vector<double>& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void ivec(const std::vector<int>& v) {
        u64(v.size());
        for (int x : v) i32(x);
    }
};

struct Reader {
    const unsigned char* p;
    std::size_t n;
    std::size_t off = 0;

    void need(std::size_t k) {
        if (off + k > n) throw ParseError("model file truncated");
    }
    std::uint8_t u8() {
        need(1);
        return p[off++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[off++]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[off++]) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }
    std::size_t len() {
        const std::uint64_t k = u64();
        if (k > n) throw ParseError("model file truncated");
        return static_cast<std::size_t>(k);
    }
    std::string str() {
        const std::size_t k = len();
        need(k);
        std::string s(reinterpret_cast<const char*>(p + off), k);
        off += k;
        return s;
    }
    std::vector<double> vec() {
        const std::size_t k = len();
        std::vector<double> v(k);
        for (std::size_t i = 0; i < k; ++i) v[i] = f64();
        return v;
    }
    std::vector<int> ivec() {
        const std::size_t k = len();
        std::vector<int> v(k);
        for (std::size_t i = 0; i < k; ++i) v[i] = i32();
        return v;
    }
};

void put_tree(Writer& w, const DecisionTree& t) {
    w.u64(t.nodes.size());
    for (const TreeNode& nd : t.nodes) {
        w.i32(nd.feature);
        w.f64(nd.threshold);
        w.i32(nd.left);
        w.i32(nd.right);
        w.f64(nd.value);
        w.f64(nd.gain);
        w.i32(nd.n_samples);
    }
}

DecisionTree get_tree(Reader& r) {
    DecisionTree t;
    const std::size_t n = r.len();
    t.nodes.resize(n);
    for (TreeNode& nd : t.nodes) {
        nd.feature = r.i32();
        nd.threshold = r.f64();
        nd.left = r.i32();
        nd.right = r.i32();
        nd.value = r.f64();
        nd.gain = r.f64();
        nd.n_samples = r.i32();
    }
    if (!t.nodes.empty())
        for (const TreeNode& nd : t.nodes) {
            const bool leaf = nd.feature < 0;
            const auto bad = [&](int c) {
                return c < 0 || static_cast<std::size_t>(c) >= t.nodes.size();
            };
            if (!leaf && (bad(nd.left) || bad(nd.right)))
                throw ParseError("model file: tree child index out of range");
        }
    return t;
}

void put_matrix(Writer& w, const FeatureMatrix& m) {
    w.u64(m.n_rows);
    w.u64(m.n_cols);
    w.vec(m.data);
}

FeatureMatrix get_matrix(Reader& r) {
    FeatureMatrix m;
    m.n_rows = r.len();
    m.n_cols = r.len();
    m.data = r.vec();
    if (m.data.size() != m.n_rows * m.n_cols)
        throw ParseError("model file: matrix size mismatch");
    return m;
}

void put_classical(Writer& w, const ClassicalModel& model) {
    if (const auto* dt = std::get_if<DecisionTree>(&model)) {
        put_tree(w, *dt);
    } else if (const auto* rf = std::get_if<ForestModel>(&model)) {
        w.u64(rf->trees.size());
        for (const DecisionTree& t : rf->trees) put_tree(w, t);
    } else if (const auto* gbt = std::get_if<GbtModel>(&model)) {
        w.f64(gbt->f0);
        w.f64(gbt->learning_rate);
        w.u64(gbt->trees.size());
        for (const DecisionTree& t : gbt->trees) put_tree(w, t);
    } else {
        const SvrModel& svr = std::get<SvrModel>(model);
        put_matrix(w, svr.support_vectors);
        w.vec(svr.coeffs);
        w.f64(svr.b);
        w.f64(svr.gamma);
        w.f64(svr.C);
        w.f64(svr.epsilon);
    }
}

ClassicalModel get_classical(Reader& r, ModelKind kind) {
    switch (kind) {
        case ModelKind::DT:
            return get_tree(r);
        case ModelKind::RF: {
            ForestModel rf;
            const std::size_t n = r.len();
            rf.trees.reserve(n);
            for (std::size_t i = 0; i < n; ++i) rf.trees.push_back(get_tree(r));
            return rf;
        }
        case ModelKind::GBT: {
            GbtModel gbt;
            gbt.f0 = r.f64();
            gbt.learning_rate = r.f64();
            const std::size_t n = r.len();
            gbt.trees.reserve(n);
            for (std::size_t i = 0; i < n; ++i) gbt.trees.push_back(get_tree(r));
            return gbt;
        }
        case ModelKind::SVR: {
            SvrModel svr;
            svr.support_vectors = get_matrix(r);
            svr.coeffs = r.vec();
            svr.b = r.f64();
            svr.gamma = r.f64();
            svr.C = r.f64();
            svr.epsilon = r.f64();
            if (svr.coeffs.size() != svr.support_vectors.n_rows)
                throw ParseError("model file: SVR coefficient count mismatch");
            return svr;
        }
    }
    throw ParseError("model file: unknown model kind");
}

void put_cnn(Writer& w, const CnnModel& m) {
    w.str(m.spec.name);
    w.u64(m.spec.layers.size());
    for (const LayerSpec& l : m.spec.layers) {
        w.u8(static_cast<std::uint8_t>(l.type));
        w.i32(l.filters);
        w.i32(l.kernel);
        w.u8(l.relu ? 1 : 0);
        w.i32(l.units);
        w.f64(l.rate);
    }
    w.i32(m.input_length);
    w.vec(m.params);
    w.vec(m.running_mean);
    w.vec(m.running_var);
}

CnnModel get_cnn(Reader& r) {
    ArchitectureSpec spec;
    spec.name = r.str();
    const std::size_t n = r.len();
    spec.layers.resize(n);
    for (LayerSpec& l : spec.layers) {
        const std::uint8_t t = r.u8();
        if (t > static_cast<std::uint8_t>(LayerType::Dense))
            throw ParseError("model file: unknown layer type");
        l.type = static_cast<LayerType>(t);
        l.filters = r.i32();
        l.kernel = r.i32();
        l.relu = r.u8() != 0;
        l.units = r.i32();
        l.rate = r.f64();
    }
    const int input_length = r.i32();
    CnnModel m = make_cnn(spec, input_length, 0); // rebuilds slots and shapes
    std::vector<double> params = r.vec();
    std::vector<double> mean = r.vec();
    std::vector<double> var = r.vec();
    if (params.size() != m.params.size() || mean.size() != m.running_mean.size() ||
        var.size() != m.running_var.size())
        throw ParseError("model file: CNN parameter count mismatch");
    m.params = std::move(params);
    m.running_mean = std::move(mean);
    m.running_var = std::move(var);
    return m;
}

} // namespace

void save_model(const std::string& path, const ModelFile& model) {
    Writer w;
    w.buf.insert(w.buf.end(), kMagic.begin(), kMagic.end());
    w.u32(kModelFormatVersion);
    w.u8(static_cast<std::uint8_t>(model.task));
    w.u8(model.is_cnn ? 4 : static_cast<std::uint8_t>(model.kind));
    w.f64(model.grid.f_start_hz);
    w.f64(model.grid.f_stop_hz);
    w.i32(model.grid.n_points);
    w.i32(model.filter.order);
    w.f64(model.filter.cutoff);
    w.u32(model.catalog_version);
    w.u8(model.raw_signature_input ? 1 : 0);
    w.u64(model.feature_names.size());
    for (const std::string& s : model.feature_names) w.str(s);
    w.ivec(model.selected);
    w.vec(model.scaler.mean);
    w.vec(model.scaler.std_dev);
    if (model.is_cnn)
        put_cnn(w, model.cnn);
    else
        put_classical(w, model.classical);
    w.u32(crc32(w.buf.data(), w.buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(w.buf.data()),
              static_cast<std::streamsize>(w.buf.size()));
    if (!out) throw DataError("cannot write " + path);
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < kMagic.size() + 8) throw ParseError("model file truncated");

    const std::size_t body = buf.size() - 4;
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(buf[body + i]) << (8 * i);
    if (crc32(buf.data(), body) != stored) throw ParseError("model file checksum mismatch");

    Reader r{buf.data(), body};
    for (unsigned char c : kMagic)
        if (r.u8() != c) throw ParseError("not a model file (bad magic)");
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion)
        throw ParseError("unsupported model format version " + std::to_string(version));

    ModelFile m;
    const std::uint8_t task = r.u8();
    if (task > 1) throw ParseError("model file: unknown task");
    m.task = static_cast<Task>(task);
    const std::uint8_t kind = r.u8();
    if (kind > 4) throw ParseError("model file: unknown model kind");
    m.is_cnn = kind == 4;
    if (!m.is_cnn) m.kind = static_cast<ModelKind>(kind);
    m.grid.f_start_hz = r.f64();
    m.grid.f_stop_hz = r.f64();
    m.grid.n_points = r.i32();
    m.filter.order = r.i32();
    m.filter.cutoff = r.f64();
    m.catalog_version = r.u32();
    m.raw_signature_input = r.u8() != 0;
    const std::size_t nn = r.len();
    m.feature_names.resize(nn);
    for (std::string& s : m.feature_names) s = r.str();
    m.selected = r.ivec();
    m.scaler.mean = r.vec();
    m.scaler.std_dev = r.vec();
    if (m.is_cnn)
        m.cnn = get_cnn(r);
    else
        m.classical = get_classical(r, m.kind);
    if (r.off != r.n) throw ParseError("model file: trailing bytes");
    return m;
}

} // namespace crfid
