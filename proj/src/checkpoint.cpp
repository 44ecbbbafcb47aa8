#include "eeglab/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace eeglab {

namespace {

constexpr char kMagic[4] = {'E', 'E', 'G', 'M'};
constexpr std::uint32_t kVersionTag = 1;

template <typename T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw DataError("truncated EEGM file");
    return v;
}

}  // namespace

const std::vector<float>& EegmBlob::array(const std::string& name) const {
    for (const auto& [n, a] : arrays)
        if (n == name) return a;
    throw DataError("EEGM blob lacks array: " + name);
}

void write_eegm(const std::string& path, const EegmBlob& blob) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open for writing: " + path);
    os.write(kMagic, 4);
    put<std::uint32_t>(os, kVersionTag);
    std::string desc = blob.descriptor.dump();
    put<std::uint32_t>(os, static_cast<std::uint32_t>(desc.size()));
    os.write(desc.data(), static_cast<std::streamsize>(desc.size()));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(blob.arrays.size()));
    for (const auto& [name, arr] : blob.arrays) {
        put<std::uint32_t>(os, static_cast<std::uint32_t>(name.size()));
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        put<std::uint64_t>(os, static_cast<std::uint64_t>(arr.size()));
        os.write(reinterpret_cast<const char*>(arr.data()),
                 static_cast<std::streamsize>(arr.size() * sizeof(float)));
    }
    if (!os) throw DataError("write failed: " + path);
}

EegmBlob read_eegm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open for reading: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw DataError("not an EEGM file: " + path);
    std::uint32_t version = get<std::uint32_t>(is);
    if (version != kVersionTag)
        throw DataError("unsupported EEGM version " + std::to_string(version));
    EegmBlob blob;
    std::uint32_t desc_len = get<std::uint32_t>(is);
    std::string desc(desc_len, '\0');
    is.read(desc.data(), desc_len);
    if (!is) throw DataError("truncated EEGM file");
    blob.descriptor = nlohmann::json::parse(desc);
    std::uint32_t n_arrays = get<std::uint32_t>(is);
    for (std::uint32_t k = 0; k < n_arrays; ++k) {
        std::uint32_t name_len = get<std::uint32_t>(is);
        std::string name(name_len, '\0');
        is.read(name.data(), name_len);
        std::uint64_t count = get<std::uint64_t>(is);
        std::vector<float> arr(count);
        is.read(reinterpret_cast<char*>(arr.data()),
                static_cast<std::streamsize>(count * sizeof(float)));
        if (!is) throw DataError("truncated EEGM file");
        blob.arrays.emplace_back(std::move(name), std::move(arr));
    }
    return blob;
}

void save_model(const std::string& path, const TrainedModel& m) {
    EegmBlob blob;
    const ModelSpec& s = m.spec;
    blob.descriptor = {
        {"kind", "model"},
        {"family", family_name(s.family)},
        {"head", head_name(s.head)},
        {"n_channels", s.n_channels},
        {"input_len", s.input_len},
        {"n_classes", s.n_classes},
        {"encoder_dim", s.encoder_dim},
        {"downsample_factor", s.downsample_factor},
        {"hidden", s.hidden},
        {"conv_filters", s.conv_filters},
        {"kernel", s.kernel},
        {"stride", s.stride},
        {"pool_bins", s.pool_bins},
        {"checkpoint_epoch", m.checkpoint_epoch},
        {"lowest_val_epoch", m.lowest_val_epoch},
        {"trained", m.trained},
    };
    std::vector<float> params(m.params.begin(), m.params.end());
    blob.arrays.emplace_back("params", std::move(params));
    std::vector<float> tl, ta, va;
    for (const auto& st : m.history) {
        tl.push_back(static_cast<float>(st.train_loss));
        ta.push_back(static_cast<float>(st.train_acc));
        va.push_back(static_cast<float>(st.val_acc));
    }
    blob.arrays.emplace_back("train_loss", std::move(tl));
    blob.arrays.emplace_back("train_acc", std::move(ta));
    blob.arrays.emplace_back("val_acc", std::move(va));
    write_eegm(path, blob);
}

TrainedModel load_model(const std::string& path) {
    EegmBlob blob = read_eegm(path);
    const auto& d = blob.descriptor;
    if (d.value("kind", "") != "model")
        throw DataError("EEGM blob is not a model checkpoint");
    ModelSpec s;
    s.family = family_from_name(d.at("family").get<std::string>());
    s.head = head_from_name(d.at("head").get<std::string>());
    s.n_channels = d.at("n_channels").get<std::size_t>();
    s.input_len = d.at("input_len").get<std::size_t>();
    s.n_classes = d.at("n_classes").get<std::size_t>();
    s.encoder_dim = d.at("encoder_dim").get<std::size_t>();
    s.downsample_factor = d.at("downsample_factor").get<std::size_t>();
    s.hidden = d.at("hidden").get<std::size_t>();
    s.conv_filters = d.at("conv_filters").get<std::size_t>();
    s.kernel = d.at("kernel").get<std::size_t>();
    s.stride = d.at("stride").get<std::size_t>();
    s.pool_bins = d.at("pool_bins").get<std::size_t>();
    TrainedModel m;
    m.spec = s;
    const auto& params = blob.array("params");
    if (params.size() != s.param_count())
        throw DataError("checkpoint parameter count mismatch");
    m.params.assign(params.begin(), params.end());
    const auto& tl = blob.array("train_loss");
    const auto& ta = blob.array("train_acc");
    const auto& va = blob.array("val_acc");
    if (tl.size() != ta.size() || tl.size() != va.size())
        throw DataError("inconsistent history arrays");
    for (std::size_t e = 0; e < tl.size(); ++e)
        m.history.push_back({tl[e], ta[e], va[e]});
    m.checkpoint_epoch = d.at("checkpoint_epoch").get<std::size_t>();
    m.lowest_val_epoch = d.at("lowest_val_epoch").get<std::size_t>();
    m.trained = d.at("trained").get<bool>();
    return m;
}

}  // namespace eeglab
