#include "pglab/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "pglab/simd.hpp"

namespace pglab {

std::string sha256_hex(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash " + file.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 init failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

std::string render_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir) {
    nlohmann::ordered_json doc;
    doc["hash_algorithm"] = "sha256";
    doc["tool"] = "pglab";
    doc["version"] = kToolVersion;
    doc["simd_backend"] = std::string(simd::to_string(simd::kernels().backend));
    doc["command"] = manifest.command;
    doc["config"] = manifest.config_text;
    doc["duration_seconds"] = manifest.duration_seconds;
    auto files = nlohmann::ordered_json::array();
    for (const auto& rel : manifest.outputs) {
        nlohmann::ordered_json entry;
        entry["path"] = rel.generic_string();
        entry["sha256"] = sha256_hex(out_dir / rel);
        files.push_back(entry);
    }
    doc["outputs"] = files;
    return doc.dump(2) + "\n";
}

}  // namespace pglab
