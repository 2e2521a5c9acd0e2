#include "lm2m/auth/token.hpp"

#include "lm2m/util/crypto.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace lm2m::auth {

using nlohmann::json;

namespace {

const std::string kHeader = crypto::base64url_encode(as_view(R"({"alg":"HS256","typ":"JWT"})"));

std::int64_t system_now()
{
    return std::chrono::duration_cast<std::chrono::seconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

} // namespace

std::string_view to_string(TokenErrc c)
{
    switch (c) {
    case TokenErrc::BadSignature: return "bad signature";
    case TokenErrc::Expired: return "token expired";
    case TokenErrc::Malformed: return "malformed token";
    case TokenErrc::SecretMissing: return "token secret missing";
    }
    return "token error";
}

TokenService::TokenService(Bytes secret, std::chrono::seconds ttl, Clock now)
    : secret_(std::move(secret)), ttl_(ttl), now_(now ? std::move(now) : Clock(system_now))
{
    if (secret_.empty())
        throw TokenError(TokenErrc::SecretMissing);
}

std::string TokenService::issue(const std::string& sub, contracts::Role role) const
{
    auto now = now_();
    return sign(Claims{sub, role, now, now + ttl_.count()});
}

std::string TokenService::sign(const Claims& c) const
{
    json claims = {{"sub", c.sub}, {"role", std::string(contracts::to_string(c.role))}, {"iat", c.iat}, {"exp", c.exp}};
    auto signing_input = kHeader + "." + crypto::base64url_encode(as_view(claims.dump()));
    auto sig = crypto::hmac_sha256(secret_, as_view(signing_input));
    return signing_input + "." + crypto::base64url_encode(ByteView(sig.data(), sig.size()));
}

Claims TokenService::verify(std::string_view token) const
{
    auto d1 = token.find('.');
    auto d2 = d1 == std::string_view::npos ? d1 : token.find('.', d1 + 1);
    if (d2 == std::string_view::npos || token.find('.', d2 + 1) != std::string_view::npos)
        throw TokenError(TokenErrc::Malformed);
    auto header_b64 = token.substr(0, d1);
    auto claims_b64 = token.substr(d1 + 1, d2 - d1 - 1);
    auto sig_b64 = token.substr(d2 + 1);

    Bytes sig;
    json header;
    try {
        sig = crypto::base64url_decode(sig_b64);
        header = json::parse(lm2m::to_string(ByteView(crypto::base64url_decode(header_b64))));
    } catch (const std::exception&) {
        throw TokenError(TokenErrc::Malformed);
    }
    if (!header.is_object() || header.value("alg", "") != "HS256")
        throw TokenError(TokenErrc::Malformed);

    auto expected = crypto::hmac_sha256(secret_, as_view(token.substr(0, d2)));
    if (!constant_time_equal(ByteView(expected.data(), expected.size()), sig))
        throw TokenError(TokenErrc::BadSignature);

    Claims c;
    try {
        auto claims = json::parse(lm2m::to_string(ByteView(crypto::base64url_decode(claims_b64))));
        c.sub = claims.at("sub").get<std::string>();
        auto role = contracts::parse_role(claims.at("role").get<std::string>());
        if (!role)
            throw TokenError(TokenErrc::Malformed);
        c.role = *role;
        c.iat = claims.at("iat").get<std::int64_t>();
        c.exp = claims.at("exp").get<std::int64_t>();
    } catch (const TokenError&) {
        throw;
    } catch (const std::exception&) {
        throw TokenError(TokenErrc::Malformed);
    }
    if (c.exp <= c.iat)
        throw TokenError(TokenErrc::Malformed);
    if (now_() >= c.exp)
        throw TokenError(TokenErrc::Expired);
    return c;
}

Bytes load_secret(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw TokenError(TokenErrc::SecretMissing);
    Bytes secret((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (secret.size() != kSecretSize)
        throw TokenError(TokenErrc::SecretMissing);
    return secret;
}

Bytes load_or_create_secret(const std::filesystem::path& path)
{
    namespace fs = std::filesystem;
    if (fs::exists(path))
        return load_secret(path);
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    auto secret = crypto::random_bytes(kSecretSize);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(reinterpret_cast<const char*>(secret.data()), static_cast<std::streamsize>(secret.size()));
        if (!out)
            throw TokenError(TokenErrc::SecretMissing);
    }
    fs::permissions(tmp, fs::perms::owner_read | fs::perms::owner_write, fs::perm_options::replace);
    fs::rename(tmp, path);
    return secret;
}

} // namespace lm2m::auth
