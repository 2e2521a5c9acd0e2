#include "lm2m/util/bytes.hpp"
#include "lm2m/util/codec.hpp"
#include "lm2m/util/config.hpp"
#include "lm2m/util/crypto.hpp"
#include "lm2m/util/net.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

using namespace lm2m;

TEST(Bytes, HexRoundTripIsLowercase)
{
    Bytes b{0x00, 0xab, 0xff, 0x10};
    EXPECT_EQ(to_hex(b), "00abff10");
    EXPECT_EQ(from_hex("00ABff10"), b);
    EXPECT_THROW(from_hex("abc"), std::invalid_argument);
    EXPECT_THROW(from_hex("zz"), std::invalid_argument);
}

TEST(Bytes, ConstantTimeEqual)
{
    EXPECT_TRUE(constant_time_equal(as_view("abc"), as_view("abc")));
    EXPECT_FALSE(constant_time_equal(as_view("abc"), as_view("abd")));
    EXPECT_FALSE(constant_time_equal(as_view("abc"), as_view("ab")));
}

TEST(Bytes, Utf8Validation)
{
    EXPECT_TRUE(is_valid_utf8(as_view("Temperatura 21\xc2\xb0")));
    EXPECT_FALSE(is_valid_utf8(as_view("\xc0\xaf")));     // overlong
    EXPECT_FALSE(is_valid_utf8(as_view("\xed\xa0\x80"))); // surrogate
    EXPECT_FALSE(is_valid_utf8(as_view("\xe2\x82")));     // truncated
}

TEST(Bytes, Subsequence)
{
    EXPECT_TRUE(contains_subsequence(as_view("xxsecretyy"), as_view("secret")));
    EXPECT_FALSE(contains_subsequence(as_view("xxsecreyy"), as_view("secret")));
    EXPECT_FALSE(contains_subsequence(as_view("ab"), as_view("abc")));
}

TEST(Codec, BigEndianLayout)
{
    codec::Writer w;
    w.u8(1).u16(0x0203).u32(0x04050607).u64(0x08090a0b0c0d0e0fULL).str("hi");
    EXPECT_EQ(to_hex(w.data()), "010203040506070809" "0a0b0c0d0e0f" "000000026869");
}

TEST(Codec, ReaderRoundTripAndBounds)
{
    codec::Writer w;
    w.u64(42).i64(-7).f64(-0.5).boolean(true).bytes(Bytes{1, 2, 3}).str("ok");
    codec::Reader r(w.data());
    EXPECT_EQ(r.u64(), 42u);
    EXPECT_EQ(r.i64(), -7);
    EXPECT_EQ(r.f64(), -0.5);
    EXPECT_TRUE(r.boolean());
    EXPECT_EQ(r.bytes(), (Bytes{1, 2, 3}));
    EXPECT_EQ(r.str(), "ok");
    EXPECT_TRUE(r.done());
    EXPECT_THROW(r.u8(), codec::DecodeError);

    Bytes lying{0x00, 0x00, 0x00, 0x10, 0x41}; // claims 16 bytes, has 1
    codec::Reader r2(lying);
    EXPECT_THROW(r2.bytes(), codec::DecodeError);

    Bytes bad_utf8{0x00, 0x00, 0x00, 0x01, 0xff};
    codec::Reader r3(bad_utf8);
    EXPECT_THROW(r3.str(), codec::DecodeError);

    Bytes extra{0x01, 0x02};
    codec::Reader r4(extra);
    r4.u8();
    EXPECT_THROW(r4.expect_end(), codec::DecodeError);
}

TEST(Crypto, Sha256KnownVector)
{
    auto d = crypto::sha256(as_view("abc"));
    EXPECT_EQ(to_hex(d), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    crypto::Sha256 s;
    s.update(as_view("a"));
    auto fork = s.clone();
    s.update(as_view("bc"));
    fork.update(as_view("bc"));
    EXPECT_EQ(s.finish(), d);
    EXPECT_EQ(fork.finish(), d);
}

TEST(Crypto, HmacRfc4231Case2)
{
    auto mac = crypto::hmac_sha256(as_view("Jefe"), as_view("what do ya want for nothing?"));
    EXPECT_EQ(to_hex(mac), "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Crypto, Base64UrlRfc4648Vectors)
{
    EXPECT_EQ(crypto::base64url_encode(as_view("")), "");
    EXPECT_EQ(crypto::base64url_encode(as_view("f")), "Zg");
    EXPECT_EQ(crypto::base64url_encode(as_view("fo")), "Zm8");
    EXPECT_EQ(crypto::base64url_encode(as_view("foobar")), "Zm9vYmFy");
    EXPECT_EQ(crypto::base64url_encode(Bytes{0xfb, 0xff}), "-_8");
    EXPECT_EQ(crypto::base64url_decode("-_8"), (Bytes{0xfb, 0xff}));
    EXPECT_THROW(crypto::base64url_decode("Zm9v=="), std::invalid_argument);
    EXPECT_THROW(crypto::base64url_decode("Z"), std::invalid_argument);
}

TEST(Crypto, RandomBytesDiffer)
{
    auto a = crypto::random_bytes(32);
    auto b = crypto::random_bytes(32);
    EXPECT_EQ(a.size(), 32u);
    EXPECT_NE(a, b);
}

TEST(Config, ParsesTrimsAndOverlaysEnvironment)
{
    auto kv = KeyValueConfig::parse("# comment\n  Block_Interval_MS = 250 \n\nprofile=desk\n");
    EXPECT_EQ(kv.get_u64_or("block_interval_ms", 0), 250u);
    EXPECT_EQ(kv.get_or("profile", ""), "desk");
    EXPECT_THROW(KeyValueConfig::parse("novalue\n"), std::runtime_error);

    ::setenv("LM2M_TESTCFG_BLOCK_INTERVAL_MS", "900", 1);
    kv.overlay_env("LM2M_TESTCFG_");
    ::unsetenv("LM2M_TESTCFG_BLOCK_INTERVAL_MS");
    EXPECT_EQ(kv.get_u64_or("block_interval_ms", 0), 900u);

    kv.set("bad", "12x");
    EXPECT_THROW(kv.get_u64_or("bad", 0), std::invalid_argument);
}

TEST(Net, SockAddrAndUriParsing)
{
    auto a = net::SockAddr::parse("localhost:5683");
    EXPECT_EQ(a.to_string(), "127.0.0.1:5683");
    EXPECT_THROW(net::SockAddr::parse("1.2.3:80"), std::exception);
    auto u = net::Uri::parse("coap://10.0.0.1:5684/rd");
    EXPECT_EQ(u.scheme, "coap");
    EXPECT_EQ(u.host, "10.0.0.1");
    EXPECT_EQ(u.port, 5684);
    EXPECT_EQ(u.path, "/rd");
    EXPECT_THROW(net::Uri::parse("10.0.0.1:5684"), std::invalid_argument);
    EXPECT_THROW(net::Uri::parse("coap://host:0"), std::invalid_argument);
}

TEST(Net, UdpLoopback)
{
    net::UdpSocket a(net::SockAddr::parse("127.0.0.1:0"));
    net::UdpSocket b(net::SockAddr::parse("127.0.0.1:0"));
    a.send_to(b.local_addr(), as_view("ping"));
    auto dg = b.receive(std::chrono::seconds(2));
    ASSERT_TRUE(dg);
    EXPECT_EQ(lm2m::to_string(dg->data), "ping");
    EXPECT_EQ(dg->from, a.local_addr());
    EXPECT_FALSE(b.receive(std::chrono::milliseconds(20)));
}
