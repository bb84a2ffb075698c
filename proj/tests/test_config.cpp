// Copyright 2026 The spinent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <gtest/gtest.h>

#include "spinent/config.hpp"

using namespace spinent;

namespace {

TEST(Config, ParsesKeysCommentsAndWhitespace) {
    const Config c = Config::parse("# header\n  chain.spin = 3/2  # trailing\n\nseed=12\r\nname = a b\n", "t.conf");
    EXPECT_EQ(get_double(c, "chain.spin"), 1.5);
    EXPECT_EQ(get_uint64(c, "seed"), 12u);
    EXPECT_EQ(get_string(c, "name"), "a b");
    EXPECT_EQ(c.entry("seed").line, 4);
    EXPECT_EQ(c.entry("seed").source, "t.conf");
}

TEST(Config, ReportsLineOfDuplicateKey) {
    try {
        Config::parse("a = 1\nb = 2\na = 3\n", "dup.conf");
        FAIL() << "duplicate accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_NE(std::string(e.what()).find("dup.conf:3"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("'a'"), std::string::npos);
    }
}

TEST(Config, RejectsMalformedLines) {
    EXPECT_THROW(Config::parse("just text\n", "x"), ConfigError);
    EXPECT_THROW(Config::parse("Upper = 1\n", "x"), ConfigError);
    EXPECT_THROW(Config::parse(" = 1\n", "x"), ConfigError);
    EXPECT_THROW(Config::parse(".a = 1\n", "x"), ConfigError);
}

TEST(Config, OverridesReplaceValues) {
    Config c = Config::parse("a = 1\n", "x");
    c.apply_override("a=2");
    c.apply_override("b = 3");
    EXPECT_EQ(get_int(c, "a"), 2);
    EXPECT_EQ(c.entry("a").source, "override");
    EXPECT_EQ(get_int(c, "b"), 3);
    EXPECT_THROW(c.apply_override("novalue"), ConfigError);
}

TEST(Config, TypedGettersValidate) {
    const Config c = Config::parse("n = 1.5\nb = maybe\nneg = -3\nf = 1/0\n", "x");
    EXPECT_THROW(get_int(c, "n"), ConfigError);
    EXPECT_THROW(get_bool(c, "b"), ConfigError);
    EXPECT_THROW(get_uint64(c, "neg"), ConfigError);
    EXPECT_THROW(get_double(c, "f"), ConfigError);
    EXPECT_THROW(get_choice(c, "b", {"yes", "no"}), ConfigError);
}

TEST(Config, Lists) {
    const Config c = Config::parse("l = 0, 0.5, 2\nr = 0:1:0.25\nm = 1, 3:4:0.5\ns = p1, p2\nbad = 1:0:0.1\n", "x");
    EXPECT_EQ(get_double_list(c, "l"), (std::vector<double>{0, 0.5, 2}));
    EXPECT_EQ(get_double_list(c, "r"), (std::vector<double>{0, 0.25, 0.5, 0.75, 1.0}));
    EXPECT_EQ(get_double_list(c, "m"), (std::vector<double>{1, 3, 3.5, 4}));
    EXPECT_EQ(get_string_list(c, "s"), (std::vector<std::string>{"p1", "p2"}));
    EXPECT_THROW(get_double_list(c, "bad"), ConfigError);
}

TEST(Config, RangeEndpointSurvivesRounding) {
    const Config c = Config::parse("r = 0:8:0.1\n", "x");
    const auto v = get_double_list(c, "r");
    ASSERT_EQ(v.size(), 81u);
    EXPECT_NEAR(v.back(), 8.0, 1e-12);
}

}  // namespace
