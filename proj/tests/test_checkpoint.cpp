#include "doctest.h"

#include <cstdio>
#include <cstring>
#include <fstream>

#include "sncse/checkpoint.hpp"
#include "sncse/errors.hpp"
#include "sncse/rng.hpp"

using namespace sncse;
using namespace sncse::num;

TEST_CASE("checkpoint round-trips bitwise") {
    Rng rng(5);
    Checkpoint ck;
    ck.meta["arch.layers"] = "2";
    ck.meta["opt.step"] = "17";
    Tensor w = Tensor::zeros(3, 4);
    for (double& x : w.values()) x = rng.normal();
    ck.tensors["enc.w"] = w;
    ck.tensors["opt.m.enc.w"] = Tensor::zeros(3, 4);

    const std::string path = "/tmp/sncse_test_ck.bin";
    ck.save(path);
    Checkpoint back = Checkpoint::load(path);
    CHECK(back.meta == ck.meta);
    REQUIRE(back.tensors.count("enc.w") == 1);
    const Tensor& wb = back.tensors.at("enc.w");
    REQUIRE(wb.shape() == w.shape());
    CHECK(std::memcmp(wb.data(), w.data(), w.numel() * sizeof(double)) == 0);
    std::remove(path.c_str());
}

TEST_CASE("checkpoint rejects garbage") {
    const std::string path = "/tmp/sncse_test_bad.bin";
    {
        std::ofstream os(path, std::ios::binary);
        os << "this is not a checkpoint at all";
    }
    CHECK_THROWS_AS(Checkpoint::load(path), DataError);
    CHECK_THROWS_AS(Checkpoint::load("/nonexistent/nope.bin"), IoError);
    std::remove(path.c_str());
}
