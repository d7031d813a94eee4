#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "olpsynth/error.hpp"
#include "olpsynth/reference.hpp"
#include "oracles.hpp"

using namespace olpsynth;

TEST(ReferenceConv, IdentityKernel) {
    const LayerSpec l = fixtures::conv("c", 1, 1, 1);
    const Tensor x = fixtures::random_tensor({1, 5, 4}, 1);
    const Tensor y = reference::conv2d(l, x, {"c", {1.0f}, {0.0f}});
    EXPECT_TRUE(fixtures::bitwise_equal(y.data(), x.data()));
}

TEST(ReferenceConv, DotProduct) {
    const LayerSpec l = fixtures::conv("c", 1, 1, 2);
    const Tensor x({1, 2, 2}, Layout::row_major(), {1, 2, 3, 4});
    const Tensor y = reference::conv2d(l, x, {"c", {1, 0, 0, 1}, {0}});
    ASSERT_EQ(y.shape(), (TensorShape{1, 1, 1}));
    EXPECT_EQ(y.data()[0], 5.0f);
}

TEST(ReferenceConv, MatchesPaddedDirectOracle) {
    const LayerSpec l = fixtures::conv("c", 3, 2, 3, 2, 1);
    const Tensor x = fixtures::random_tensor({3, 7, 7}, 2);
    const LayerParameters p = fixtures::random_params(l, 3);
    const Tensor y = reference::conv2d(l, x, p);
    std::size_t oh = 0, ow = 0;
    const auto expected = oracle::direct_conv({x.data().begin(), x.data().end()}, 3, 7, 7, p.weights, p.biases, 2, 3,
                                              2, 1, oh, ow);
    EXPECT_EQ(y.shape(), (TensorShape{2, oh, ow}));
    EXPECT_EQ(oh, 4u);
    EXPECT_TRUE(fixtures::bitwise_equal(y.data(), expected));
}

TEST(ReferenceConv, ShapeMismatch) {
    const LayerSpec l = fixtures::conv("c", 2, 1, 1);
    const Tensor x = fixtures::random_tensor({3, 2, 2}, 4);
    EXPECT_THROW(reference::conv2d(l, x, fixtures::random_params(l, 1)), ShapeError);
    const LayerSpec big = fixtures::conv("c", 3, 1, 5);
    EXPECT_THROW(reference::conv2d(big, x, fixtures::random_params(big, 1)), ShapeError);
}

TEST(ReferenceAux, Relu) {
    const Tensor x({3, 1, 1}, Layout::row_major(), {-1, 0, 2});
    const Tensor y = reference::relu(x);
    EXPECT_EQ(std::vector<float>(y.data().begin(), y.data().end()), (std::vector<float>{0, 0, 2}));
}

TEST(ReferenceAux, MaxPool) {
    LayerSpec l;
    l.kind = LayerKind::MaxPool;
    l.kernel = 2;
    l.stride = 2;
    const Tensor y = reference::max_pool(l, Tensor({1, 2, 2}, Layout::row_major(), {1, 2, 3, 4}));
    ASSERT_EQ(y.size(), 1u);
    EXPECT_EQ(y.data()[0], 4.0f);
    l.kind = LayerKind::AvgPool;
    EXPECT_EQ(reference::avg_pool(l, Tensor({1, 2, 2}, Layout::row_major(), {1, 2, 3, 4})).data()[0], 2.5f);
}

TEST(ReferenceAux, SoftmaxSymmetric) {
    const Tensor y = reference::softmax(Tensor({2, 1, 1}, Layout::row_major(), {0, 0}));
    EXPECT_EQ(y.data()[0], 0.5f);
    EXPECT_EQ(y.data()[1], 0.5f);
}

TEST(ReferenceAux, ConcatAndFullyConnected) {
    const Tensor a({1, 1, 2}, Layout::row_major(), {1, 2});
    const Tensor b({2, 1, 2}, Layout::row_major(), {3, 4, 5, 6});
    const Tensor* ins[] = {&a, &b};
    const Tensor c = reference::concat(ins);
    EXPECT_EQ(c.shape(), (TensorShape{3, 1, 2}));
    EXPECT_EQ(std::vector<float>(c.data().begin(), c.data().end()), (std::vector<float>{1, 2, 3, 4, 5, 6}));

    LayerSpec fc;
    fc.kind = LayerKind::FullyConnected;
    fc.output_channels = 2;
    const Tensor y = reference::fully_connected(fc, c, {"f", {1, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 1}, {0.5f, 0}});
    EXPECT_EQ(y.data()[0], 7.5f);
    EXPECT_EQ(y.data()[1], 12.0f);
    const Tensor bad({1, 3, 2}, Layout::row_major());
    const Tensor* mismatched[] = {&a, &bad};
    EXPECT_THROW(reference::concat(mismatched), ShapeError);
}
