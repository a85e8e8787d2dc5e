/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The flowsep Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "flowsep/linops.hpp"

#include <gtest/gtest.h>

#include <random>

#include "flowsep/fft.hpp"
#include "test_support.hpp"

namespace flowsep {
namespace {

using testing::direct_circular_conv;
using testing::random_complex;
using testing::rel_err;

Complex inner(const ComplexMatrix& a, const ComplexMatrix& b) { return (a.conjugate().cwiseProduct(b)).sum(); }

TEST(Fft, RoundTripUsesOneOverNInverse) {
  std::mt19937_64 rng(1);
  const Image img = random_complex(7, 5, rng);
  EXPECT_LT(rel_err(fft::inverse(fft::forward(img)), img), 1e-14);
  // Unnormalized forward: the DC bin is the plain sum.
  EXPECT_LT(std::abs(fft::forward(img)(0, 0) - img.sum()), 1e-12);
}

TEST(Psf, DefaultCenterIsFloorHalf) {
  const Psf p(ComplexMatrix::Ones(4, 5));
  EXPECT_EQ(p.center_row(), 2);
  EXPECT_EQ(p.center_col(), 2);
  EXPECT_THROW(Psf(ComplexMatrix::Ones(3, 3), 3, 0), std::invalid_argument);
  EXPECT_THROW(Psf(ComplexMatrix(0, 0)), std::invalid_argument);
}

TEST(Psf, NormalizedCopyHasUnitEnergy) {
  std::mt19937_64 rng(2);
  const Psf p(random_complex(3, 4, rng, 3.0));
  EXPECT_FALSE(p.normalized());
  const Psf n = p.normalized_copy();
  EXPECT_TRUE(n.normalized());
  EXPECT_NEAR(n.energy(), 1.0, 1e-12);
  EXPECT_THROW(Psf(ComplexMatrix::Zero(2, 2)).normalized_copy(), std::invalid_argument);
}

TEST(EmbedPsf, DeltaKernelIsIdentity) {
  const FrequencyOperator op = embed_psf(Psf::delta(), 6, 9);
  EXPECT_EQ((op.transfer().array() - Complex(1, 0)).abs().maxCoeff(), 0.0);
}

TEST(EmbedPsf, RejectsOversizedKernel) {
  EXPECT_THROW(embed_psf(Psf(ComplexMatrix::Ones(5, 3)), 4, 8), std::invalid_argument);
  EXPECT_THROW(embed_psf(Psf(ComplexMatrix::Ones(3, 9)), 4, 8), std::invalid_argument);
}

TEST(EmbedPsf, DeltaImageReproducesShiftedKernel) {
  std::mt19937_64 rng(3);
  const Psf psf(random_complex(3, 3, rng));
  const FrequencyOperator op = embed_psf(psf, 8, 8);
  Image delta = Image::Zero(8, 8);
  const Index z0 = 6;
  const Index x0 = 7;
  delta(z0, x0) = 1.0;
  const Image out = conv2_circ(delta, op);
  Image expected = Image::Zero(8, 8);
  for (Index j = 0; j < 3; ++j) {
    for (Index i = 0; i < 3; ++i) expected((z0 + i - 1 + 8) % 8, (x0 + j - 1 + 8) % 8) = psf.kernel()(i, j);
  }
  EXPECT_LT((out - expected).norm(), 1e-12);
}

TEST(EmbedPsf, OffCenterOriginShiftsOutput) {
  ComplexMatrix k = ComplexMatrix::Zero(3, 3);
  k(0, 0) = 1.0;
  // Declaring the single tap as the origin makes it an identity.
  const FrequencyOperator op = embed_psf(Psf(k, 0, 0), 5, 5);
  std::mt19937_64 rng(4);
  const Image img = random_complex(5, 5, rng);
  EXPECT_LT(rel_err(conv2_circ(img, op), img), 1e-14);
}

TEST(EmbedKernel, SpatialFormWrapsOrigin) {
  ComplexMatrix k(3, 3);
  for (Index i = 0; i < 9; ++i) k.data()[i] = Complex(static_cast<double>(i + 1), 0);
  const Image e = embed_kernel(Psf(k), 5, 6);
  EXPECT_EQ(e(0, 0), k(1, 1));
  EXPECT_EQ(e(4, 5), k(0, 0));
  EXPECT_EQ(e(1, 1), k(2, 2));
  EXPECT_EQ(e(2, 2), Complex(0, 0));
  EXPECT_LT(rel_err(fft::forward(e), embed_psf(Psf(k), 5, 6).transfer()), 1e-14);
}

TEST(Conv2Circ, IdentityOperator) {
  std::mt19937_64 rng(5);
  const Image img = random_complex(5, 7, rng);
  EXPECT_LT(rel_err(conv2_circ(img, FrequencyOperator::identity(5, 7)), img), 1e-15);
  EXPECT_LT(rel_err(conv2_circ_adjoint(img, FrequencyOperator::identity(5, 7)), img), 1e-15);
}

TEST(Conv2Circ, FiveByFiveAgainstDirectSum) {
  std::mt19937_64 rng(6);
  const Image img = random_complex(5, 5, rng);
  const Psf psf(random_complex(3, 3, rng));
  EXPECT_LT(rel_err(conv2_circ(img, embed_psf(psf, 5, 5)), direct_circular_conv(img, psf)), 1e-10);
}

TEST(Conv2Circ, RandomShapesAgainstDirectSum) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<Index> img_dim(1, 16);
  std::uniform_int_distribution<Index> ker_dim(1, 5);
  for (int trial = 0; trial < 100; ++trial) {
    const Index nz = img_dim(rng);
    const Index nx = img_dim(rng);
    const Index kh = std::min(ker_dim(rng), nz);
    const Index kw = std::min(ker_dim(rng), nx);
    std::uniform_int_distribution<Index> cr(0, kh - 1);
    std::uniform_int_distribution<Index> cc(0, kw - 1);
    const Psf psf(random_complex(kh, kw, rng), cr(rng), cc(rng));
    const Image img = random_complex(nz, nx, rng);
    EXPECT_LT(rel_err(conv2_circ(img, embed_psf(psf, nz, nx)), direct_circular_conv(img, psf)), 1e-10)
        << nz << "x" << nx << " kernel " << kh << "x" << kw;
  }
}

TEST(Conv2Circ, Linear) {
  std::mt19937_64 rng(8);
  const FrequencyOperator op = embed_psf(Psf(random_complex(3, 3, rng)), 9, 7);
  const Image a = random_complex(9, 7, rng);
  const Image b = random_complex(9, 7, rng);
  const Complex ca(1.5, -0.5);
  const Complex cb(-0.25, 2.0);
  const Image lhs = conv2_circ(ca * a + cb * b, op);
  const Image rhs = ca * conv2_circ(a, op) + cb * conv2_circ(b, op);
  EXPECT_LT(rel_err(lhs, rhs), 1e-12);
}

TEST(Conv2Circ, RejectsDimensionMismatch) {
  const FrequencyOperator op = FrequencyOperator::identity(4, 4);
  EXPECT_THROW(conv2_circ(Image::Zero(4, 5), op), std::invalid_argument);
  EXPECT_THROW(conv2_circ_adjoint(Image::Zero(3, 4), op), std::invalid_argument);
}

TEST(Conv2CircAdjoint, DotTest) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const FrequencyOperator op = embed_psf(Psf(random_complex(3, 3, rng)), 8, 8);
    const Image u = random_complex(8, 8, rng);
    const Image v = random_complex(8, 8, rng);
    const Complex lhs = inner(conv2_circ(u, op), v);
    const Complex rhs = inner(u, conv2_circ_adjoint(v, op));
    EXPECT_LT(std::abs(lhs - rhs) / std::abs(lhs), 1e-10);
  }
}

TEST(Conv2CircAdjoint, FlippedConjugateKernelGivesAdjoint) {
  std::mt19937_64 rng(10);
  const Psf psf(random_complex(3, 4, rng), 1, 2);
  const Image v = random_complex(8, 8, rng);
  const Image via_kernel = conv2_circ(v, embed_psf(psf.adjoint(), 8, 8));
  EXPECT_LT(rel_err(via_kernel, conv2_circ_adjoint(v, embed_psf(psf, 8, 8))), 1e-12);
}

TEST(Conv2CircAdjoint, RealSymmetricKernelIsSelfAdjoint) {
  ComplexMatrix k(3, 3);
  k << 1, 2, 1, 2, 4, 2, 1, 2, 1;
  const FrequencyOperator op = embed_psf(Psf(k), 6, 6);
  std::mt19937_64 rng(11);
  const Image img = random_complex(6, 6, rng);
  EXPECT_LT(rel_err(conv2_circ_adjoint(img, op), conv2_circ(img, op)), 1e-12);
}

TEST(ApplyToCasorati, IdentityAndSingleFrame) {
  std::mt19937_64 rng(12);
  const CasoratiMatrix m(random_complex(20, 3, rng), 4, 5);
  EXPECT_LT(rel_err(apply_to_casorati(m, FrequencyOperator::identity(4, 5)).matrix(), m.matrix()), 1e-15);

  const FrequencyOperator op = embed_psf(Psf(random_complex(3, 3, rng)), 4, 5);
  const CasoratiMatrix one(random_complex(20, 1, rng), 4, 5);
  const Image expected = conv2_circ(unflatten(one.matrix().col(0), 4, 5), op);
  EXPECT_LT(rel_err(unflatten(apply_to_casorati(one, op).matrix().col(0), 4, 5), expected), 1e-15);
}

TEST(ApplyToCasorati, MatchesPerFrameLoop) {
  std::mt19937_64 rng(13);
  const Psf psf(random_complex(3, 3, rng));
  const FrequencyOperator op = embed_psf(psf, 4, 4);
  const CasoratiMatrix m(random_complex(16, 3, rng), 4, 4);
  const CasoratiMatrix out = apply_to_casorati(m, op);
  const CasoratiMatrix adj = apply_adjoint_to_casorati(m, op);
  for (Index t = 0; t < 3; ++t) {
    const Image frame = unflatten(m.matrix().col(t), 4, 4);
    EXPECT_LT(rel_err(unflatten(out.matrix().col(t), 4, 4), direct_circular_conv(frame, psf)), 1e-12);
    EXPECT_LT(rel_err(unflatten(adj.matrix().col(t), 4, 4), direct_circular_conv(frame, psf.adjoint())), 1e-12);
  }
}

TEST(ApplyToCasorati, RejectsMismatch) {
  const CasoratiMatrix m(ComplexMatrix::Zero(12, 2), 3, 4);
  EXPECT_THROW(apply_to_casorati(m, FrequencyOperator::identity(4, 3)), std::invalid_argument);
}

TEST(LinopsProperties, Parseval) {
  std::mt19937_64 rng(14);
  const FrequencyOperator op = embed_psf(Psf(random_complex(5, 3, rng)), 10, 12);
  const Image u = random_complex(10, 12, rng);
  const double lhs = conv2_circ(u, op).squaredNorm();
  const double rhs = (op.transfer().cwiseAbs2().cwiseProduct(fft::forward(u).cwiseAbs2())).sum() / 120.0;
  EXPECT_NEAR(lhs / rhs, 1.0, 1e-9);
}

TEST(LinopsProperties, CompositionEqualsConvolvedKernel) {
  std::mt19937_64 rng(15);
  const Psf k1(random_complex(3, 3, rng));
  const Psf k2(random_complex(3, 3, rng));
  // Full linear convolution of two 3x3 kernels centred at (1,1) is 5x5
  // centred at (2,2).
  ComplexMatrix k12 = ComplexMatrix::Zero(5, 5);
  for (Index a = 0; a < 3; ++a) {
    for (Index b = 0; b < 3; ++b) {
      for (Index c = 0; c < 3; ++c) {
        for (Index d = 0; d < 3; ++d) k12(a + c, b + d) += k1.kernel()(a, b) * k2.kernel()(c, d);
      }
    }
  }
  const Image u = random_complex(8, 8, rng);
  const Image two_step = conv2_circ(conv2_circ(u, embed_psf(k1, 8, 8)), embed_psf(k2, 8, 8));
  EXPECT_LT(rel_err(two_step, conv2_circ(u, embed_psf(Psf(k12), 8, 8))), 1e-9);
}

TEST(FrequencyOperator, SquaredNormIsPeakGain) {
  ComplexMatrix k(1, 2);
  k << 1.0, 1.0;
  const FrequencyOperator op = embed_psf(Psf(k), 4, 4);
  EXPECT_NEAR(op.squared_norm(), 4.0, 1e-12);
  EXPECT_LT(rel_err(op.adjoint().transfer(), op.transfer().conjugate()), 1e-15);
}

}  // namespace
}  // namespace flowsep
