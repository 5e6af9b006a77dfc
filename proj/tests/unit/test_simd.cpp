#include "../support.hpp"

#include "ffr/simd/kernels.hpp"

#include <doctest.h>

using namespace ffr;

namespace {

std::vector<double> randv(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

double close(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_CASE("scalar kernels against plain loops") {
    const auto& k = simd::scalar_kernels();
    Rng rng(1);
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 32u, 257u}) {
        const auto a = randv(rng, n), b = randv(rng, n);
        double d = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) d += a[i] * b[i], ss += a[i] * a[i];
        CHECK(close(k.dot(a.data(), b.data(), n), d) <= 1e-13);
        CHECK(close(k.sum_squares(a.data(), n), ss) <= 1e-13);
        auto y = b;
        k.axpy(0.7, a.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + 0.7 * a[i]);
    }
}

TEST_CASE("avx2 kernels match the scalar reference") {
    const auto* avx = simd::avx2_kernels();
    if (!avx) {
        MESSAGE("AVX2 unavailable; equivalence skipped");
        return;
    }
    const auto& ref = simd::scalar_kernels();
    Rng rng(2);
    for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 15u, 16u, 33u, 256u, 1001u}) {
        const auto a = randv(rng, n), b = randv(rng, n);
        CHECK(close(avx->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)) <= 1e-12);
        CHECK(close(avx->sum_squares(a.data(), n), ref.sum_squares(a.data(), n)) <= 1e-12);
        auto y1 = b, y2 = b;
        avx->axpy(-1.3, a.data(), y1.data(), n);
        ref.axpy(-1.3, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(close(y1[i], y2[i]) <= 1e-15);
    }
    for (std::size_t rows : {1u, 49u})
        for (std::size_t cols : {1u, 7u, 32u, 256u}) {
            const auto w = randv(rng, rows * cols), x = randv(rng, cols);
            std::vector<double> o1(rows), o2(rows);
            avx->gemv(w.data(), rows, cols, x.data(), o1.data());
            ref.gemv(w.data(), rows, cols, x.data(), o2.data());
            for (std::size_t r = 0; r < rows; ++r) CHECK(close(o1[r], o2[r]) <= 1e-12);
            auto coeff = randv(rng, rows);
            coeff[0] = 0.0;
            auto m1 = w, m2 = w;
            avx->rank1(m1.data(), rows, cols, coeff.data(), x.data());
            ref.rank1(m2.data(), rows, cols, coeff.data(), x.data());
            for (std::size_t i = 0; i < m1.size(); ++i) CHECK(close(m1[i], m2[i]) <= 1e-15);
        }
}

TEST_CASE("objective agrees across instruction sets") {
    if (!simd::avx2_kernels()) return;
    const auto task = env::generate_task(3, env::EnvConfig{});
    const auto params = testing::random_params(policy::FeatureSpec{}, 2, 0.2);
    trainer::TrainerConfig cfg;
    cfg.G = 4;
    const auto old = testing::perturbed(params, 3, 0.05, policy::Role::sampling_snapshot);
    const auto ref = testing::perturbed(params, 4, 0.05, policy::Role::reference);
    std::vector<trainer::Group> batch{trainer::first_pass(old, task, 0, 8, cfg, {}, 9)};
    trainer::score_group(batch[0], cfg);

    const auto prev = simd::set_active_isa(simd::Isa::scalar);
    const auto a = trainer::ffr_objective(params, old, ref, batch, cfg);
    simd::set_active_isa(simd::Isa::avx2);
    const auto b = trainer::ffr_objective(params, old, ref, batch, cfg);
    simd::set_active_isa(prev);
    CHECK(close(a.value, b.value) <= 1e-12);
    CHECK(testing::rel_error(a.gradient, b.gradient) <= 1e-12);
}
