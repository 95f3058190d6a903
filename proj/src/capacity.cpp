#include "chainlearn/capacity.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace chainlearn {

namespace {

// Sink defeating dead-code elimination of the benchmark kernel.
volatile double g_benchmark_sink = 0.0;

// One batch of the stand-in workload: a 3x3 convolution over a 24x24 plane
// followed by a dense projection, per sample. Float MAC bound, fits in L1.
double benchmark_batch(std::uint32_t batch_size, std::vector<float>& plane,
                       std::vector<float>& conv_out, const std::vector<float>& kernel,
                       const std::vector<float>& dense) {
    constexpr int kSide = 24;
    double acc = 0.0;
    for (std::uint32_t s = 0; s < batch_size; ++s) {
        for (int y = 1; y < kSide - 1; ++y) {
            for (int x = 1; x < kSide - 1; ++x) {
                float v = 0.0f;
                for (int ky = -1; ky <= 1; ++ky)
                    for (int kx = -1; kx <= 1; ++kx)
                        v += plane[static_cast<std::size_t>((y + ky) * kSide + (x + kx))] *
                             kernel[static_cast<std::size_t>((ky + 1) * 3 + (kx + 1))];
                conv_out[static_cast<std::size_t>(y * kSide + x)] = v;
            }
        }
        float proj = 0.0f;
        for (std::size_t i = 0; i < conv_out.size(); ++i)
            proj += conv_out[i] * dense[i % dense.size()];
        acc += static_cast<double>(proj);
        plane[s % plane.size()] += 1e-7f;  // keep iterations data-dependent
    }
    return acc;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkWorkload& workload, std::uint32_t steps,
                              std::uint32_t batch_size) {
    if (steps < 1) throw std::invalid_argument("run_benchmark: steps must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("run_benchmark: batch_size must be >= 1");

    BenchmarkReport report;
    report.steps = steps;
    report.batch_size = batch_size;

    if (workload.mode == BenchmarkWorkload::Mode::Injected) {
        if (!workload.injected_throughput)
            throw std::invalid_argument("run_benchmark: Injected mode requires a throughput");
        report.throughput = *workload.injected_throughput;
        report.declared_capacity = classify_capacity(report.throughput);
        return report;
    }

    constexpr int kSide = 24;
    std::vector<float> plane(kSide * kSide);
    std::vector<float> conv_out(kSide * kSide, 0.0f);
    std::vector<float> kernel(9);
    std::vector<float> dense(64);
    for (std::size_t i = 0; i < plane.size(); ++i)
        plane[i] = static_cast<float>((i * 2654435761u % 1024) / 1024.0);
    for (std::size_t i = 0; i < kernel.size(); ++i)
        kernel[i] = static_cast<float>(i % 3) * 0.25f - 0.25f;
    for (std::size_t i = 0; i < dense.size(); ++i)
        dense[i] = static_cast<float>((i * 40503u % 512) / 512.0) - 0.5f;

    for (std::uint32_t w = 0; w < workload.warmup_steps; ++w)
        g_benchmark_sink = g_benchmark_sink + benchmark_batch(batch_size, plane, conv_out, kernel, dense);

    const auto start = std::chrono::steady_clock::now();
    double acc = 0.0;
    for (std::uint32_t s = 0; s < steps; ++s)
        acc += benchmark_batch(batch_size, plane, conv_out, kernel, dense);
    const auto stop = std::chrono::steady_clock::now();
    g_benchmark_sink = g_benchmark_sink + acc;

    const double elapsed = std::chrono::duration<double>(stop - start).count();
    if (!(elapsed > 0.0))
        throw std::runtime_error("run_benchmark: zero elapsed time, re-run with more steps");

    report.throughput =
        static_cast<double>(steps) * static_cast<double>(batch_size) / elapsed;
    report.declared_capacity = classify_capacity(report.throughput);
    return report;
}

CapacityClass classify_capacity(double throughput) {
    if (!(throughput >= 0.0))
        throw std::invalid_argument("classify_capacity: throughput must be >= 0");
    if (throughput < 100.0) return CapacityClass::Weak;
    if (throughput < 300.0) return CapacityClass::Medium;
    return CapacityClass::Strong;
}

ArchitectureId assign_architecture(CapacityClass capacity) {
    switch (capacity) {
        case CapacityClass::Weak:
            return {ArchitectureFamily::MobileNetV3Small, kMobileNetV3SmallParamCount};
        case CapacityClass::Medium:
            return {ArchitectureFamily::EfficientNetB0, kEfficientNetB0ParamCount};
        case CapacityClass::Strong:
            return {ArchitectureFamily::ResNet50, kResNet50ParamCount};
    }
    throw std::invalid_argument("assign_architecture: invalid capacity class");
}

std::string_view to_string(CapacityClass c) {
    switch (c) {
        case CapacityClass::Weak: return "weak";
        case CapacityClass::Medium: return "medium";
        case CapacityClass::Strong: return "strong";
    }
    return "invalid";
}

std::string_view to_string(ArchitectureFamily f) {
    switch (f) {
        case ArchitectureFamily::MobileNetV3Small: return "MobileNetV3Small";
        case ArchitectureFamily::EfficientNetB0: return "EfficientNetB0";
        case ArchitectureFamily::ResNet50: return "ResNet50";
    }
    return "invalid";
}

CapacityClass capacity_from_string(std::string_view s) {
    if (s == "weak") return CapacityClass::Weak;
    if (s == "medium") return CapacityClass::Medium;
    if (s == "strong") return CapacityClass::Strong;
    throw std::invalid_argument("capacity_from_string: unknown capacity '" + std::string(s) + "'");
}

}  // namespace chainlearn
