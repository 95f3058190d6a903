#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace chainlearn {

enum class CapacityClass : std::uint8_t { Weak = 0, Medium = 1, Strong = 2 };

enum class ArchitectureFamily : std::uint8_t {
    MobileNetV3Small = 0,
    EfficientNetB0 = 1,
    ResNet50 = 2,
};

/// Exact ResNet-50 parameter count; the communication cost model depends on
/// this value, the other two are informational metadata.
inline constexpr std::uint64_t kResNet50ParamCount = 25'557'032;
inline constexpr std::uint64_t kEfficientNetB0ParamCount = 5'288'548;
inline constexpr std::uint64_t kMobileNetV3SmallParamCount = 2'542'856;

struct ArchitectureId {
    ArchitectureFamily family = ArchitectureFamily::MobileNetV3Small;
    std::uint64_t param_count = kMobileNetV3SmallParamCount;

    bool operator==(const ArchitectureId&) const = default;
};

/// Self-declared benchmark result. `declared_capacity` is what the node
/// claims; whether it matches the measured throughput is checked (or not)
/// at registration.
struct BenchmarkReport {
    double throughput = 0.0;  // samples per second
    std::uint32_t steps = 50;
    std::uint32_t batch_size = 32;
    CapacityClass declared_capacity = CapacityClass::Weak;

    bool operator==(const BenchmarkReport&) const = default;
};

struct BenchmarkWorkload {
    enum class Mode { Measured, Injected };
    Mode mode = Mode::Measured;
    std::optional<double> injected_throughput;  // required in Injected mode
    std::uint32_t warmup_steps = 5;             // Measured mode only
};

/// Runs (or injects) the throughput benchmark. Measured mode times a small
/// single-threaded convolution + dense multiply-accumulate kernel for
/// `steps` batches of `batch_size` samples on the wall clock; Injected mode
/// returns the configured throughput verbatim. The report's declared
/// capacity is the classification of the resulting throughput.
BenchmarkReport run_benchmark(const BenchmarkWorkload& workload, std::uint32_t steps,
                              std::uint32_t batch_size);

/// Tier thresholds: < 100 weak, [100, 300) medium, >= 300 strong.
CapacityClass classify_capacity(double throughput);

/// Fixed tier-to-architecture mapping. Total and deterministic.
ArchitectureId assign_architecture(CapacityClass capacity);

std::string_view to_string(CapacityClass c);
std::string_view to_string(ArchitectureFamily f);
CapacityClass capacity_from_string(std::string_view s);  // throws std::invalid_argument

}  // namespace chainlearn
