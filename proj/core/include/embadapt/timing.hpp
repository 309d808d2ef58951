#pragma once

#include "embadapt/classifiers.hpp"
#include "embadapt/config.hpp"
#include "embadapt/dataset.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace embadapt {

struct TimingRecord {
    std::string arm;
    std::size_t threads = 1;
    double wall_seconds = 0.0;
};

/// Wall-clock cost of the CPU-only pipeline on the whole dataset:
///   "unprojected"               downstream fit on the raw concatenation
///   "contrastive_permod_adapt"  per-modality contrastive adaptation alone
///   "contrastive_permod"        adaptation + projection + downstream fit
/// Adaptation trains up to `threads` heads concurrently.
std::vector<TimingRecord> benchmark_timing(const MultimodalDataset& ds, const TrainConfig& config, std::size_t threads,
                                           ClassifierKind downstream = ClassifierKind::mlp);

/// `arm,threads,wall_seconds`
void write_timing_csv(const std::vector<TimingRecord>& records, std::ostream& out);

}  // namespace embadapt
