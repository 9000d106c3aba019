#pragma once

#include <stdexcept>
#include <string>

#include "gridshed/pipeline/config.hpp"

namespace gridshed::pipeline {

inline constexpr const char* kVersion = "gridshed 0.1.0";

/// Full-run report: the plain-text summary written as report.txt, plus the
/// qualitative claim outcomes evaluated by `simulate`.
struct RunReport {
    std::string text;
    bool claims_evaluated = false;
    bool claim_silhouette_k3 = false;   // select-k silhouette argmax == 3
    bool claim_prophet_best = false;    // prophet has the lowest mean RMSE
};

/// A stage failed. `input_failure` distinguishes missing/unreadable inputs
/// (exit code 3) from computation failures (exit code 4).
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& cause, bool input_failure)
        : std::runtime_error(stage + ": " + cause),
          stage_(std::move(stage)),
          input_failure_(input_failure) {}
    const std::string& stage() const { return stage_; }
    bool input_failure() const { return input_failure_; }

private:
    std::string stage_;
    bool input_failure_;
};

/// Execute disaggregate -> features -> (pca) -> cluster -> forecast ->
/// allocate, writing every intermediate artifact under config.out_dir and
/// returning the report (also written as report.txt). On a stage failure a
/// FAILED marker file naming the stage is left in the output directory and
/// StageError is thrown; artifacts from completed stages remain.
RunReport run_pipeline(const PipelineConfig& config, bool quiet = false);

/// Generate a synthetic campus from the generator settings, write its CSVs
/// into the output directory, then run the pipeline and append a comparison
/// block evaluating the qualitative claims.
RunReport simulate(const PipelineConfig& config, bool quiet = false);

}  // namespace gridshed::pipeline
