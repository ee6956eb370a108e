#pragma once

#include <iosfwd>

#include "kgprobe/cli/config.hpp"

namespace kgprobe::cli {

// Each returns an exit code; errors propagate as exceptions.
int cmd_ingest(const RunConfig& config, std::ostream& out);
int cmd_probe(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_train(const RunConfig& config, std::ostream& out);
int cmd_predict(const RunConfig& config, std::ostream& out);
int cmd_select(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_plot_data(const RunConfig& config, std::ostream& out);
int cmd_compact_cache(const RunConfig& config, std::ostream& out);

}  // namespace kgprobe::cli
