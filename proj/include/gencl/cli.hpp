#pragma once

/**
 * Batch command-line front end. Stages communicate only through files, so
 * any stage can be re-run in isolation:
 *
 *   gencl prompts  --config c.json    build prompt trees -> prompts.json
 *   gencl generate --config c.json    generate samples   -> features.jsonl
 *   gencl select   --config c.json    score + select     -> coreset.json, scores.jsonl
 *   gencl stream   --config c.json    full loop          -> metrics.csv, run_manifest.json
 *   gencl eval     [inputs...]        compute metrics    -> eval_report.json
 *
 * Exit codes: 0 success, 1 usage/config error, 2 pipeline error.
 */

#include <string>
#include <vector>

namespace gencl::cli {

int run_command(const std::vector<std::string>& argv);

}  // namespace gencl::cli
