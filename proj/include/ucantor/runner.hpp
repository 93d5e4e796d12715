#pragma once

#include <string>

namespace ucantor {

// Config -> report plumbing shared by the CLI and the C API.
//
// A config is a JSON object {"tool": "<name>", ...params}. run() dispatches,
// fills every defaulted parameter back into the echoed config, and returns
// the canonical report
//   {"config": <config>, "result": <result>, "tool": ..., "version": ...}
// serialized with sorted keys, one-space indent and a trailing newline, so
// rerunning a report's embedded config reproduces it byte for byte.
//
// Tools: tree.validate, tree.load, tree.reduce, tree.telescope, embed.check,
// embed.map, embed.schoenberg, dim.estimate, dim.kraft, sadic.check,
// sadic.tree, sturmian.verdict, sturmian.tree, sturmian.witness, gw.solve,
// gw.simulate, gw.sample, pipeline. Inside a pipeline, stages that build a
// tree (tree.load, tree.reduce, tree.telescope, sadic.tree, sturmian.tree,
// gw.sample) hand it to later stages that omit their "tree" parameter.

std::string run_config_text(const std::string& config_json);

}  // namespace ucantor
