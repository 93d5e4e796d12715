#include "ucantor.h"

#include <cstring>
#include <new>
#include <string>
#include <utility>

#include "ucantor/errors.hpp"
#include "ucantor/gw.hpp"
#include "ucantor/json_io.hpp"
#include "ucantor/runner.hpp"
#include "ucantor/sadic.hpp"
#include "ucantor/sturmian.hpp"
#include "ucantor/tree.hpp"
#include "ucantor/version.hpp"

struct ucantor_tree {
  ucantor::WeightedTree t;
};

namespace {

thread_local std::string g_last_error;

char* dup_text(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

// Exception wall: nothing C++ may cross the C boundary.
template <typename F>
ucantor_status guarded(F&& body) noexcept {
  try {
    body();
    g_last_error.clear();
    return UCANTOR_OK;
  } catch (const ucantor::Error& e) {
    g_last_error = e.what();
    return static_cast<ucantor_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return UCANTOR_EINTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UCANTOR_EINTERNAL;
  }
}

ucantor_status need(bool ok, const char* what) noexcept {
  if (ok) return UCANTOR_OK;
  g_last_error = std::string(what) + " must not be null";
  return UCANTOR_EINVAL;
}

}  // namespace

extern "C" {

const char* ucantor_version(void) { return ucantor::kVersion; }

const char* ucantor_last_error(void) { return g_last_error.c_str(); }

ucantor_status ucantor_tree_from_json(const char* text, ucantor_tree** out) {
  if (auto s = need(text && out, "text/out")) return s;
  return guarded([&] {
    *out = new ucantor_tree{ucantor::tree_from_json_text(text)};
  });
}

ucantor_status ucantor_tree_load(const char* path, ucantor_tree** out) {
  if (auto s = need(path && out, "path/out")) return s;
  return guarded([&] { *out = new ucantor_tree{ucantor::load_tree(path)}; });
}

ucantor_status ucantor_tree_to_json(const ucantor_tree* t, char** out_text) {
  if (auto s = need(t && out_text, "tree/out_text")) return s;
  return guarded(
      [&] { *out_text = dup_text(ucantor::tree_to_json_text(t->t)); });
}

ucantor_status ucantor_tree_save(const ucantor_tree* t, const char* path) {
  if (auto s = need(t && path, "tree/path")) return s;
  return guarded([&] { ucantor::save_tree(t->t, path); });
}

ucantor_status ucantor_tree_reduce(const ucantor_tree* t, ucantor_tree** out) {
  if (auto s = need(t && out, "tree/out")) return s;
  return guarded([&] { *out = new ucantor_tree{ucantor::reduce(t->t)}; });
}

ucantor_status ucantor_tree_telescope(const ucantor_tree* t, double delta,
                                      ucantor_tree** out) {
  if (auto s = need(t && out, "tree/out")) return s;
  return guarded([&] {
    *out = new ucantor_tree{ucantor::telescope(t->t, delta).tree};
  });
}

ucantor_status ucantor_tree_stats(const ucantor_tree* t, uint64_t* vertices,
                                  uint32_t* max_depth, double* root_weight,
                                  int* reduced) {
  if (auto s = need(t != nullptr, "tree")) return s;
  return guarded([&] {
    if (vertices) *vertices = t->t.size();
    if (max_depth) *max_depth = t->t.max_depth();
    if (root_weight)
      *root_weight = t->t.empty() ? 0.0 : t->t.weight(t->t.root());
    if (reduced) *reduced = ucantor::is_reduced(t->t) ? 1 : 0;
  });
}

ucantor_status ucantor_sturmian_tree(const char* alpha, size_t depth,
                                     ucantor_tree** out) {
  if (auto s = need(alpha && out, "alpha/out")) return s;
  return guarded([&] {
    ucantor::AlphaSpec spec = ucantor::parse_alpha(alpha);
    ucantor::ContinuedFraction cf =
        ucantor::alpha_cf(spec, depth < 64 ? 64 : depth);
    *out = new ucantor_tree{ucantor::tree_of_words(cf, depth).tree};
  });
}

ucantor_status ucantor_sadic_tree(const char* system_json, size_t depth,
                                  ucantor_tree** out) {
  if (auto s = need(system_json && out, "system_json/out")) return s;
  return guarded([&] {
    ucantor::SAdicSystem sys = ucantor::sadic_from_json_text(system_json);
    *out = new ucantor_tree{
        ucantor::diagram_to_tree(ucantor::build_bratteli(sys, depth))};
  });
}

ucantor_status ucantor_gw_tree(const char* offspring, const char* weights,
                               uint32_t depth, uint64_t seed,
                               ucantor_tree** out) {
  if (auto s = need(offspring && weights && out, "offspring/weights/out"))
    return s;
  return guarded([&] {
    ucantor::GWConfig cfg;
    cfg.offspring = ucantor::offspring_from_text(offspring);
    cfg.weights = ucantor::weights_from_text(weights);
    cfg.depth = depth;
    cfg.seed = seed;
    *out = new ucantor_tree{ucantor::sample_tree(cfg)};
  });
}

void ucantor_tree_free(ucantor_tree* t) { delete t; }

ucantor_status ucantor_run(const char* config_json, char** out_report) {
  if (auto s = need(config_json && out_report, "config_json/out_report"))
    return s;
  return guarded(
      [&] { *out_report = dup_text(ucantor::run_config_text(config_json)); });
}

void ucantor_text_free(char* text) { delete[] text; }

}  // extern "C"
