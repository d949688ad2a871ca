#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mdlsel/mic.hpp"
#include "mdlsel/tpc.hpp"
#include "mdlsel/transfer.hpp"

// Uniform entry point over every selection scheme, so harnesses and the CLI
// can treat them interchangeably.

namespace mdlsel {

enum class SchemeKind {
  partial_mic,
  full_mic,
  ric,
  tpc,
  tpc_fb,
  tpc_stream,
  transfer_tpc,
};

const char* scheme_kind_name(SchemeKind s);
std::optional<SchemeKind> scheme_kind_from_name(std::string_view name);

struct MethodConfig {
  SchemeKind scheme = SchemeKind::partial_mic;
  MicSearchConfig mic;               // mic family (its scheme field is derived)
  TpcConfig tpc;                     // class-aware family
  const TransferPrior* prior = nullptr;  // transfer_tpc only
  int transfer_setting = 1;
  std::vector<int> stream_order;     // tpc_stream only; empty = natural order

  // Convenience: one knob for every scheme's thread count.
  void set_threads(int threads) {
    mic.threads = threads;
    tpc.threads = threads;
  }
};

SelectionModel run_selection(const Dataset& data, const MethodConfig& cfg);

}  // namespace mdlsel
