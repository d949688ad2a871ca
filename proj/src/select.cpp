#include "mdlsel/select.hpp"

#include "mdlsel/errors.hpp"

namespace mdlsel {

const char* scheme_kind_name(SchemeKind s) {
  switch (s) {
    case SchemeKind::partial_mic: return "partial-mic";
    case SchemeKind::full_mic: return "full-mic";
    case SchemeKind::ric: return "ric";
    case SchemeKind::tpc: return "tpc";
    case SchemeKind::tpc_fb: return "tpc-fb";
    case SchemeKind::tpc_stream: return "tpc-stream";
    case SchemeKind::transfer_tpc: return "transfer-tpc";
  }
  return "?";
}

std::optional<SchemeKind> scheme_kind_from_name(std::string_view name) {
  for (SchemeKind s : {SchemeKind::partial_mic, SchemeKind::full_mic, SchemeKind::ric,
                       SchemeKind::tpc, SchemeKind::tpc_fb, SchemeKind::tpc_stream,
                       SchemeKind::transfer_tpc}) {
    if (name == scheme_kind_name(s)) return s;
  }
  return std::nullopt;
}

SelectionModel run_selection(const Dataset& data, const MethodConfig& cfg) {
  switch (cfg.scheme) {
    case SchemeKind::partial_mic: {
      MicSearchConfig mc = cfg.mic;
      mc.scheme = codes::MicScheme::partial;
      return run_mic(data, mc);
    }
    case SchemeKind::full_mic: {
      MicSearchConfig mc = cfg.mic;
      mc.scheme = codes::MicScheme::full;
      return run_mic(data, mc);
    }
    case SchemeKind::ric: {
      MicSearchConfig mc = cfg.mic;
      mc.scheme = codes::MicScheme::ric;
      return run_mic(data, mc);
    }
    case SchemeKind::tpc:
      return run_tpc(data, cfg.tpc);
    case SchemeKind::tpc_fb:
      return run_tpc_forward_backward(data, cfg.tpc);
    case SchemeKind::tpc_stream:
      return run_tpc_streamwise(data, cfg.tpc, cfg.stream_order);
    case SchemeKind::transfer_tpc:
      if (cfg.prior == nullptr) {
        throw SpecError("transfer-tpc needs a prior");
      }
      return run_transfer_tpc(data, *cfg.prior, cfg.transfer_setting, cfg.tpc);
  }
  throw SpecError("unknown selection scheme");
}

}  // namespace mdlsel
