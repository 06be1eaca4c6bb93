#pragma once

#include <string>
#include <variant>

#include "esnmor/deim.hpp"
#include "esnmor/esn.hpp"
#include "esnmor/pod.hpp"

namespace esnmor {

inline constexpr int kModelFormatVersion = 1;

// Versioned JSON model files: matrices as row-major nested arrays of doubles
// serialized value-exactly (shortest round-trip representation). Kinds:
// "esn", "pod_esn", "deim_esn"; the reduced files are self-contained.
void save_model(const EchoStateNetwork& esn, const std::string& path);
void save_model(const PodEsn& pe, const std::string& path);
void save_model(const DeimEsn& de, const std::string& path);

using AnyModel = std::variant<EchoStateNetwork, PodEsn, DeimEsn>;

AnyModel load_model(const std::string& path);
EchoStateNetwork load_esn(const std::string& path);
PodEsn load_pod_esn(const std::string& path);
DeimEsn load_deim_esn(const std::string& path);

}  // namespace esnmor
