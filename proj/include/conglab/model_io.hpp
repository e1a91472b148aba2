#pragma once

#include "conglab/arima.hpp"
#include "conglab/frame.hpp"
#include "conglab/ha.hpp"
#include "conglab/series.hpp"
#include "conglab/svr.hpp"

#include <string>

namespace conglab {

enum class ModelKind { Ha, Svr, SvrGraph, Arima };

std::string model_kind_name(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

// A fitted model plus the windowing context needed to apply it to a matrix.
// Files are line-oriented text with hexfloat numbers, so reloaded models
// predict bit-identically. ARIMA training residuals are not persisted; they
// are not needed to forecast.
struct SavedModel {
    ModelKind kind = ModelKind::Ha;
    IntersectionId node;
    SampleGrid grid;
    Aggregation aggregation = Aggregation::Count;
    HaModel ha;
    SvrModel svr;
    ArimaModel arima;
};

void save_model(const SavedModel& model, const std::string& path);
SavedModel load_model(const std::string& path);

} // namespace conglab
