#include "conglab/model_io.hpp"

#include "conglab/csv.hpp"
#include "conglab/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace conglab {

namespace {

const char* kMagic = "conglab-model v1";

std::string hex(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

double unhex(const std::string& text) {
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw SchemaError("malformed model number '" + text + "'");
    return v;
}

std::vector<std::string> tokens_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

std::string model_kind_name(ModelKind kind) {
    switch (kind) {
    case ModelKind::Ha: return "ha";
    case ModelKind::Svr: return "svr";
    case ModelKind::SvrGraph: return "svr_graph";
    case ModelKind::Arima: return "arima";
    }
    throw UsageError("bad model kind");
}

ModelKind parse_model_kind(const std::string& name) {
    if (name == "ha") return ModelKind::Ha;
    if (name == "svr") return ModelKind::Svr;
    if (name == "svr_graph") return ModelKind::SvrGraph;
    if (name == "arima") return ModelKind::Arima;
    throw UsageError("unknown model '" + name + "' (expected ha, svr, svr_graph, or arima)");
}

void save_model(const SavedModel& model, const std::string& path) {
    std::string out = std::string(kMagic) + "\n";
    out += "kind " + model_kind_name(model.kind) + "\n";
    out += "node " + model.node + "\n";
    out += "interval " + std::to_string(model.grid.interval.count()) + "\n";
    out += "sequence " + std::to_string(model.grid.sequence_length.count()) + "\n";
    out += "prediction " + std::to_string(model.grid.prediction_length.count()) + "\n";
    out += "aggregation " + aggregation_name(model.aggregation) + "\n";

    switch (model.kind) {
    case ModelKind::Ha: {
        out += "ha.global " + hex(model.ha.global_mean) + "\n";
        for (const auto& [sod, mean] : model.ha.slot_means)
            out += "ha.slot " + std::to_string(sod) + " " + hex(mean) + "\n";
        for (const auto& [key, mean] : model.ha.weekday_slot_means)
            out += "ha.wslot " + std::to_string(key.first) + " " + std::to_string(key.second) +
                   " " + hex(mean) + "\n";
        break;
    }
    case ModelKind::Svr:
    case ModelKind::SvrGraph: {
        const SvrModel& svr = model.svr;
        out += "svr.width " + std::to_string(svr.feature_width) + "\n";
        out += "svr.c " + hex(svr.c) + "\n";
        out += "svr.epsilon " + hex(svr.epsilon) + "\n";
        out += "svr.sigma " + hex(svr.sigma) + "\n";
        out += "svr.bias " + hex(svr.bias) + "\n";
        out += "svr.target_mean " + hex(svr.target_mean) + "\n";
        out += "svr.target_scale " + hex(svr.target_scale) + "\n";
        out += "svr.feat_mean";
        for (double v : svr.feat_mean) out += " " + hex(v);
        out += "\nsvr.feat_scale";
        for (double v : svr.feat_scale) out += " " + hex(v);
        out += "\n";
        for (std::size_t s = 0; s < svr.sv_count(); ++s) {
            out += "sv " + hex(svr.beta[s]);
            for (std::size_t f = 0; f < svr.feature_width; ++f)
                out += " " + hex(svr.support_vectors[s * svr.feature_width + f]);
            out += "\n";
        }
        break;
    }
    case ModelKind::Arima: {
        const ArimaModel& ar = model.arima;
        out += "arima.order " + std::to_string(ar.order.p) + " " + std::to_string(ar.order.d) +
               " " + std::to_string(ar.order.q) + "\n";
        out += "arima.intercept " + hex(ar.intercept) + "\n";
        out += "arima.flags " + std::to_string(int(ar.degenerate)) + " " +
               std::to_string(int(ar.stationary_warning)) + "\n";
        out += "arima.ar";
        for (double v : ar.ar) out += " " + hex(v);
        out += "\narima.ma";
        for (double v : ar.ma) out += " " + hex(v);
        out += "\narima.tail";
        for (double v : ar.tail_values) out += " " + hex(v);
        out += "\narima.tail_resid";
        for (double v : ar.tail_residuals) out += " " + hex(v);
        out += "\n";
        break;
    }
    }
    write_text_atomic(path, out);
}

SavedModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open model file '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != kMagic)
        throw SchemaError("'" + path + "' is not a model file (bad magic line)");

    SavedModel model;
    bool kind_seen = false;
    auto want = [&](const std::vector<std::string>& toks, std::size_t n) {
        if (toks.size() != n)
            throw SchemaError("model file '" + path + "': malformed line '" + toks[0] + "...'");
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto toks = tokens_of(line);
        const std::string& key = toks[0];
        if (key == "kind") {
            want(toks, 2);
            model.kind = parse_model_kind(toks[1]);
            kind_seen = true;
        } else if (key == "node") {
            want(toks, 2);
            model.node = toks[1];
        } else if (key == "interval") {
            want(toks, 2);
            model.grid.interval = Seconds{parse_int(toks[1])};
        } else if (key == "sequence") {
            want(toks, 2);
            model.grid.sequence_length = Seconds{parse_int(toks[1])};
        } else if (key == "prediction") {
            want(toks, 2);
            model.grid.prediction_length = Seconds{parse_int(toks[1])};
        } else if (key == "aggregation") {
            want(toks, 2);
            model.aggregation = parse_aggregation(toks[1]);
        } else if (key == "ha.global") {
            want(toks, 2);
            model.ha.global_mean = unhex(toks[1]);
        } else if (key == "ha.slot") {
            want(toks, 3);
            model.ha.slot_means[int(parse_int(toks[1]))] = unhex(toks[2]);
        } else if (key == "ha.wslot") {
            want(toks, 4);
            model.ha.weekday_slot_means[{unsigned(parse_int(toks[1])), int(parse_int(toks[2]))}] =
                unhex(toks[3]);
        } else if (key == "svr.width") {
            want(toks, 2);
            model.svr.feature_width = std::size_t(parse_int(toks[1]));
        } else if (key == "svr.c") {
            want(toks, 2);
            model.svr.c = unhex(toks[1]);
        } else if (key == "svr.epsilon") {
            want(toks, 2);
            model.svr.epsilon = unhex(toks[1]);
        } else if (key == "svr.sigma") {
            want(toks, 2);
            model.svr.sigma = unhex(toks[1]);
        } else if (key == "svr.bias") {
            want(toks, 2);
            model.svr.bias = unhex(toks[1]);
        } else if (key == "svr.target_mean") {
            want(toks, 2);
            model.svr.target_mean = unhex(toks[1]);
        } else if (key == "svr.target_scale") {
            want(toks, 2);
            model.svr.target_scale = unhex(toks[1]);
        } else if (key == "svr.feat_mean") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                model.svr.feat_mean.push_back(unhex(toks[i]));
        } else if (key == "svr.feat_scale") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                model.svr.feat_scale.push_back(unhex(toks[i]));
        } else if (key == "sv") {
            if (toks.size() != model.svr.feature_width + 2)
                throw SchemaError("model file '" + path + "': support vector row has " +
                                  std::to_string(toks.size() - 1) + " numbers, expected " +
                                  std::to_string(model.svr.feature_width + 1));
            model.svr.beta.push_back(unhex(toks[1]));
            for (std::size_t i = 2; i < toks.size(); ++i)
                model.svr.support_vectors.push_back(unhex(toks[i]));
        } else if (key == "arima.order") {
            want(toks, 4);
            model.arima.order.p = int(parse_int(toks[1]));
            model.arima.order.d = int(parse_int(toks[2]));
            model.arima.order.q = int(parse_int(toks[3]));
        } else if (key == "arima.intercept") {
            want(toks, 2);
            model.arima.intercept = unhex(toks[1]);
        } else if (key == "arima.flags") {
            want(toks, 3);
            model.arima.degenerate = parse_int(toks[1]) != 0;
            model.arima.stationary_warning = parse_int(toks[2]) != 0;
        } else if (key == "arima.ar") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                model.arima.ar.push_back(unhex(toks[i]));
        } else if (key == "arima.ma") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                model.arima.ma.push_back(unhex(toks[i]));
        } else if (key == "arima.tail") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                model.arima.tail_values.push_back(unhex(toks[i]));
        } else if (key == "arima.tail_resid") {
            for (std::size_t i = 1; i < toks.size(); ++i)
                model.arima.tail_residuals.push_back(unhex(toks[i]));
        } else {
            throw SchemaError("model file '" + path + "': unknown record '" + key + "'");
        }
    }
    if (!kind_seen) throw SchemaError("model file '" + path + "' lacks a kind record");
    if ((model.kind == ModelKind::Svr || model.kind == ModelKind::SvrGraph) &&
        (model.svr.feat_mean.size() != model.svr.feature_width ||
         model.svr.feat_scale.size() != model.svr.feature_width))
        throw SchemaError("model file '" + path + "': scaling width mismatch");
    if (model.kind == ModelKind::Arima &&
        (model.arima.ar.size() != std::size_t(model.arima.order.p) ||
         model.arima.ma.size() != std::size_t(model.arima.order.q)))
        throw SchemaError("model file '" + path + "': weight counts do not match the order");
    return model;
}

} // namespace conglab
