#include "conglab/ha.hpp"

#include "conglab/errors.hpp"

namespace conglab {

namespace {

unsigned weekday_of(Timestamp t) {
    return std::chrono::weekday{std::chrono::floor<std::chrono::days>(t)}.c_encoding();
}

} // namespace

HaModel ha_fit(const std::vector<std::pair<Timestamp, double>>& train) {
    if (train.empty()) throw DataError("historical average needs at least one observation");

    HaModel model;
    std::map<std::pair<unsigned, int>, std::pair<double, long>> weekday_acc;
    std::map<int, std::pair<double, long>> slot_acc;
    double total = 0.0;
    for (const auto& [t, v] : train) {
        int sod = seconds_of_day(t);
        auto& wacc = weekday_acc[{weekday_of(t), sod}];
        wacc.first += v;
        wacc.second += 1;
        auto& sacc = slot_acc[sod];
        sacc.first += v;
        sacc.second += 1;
        total += v;
    }
    for (const auto& [key, acc] : weekday_acc)
        if (acc.second >= 2) model.weekday_slot_means[key] = acc.first / double(acc.second);
    for (const auto& [sod, acc] : slot_acc)
        model.slot_means[sod] = acc.first / double(acc.second);
    model.global_mean = total / double(train.size());
    return model;
}

double ha_predict(const HaModel& model, Timestamp target_time) {
    int sod = seconds_of_day(target_time);
    auto wit = model.weekday_slot_means.find({weekday_of(target_time), sod});
    if (wit != model.weekday_slot_means.end()) return wit->second;
    auto sit = model.slot_means.find(sod);
    if (sit != model.slot_means.end()) return sit->second;
    return model.global_mean;
}

} // namespace conglab
