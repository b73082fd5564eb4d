#include "dairyq/config.hpp"

#include <cstdio>
#include <set>

#include "dairyq/detail/io_util.hpp"
#include "dairyq/errors.hpp"

namespace dairyq {

namespace {

using nlohmann::json;

// Reads typed fields from one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_ + " must be an object");
    }

    ~Section() noexcept(false) {
        if (std::uncaught_exceptions() > 0) return;
        for (const auto& [key, _] : obj_.items()) {
            if (!used_.contains(key)) throw ConfigError("unknown key '" + path_ + "." + key + "'");
        }
    }

    bool has(const std::string& key) {
        used_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return obj_.at(key);
    }

    std::string where(const std::string& key) const { return path_ + "." + key; }

    template <typename T>
    void read(const std::string& key, T& out) {
        if (!has(key)) return;
        const json& v = obj_.at(key);
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw ConfigError("");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw ConfigError("");
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!v.is_number()) throw ConfigError("");
            } else {
                if (!v.is_string()) throw ConfigError("");
            }
            out = v.get<T>();
        } catch (const std::exception&) {
            throw ConfigError("invalid value for '" + where(key) + "'");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> used_;
};

std::vector<int> read_hours(Section& s, const std::string& key, std::vector<int> fallback) {
    if (!s.has(key)) return fallback;
    const json& v = s.raw(key);
    if (!v.is_array()) throw ConfigError("'" + s.where(key) + "' must be a list of hours");
    std::vector<int> out;
    for (const json& h : v) {
        if (!h.is_number_integer()) throw ConfigError("'" + s.where(key) + "' must contain integers");
        out.push_back(h.get<int>());
    }
    return out;
}

std::optional<BinSpec> read_bins(Section& s, const std::string& key) {
    if (!s.has(key)) return std::nullopt;
    Section b(s.raw(key), s.where(key));
    BinSpec spec;
    b.read("count", spec.bin_count);
    double max = 0.0;
    b.read("max", max);
    if (spec.bin_count < 1) throw ConfigError("'" + s.where(key) + ".count' must be >= 1");
    if (!(max > 0.0)) throw ConfigError("'" + s.where(key) + ".max' must be > 0");
    spec.max_value = max;
    return spec;
}

json bins_json(const std::optional<BinSpec>& b) {
    if (!b) return nullptr;
    return {{"count", b->bin_count}, {"max", b->max_value}};
}

}  // namespace

void RunConfig::validate() const {
    battery.validate();
    hyperparams.validate();
    synthetic.validate();
    if (eval_initial_soc_level < 0 || eval_initial_soc_level >= battery.soc_levels) {
        throw ConfigError("evaluation.initial_soc_level out of range");
    }
    if (seeds.empty()) throw ConfigError("seeds must not be empty");
}

EncodingSpec RunConfig::encoding_for(const HourlySeries& series) const {
    if (encoding.kind == EncodingKind::HourSocLoadPvWind && !series.has_wind()) {
        throw DataError("wind encoding requires a wind_kwh column, which the dataset does not have");
    }
    EncodingSpec spec = default_encoding(encoding.kind, battery, series);
    if (encoding.load) spec.load = *encoding.load;
    if (encoding.pv) spec.pv = *encoding.pv;
    if (encoding.wind) spec.wind = *encoding.wind;
    return spec;
}

HourlySeries RunConfig::load_dataset() const {
    if (dataset_path) return load_csv(*dataset_path, tariff);
    return generate_synthetic(synthetic, tariff);
}

RunConfig parse_config(const json& doc) {
    RunConfig c;
    Section root(doc, "config");

    if (root.has("dataset")) {
        Section ds(root.raw("dataset"), "dataset");
        if (ds.has("path")) {
            std::string p;
            ds.read("path", p);
            c.dataset_path = p;
        }
        if (ds.has("synthetic")) {
            Section syn(ds.raw("synthetic"), "dataset.synthetic");
            syn.read("days", c.synthetic.days);
            syn.read("base_load_kwh", c.synthetic.base_load_kwh);
            syn.read("load_amplitude_kwh", c.synthetic.load_amplitude_kwh);
            syn.read("pv_peak_kwh", c.synthetic.pv_peak_kwh);
            syn.read("wind_mean_kwh", c.synthetic.wind_mean_kwh);
            syn.read("noise_fraction", c.synthetic.noise_fraction);
            syn.read("include_wind", c.synthetic.include_wind);
            syn.read("rng_seed", c.synthetic.rng_seed);
        }
        if (c.dataset_path && ds.has("synthetic")) {
            throw ConfigError("dataset takes either 'path' or 'synthetic', not both");
        }
    }

    if (root.has("tariff")) {
        Section t(root.raw("tariff"), "tariff");
        const TariffSchedule d = default_tariff();
        TariffSchedule::Rates rates;
        t.read("off_peak_rate", rates.off_peak);
        t.read("standard_rate", rates.standard);
        t.read("peak_rate", rates.peak);
        const auto off = read_hours(t, "off_peak_hours", d.hours_in(Tier::OffPeak));
        const auto std_hours = read_hours(t, "standard_hours", d.hours_in(Tier::Standard));
        const auto peak = read_hours(t, "peak_hours", d.hours_in(Tier::Peak));
        try {
            c.tariff = TariffSchedule(off, std_hours, peak, rates);
        } catch (const DataError& e) {
            throw ConfigError(std::string("tariff: ") + e.what());
        }
    }

    if (root.has("battery")) {
        Section b(root.raw("battery"), "battery");
        b.read("capacity_kwh", c.battery.capacity_kwh);
        b.read("charge_rate_kw", c.battery.charge_rate_kw);
        b.read("discharge_rate_kw", c.battery.discharge_rate_kw);
        b.read("reserve_fraction", c.battery.reserve_fraction);
        b.read("soc_levels", c.battery.soc_levels);
    }

    if (root.has("hyperparams")) {
        Section h(root.raw("hyperparams"), "hyperparams");
        Hyperparams& hp = c.hyperparams;
        h.read("learning_rate", hp.learning_rate_init);
        h.read("epsilon", hp.epsilon_init);
        h.read("discount_factor", hp.discount_factor);
        h.read("decay", hp.decay);
        h.read("floor", hp.floor);
        h.read("total_episodes", hp.total_episodes);
        h.read("steps_per_episode", hp.steps_per_episode);
        std::string sampling = "all";
        h.read("initial_soc", sampling);
        if (sampling == "all") hp.soc_sampling = SocSampling::AllLevels;
        else if (sampling == "exclude_empty") hp.soc_sampling = SocSampling::ExcludeEmpty;
        else throw ConfigError("hyperparams.initial_soc must be 'all' or 'exclude_empty'");
    }

    if (root.has("encoding")) {
        c.encoding_explicit = true;
        Section e(root.raw("encoding"), "encoding");
        std::string kind = to_string(c.encoding.kind);
        e.read("kind", kind);
        const auto parsed = parse_encoding_kind(kind);
        if (!parsed) throw ConfigError("unknown encoding kind '" + kind + "'");
        c.encoding.kind = *parsed;
        c.encoding.load = read_bins(e, "load_bins");
        c.encoding.pv = read_bins(e, "pv_bins");
        c.encoding.wind = read_bins(e, "wind_bins");
    }

    if (root.has("penalties")) {
        Section p(root.raw("penalties"), "penalties");
        PenaltyTable& t = c.penalties;
        p.read("charge_full_peak", t.charge_full_peak);
        p.read("charge_full", t.charge_full);
        p.read("charge_peak", t.charge_peak);
        p.read("charge_off_peak_bonus", t.charge_off_peak_bonus);
        p.read("discharge_empty", t.discharge_empty);
        p.read("discharge_off_peak", t.discharge_off_peak);
        p.read("discharge_peak_bonus", t.discharge_peak_bonus);
        p.read("idle_peak_with_charge", t.idle_peak_with_charge);
    }

    if (root.has("evaluation")) {
        Section ev(root.raw("evaluation"), "evaluation");
        ev.read("initial_soc_level", c.eval_initial_soc_level);
        std::string mode = "cost_only";
        ev.read("penalty_mode", mode);
        if (mode == "cost_only") c.eval_mode = PenaltyMode::CostOnly;
        else if (mode == "shaped") c.eval_mode = PenaltyMode::Shaped;
        else throw ConfigError("evaluation.penalty_mode must be 'cost_only' or 'shaped'");
    }

    if (root.has("output_dir")) {
        std::string out;
        root.read("output_dir", out);
        c.output_dir = out;
    }

    if (root.has("seeds")) {
        const json& s = root.raw("seeds");
        if (!s.is_array()) throw ConfigError("seeds must be a list of integers");
        c.seeds.clear();
        for (const json& v : s) {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
                throw ConfigError("seeds must be non-negative integers");
            }
            c.seeds.push_back(v.get<std::uint64_t>());
        }
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(detail::read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError("cannot parse " + path.string() + ": " + e.what());
    }
    RunConfig c = parse_config(doc);
    // Dataset paths in a config file are relative to the file itself.
    if (c.dataset_path && c.dataset_path->is_relative()) c.dataset_path = path.parent_path() / *c.dataset_path;
    return c;
}

json to_json(const RunConfig& c) {
    json dataset;
    if (c.dataset_path) {
        dataset = {{"path", c.dataset_path->string()}};
    } else {
        const SyntheticProfileConfig& s = c.synthetic;
        dataset = {{"synthetic",
                    {{"days", s.days},
                     {"base_load_kwh", s.base_load_kwh},
                     {"load_amplitude_kwh", s.load_amplitude_kwh},
                     {"pv_peak_kwh", s.pv_peak_kwh},
                     {"wind_mean_kwh", s.wind_mean_kwh},
                     {"noise_fraction", s.noise_fraction},
                     {"include_wind", s.include_wind},
                     {"rng_seed", s.rng_seed}}}};
    }
    const Hyperparams& h = c.hyperparams;
    const PenaltyTable& p = c.penalties;
    json doc = {
        {"dataset", dataset},
        {"tariff",
         {{"off_peak_rate", c.tariff.rates().off_peak},
          {"standard_rate", c.tariff.rates().standard},
          {"peak_rate", c.tariff.rates().peak},
          {"off_peak_hours", c.tariff.hours_in(Tier::OffPeak)},
          {"standard_hours", c.tariff.hours_in(Tier::Standard)},
          {"peak_hours", c.tariff.hours_in(Tier::Peak)}}},
        {"battery",
         {{"capacity_kwh", c.battery.capacity_kwh},
          {"charge_rate_kw", c.battery.charge_rate_kw},
          {"discharge_rate_kw", c.battery.discharge_rate_kw},
          {"reserve_fraction", c.battery.reserve_fraction},
          {"soc_levels", c.battery.soc_levels}}},
        {"hyperparams",
         {{"learning_rate", h.learning_rate_init},
          {"epsilon", h.epsilon_init},
          {"discount_factor", h.discount_factor},
          {"decay", h.decay},
          {"floor", h.floor},
          {"total_episodes", h.total_episodes},
          {"steps_per_episode", h.steps_per_episode},
          {"initial_soc", h.soc_sampling == SocSampling::AllLevels ? "all" : "exclude_empty"}}},
        {"encoding",
         {{"kind", to_string(c.encoding.kind)},
          {"load_bins", bins_json(c.encoding.load)},
          {"pv_bins", bins_json(c.encoding.pv)},
          {"wind_bins", bins_json(c.encoding.wind)}}},
        {"penalties",
         {{"charge_full_peak", p.charge_full_peak},
          {"charge_full", p.charge_full},
          {"charge_peak", p.charge_peak},
          {"charge_off_peak_bonus", p.charge_off_peak_bonus},
          {"discharge_empty", p.discharge_empty},
          {"discharge_off_peak", p.discharge_off_peak},
          {"discharge_peak_bonus", p.discharge_peak_bonus},
          {"idle_peak_with_charge", p.idle_peak_with_charge}}},
        {"evaluation",
         {{"initial_soc_level", c.eval_initial_soc_level},
          {"penalty_mode", c.eval_mode == PenaltyMode::CostOnly ? "cost_only" : "shaped"}}},
        {"output_dir", c.output_dir.string()},
        {"seeds", c.seeds}};
    return doc;
}

std::string config_fingerprint(const RunConfig& config) {
    json doc = to_json(config);
    // The output location does not change results.
    doc.erase("output_dir");
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(doc.dump())));
    return buf;
}

}  // namespace dairyq
