#include "fedrun/data/synthetic.hpp"

#include <cmath>

#include "fedrun/rng.hpp"

namespace fedrun::data {

void CohortSpec::validate() const {
    if (dim == 0) throw ConfigError("cohort dim must be positive");
    for (const SplitSpec* s : {&train, &val, &test}) {
        if (s->n == 0) throw ConfigError("split sizes must be positive");
        if (!(s->prevalence > 0.0 && s->prevalence < 1.0))
            throw ConfigError("prevalence must be strictly inside (0,1)");
    }
    for (size_t d : signal_dims)
        if (d >= dim) throw ConfigError("signal dim out of range");
    if (ferritin_pos.sigma <= 0 || ferritin_neg.sigma <= 0)
        throw ConfigError("ferritin sigma must be positive");
}

static double draw_ferritin(Rng& rng, const LogNormal& ln, bool positive) {
    // keep the draw consistent with the label: positives below the threshold
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double f = std::exp(ln.mu + ln.sigma * rng.normal());
        if (positive == (f < 15.0)) return f;
    }
    throw ConfigError("ferritin distribution is inconsistent with the class label");
}

CohortDataset generate_cohort(const CohortSpec& spec, uint64_t seed) {
    spec.validate();
    Rng rng(seed);

    CohortDataset ds;
    ds.site_id = spec.site_id;
    ds.dim = spec.dim;
    size_t total = spec.train.n + spec.val.n + spec.test.n;
    ds.embeddings.reserve(total * spec.dim);
    ds.labels.reserve(total);
    ds.split.reserve(total);
    ds.ferritin.reserve(total);

    struct SplitPlan {
        Split tag;
        const SplitSpec* s;
    };
    for (auto [tag, s] : {SplitPlan{Split::train, &spec.train}, SplitPlan{Split::val, &spec.val},
                          SplitPlan{Split::test, &spec.test}}) {
        size_t n_pos = static_cast<size_t>(std::llround(s->prevalence * static_cast<double>(s->n)));
        if (n_pos == 0 || n_pos >= s->n)
            throw ConfigError(std::string("split '") + split_name(tag) +
                              "' has no samples of one class; spec infeasible");
        std::vector<uint8_t> labels(s->n, 0);
        for (size_t i = 0; i < n_pos; ++i) labels[i] = 1;
        rng.shuffle(labels);

        for (size_t i = 0; i < s->n; ++i) {
            size_t base = ds.embeddings.size();
            ds.embeddings.resize(base + spec.dim);
            float* row = ds.embeddings.data() + base;
            for (size_t j = 0; j < spec.dim; ++j) row[j] = static_cast<float>(rng.normal());
            if (labels[i])
                for (size_t d : spec.signal_dims) row[d] += static_cast<float>(spec.effect_size);

            const LogNormal& ln = labels[i] ? spec.ferritin_pos : spec.ferritin_neg;
            ds.ferritin.push_back(draw_ferritin(rng, ln, labels[i] != 0));
            ds.labels.push_back(labels[i]);
            ds.split.push_back(tag);
        }
    }
    ds.validate();
    return ds;
}

const char* const kPresetNames[2] = {"aumc_like", "nhsbt_like"};

// Log-normal parameters fitted to the reported replete-class medians and
// IQRs (sigma = ln(q75/q25) / (2 * 0.67449)); deficient-class parameters are
// plausible frozen values and only affect label realism.
CohortSpec preset(const std::string& name, double scale) {
    if (scale <= 0) throw ConfigError("preset scale must be positive");
    auto sized = [scale](size_t n, double prev) {
        auto m = static_cast<size_t>(std::llround(static_cast<double>(n) * scale));
        if (m < 10) throw ConfigError("preset scale too small to be feasible");
        return SplitSpec{m, prev};
    };

    CohortSpec s;
    s.dim = 256;
    if (name == "aumc_like") {
        s.site_id = "aumc_like";
        s.train = sized(44032, 0.028);
        s.val = sized(73344, 0.022);
        s.test = sized(100096, 0.016);
        s.signal_dims = {7, 23, 55, 84, 121, 156, 190, 230};
        s.effect_size = 1.6;
        s.ferritin_pos = {std::log(7.0), 0.6};
        s.ferritin_neg = {std::log(602.0), 1.7397};
    } else if (name == "nhsbt_like") {
        s.site_id = "nhsbt_like";
        s.train = sized(30997, 0.195);
        s.val = sized(7278, 0.181);
        s.test = sized(9041, 0.193);
        s.signal_dims = {12, 39, 66, 98, 133, 168, 203, 245};
        s.effect_size = 1.0;
        s.ferritin_pos = {std::log(10.0), 0.35};
        s.ferritin_neg = {std::log(39.0), 0.6852};
    } else {
        throw ConfigError("unknown preset: " + name);
    }
    return s;
}

}  // namespace fedrun::data
