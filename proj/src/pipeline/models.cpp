#include "akisub/pipeline/models.hpp"

#include "akisub/baselines/logistic.hpp"
#include "akisub/baselines/sequence_models.hpp"
#include "akisub/error.hpp"

namespace akisub::pipeline {

namespace {

std::vector<int> labels_of(const Dataset& data, const std::vector<std::size_t>& rows) {
    std::vector<int> y;
    for (auto i : rows) y.push_back(data.stays[i].label);
    return y;
}

enum class LrInput { structured, notes, both };

baselines::Matrix lr_features(const Dataset& data, const std::vector<std::size_t>& rows, LrInput kind,
                              const features::SummaryImputer& imputer, const features::Vocabulary& vocab) {
    baselines::Matrix x;
    for (auto i : rows) {
        const auto& s = data.stays[i];
        std::vector<double> row;
        if (kind != LrInput::notes) row = features::impute_summary(s.summary, imputer);
        if (kind != LrInput::structured) {
            auto bow = features::tokens_to_bow(s.notes, vocab);
            // the two special tokens never occur in notes
            row.insert(row.end(), bow.begin() + 2, bow.end());
        }
        x.push_back(std::move(row));
    }
    return x;
}

FitPredict lr_model(const Dataset& data, const RunConfig& config, LrInput kind) {
    return [&data, &config, kind](const std::vector<std::size_t>& train, const std::vector<std::size_t>& test,
                                  const Candidate&, const std::string& split_id) {
        std::vector<features::BaselineFeatures> summaries;
        for (auto i : train) summaries.push_back(data.stays[i].summary);
        const auto imputer = features::fit_summary_imputer(summaries, split_id);
        const auto vocab = fit_vocabulary(data, train, config.vocab_min_count);
        baselines::LrOptions opt;
        opt.l2 = config.evaluate.lr_l2;
        opt.epochs = config.evaluate.lr_epochs;
        const auto params = baselines::lr_train(lr_features(data, train, kind, imputer, vocab), labels_of(data, train), opt);
        return baselines::lr_predict(params, lr_features(data, test, kind, imputer, vocab));
    };
}

enum class NetKind { memnet, lstm, hielstm };

FitPredict net_model(const Dataset& data, const RunConfig& config, NetKind kind) {
    return [&data, &config, kind](const std::vector<std::size_t>& train, const std::vector<std::size_t>& test,
                                  const Candidate& c, const std::string& split_id) {
        const auto stats = fit_scaling(data, train, split_id);
        const auto vocab = fit_vocabulary(data, train, config.vocab_min_count);
        const auto xtr = make_inputs(data, train, stats, split_id, vocab, config.max_note_len);
        const auto xte = make_inputs(data, test, stats, split_id, vocab, config.max_note_len);
        model::HyperConfig h = config.hyper;
        h.learning_rate *= c.lr_multiplier;
        h.hops = c.hops;
        const auto y = labels_of(data, train);
        switch (kind) {
            case NetKind::memnet:
                return model::predict_proba(model::train(xtr, y, h, vocab.size()).model, xte);
            case NetKind::lstm:
                return baselines::predict_proba(baselines::lstm_baseline_train(xtr, y, h).model, xte);
            case NetKind::hielstm:
                return baselines::predict_proba(baselines::hielstm_only_train(xtr, y, h, vocab.size()).model, xte);
        }
        return std::vector<double>{};
    };
}

}  // namespace

std::vector<CvModel> make_cv_models(const Dataset& data, const RunConfig& config) {
    std::vector<Candidate> lr_only, lr_hops;
    for (double m : config.evaluate.lr_multipliers) {
        lr_only.push_back({m, 1});
        for (auto h : config.evaluate.hops) lr_hops.push_back({m, h});
    }
    std::vector<CvModel> out;
    for (const auto& id : config.evaluate.models) {
        if (id == "lr_unstr") out.push_back({id, {{}}, lr_model(data, config, LrInput::notes)});
        else if (id == "lr_str") out.push_back({id, {{}}, lr_model(data, config, LrInput::structured)});
        else if (id == "lr_both") out.push_back({id, {{}}, lr_model(data, config, LrInput::both)});
        else if (id == "lstm") out.push_back({id, lr_only, net_model(data, config, NetKind::lstm)});
        else if (id == "hielstm") out.push_back({id, lr_only, net_model(data, config, NetKind::hielstm)});
        else if (id == "mn_hielstm") out.push_back({id, lr_hops, net_model(data, config, NetKind::memnet)});
        else throw ConfigError("unknown model '" + id + "'");
    }
    return out;
}

}  // namespace akisub::pipeline
