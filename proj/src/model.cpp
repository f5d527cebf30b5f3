#include "intstab/model.hpp"

#include <algorithm>
#include <stdexcept>

namespace intstab::learners {

std::string to_string(ModelFamily f) {
    switch (f) {
        case ModelFamily::tree: return "tree";
        case ModelFamily::rules: return "rules";
        case ModelFamily::linear: return "linear";
    }
    return "tree";
}

ModelSpec ModelSpec::preset(const std::string& name) {
    ModelSpec s;
    s.id = name;
    if (name == "c45") {
        s.family = ModelFamily::tree;
        s.tree = TreeParams::c45();
    } else if (name == "cart") {
        s.family = ModelFamily::tree;
        s.tree = TreeParams::cart();
    } else if (name == "foil") {
        s.family = ModelFamily::rules;
    } else if (name == "ols" || name == "linreg") {
        s.family = ModelFamily::linear;
        s.linear.variant = LinearVariant::ols;
        s.linear.alpha = 0.0;
    } else if (name == "ridge") {
        s.family = ModelFamily::linear;
        s.linear.variant = LinearVariant::ridge;
    } else if (name == "lasso") {
        s.family = ModelFamily::linear;
        s.linear.variant = LinearVariant::lasso;
    } else {
        throw std::invalid_argument("unknown model: " + name);
    }
    return s;
}

FittedModel fit_model(const ModelSpec& spec, const data::Dataset& train) {
    FittedModel m;
    m.spec = spec;
    m.feature_count = train.cols();
    m.features = train.features();
    switch (spec.family) {
        case ModelFamily::tree:
            m.body = FittedTree{fit_tree(train, spec.tree)};
            break;
        case ModelFamily::rules: {
            auto disc = data::Discretizer::fit(train, spec.bins);
            auto rules = fit_foil(disc.transform(train), spec.min_gain);
            m.body = FittedRules{std::move(disc), std::move(rules)};
            break;
        }
        case ModelFamily::linear: {
            auto enc = data::Encoder::fit(train);
            auto lin = fit_linear(enc.transform(train), spec.linear);
            m.body = FittedLinear{std::move(enc), std::move(lin)};
            break;
        }
    }
    return m;
}

std::vector<int> predict(const FittedModel& model, const data::Dataset& rows) {
    if (rows.features() != model.features) throw std::invalid_argument("predict: feature schema mismatch");
    if (const auto* t = std::get_if<FittedTree>(&model.body)) return t->tree.predict(rows);
    if (const auto* r = std::get_if<FittedRules>(&model.body)) return r->rules.predict(r->discretizer.transform(rows));
    const auto& l = std::get<FittedLinear>(model.body);
    return l.linear.predict(l.encoder.transform(rows));
}

StructuralSummary introspect(const FittedModel& model) {
    StructuralSummary s;
    if (const auto* t = std::get_if<FittedTree>(&model.body)) {
        s.used_feature_mask = t->tree.used_features();
        s.node_count = t->tree.node_count();
        s.depth = t->tree.depth();
    } else if (const auto* r = std::get_if<FittedRules>(&model.body)) {
        s.used_feature_mask = r->rules.used_features();
        s.rule_count = r->rules.rule_count();
        s.conjunct_total = r->rules.conjunct_total();
    } else {
        const auto& l = std::get<FittedLinear>(model.body).linear;
        s.used_feature_mask = l.used_features(model.feature_count);
        std::map<std::string, double> coef;
        for (std::size_t j = 0; j < l.coefficients().size(); ++j) coef[l.column_names()[j]] = l.coefficients()[j];
        s.coefficients = std::move(coef);
    }
    s.used_count = static_cast<std::size_t>(std::count(s.used_feature_mask.begin(), s.used_feature_mask.end(), 1));
    return s;
}

namespace {

nlohmann::json tree_node_json(const TreeModel& tree, std::size_t id) {
    const TreeNode& node = tree.nodes()[id];
    const auto& features = tree.features();
    nlohmann::json j;
    nlohmann::json hist = nlohmann::json::object();
    for (std::size_t c = 0; c < node.histogram.size(); ++c) hist[tree.class_names()[c]] = node.histogram[c];
    j["histogram"] = hist;
    j["prediction"] = tree.class_names()[static_cast<std::size_t>(node.prediction)];
    if (node.is_leaf()) return j;
    const auto& f = features[node.feature];
    j["feature"] = f.name;
    nlohmann::json children = nlohmann::json::array();
    switch (node.split) {
        case SplitKind::threshold:
            j["test"] = "threshold";
            j["threshold"] = node.threshold;
            break;
        case SplitKind::one_vs_rest:
            j["test"] = "equals";
            j["category"] = f.categories[static_cast<std::size_t>(node.category)];
            break;
        case SplitKind::multiway: {
            j["test"] = "multiway";
            nlohmann::json cats = nlohmann::json::array();
            for (int c : node.child_categories) cats.push_back(f.categories[static_cast<std::size_t>(c)]);
            j["categories"] = cats;
            break;
        }
        case SplitKind::leaf:
            break;
    }
    for (std::size_t c : node.children) children.push_back(tree_node_json(tree, c));
    j["children"] = children;
    return j;
}

}  // namespace

nlohmann::json to_json(const FittedModel& model) {
    nlohmann::json j;
    j["model"] = model.spec.id;
    j["family"] = to_string(model.spec.family);
    if (const auto* t = std::get_if<FittedTree>(&model.body)) {
        j["root"] = tree_node_json(t->tree, 0);
        j["node_count"] = t->tree.node_count();
        j["depth"] = t->tree.depth();
    } else if (const auto* r = std::get_if<FittedRules>(&model.body)) {
        const auto& rs = r->rules;
        nlohmann::json rules = nlohmann::json::array();
        for (const auto& rule : rs.rules()) {
            nlohmann::json conj = nlohmann::json::array();
            for (const auto& lit : rule.conjuncts) {
                const auto& f = rs.features()[lit.feature];
                conj.push_back({{"feature", f.name}, {"category", f.categories[static_cast<std::size_t>(lit.category)]}});
            }
            rules.push_back({{"conjuncts", conj},
                             {"class", rs.class_names()[static_cast<std::size_t>(rule.label)]},
                             {"positives", rule.positives},
                             {"negatives", rule.negatives}});
        }
        j["rules"] = rules;
        j["default_class"] = rs.class_names()[static_cast<std::size_t>(rs.default_class())];
    } else {
        const auto& l = std::get<FittedLinear>(model.body).linear;
        nlohmann::json coef = nlohmann::json::object();
        for (std::size_t c = 0; c < l.coefficients().size(); ++c) coef[l.column_names()[c]] = l.coefficients()[c];
        j["variant"] = to_string(l.params().variant);
        j["alpha"] = l.params().alpha;
        j["coefficients"] = coef;
        j["intercept"] = l.intercept();
    }
    return j;
}

}  // namespace intstab::learners
