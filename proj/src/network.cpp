#include "olpsynth/network.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include "olpsynth/error.hpp"

namespace olpsynth {

std::string_view to_string(LayerKind k) noexcept {
    switch (k) {
        case LayerKind::Input: return "input";
        case LayerKind::Conv: return "conv";
        case LayerKind::ReLU: return "relu";
        case LayerKind::MaxPool: return "maxpool";
        case LayerKind::AvgPool: return "avgpool";
        case LayerKind::FullyConnected: return "fc";
        case LayerKind::Softmax: return "softmax";
        case LayerKind::Concat: return "concat";
    }
    return "?";
}

std::optional<std::size_t> window_output(std::size_t in, std::size_t k, std::size_t s, std::size_t p) noexcept {
    if (k == 0 || s == 0 || in + 2 * p < k) return std::nullopt;
    return (in + 2 * p - k) / s + 1;
}

namespace {

std::string where(const LayerSpec& l) {
    std::string s = "layer '" + l.name + "'";
    if (l.source_line) s += " (line " + std::to_string(l.source_line) + ")";
    return s;
}

}  // namespace

NetworkModel::NetworkModel(std::vector<LayerSpec> layers) {
    if (layers.empty()) throw ParseError(0, "network has no layers");

    std::unordered_map<std::string, std::size_t> by_name;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (!by_name.emplace(layers[i].name, i).second)
            throw ParseError(layers[i].source_line, "duplicate layer name '" + layers[i].name + "'");
    }

    std::size_t inputs = 0;
    std::vector<std::vector<std::size_t>> preds(layers.size());
    std::vector<std::vector<std::size_t>> succs(layers.size());
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const LayerSpec& l = layers[i];
        const std::size_t arity = l.predecessors.size();
        if (l.kind == LayerKind::Input) {
            ++inputs;
            if (arity != 0) throw ParseError(l.source_line, "input layer takes no predecessors");
        } else if (l.kind == LayerKind::Concat) {
            if (arity < 2) throw ParseError(l.source_line, where(l) + ": concat needs at least 2 predecessors");
        } else if (arity != 1) {
            throw ParseError(l.source_line, where(l) + ": expects exactly 1 predecessor");
        }
        for (const auto& p : l.predecessors) {
            auto it = by_name.find(p);
            if (it == by_name.end())
                throw ParseError(l.source_line, where(l) + ": dangling predecessor '" + p + "'");
            preds[i].push_back(it->second);
            succs[it->second].push_back(i);
        }
    }
    if (inputs != 1) throw ParseError(0, "network needs exactly one input layer, found " + std::to_string(inputs));

    // Kahn's algorithm, always taking the earliest declared ready layer.
    std::vector<std::size_t> indegree(layers.size());
    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        indegree[i] = preds[i].size();
        if (indegree[i] == 0) ready.insert(i);
    }
    std::vector<std::size_t> order;
    order.reserve(layers.size());
    while (!ready.empty()) {
        const std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (std::size_t s : succs[i])
            if (--indegree[s] == 0) ready.insert(s);
    }
    if (order.size() != layers.size()) {
        for (std::size_t i = 0; i < layers.size(); ++i)
            if (indegree[i] != 0) throw ParseError(layers[i].source_line, "cycle detected through " + where(layers[i]));
    }

    std::size_t terminals = 0;
    for (std::size_t i = 0; i < layers.size(); ++i) terminals += succs[i].empty() ? 1 : 0;
    if (terminals != 1)
        throw ParseError(0, "network needs exactly one terminal layer, found " + std::to_string(terminals));

    std::vector<std::size_t> position(layers.size());
    for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = k;

    layers_.reserve(layers.size());
    preds_.resize(layers.size());
    succs_.resize(layers.size());
    for (std::size_t k = 0; k < order.size(); ++k) {
        const std::size_t i = order[k];
        layers_.push_back(std::move(layers[i]));
        for (std::size_t p : preds[i]) preds_[k].push_back(position[p]);
        for (std::size_t s : succs[i]) succs_[k].push_back(position[s]);
    }

    output_shapes_.resize(layers_.size());
    for (std::size_t k = 0; k < layers_.size(); ++k) {
        const LayerSpec& l = layers_[k];
        if (l.kind == LayerKind::Input) {
            if (l.input_shape.elements() == 0) throw ParseError(l.source_line, "input shape has a zero dimension");
            check_shape(l.input_shape);
            output_shapes_[k] = l.input_shape;
            continue;
        }
        const TensorShape& in = output_shapes_[preds_[k].front()];
        TensorShape out = in;
        switch (l.kind) {
            case LayerKind::Conv:
            case LayerKind::MaxPool:
            case LayerKind::AvgPool: {
                const std::size_t pad = l.kind == LayerKind::Conv ? l.padding : 0;
                const auto h = window_output(in.height, l.kernel, l.stride, pad);
                const auto w = window_output(in.width, l.kernel, l.stride, pad);
                if (!h || !w)
                    throw ParseError(l.source_line, where(l) + ": non-positive output dimension for input " +
                                                        to_string(in));
                out = {l.kind == LayerKind::Conv ? l.output_channels : in.channels, *h, *w};
                break;
            }
            case LayerKind::FullyConnected:
                out = {l.output_channels, 1, 1};
                break;
            case LayerKind::Concat:
                out.channels = 0;
                for (std::size_t p : preds_[k]) out.channels += output_shapes_[p].channels;
                break;
            default:
                break;
        }
        output_shapes_[k] = out;
    }
}

const TensorShape& NetworkModel::input_shape(std::size_t i) const {
    if (preds_.at(i).empty()) return output_shapes_.at(i);
    return output_shapes_.at(preds_[i].front());
}

std::optional<std::size_t> NetworkModel::find(std::string_view name) const {
    for (std::size_t i = 0; i < layers_.size(); ++i)
        if (layers_[i].name == name) return i;
    return std::nullopt;
}

std::size_t NetworkModel::weight_count(std::size_t i) const {
    const LayerSpec& l = layers_.at(i);
    if (l.kind == LayerKind::Conv) return l.output_channels * l.input_channels * l.kernel * l.kernel;
    if (l.kind == LayerKind::FullyConnected) return l.output_channels * input_shape(i).elements();
    return 0;
}

std::size_t NetworkModel::bias_count(std::size_t i) const {
    return layers_.at(i).has_parameters() ? layers_[i].output_channels : 0;
}

namespace {

struct LineParser {
    std::size_t line;
    std::vector<std::string_view> tokens;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(line, what); }

    std::size_t integer(std::string_view text, std::string_view key, bool allow_zero) const {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
            fail("bad integer '" + std::string(text) + "' for " + std::string(key));
        if (!allow_zero && v == 0) fail(std::string(key) + " must be positive");
        return v;
    }

    LayerSpec parse() const {
        const std::string_view kind = tokens.front();
        LayerSpec l;
        l.source_line = line;
        if (kind == "input") {
            if (tokens.size() != 4) fail("expected 'input C H W'");
            l.kind = LayerKind::Input;
            l.name = "input";
            l.input_shape = {integer(tokens[1], "C", false), integer(tokens[2], "H", false),
                             integer(tokens[3], "W", false)};
            return l;
        }

        static const std::map<std::string_view, LayerKind> kinds = {
            {"conv", LayerKind::Conv},       {"relu", LayerKind::ReLU},
            {"maxpool", LayerKind::MaxPool}, {"avgpool", LayerKind::AvgPool},
            {"fc", LayerKind::FullyConnected}, {"softmax", LayerKind::Softmax},
            {"concat", LayerKind::Concat}};
        auto it = kinds.find(kind);
        if (it == kinds.end()) fail("unknown layer kind '" + std::string(kind) + "'");
        l.kind = it->second;
        if (tokens.size() < 2) fail("missing layer name");
        l.name = std::string(tokens[1]);
        if (l.name.find('=') != std::string::npos || l.name.find(',') != std::string::npos)
            fail("bad layer name '" + l.name + "'");

        std::map<std::string_view, std::string_view> kv;
        for (std::size_t i = 2; i < tokens.size(); ++i) {
            const auto eq = tokens[i].find('=');
            if (eq == std::string_view::npos || eq == 0) fail("expected key=value, got '" + std::string(tokens[i]) + "'");
            if (!kv.emplace(tokens[i].substr(0, eq), tokens[i].substr(eq + 1)).second)
                fail("duplicate key '" + std::string(tokens[i].substr(0, eq)) + "'");
        }

        std::vector<std::string_view> keys = {"pred"};
        switch (l.kind) {
            case LayerKind::Conv: keys.insert(keys.end(), {"N", "M", "K", "S", "P"}); break;
            case LayerKind::MaxPool:
            case LayerKind::AvgPool: keys.insert(keys.end(), {"K", "S"}); break;
            case LayerKind::FullyConnected: keys.push_back("M"); break;
            default: break;
        }
        for (auto k : keys)
            if (!kv.contains(k)) fail(std::string(to_string(l.kind)) + " requires " + std::string(k) + "=");
        for (const auto& [k, v] : kv)
            if (std::find(keys.begin(), keys.end(), k) == keys.end())
                fail("unexpected key '" + std::string(k) + "' for " + std::string(to_string(l.kind)));

        std::string_view preds = kv["pred"];
        while (true) {
            const auto comma = preds.find(',');
            const std::string_view p = preds.substr(0, comma);
            if (p.empty()) fail("empty predecessor name");
            l.predecessors.emplace_back(p);
            if (comma == std::string_view::npos) break;
            preds.remove_prefix(comma + 1);
        }

        if (kv.contains("N")) l.input_channels = integer(kv["N"], "N", false);
        if (kv.contains("M")) l.output_channels = integer(kv["M"], "M", false);
        if (kv.contains("K")) l.kernel = integer(kv["K"], "K", false);
        if (kv.contains("S")) l.stride = integer(kv["S"], "S", false);
        if (kv.contains("P")) l.padding = integer(kv["P"], "P", true);
        return l;
    }
};

}  // namespace

NetworkModel parse_network_description(std::istream& in) {
    std::vector<LayerSpec> layers;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (const auto hash = text.find('#'); hash != std::string::npos) text.resize(hash);
        LineParser p{line, {}};
        std::string_view rest = text;
        while (!rest.empty()) {
            const auto start = rest.find_first_not_of(" \t\r");
            if (start == std::string_view::npos) break;
            rest.remove_prefix(start);
            const auto end = rest.find_first_of(" \t\r");
            p.tokens.push_back(rest.substr(0, end));
            if (end == std::string_view::npos) break;
            rest.remove_prefix(end);
        }
        if (p.tokens.empty()) continue;
        layers.push_back(p.parse());
    }
    return NetworkModel(std::move(layers));
}

NetworkModel parse_network_description(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_network_description(in);
}

NetworkModel load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open network description '" + path + "'");
    return parse_network_description(in);
}

std::string serialize(const NetworkModel& model) {
    std::ostringstream out;
    for (const LayerSpec& l : model.layers()) {
        if (l.kind == LayerKind::Input) {
            out << "input " << l.input_shape.channels << ' ' << l.input_shape.height << ' ' << l.input_shape.width
                << '\n';
            continue;
        }
        out << to_string(l.kind) << ' ' << l.name << " pred=";
        for (std::size_t i = 0; i < l.predecessors.size(); ++i) out << (i ? "," : "") << l.predecessors[i];
        switch (l.kind) {
            case LayerKind::Conv:
                out << " N=" << l.input_channels << " M=" << l.output_channels << " K=" << l.kernel
                    << " S=" << l.stride << " P=" << l.padding;
                break;
            case LayerKind::MaxPool:
            case LayerKind::AvgPool: out << " K=" << l.kernel << " S=" << l.stride; break;
            case LayerKind::FullyConnected: out << " M=" << l.output_channels; break;
            default: break;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace olpsynth
