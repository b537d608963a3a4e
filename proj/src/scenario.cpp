#include "openmax/scenario.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

namespace openmax
{
    using nlohmann::json;

    namespace
    {
        std::string join(const std::string &path, const std::string &key)
        {
            return path.empty() ? key : path + "." + key;
        }

        std::string index_path(const std::string &path, std::size_t i)
        {
            return path + "[" + std::to_string(i) + "]";
        }

        // ---- YAML -> json document model ----

        json scalar_to_json(const YAML::Node &node)
        {
            const std::string &text = node.Scalar();
            if (node.Tag() == "!")
            {
                return text; // quoted scalar
            }
            if (text == "true" || text == "True")
            {
                return true;
            }
            if (text == "false" || text == "False")
            {
                return false;
            }
            if (text == "null" || text == "~" || text.empty())
            {
                return nullptr;
            }
            std::int64_t i = 0;
            auto [iend, ierr] = std::from_chars(text.data(), text.data() + text.size(), i);
            if (ierr == std::errc{} && iend == text.data() + text.size())
            {
                return i;
            }
            double d = 0.0;
            auto [dend, derr] = std::from_chars(text.data(), text.data() + text.size(), d);
            if (derr == std::errc{} && dend == text.data() + text.size())
            {
                return d;
            }
            return text;
        }

        json yaml_to_json(const YAML::Node &node)
        {
            switch (node.Type())
            {
            case YAML::NodeType::Map:
            {
                json obj = json::object();
                for (const auto &kv : node)
                {
                    obj[kv.first.as<std::string>()] = yaml_to_json(kv.second);
                }
                return obj;
            }
            case YAML::NodeType::Sequence:
            {
                json arr = json::array();
                for (const auto &item : node)
                {
                    arr.push_back(yaml_to_json(item));
                }
                return arr;
            }
            case YAML::NodeType::Scalar:
                return scalar_to_json(node);
            default:
                return nullptr;
            }
        }

        void emit_yaml(YAML::Emitter &out, const json &j, bool flow = false)
        {
            if (j.is_object())
            {
                out << (flow ? YAML::Flow : YAML::Block) << YAML::BeginMap;
                for (const auto &[key, value] : j.items())
                {
                    const bool flow_child = flow || key == "range" || key == "arrival_range" ||
                                            key == "values" || key == "growth";
                    out << YAML::Key << key << YAML::Value;
                    emit_yaml(out, value, flow_child);
                }
                out << YAML::EndMap;
            }
            else if (j.is_array())
            {
                out << (flow ? YAML::Flow : YAML::Block) << YAML::BeginSeq;
                for (const auto &item : j)
                {
                    emit_yaml(out, item, flow);
                }
                out << YAML::EndSeq;
            }
            else if (j.is_string())
            {
                out << j.get<std::string>();
            }
            else if (j.is_boolean())
            {
                out << (j.get<bool>() ? "true" : "false");
            }
            else if (j.is_number_integer())
            {
                out << j.get<std::int64_t>();
            }
            else if (j.is_number_float())
            {
                out << j.dump();
            }
            else
            {
                out << YAML::Null;
            }
        }

        // ---- json -> Scenario decoding ----

        class Reader
        {
        public:
            Reader(const json &obj, std::string path) : m_obj(obj), m_path(std::move(path))
            {
                if (!m_obj.is_object())
                {
                    throw ScenarioError(m_path, "expected a mapping");
                }
            }

            bool has(const std::string &key)
            {
                m_seen.insert(key);
                return m_obj.contains(key) && !m_obj.at(key).is_null();
            }

            const json &raw(const std::string &key)
            {
                if (!has(key))
                {
                    throw ScenarioError(join(m_path, key), "required field is missing");
                }
                return m_obj.at(key);
            }

            std::string path(const std::string &key) const { return join(m_path, key); }

            std::uint64_t uint(const std::string &key)
            {
                const json &v = raw(key);
                if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
                {
                    throw ScenarioError(path(key), "expected a non-negative integer");
                }
                return v.get<std::uint64_t>();
            }

            std::uint64_t uint_or(const std::string &key, std::uint64_t fallback)
            {
                return has(key) ? uint(key) : fallback;
            }

            double number(const std::string &key)
            {
                const json &v = raw(key);
                if (!v.is_number())
                {
                    throw ScenarioError(path(key), "expected a number");
                }
                return v.get<double>();
            }

            bool boolean_or(const std::string &key, bool fallback)
            {
                if (!has(key))
                {
                    return fallback;
                }
                const json &v = m_obj.at(key);
                if (!v.is_boolean())
                {
                    throw ScenarioError(path(key), "expected true or false");
                }
                return v.get<bool>();
            }

            std::string string(const std::string &key)
            {
                const json &v = raw(key);
                if (!v.is_string())
                {
                    throw ScenarioError(path(key), "expected a string");
                }
                return v.get<std::string>();
            }

            void reject_unknown() const
            {
                for (const auto &[key, value] : m_obj.items())
                {
                    if (!m_seen.count(key))
                    {
                        throw ScenarioError(join(m_path, key), "unknown field");
                    }
                }
            }

        private:
            const json &m_obj;
            std::string m_path;
            std::set<std::string> m_seen;
        };

        Value value_at(const json &v, const std::string &path)
        {
            if (!v.is_number_integer())
            {
                throw ScenarioError(path, "expected an integer value");
            }
            if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))
            {
                throw ScenarioError(path, "value out of 64-bit signed range");
            }
            return v.get<Value>();
        }

        ValueRange decode_range(const json &v, const std::string &path)
        {
            if (!v.is_array() || v.size() != 2)
            {
                throw ScenarioError(path, "expected [lo, hi]");
            }
            return ValueRange{value_at(v[0], index_path(path, 0)), value_at(v[1], index_path(path, 1))};
        }

        Protocol decode_protocol(const std::string &text, const std::string &path)
        {
            if (text == "counter")
            {
                return Protocol::counter;
            }
            if (text == "timeout")
            {
                return Protocol::timeout;
            }
            throw ScenarioError(path, "expected 'counter' or 'timeout', got '" + text + "'");
        }

        InitialPopulation decode_initial(const json &j, const std::string &path)
        {
            Reader r(j, path);
            InitialPopulation init;
            if (r.has("values"))
            {
                const json &vals = r.raw("values");
                if (!vals.is_array())
                {
                    throw ScenarioError(r.path("values"), "expected a list of integers");
                }
                std::vector<Value> out;
                for (std::size_t i = 0; i < vals.size(); ++i)
                {
                    out.push_back(value_at(vals[i], index_path(r.path("values"), i)));
                }
                init.values = std::move(out);
                if (r.has("count") && r.uint("count") != init.values->size())
                {
                    throw ScenarioError(r.path("count"), "does not match the number of listed values");
                }
            }
            else
            {
                init.count = r.uint("count");
            }
            if (r.has("range"))
            {
                init.range = decode_range(r.raw("range"), r.path("range"));
            }
            init.distinct = r.boolean_or("distinct", false);
            r.reject_unknown();
            return init;
        }

        Threshold decode_threshold(const json &j, const std::string &path, std::uint64_t population)
        {
            Reader r(j, path);
            std::uint64_t base = 0;
            if (r.has("base"))
            {
                if (r.has("factor"))
                {
                    throw ScenarioError(r.path("factor"), "give either base or factor, not both");
                }
                base = r.uint("base");
            }
            else if (r.has("factor"))
            {
                const double factor = r.number("factor");
                if (!(factor > 0.0) || !std::isfinite(factor))
                {
                    throw ScenarioError(r.path("factor"), "must be positive");
                }
                base = threshold_from_population(factor, population);
            }
            else
            {
                throw ScenarioError(r.path("base"), "required field is missing");
            }
            if (base == 0)
            {
                throw ScenarioError(r.path("base"), "must be positive");
            }
            std::uint64_t amount = 0;
            std::uint64_t every = 1;
            if (r.has("growth"))
            {
                Reader g(r.raw("growth"), r.path("growth"));
                amount = g.uint("amount");
                every = g.uint_or("every", 1);
                if (every == 0)
                {
                    throw ScenarioError(g.path("every"), "must be positive");
                }
                g.reject_unknown();
            }
            r.reject_unknown();
            return amount == 0 ? Threshold::fixed(base) : Threshold::linear(base, amount, every);
        }

        ScriptedEvent decode_event(const json &j, const std::string &path)
        {
            Reader r(j, path);
            ScriptedEvent ev{r.uint("tick"), ScriptedArrival{}};
            const std::string type = r.string("type");
            if (type == "arrival")
            {
                ScriptedArrival a;
                if (r.has("x"))
                {
                    a.x = value_at(r.raw("x"), r.path("x"));
                }
                ev.action = a;
            }
            else if (type == "departure")
            {
                ScriptedDeparture d;
                if (r.has("target"))
                {
                    const json &t = r.raw("target");
                    if (t.is_string() && t.get<std::string>() == "max")
                    {
                        d.target = DepartureTarget::current_max;
                    }
                    else if (t.is_string() && t.get<std::string>() == "random")
                    {
                        d.target = DepartureTarget::random;
                    }
                    else if (t.is_number_integer() && t.get<std::int64_t>() >= 0)
                    {
                        d.target = DepartureTarget::agent;
                        d.id = AgentId{t.get<std::uint64_t>()};
                    }
                    else
                    {
                        throw ScenarioError(r.path("target"), "expected 'max', 'random' or an agent id");
                    }
                }
                ev.action = d;
            }
            else
            {
                throw ScenarioError(r.path("type"), "expected 'arrival' or 'departure', got '" + type + "'");
            }
            r.reject_unknown();
            return ev;
        }

        ChurnModel decode_churn(const json &j, const std::string &path)
        {
            Reader r(j, path);
            const std::string kind = r.string("kind");
            if (kind == "scripted")
            {
                ScriptedChurn sc;
                if (r.has("events"))
                {
                    const json &evs = r.raw("events");
                    if (!evs.is_array())
                    {
                        throw ScenarioError(r.path("events"), "expected a list");
                    }
                    for (std::size_t i = 0; i < evs.size(); ++i)
                    {
                        sc.events.push_back(decode_event(evs[i], index_path(r.path("events"), i)));
                    }
                }
                if (r.has("arrival_range"))
                {
                    sc.arrival_range = decode_range(r.raw("arrival_range"), r.path("arrival_range"));
                }
                r.reject_unknown();
                return sc;
            }
            if (kind == "stochastic")
            {
                StochasticChurn st;
                st.p_arrival = r.has("p_arrival") ? r.number("p_arrival") : st.p_arrival;
                st.p_departure = r.has("p_departure") ? r.number("p_departure") : st.p_departure;
                if (r.has("stop_tick"))
                {
                    st.stop_tick = r.uint("stop_tick");
                }
                if (r.has("range"))
                {
                    st.range = decode_range(r.raw("range"), r.path("range"));
                }
                r.reject_unknown();
                return st;
            }
            throw ScenarioError(r.path("kind"), "expected 'scripted' or 'stochastic', got '" + kind + "'");
        }

        Scenario decode_scenario(const json &doc)
        {
            Reader r(doc, "");
            Scenario s;
            if (r.has("name"))
            {
                s.name = r.string("name");
            }
            s.protocol = decode_protocol(r.string("protocol"), "protocol");
            s.horizon = r.uint("horizon");
            s.snapshot_stride = r.uint_or("snapshot_stride", 1);
            s.allow_self_pairs = r.boolean_or("allow_self_pairs", false);
            s.initial = decode_initial(r.raw("initial"), "initial");
            if (r.has("threshold"))
            {
                s.threshold = decode_threshold(r.raw("threshold"), "threshold", s.initial.size());
            }
            if (r.has("churn"))
            {
                s.churn = decode_churn(r.raw("churn"), "churn");
            }
            r.reject_unknown();
            // Scripted events are stored in tick order; duplicates are a
            // validation error, so keep the original order for them.
            if (auto *sc = std::get_if<ScriptedChurn>(&s.churn))
            {
                std::stable_sort(sc->events.begin(), sc->events.end(),
                                 [](const ScriptedEvent &a, const ScriptedEvent &b) { return a.tick < b.tick; });
            }
            return s;
        }

        json range_json(const ValueRange &r)
        {
            return json::array({r.lo, r.hi});
        }

        json encode(const Scenario &s)
        {
            json j;
            j["name"] = s.name;
            j["protocol"] = to_string(s.protocol);
            j["horizon"] = s.horizon;
            j["snapshot_stride"] = s.snapshot_stride;
            if (s.allow_self_pairs)
            {
                j["allow_self_pairs"] = true;
            }

            json init;
            if (s.initial.values)
            {
                init["values"] = *s.initial.values;
            }
            else
            {
                init["count"] = s.initial.count;
            }
            init["range"] = range_json(s.initial.range);
            init["distinct"] = s.initial.distinct;
            j["initial"] = init;

            if (s.threshold)
            {
                json t;
                t["base"] = s.threshold->base();
                if (s.threshold->grows())
                {
                    t["growth"] = {{"amount", s.threshold->growth_amount()}, {"every", s.threshold->growth_every()}};
                }
                j["threshold"] = t;
            }

            json churn;
            if (const auto *sc = std::get_if<ScriptedChurn>(&s.churn))
            {
                churn["kind"] = "scripted";
                json evs = json::array();
                for (const auto &ev : sc->events)
                {
                    json e;
                    e["tick"] = ev.tick;
                    if (const auto *a = std::get_if<ScriptedArrival>(&ev.action))
                    {
                        e["type"] = "arrival";
                        if (a->x)
                        {
                            e["x"] = *a->x;
                        }
                    }
                    else
                    {
                        const auto &d = std::get<ScriptedDeparture>(ev.action);
                        e["type"] = "departure";
                        switch (d.target)
                        {
                        case DepartureTarget::current_max:
                            e["target"] = "max";
                            break;
                        case DepartureTarget::random:
                            e["target"] = "random";
                            break;
                        case DepartureTarget::agent:
                            e["target"] = d.id.value;
                            break;
                        }
                    }
                    evs.push_back(e);
                }
                churn["events"] = evs;
                churn["arrival_range"] = range_json(sc->arrival_range);
            }
            else
            {
                const auto &st = std::get<StochasticChurn>(s.churn);
                churn["kind"] = "stochastic";
                churn["p_arrival"] = st.p_arrival;
                churn["p_departure"] = st.p_departure;
                if (st.stop_tick)
                {
                    churn["stop_tick"] = *st.stop_tick;
                }
                churn["range"] = range_json(st.range);
            }
            j["churn"] = churn;
            return j;
        }

        void validate_range(const ValueRange &r, const std::string &path)
        {
            if (r.hi < r.lo)
            {
                throw ScenarioError(path, "lo must not exceed hi");
            }
        }

        void validate_probability(double p, const std::string &path)
        {
            if (!(p >= 0.0 && p <= 1.0))
            {
                throw ScenarioError(path, "probability must lie in [0, 1]");
            }
        }
    }

    std::uint64_t Scenario::reference_tick() const
    {
        if (const auto *sc = std::get_if<ScriptedChurn>(&churn))
        {
            for (const auto &ev : sc->events)
            {
                if (std::holds_alternative<ScriptedDeparture>(ev.action))
                {
                    return ev.tick;
                }
            }
            return 0;
        }
        return std::get<StochasticChurn>(churn).stop_tick.value_or(0);
    }

    void validate(const Scenario &s)
    {
        if (s.horizon == 0)
        {
            throw ScenarioError("horizon", "must be positive");
        }
        if (s.snapshot_stride == 0)
        {
            throw ScenarioError("snapshot_stride", "must be positive");
        }
        if (s.protocol == Protocol::timeout && !s.threshold)
        {
            throw ScenarioError("threshold", "timeout protocol requires a threshold");
        }
        if (s.protocol == Protocol::counter && s.threshold)
        {
            throw ScenarioError("threshold", "counter protocol does not take a threshold");
        }
        if (s.allow_self_pairs && s.protocol != Protocol::counter)
        {
            throw ScenarioError("allow_self_pairs", "only the counter protocol admits self pairs");
        }

        validate_range(s.initial.range, "initial.range");
        if (!s.initial.values && s.initial.distinct)
        {
            const auto width = static_cast<unsigned __int128>(
                static_cast<std::uint64_t>(s.initial.range.hi) - static_cast<std::uint64_t>(s.initial.range.lo)) + 1;
            if (width < s.initial.count)
            {
                throw ScenarioError("initial.distinct", "range holds fewer distinct values than count");
            }
        }
        if (s.initial.values && s.initial.distinct)
        {
            std::set<Value> uniq(s.initial.values->begin(), s.initial.values->end());
            if (uniq.size() != s.initial.values->size())
            {
                throw ScenarioError("initial.values", "values are not distinct");
            }
        }

        if (const auto *sc = std::get_if<ScriptedChurn>(&s.churn))
        {
            validate_range(sc->arrival_range, "churn.arrival_range");
            for (std::size_t i = 0; i < sc->events.size(); ++i)
            {
                const std::string path = index_path("churn.events", i) + ".tick";
                if (sc->events[i].tick >= s.horizon)
                {
                    throw ScenarioError(path, "scripted event at tick " + std::to_string(sc->events[i].tick) +
                                                  " is not before the horizon " + std::to_string(s.horizon));
                }
                if (i > 0 && sc->events[i].tick <= sc->events[i - 1].tick)
                {
                    throw ScenarioError(path, "at most one scripted event per tick, in increasing order");
                }
            }
        }
        else
        {
            const auto &st = std::get<StochasticChurn>(s.churn);
            validate_probability(st.p_arrival, "churn.p_arrival");
            validate_probability(st.p_departure, "churn.p_departure");
            if (st.p_arrival + st.p_departure > 1.0)
            {
                throw ScenarioError("churn", "p_arrival + p_departure must not exceed 1");
            }
            validate_range(st.range, "churn.range");
        }
    }

    Scenario parse_scenario(std::string_view text)
    {
        json doc;
        const auto first = text.find_first_not_of(" \t\r\n");
        if (first != std::string_view::npos && text[first] == '{')
        {
            try
            {
                doc = json::parse(text);
            }
            catch (const json::parse_error &e)
            {
                throw ScenarioError("", std::string("malformed JSON: ") + e.what());
            }
        }
        else
        {
            try
            {
                doc = yaml_to_json(YAML::Load(std::string(text)));
            }
            catch (const YAML::Exception &e)
            {
                throw ScenarioError("", std::string("malformed document: ") + e.what());
            }
        }
        Scenario s = decode_scenario(doc);
        validate(s);
        return s;
    }

    std::string to_json_text(const Scenario &scenario)
    {
        return encode(scenario).dump(2);
    }

    std::string to_yaml_text(const Scenario &scenario)
    {
        YAML::Emitter out;
        emit_yaml(out, encode(scenario));
        return std::string(out.c_str()) + "\n";
    }

    const std::vector<Value> &fig1_population()
    {
        static const std::vector<Value> values = {481, 186, 745, 592, 311, 205, 740, 419, 775, 936, 776, 271, 545,
                                                  815, 651, 752, 510, 362, 425, 539, 630, 223, 316, 556, 720};
        return values;
    }

    namespace
    {
        Scenario fig1(std::string name, Protocol protocol, std::optional<Threshold> threshold, std::uint64_t horizon)
        {
            Scenario s;
            s.name = std::move(name);
            s.protocol = protocol;
            s.initial.values = fig1_population();
            s.initial.distinct = true;
            s.churn = ScriptedChurn{{ScriptedEvent{200, ScriptedDeparture{DepartureTarget::current_max, {}}}}, {}};
            s.threshold = std::move(threshold);
            s.horizon = horizon;
            return s;
        }
    }

    std::uint64_t table1_departure_tick(std::uint64_t n)
    {
        return 20 * n;
    }

    Scenario table1_scenario(std::uint64_t n, Protocol protocol)
    {
        Scenario s;
        s.name = "table1-" + std::to_string(n) + "-" + to_string(protocol);
        s.protocol = protocol;
        s.initial.count = n;
        s.initial.range = ValueRange{0, 1000};
        s.initial.distinct = true;
        const std::uint64_t depart = table1_departure_tick(n);
        s.churn = ScriptedChurn{{ScriptedEvent{depart, ScriptedDeparture{DepartureTarget::current_max, {}}}}, {}};
        if (protocol == Protocol::timeout)
        {
            s.threshold = Threshold::fixed((11 * n + 9) / 10);
        }
        s.horizon = depart + 400 * n;
        s.snapshot_stride = s.horizon;
        return s;
    }

    std::map<std::string, Scenario> reference_scenarios()
    {
        std::map<std::string, Scenario> out;
        auto add = [&out](Scenario s) { out.emplace(s.name, std::move(s)); };
        add(fig1("fig1a", Protocol::counter, std::nullopt, 2000));
        add(fig1("fig1b", Protocol::timeout, Threshold::fixed(40), 5000));
        add(fig1("fig1c", Protocol::timeout, Threshold::fixed(200), 20000));
        for (std::uint64_t n : {10, 20, 30, 50, 100})
        {
            add(table1_scenario(n, Protocol::counter));
            add(table1_scenario(n, Protocol::timeout));
        }
        return out;
    }

    Scenario builtin_scenario(const std::string &name)
    {
        auto all = reference_scenarios();
        auto it = all.find(name);
        if (it == all.end())
        {
            throw std::out_of_range("unknown built-in scenario '" + name + "'");
        }
        return it->second;
    }
}
