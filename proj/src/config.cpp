#include "parity/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "parity/error.hpp"

namespace parity {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

double to_double(const std::string& v) {
    double d = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), d);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) fail(ErrorCode::Parse, "not a number: '" + v + "'");
    return d;
}

long to_long(const std::string& v) {
    long n = 0;
    const auto r = std::from_chars(v.data(), v.data() + v.size(), n);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size()) fail(ErrorCode::Parse, "not an integer: '" + v + "'");
    return n;
}

FundAmounts to_triple(const std::string& v) {
    const auto parts = split(v, ',');
    if (parts.size() != 3) fail(ErrorCode::Parse, "expected three comma-separated values");
    return {Decimal::parse(parts[0]), Decimal::parse(parts[1]), Decimal::parse(parts[2])};
}

std::string fmt(double d) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, r.ptr);
}

std::string triple_text(const FundAmounts& a) {
    return a[0].to_string() + "," + a[1].to_string() + "," + a[2].to_string();
}

using Setter = std::function<void(EngineConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"window", [](EngineConfig& c, const std::string& v) { c.window = to_long(v); }},
        {"half_life", [](EngineConfig& c, const std::string& v) { c.half_life = to_double(v); }},
        {"radius_multiplier", [](EngineConfig& c, const std::string& v) { c.radius_multiplier = to_double(v); }},
        {"combined_alpha",
         [](EngineConfig& c, const std::string& v) {
             if (v == "inverse-vol")
                 c.combined_alpha.reset();
             else
                 c.combined_alpha = to_double(v);
         }},
        {"correlations",
         [](EngineConfig& c, const std::string& v) {
             if (v == "none") {
                 c.correlations.reset();
                 return;
             }
             const auto parts = split(v, ',');
             if (parts.size() != 3) fail(ErrorCode::Parse, "correlations need rho_ab,rho_bg,rho_ag");
             c.correlations = FundCorrelationsd{to_double(parts[0]), to_double(parts[1]), to_double(parts[2])};
         }},
        {"asset.alpha", [](EngineConfig& c, const std::string& v) { c.asset_ids[0] = v; }},
        {"asset.beta", [](EngineConfig& c, const std::string& v) { c.asset_ids[1] = v; }},
        {"asset.gamma", [](EngineConfig& c, const std::string& v) { c.asset_ids[2] = v; }},
        {"split_strategy", [](EngineConfig& c, const std::string& v) { c.split.strategy = parse_split_strategy(v); }},
        {"min_tx", [](EngineConfig& c, const std::string& v) { c.split.min_tx = Decimal::parse(v); }},
        {"price_max_age_days", [](EngineConfig& c, const std::string& v) { c.price_max_age_days = to_long(v); }},
        {"max_investors",
         [](EngineConfig& c, const std::string& v) {
             const long n = to_long(v);
             if (n < 0) fail(ErrorCode::Parse, "max_investors must be nonnegative");
             c.max_investors = static_cast<std::size_t>(n);
         }},
        {"misalignment_threshold",
         [](EngineConfig& c, const std::string& v) { c.misalignment_threshold = Decimal::parse(v); }},
        {"fee.deposit_rate", [](EngineConfig& c, const std::string& v) { c.fees.deposit_rate = Decimal::parse(v); }},
        {"fee.pref_change_rate",
         [](EngineConfig& c, const std::string& v) { c.fees.pref_change_rate = Decimal::parse(v); }},
        {"fee.pref_change_cap",
         [](EngineConfig& c, const std::string& v) { c.fees.pref_change_cap = Decimal::parse(v); }},
        {"fee.redemption_tiers",
         [](EngineConfig& c, const std::string& v) {
             c.fees.redemption_tiers.clear();
             if (v == "none") return;
             for (const auto& item : split(v, ',')) {
                 const auto colon = item.find(':');
                 if (colon == std::string::npos) fail(ErrorCode::Parse, "tier '" + item + "' needs days:rate");
                 c.fees.redemption_tiers.push_back(
                     {to_long(trim(item.substr(0, colon))), Decimal::parse(trim(item.substr(colon + 1)))});
             }
         }},
        {"fee.subfund_direct_rates",
         [](EngineConfig& c, const std::string& v) { c.fees.subfund_direct_rates = to_triple(v); }},
        {"fee.subfund_parity_rates",
         [](EngineConfig& c, const std::string& v) { c.fees.subfund_parity_rates = to_triple(v); }},
        {"frontier.view_constant", [](EngineConfig& c, const std::string& v) { c.view_constant = to_double(v); }},
        {"frontier.tangency_constant",
         [](EngineConfig& c, const std::string& v) { c.tangency_constant = to_double(v); }},
        {"frontier.height_constant", [](EngineConfig& c, const std::string& v) { c.height_constant = to_double(v); }},
        {"frontier.curve_points",
         [](EngineConfig& c, const std::string& v) { c.curve_points = static_cast<int>(to_long(v)); }},
        {"frontier.disclaimer", [](EngineConfig& c, const std::string& v) { c.disclaimer = v; }},
        {"event_log", [](EngineConfig& c, const std::string& v) { c.event_log = v; }},
        {"snapshot_dir", [](EngineConfig& c, const std::string& v) { c.snapshot_dir = v; }},
        {"snapshot_every",
         [](EngineConfig& c, const std::string& v) {
             const long n = to_long(v);
             if (n < 0) fail(ErrorCode::Parse, "snapshot_every must be nonnegative");
             c.snapshot_every = static_cast<std::uint64_t>(n);
         }},
    };
    return table;
}

}  // namespace

void EngineConfig::validate() const {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0)) fail(ErrorCode::InvalidArgument, std::string(what) + " must be positive");
    };
    if (window < 2) fail(ErrorCode::InvalidArgument, "window must be at least 2");
    positive(half_life, "half_life");
    positive(radius_multiplier, "radius_multiplier");
    if (combined_alpha && !(*combined_alpha >= 0.0 && *combined_alpha <= 1.0))
        fail(ErrorCode::InvalidArgument, "combined_alpha must lie in [0, 1]");
    if (correlations)
        for (double r : {correlations->rho_ab, correlations->rho_bg, correlations->rho_ag})
            if (!(r >= -1.0 && r <= 1.0)) fail(ErrorCode::InvalidArgument, "correlations must lie in [-1, 1]");
    for (const auto& id : asset_ids)
        if (id.empty()) fail(ErrorCode::InvalidArgument, "asset ids must be nonempty");
    if (split.min_tx.is_negative()) fail(ErrorCode::InvalidArgument, "min_tx must be nonnegative");
    if (price_max_age_days < 0) fail(ErrorCode::InvalidArgument, "price_max_age_days must be nonnegative");
    if (misalignment_threshold.is_negative()) fail(ErrorCode::InvalidArgument, "misalignment_threshold must be nonnegative");
    fees.validate();
    positive(view_constant, "frontier.view_constant");
    positive(tangency_constant, "frontier.tangency_constant");
    positive(height_constant, "frontier.height_constant");
    if (curve_points < 2) fail(ErrorCode::InvalidArgument, "frontier.curve_points must be at least 2");
}

std::string EngineConfig::to_text() const {
    std::ostringstream o;
    o << "window = " << window << '\n'
      << "half_life = " << fmt(half_life) << '\n'
      << "radius_multiplier = " << fmt(radius_multiplier) << '\n'
      << "combined_alpha = " << (combined_alpha ? fmt(*combined_alpha) : "inverse-vol") << '\n'
      << "correlations = "
      << (correlations ? fmt(correlations->rho_ab) + "," + fmt(correlations->rho_bg) + "," + fmt(correlations->rho_ag)
                       : "none")
      << '\n'
      << "asset.alpha = " << asset_ids[0] << '\n'
      << "asset.beta = " << asset_ids[1] << '\n'
      << "asset.gamma = " << asset_ids[2] << '\n'
      << "split_strategy = " << to_string(split.strategy) << '\n'
      << "min_tx = " << split.min_tx << '\n'
      << "price_max_age_days = " << price_max_age_days << '\n'
      << "max_investors = " << max_investors << '\n'
      << "misalignment_threshold = " << misalignment_threshold << '\n'
      << "fee.deposit_rate = " << fees.deposit_rate << '\n'
      << "fee.pref_change_rate = " << fees.pref_change_rate << '\n'
      << "fee.pref_change_cap = " << fees.pref_change_cap << '\n'
      << "fee.redemption_tiers = ";
    if (fees.redemption_tiers.empty()) o << "none";
    for (std::size_t i = 0; i < fees.redemption_tiers.size(); ++i)
        o << (i ? "," : "") << fees.redemption_tiers[i].max_holding_days << ':' << fees.redemption_tiers[i].penalty_rate;
    o << '\n'
      << "fee.subfund_direct_rates = " << triple_text(fees.subfund_direct_rates) << '\n'
      << "fee.subfund_parity_rates = " << triple_text(fees.subfund_parity_rates) << '\n'
      << "frontier.view_constant = " << fmt(view_constant) << '\n'
      << "frontier.tangency_constant = " << fmt(tangency_constant) << '\n'
      << "frontier.height_constant = " << fmt(height_constant) << '\n'
      << "frontier.curve_points = " << curve_points << '\n'
      << "frontier.disclaimer = " << disclaimer << '\n';
    if (!event_log.empty()) o << "event_log = " << event_log << '\n';
    if (!snapshot_dir.empty()) o << "snapshot_dir = " << snapshot_dir << '\n';
    o << "snapshot_every = " << snapshot_every << '\n';
    return o.str();
}

EngineConfig EngineConfig::parse(std::istream& in) {
    EngineConfig c;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto where = "config line " + std::to_string(line_no) + ": ";
        const auto eq = text.find('=');
        if (eq == std::string::npos) fail(ErrorCode::Parse, where + "expected 'key = value'");
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail(ErrorCode::Parse, where + "unknown key '" + key + "'");
        if (!seen.insert(key).second) fail(ErrorCode::Parse, where + "duplicate key '" + key + "'");
        try {
            it->second(c, value);
        } catch (const Error& e) {
            fail(ErrorCode::Parse, where + e.what());
        }
    }
    c.validate();
    return c;
}

EngineConfig EngineConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::Io, "cannot open config file " + path);
    return parse(in);
}

}  // namespace parity
