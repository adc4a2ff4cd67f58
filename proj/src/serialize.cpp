#include "kdv5/serialize.hpp"

namespace kdv5 {

using nlohmann::json;

json field_to_json(const FourierField& f) {
    json j;
    j["v"] = f.v();
    j["Kphi"] = f.kphi();
    j["Kx"] = f.kx();
    j["real_flag"] = f.real_flag;
    json coeffs = json::array();
    f.for_each([&](const TorusIndex& l, int k, Complex c) {
        if (c == Complex(0.0, 0.0)) return;
        json entry = json::array();
        for (int d = 0; d < l.v; ++d) entry.push_back(l.c[d]);
        entry.push_back(k);
        entry.push_back(c.real());
        entry.push_back(c.imag());
        coeffs.push_back(std::move(entry));
    });
    j["coeffs"] = std::move(coeffs);
    return j;
}

FourierField field_from_json(const json& j) {
    int v = j.at("v").get<int>();
    FourierField f(v, j.at("Kphi").get<int>(), j.at("Kx").get<int>());
    for (const auto& entry : j.at("coeffs")) {
        if (static_cast<int>(entry.size()) != v + 3)
            throw ConfigError("field_from_json: malformed coefficient entry");
        TorusIndex l;
        l.v = v;
        for (int d = 0; d < v; ++d) l.c[d] = entry[d].get<int>();
        int k = entry[v].get<int>();
        f.set_coeff(l, k, Complex(entry[v + 1].get<double>(), entry[v + 2].get<double>()));
    }
    f.real_flag = j.at("real_flag").get<bool>();
    f.zero_avg_x = (f.x_average_magnitude() == 0.0);
    return f;
}

json operator_to_json(const VarCoeffOperator& a) {
    json j;
    j["v"] = a.v();
    j["Kphi"] = a.kphi();
    j["Kx"] = a.kx();
    j["h10"] = a.h10();
    json blocks = json::array();
    for (int i1 = -a.kx(); i1 <= a.kx(); ++i1)
        for (int i2 = -a.kx(); i2 <= a.kx(); ++i2) {
            const Complex* s = a.series_ptr(i1, i2);
            if (!s) continue;
            FourierField series = a.block(i1, i2);
            if (series.max_abs_coeff() == 0.0) continue;
            json b;
            b["i1"] = i1;
            b["i2"] = i2;
            json coeffs = json::array();
            series.for_each([&](const TorusIndex& l, int, Complex c) {
                if (c == Complex(0.0, 0.0)) return;
                json entry = json::array();
                for (int d = 0; d < l.v; ++d) entry.push_back(l.c[d]);
                entry.push_back(c.real());
                entry.push_back(c.imag());
                coeffs.push_back(std::move(entry));
            });
            b["coeffs"] = std::move(coeffs);
            blocks.push_back(std::move(b));
        }
    j["blocks"] = std::move(blocks);
    return j;
}

VarCoeffOperator operator_from_json(const json& j) {
    int v = j.at("v").get<int>();
    VarCoeffOperator a(v, j.at("Kphi").get<int>(), j.at("Kx").get<int>(),
                       j.at("h10").get<bool>());
    for (const auto& b : j.at("blocks")) {
        FourierField series(v, a.kphi(), 0);
        for (const auto& entry : b.at("coeffs")) {
            if (static_cast<int>(entry.size()) != v + 2)
                throw ConfigError("operator_from_json: malformed coefficient entry");
            TorusIndex l;
            l.v = v;
            for (int d = 0; d < v; ++d) l.c[d] = entry[d].get<int>();
            series.set_coeff(l, 0, Complex(entry[v].get<double>(), entry[v + 1].get<double>()));
        }
        a.set_block(b.at("i1").get<int>(), b.at("i2").get<int>(), series);
    }
    return a;
}

}  // namespace kdv5
