#pragma once

#include <algorithm>
#include <filesystem>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "nief/io/csv.hpp"

namespace nief::io {

// Gnuplot command file plotting the CSV columns by header name.
//   re + im present            -> both traces against the first column
//   chi3_abs, alpha1, alpha_mu -> three stacked panels
//   otherwise                  -> every other column as its own trace
inline std::string plot_script(const std::vector<std::string>& columns, const std::string& csv_name) {
    if (columns.size() < 2) fail(NumericalError::Kind::MissingColumns, "need an abscissa and at least one trace");
    auto has = [&](const char* c) { return std::find(columns.begin(), columns.end(), c) != columns.end(); };
    const std::string x = columns.front();
    auto trace = [&](const std::string& y) {
        return "'" + csv_name + "' using \"" + x + "\":\"" + y + "\" with lines title '" + y + "'";
    };

    std::string s = "set datafile separator ','\nset key autotitle columnhead\nset xlabel '" + x + "'\n";
    if (has("chi3_abs") && has("alpha1") && has("alpha_mu")) {
        s += "set multiplot layout 3,1\n";
        for (const char* y : {"chi3_abs", "alpha1", "alpha_mu"}) s += "set ylabel '" + std::string(y) + "'\nplot " + trace(y) + "\n";
        s += "unset multiplot\n";
        return s;
    }
    std::vector<std::string> ys;
    if (has("re") && has("im"))
        ys = {"re", "im"};
    else
        ys.assign(columns.begin() + 1, columns.end());
    s += "plot ";
    for (std::size_t i = 0; i < ys.size(); ++i) s += (i ? ", \\\n     " : "") + trace(ys[i]);
    s += "\n";
    return s;
}

// Column names a script reads through using "x":"y" clauses.
inline std::set<std::string> referenced_columns(const std::string& script) {
    std::set<std::string> out;
    static const std::regex clause(R"re(using\s+"([^"]+)"\s*:\s*"([^"]+)")re");
    for (auto it = std::sregex_iterator(script.begin(), script.end(), clause); it != std::sregex_iterator(); ++it) {
        out.insert((*it)[1]);
        out.insert((*it)[2]);
    }
    return out;
}

// Writes the script next to the CSV unless a path is given; returns its path.
inline std::string emit_plot_script(const std::string& csv_path, std::string script_path = {}) {
    const auto table = read_csv(csv_path);
    namespace fs = std::filesystem;
    if (script_path.empty()) script_path = fs::path(csv_path).replace_extension(".gp").string();
    const auto rel = fs::path(csv_path).filename().string();
    write_text(script_path, plot_script(table.columns, rel));
    return script_path;
}

} // namespace nief::io
