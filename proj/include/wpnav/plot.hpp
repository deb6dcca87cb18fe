#pragma once

#include <string>
#include <vector>

namespace wpnav {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Multi-series line chart with axes, ticks and a legend.
void plot_lines(const std::vector<Series>& series, const std::string& title,
                const std::string& x_label, const std::string& y_label, const std::string& path);

struct BarGroup {
    std::string label;                // x-axis group (environment)
    std::vector<double> values;       // one per category
};

// Grouped bar chart; `categories` names the bars inside each group.
void plot_bars(const std::vector<BarGroup>& groups, const std::vector<std::string>& categories,
               const std::string& title, const std::string& y_label, const std::string& path);

// Column extraction from a CSV written by this toolkit (no quoting/escapes).
std::vector<std::vector<std::string>> read_csv(const std::string& path);
std::vector<double> csv_column(const std::vector<std::vector<std::string>>& rows,
                               const std::string& name);

}  // namespace wpnav
