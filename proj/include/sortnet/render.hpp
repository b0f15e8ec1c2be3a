#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "error.hpp"
#include "network.hpp"

namespace sortnet
{

enum class render_format { text, svg };

namespace detail
{

/// Splits a layer into columns so that comparators in one column do not overlap vertically.
inline std::vector<std::vector<comparator>> layer_columns(layer const& l)
{
    std::vector<comparator> sorted(l.begin(), l.end());
    std::sort(sorted.begin(), sorted.end(),
              [](comparator x, comparator y) { return std::pair(x.top(), x.bottom()) < std::pair(y.top(), y.bottom()); });
    std::vector<std::vector<comparator>> cols;
    std::vector<int> reach; // lowest channel covered so far per column
    for (auto c : sorted) {
        std::size_t k = 0;
        while (k < cols.size() && reach[k] >= c.top()) {
            ++k;
        }
        if (k == cols.size()) {
            cols.emplace_back();
            reach.push_back(0);
        }
        cols[k].push_back(c);
        reach[k] = c.bottom();
    }
    return cols;
}

} // namespace detail

/// ASCII Knuth diagram: channel 1 on top, one group of columns per layer.
///  'o' marks a comparator end, '|' the connector, '+' a crossed channel.
inline std::string render_text(comparator_network const& net)
{
    int const n = net.channels();
    if (n == 0) {
        return "";
    }
    int const rows = 2 * n - 1;
    std::vector<std::string> grid(static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
        grid[static_cast<std::size_t>(r)] = (r % 2 == 0) ? "--" : "  ";
    }
    for (auto const& l : net.layers()) {
        for (auto const& col : detail::layer_columns(l)) {
            std::vector<char> cells(static_cast<std::size_t>(rows));
            for (int r = 0; r < rows; ++r) {
                cells[static_cast<std::size_t>(r)] = (r % 2 == 0) ? '-' : ' ';
            }
            for (auto c : col) {
                int const top = 2 * (c.top() - 1);
                int const bottom = 2 * (c.bottom() - 1);
                for (int r = top; r <= bottom; ++r) {
                    cells[static_cast<std::size_t>(r)] = (r % 2 == 0) ? '+' : '|';
                }
                cells[static_cast<std::size_t>(top)] = 'o';
                cells[static_cast<std::size_t>(bottom)] = 'o';
            }
            for (int r = 0; r < rows; ++r) {
                grid[static_cast<std::size_t>(r)] += cells[static_cast<std::size_t>(r)];
                grid[static_cast<std::size_t>(r)] += (r % 2 == 0) ? '-' : ' ';
            }
        }
        for (int r = 0; r < rows; ++r) {
            grid[static_cast<std::size_t>(r)] += (r % 2 == 0) ? "--" : "  ";
        }
    }
    std::ostringstream os;
    int const label_width = n >= 10 ? 2 : 1;
    for (int r = 0; r < rows; ++r) {
        std::string label(static_cast<std::size_t>(label_width), ' ');
        if (r % 2 == 0) {
            auto s = std::to_string(r / 2 + 1);
            label = std::string(static_cast<std::size_t>(label_width) - s.size(), ' ') + s;
        }
        auto line = label + " " + grid[static_cast<std::size_t>(r)];
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        os << line << '\n';
    }
    return os.str();
}

inline std::string render_svg(comparator_network const& net)
{
    constexpr int pitch = 24;  // vertical distance between channels
    constexpr int column = 16; // horizontal distance between comparator columns
    constexpr int gap = 24;    // extra space between layers
    constexpr int margin = 32;

    std::vector<std::vector<std::vector<comparator>>> layout;
    int x = margin + gap / 2;
    int width_cols = 0;
    for (auto const& l : net.layers()) {
        layout.push_back(detail::layer_columns(l));
        width_cols += static_cast<int>(layout.back().size());
    }
    int const n = net.channels();
    int const width = 2 * margin + width_cols * column + static_cast<int>(layout.size()) * gap;
    int const height = 2 * margin + (n > 0 ? (n - 1) * pitch : 0);

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 " << width << ' ' << height
       << "\" width=\"" << width << "\" height=\"" << height << "\">\n";
    os << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    std::ostringstream comps;
    for (std::size_t k = 0; k < layout.size(); ++k) {
        int const layer_x = x - gap / 4;
        int const layer_w = static_cast<int>(layout[k].size()) * column + gap / 2 - column / 2;
        os << "<rect class=\"layer\" data-layer=\"" << k + 1 << "\" x=\"" << layer_x << "\" y=\"" << margin / 2
           << "\" width=\"" << layer_w << "\" height=\"" << height - margin << "\" fill=\"#f2f2f2\" fill-opacity=\"0.6\"/>\n";
        for (auto const& col : layout[k]) {
            for (auto c : col) {
                int const y1 = margin + (c.top() - 1) * pitch;
                int const y2 = margin + (c.bottom() - 1) * pitch;
                comps << "<g class=\"comparator\" data-lo=\"" << c.lo << "\" data-hi=\"" << c.hi << "\">"
                   << "<line x1=\"" << x << "\" y1=\"" << y1 << "\" x2=\"" << x << "\" y2=\"" << y2
                   << "\" stroke=\"black\" stroke-width=\"2\"/>"
                   << "<circle cx=\"" << x << "\" cy=\"" << y1 << "\" r=\"4\" fill=\"black\"/>"
                   << "<circle cx=\"" << x << "\" cy=\"" << y2 << "\" r=\"4\" fill=\"black\"/></g>\n";
            }
            x += column;
        }
        x += gap;
    }
    for (int i = 1; i <= n; ++i) {
        int const y = margin + (i - 1) * pitch;
        os << "<line x1=\"" << margin / 2 << "\" y1=\"" << y << "\" x2=\"" << width - margin / 2 << "\" y2=\"" << y
           << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    }
    os << comps.str() << "</svg>\n";
    return os.str();
}

inline std::string render(comparator_network const& net, render_format format)
{
    return format == render_format::svg ? render_svg(net) : render_text(net);
}

} // namespace sortnet
