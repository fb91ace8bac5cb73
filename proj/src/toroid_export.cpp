#include <algorithm>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "iqm/toroid.hpp"

namespace iqm {

namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f"};

std::vector<std::vector<int>> permutations(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

} // namespace

std::string tiling_svg(const RightToroid& t) {
    if (t.n() != 2) throw ValidationError("tiling_svg needs n = 2");
    const double scale = 400.0 / std::max(t.side(0), t.side(1));
    const double W = t.side(0) * scale, H = t.side(1) * scale;
    std::ostringstream os;
    os << std::setprecision(10);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W + 20 << "\" height=\"" << H + 20
       << "\" viewBox=\"-10 -10 " << W + 20 << ' ' << H + 20 << "\">\n";
    for (int k = 0; k < 2; ++k)
        for (const auto& sigma : permutations(2)) {
            const Hull h = convex_hull(cell_geometry(t, k, sigma).slab);
            if (h.faces.empty() || h.volume <= 0.0) continue;
            os << "  <polygon data-label=\"" << k << "\" fill=\"" << kPalette[k] << "\" stroke=\"black\" points=\"";
            for (int i : h.faces.front())
                os << h.vertices[i](0) * scale << ',' << H - h.vertices[i](1) * scale << ' ';
            os << "\"/>\n";
        }
    os << "  <rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H
       << "\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>\n</svg>\n";
    return os.str();
}

std::string tiling_obj(const RightToroid& t) {
    if (t.n() != 3) throw ValidationError("tiling_obj needs n = 3");
    std::ostringstream os;
    os << std::setprecision(12);
    int base = 1;
    for (int k = 0; k < 3; ++k)
        for (const auto& sigma : permutations(3)) {
            const Hull h = convex_hull(cell_geometry(t, k, sigma).slab);
            if (h.faces.empty() || h.volume <= 0.0) continue;
            os << "g part" << k << "_" << sigma[0] << sigma[1] << sigma[2] << '\n';
            for (const RVec& v : h.vertices) os << "v " << v(0) << ' ' << v(1) << ' ' << v(2) << '\n';
            for (const auto& f : h.faces) {
                os << 'f';
                for (int i : f) os << ' ' << base + i;
                os << '\n';
            }
            base += static_cast<int>(h.vertices.size());
        }
    return os.str();
}

} // namespace iqm
