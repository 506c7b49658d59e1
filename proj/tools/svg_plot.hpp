#ifndef FFM_SVG_PLOT_HPP
#define FFM_SVG_PLOT_HPP

#include "ffm/fermat.hpp"

#include <string>
#include <vector>

namespace ffm::plot {

struct Panel {
    std::string title;
    SimplexRealization realization;
    FermatTree tree;
};

// One panel per tree: vertices and branches mapped to the tangent space at
// the tree point, then orthographically projected (oblique for 3D).
std::string render(const std::vector<Panel>& panels);

} // namespace ffm::plot

#endif
