#include "bvx/stopping.hpp"

#include <algorithm>
#include <deque>

namespace bvx {

StoppingFamily::StoppingFamily(Lattice lattice)
    : lattice_(std::move(lattice)), slot_(lattice_.size(), none), owner_(lattice_.size(), none) {}

std::ptrdiff_t StoppingFamily::strict_owner(std::size_t cube) const {
    if (lattice_.level_of(cube) == 0) return none;
    return owner_[lattice_.parent_index(cube)];
}

int StoppingFamily::generation(std::size_t i) const {
    int g = 0;
    while (parent_[i] != i) {
        i = parent_[i];
        ++g;
    }
    return g;
}

int StoppingFamily::max_generation() const {
    int g = 0;
    for (std::size_t i = 0; i < size(); ++i) g = std::max(g, generation(i));
    return g;
}

std::vector<std::size_t> StoppingFamily::children_of(std::size_t i) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < size(); ++m)
        if (m != i && parent_[m] == i) out.push_back(m);
    return out;
}

std::size_t StoppingFamily::insert(std::size_t cube) {
    if (slot_[cube] != none) return static_cast<std::size_t>(slot_[cube]);
    const std::size_t position = members_.size();
    const std::ptrdiff_t above = strict_owner(cube);
    members_.push_back(cube);
    parent_.push_back(above == none ? position : static_cast<std::size_t>(above));
    slot_[cube] = static_cast<std::ptrdiff_t>(position);
    refresh_owners(cube, position);
    return position;
}

void StoppingFamily::refresh_owners(std::size_t cube, std::size_t position) {
    // Walk the subtree down to the next members; those get the new parent.
    std::vector<std::size_t> stack{cube};
    const auto pos = static_cast<std::ptrdiff_t>(position);
    while (!stack.empty()) {
        const std::size_t c = stack.back();
        stack.pop_back();
        if (c != cube && slot_[c] != none) {
            parent_[static_cast<std::size_t>(slot_[c])] = position;
            continue;
        }
        owner_[c] = pos;
        for (std::size_t ch : lattice_.child_indices(c)) stack.push_back(ch);
    }
}

namespace {

// Flat order is generation order, so sorting yields a top-down sequence.
std::vector<std::size_t> top_down(std::span<const std::size_t> initial) {
    std::vector<std::size_t> sorted(initial.begin(), initial.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    return sorted;
}

}  // namespace

StoppingFamily build_family(const Lattice& lattice, std::span<const std::size_t> initial, const StopRule& rule) {
    StoppingFamily family(lattice);
    std::deque<std::size_t> queue;
    for (std::size_t c : top_down(initial)) queue.push_back(family.insert(c));
    while (!queue.empty()) {
        const std::size_t f = queue.front();
        queue.pop_front();
        const std::size_t root = family.cube_index(f);
        std::vector<std::size_t> stack = lattice.child_indices(root);
        while (!stack.empty()) {
            const std::size_t q = stack.back();
            stack.pop_back();
            if (family.contains(q)) continue;
            if (rule(q, root)) {
                queue.push_back(family.insert(q));
                continue;
            }
            for (std::size_t ch : lattice.child_indices(q)) stack.push_back(ch);
        }
    }
    return family;
}

StoppingFamily build_family_reference(const Lattice& lattice, std::span<const std::size_t> initial,
                                      const StopRule& rule) {
    std::vector<char> is_initial(lattice.size(), 0);
    for (std::size_t c : initial) is_initial[c] = 1;
    // member[c]: cube c is selected; nearest[c]: minimal selected cube strictly above c.
    std::vector<char> member(lattice.size(), 0);
    std::vector<std::ptrdiff_t> nearest(lattice.size(), -1);
    for (std::size_t c = 0; c < lattice.size(); ++c) {
        if (lattice.level_of(c) > 0) {
            const std::size_t p = lattice.parent_index(c);
            nearest[c] = member[p] ? static_cast<std::ptrdiff_t>(p) : nearest[p];
        }
        if (is_initial[c]) {
            member[c] = 1;
        } else if (nearest[c] >= 0 && rule(c, static_cast<std::size_t>(nearest[c]))) {
            member[c] = 1;
        }
    }
    StoppingFamily family(lattice);
    for (std::size_t c = 0; c < lattice.size(); ++c)
        if (member[c]) family.insert(c);
    return family;
}

bool same_members(const StoppingFamily& a, const StoppingFamily& b) {
    if (!(a.lattice() == b.lattice()) || a.size() != b.size()) return false;
    for (std::size_t c : a.cube_indices())
        if (!b.contains(c)) return false;
    return true;
}

double carleson_packing(const StoppingFamily& family) {
    const Lattice& lat = family.lattice();
    std::vector<double> mass(lat.size(), 0.0);
    for (std::size_t c : family.cube_indices()) mass[c] = lat.cube(c).volume();
    for (int l = lat.levels() - 1; l > 0; --l) {
        const std::size_t begin = lat.level_offset(l);
        for (std::size_t i = begin; i < begin + lat.level_size(l); ++i) mass[lat.parent_index(i)] += mass[i];
    }
    double best = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) best = std::max(best, mass[i] / lat.cube(i).volume());
    return best;
}

double carleson_packing_direct(const StoppingFamily& family) {
    const Lattice& lat = family.lattice();
    double best = 0.0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
        const DyadicCube q = lat.cube(i);
        double sum = 0.0;
        for (std::size_t m = 0; m < family.size(); ++m) {
            const DyadicCube s = family.cube(m);
            if (q.contains(s)) sum += s.volume();
        }
        best = std::max(best, sum / q.volume());
    }
    return best;
}

}  // namespace bvx
