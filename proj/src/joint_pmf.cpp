// joint_pmf.cpp
#include "cbl/joint_pmf.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cbl/errors.hpp"

namespace cbl {

JointPMF::JointPMF(std::vector<Axis> axes) : axes_(std::move(axes)) {
    std::set<std::string> names;
    std::size_t total = 1;
    for (const auto& a : axes_) {
        if (a.size < 1) throw InputError("axis '" + a.name + "' is empty");
        if (!names.insert(a.name).second) throw InputError("duplicate axis '" + a.name + "'");
        if (total > max_configurations / a.size) throw InputError("joint exceeds 1e6 configurations");
        total *= a.size;
    }
    strides_.assign(axes_.size(), 1);
    for (std::size_t i = axes_.size(); i-- > 1;) strides_[i - 1] = strides_[i] * axes_[i].size;
    probs_.assign(total, 0.0);
}

JointPMF::JointPMF(std::vector<Axis> axes, std::vector<double> probs) : JointPMF(std::move(axes)) {
    if (probs.size() != probs_.size()) throw InputError("probability tensor has the wrong size");
    probs_ = std::move(probs);
    validate();
}

std::size_t JointPMF::axis_index(const std::string& name) const {
    for (std::size_t i = 0; i < axes_.size(); ++i)
        if (axes_[i].name == name) return i;
    throw InputError("unknown axis '" + name + "'");
}

std::size_t JointPMF::offset(const std::vector<std::size_t>& index) const {
    if (index.size() != axes_.size()) throw InputError("index rank does not match the joint");
    std::size_t off = 0;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (index[i] >= axes_[i].size) throw InputError("index out of range on axis '" + axes_[i].name + "'");
        off += index[i] * strides_[i];
    }
    return off;
}

double& JointPMF::at(const std::vector<std::size_t>& index) { return probs_[offset(index)]; }
double JointPMF::at(const std::vector<std::size_t>& index) const { return probs_[offset(index)]; }

void JointPMF::validate() const {
    double total = 0.0;
    for (const double p : probs_) {
        if (!(p >= 0.0)) throw InputError("joint has a negative or NaN entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InputError("joint does not sum to 1");
}

namespace {

// Flat index of every configuration within the sub-product of `axes`.
std::vector<std::size_t> group_index(const JointPMF& joint, const std::vector<std::size_t>& axes,
                                     std::size_t* group_size) {
    const auto& all = joint.axes();
    std::vector<std::size_t> out(joint.probs().size());
    std::size_t size = 1;
    for (const auto a : axes) size *= all[a].size;
    *group_size = size;
    std::vector<std::size_t> idx(all.size(), 0);
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t g = 0;
        for (const auto a : axes) g = g * all[a].size + idx[a];
        out[flat] = g;
        for (std::size_t i = all.size(); i-- > 0;) {
            if (++idx[i] < all[i].size) break;
            idx[i] = 0;
        }
    }
    return out;
}

std::vector<std::size_t> resolve(const JointPMF& joint, const std::vector<std::string>& names) {
    std::vector<std::size_t> out;
    for (const auto& n : names) out.push_back(joint.axis_index(n));
    return out;
}

}  // namespace

JointPMF JointPMF::marginal(const std::vector<std::string>& keep) const {
    const auto axes = resolve(*this, keep);
    std::vector<Axis> kept;
    for (const auto a : axes) kept.push_back(axes_[a]);
    JointPMF out(kept);
    std::size_t size = 0;
    const auto g = group_index(*this, axes, &size);
    for (std::size_t i = 0; i < probs_.size(); ++i) out.probs_[g[i]] += probs_[i];
    return out;
}

double mutual_information(const JointPMF& joint) {
    if (joint.axes().size() != 2) throw InputError("mutual_information needs a two-axis joint");
    return mutual_information(joint, {joint.axes()[0].name}, {joint.axes()[1].name});
}

double mutual_information(const JointPMF& joint, const std::vector<std::string>& x, const std::vector<std::string>& y,
                          const std::vector<std::string>& given) {
    if (x.empty() || y.empty()) throw InputError("mutual information needs nonempty axis groups");
    const auto ax = resolve(joint, x);
    const auto ay = resolve(joint, y);
    const auto az = resolve(joint, given);
    std::set<std::size_t> seen;
    for (const auto* g : {&ax, &ay, &az})
        for (const auto a : *g)
            if (!seen.insert(a).second) throw InputError("axis groups overlap");

    std::size_t nx = 0, ny = 0, nz = 0;
    const auto gx = group_index(joint, ax, &nx);
    const auto gy = group_index(joint, ay, &ny);
    const auto gz = group_index(joint, az, &nz);
    if (nx * ny > JointPMF::max_configurations / nz) throw InputError("joint exceeds 1e6 configurations");

    std::vector<double> pxyz(nx * ny * nz, 0.0), pxz(nx * nz, 0.0), pyz(ny * nz, 0.0), pz(nz, 0.0);
    const auto& p = joint.probs();
    for (std::size_t i = 0; i < p.size(); ++i) {
        pxyz[(gz[i] * nx + gx[i]) * ny + gy[i]] += p[i];
        pxz[gz[i] * nx + gx[i]] += p[i];
        pyz[gz[i] * ny + gy[i]] += p[i];
        pz[gz[i]] += p[i];
    }
    double mi = 0.0;
    for (std::size_t z = 0; z < nz; ++z)
        for (std::size_t i = 0; i < nx; ++i)
            for (std::size_t j = 0; j < ny; ++j) {
                const double v = pxyz[(z * nx + i) * ny + j];
                if (v > 0.0) mi += v * std::log(v * pz[z] / (pxz[z * nx + i] * pyz[z * ny + j]));
            }
    return std::max(mi, 0.0);
}

double entropy(const JointPMF& joint, const std::vector<std::string>& axes) {
    const auto m = joint.marginal(axes);
    double h = 0.0;
    for (const double p : m.probs())
        if (p > 0.0) h -= p * std::log(p);
    return h;
}

}  // namespace cbl
