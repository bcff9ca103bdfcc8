// joint_pmf.hpp
//
// Dense probability tensors over named finite axes, with exact mutual
// information. All logarithms are natural.
#pragma once
#include <cstddef>
#include <string>
#include <vector>

namespace cbl {

struct Axis {
    std::string name;
    std::size_t size{1};
};

class JointPMF {
public:
    static constexpr std::size_t max_configurations = 1000000;

    // Zero tensor; fill with at() and call validate() before use.
    explicit JointPMF(std::vector<Axis> axes);
    JointPMF(std::vector<Axis> axes, std::vector<double> probs);

    const std::vector<Axis>& axes() const { return axes_; }
    const std::vector<double>& probs() const { return probs_; }
    // Flat row-major storage, for bulk filling.
    std::vector<double>& data() { return probs_; }
    std::size_t axis_index(const std::string& name) const;

    // Row-major: the last axis varies fastest.
    double& at(const std::vector<std::size_t>& index);
    double at(const std::vector<std::size_t>& index) const;

    // Nonnegative entries summing to 1 within 1e-12; InputError otherwise.
    void validate() const;
    JointPMF marginal(const std::vector<std::string>& keep) const;

private:
    std::size_t offset(const std::vector<std::size_t>& index) const;

    std::vector<Axis> axes_;
    std::vector<std::size_t> strides_;
    std::vector<double> probs_;
};

// I(X; Y) of a two-axis joint.
double mutual_information(const JointPMF& joint);
// I(X; Y | Z) with each of X, Y, Z a group of axes (Z may be empty). Computed
// directly as sum p(x,y,z) log(p(x,y,z) p(z) / (p(x,z) p(y,z))), clamped at 0.
double mutual_information(const JointPMF& joint, const std::vector<std::string>& x,
                          const std::vector<std::string>& y, const std::vector<std::string>& given = {});
// Shannon entropy of the joint over a group of axes.
double entropy(const JointPMF& joint, const std::vector<std::string>& axes);

}  // namespace cbl
