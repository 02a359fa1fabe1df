#pragma once

#include <span>
#include <string>
#include <vector>

#include "symrl/numerics.hpp"

namespace symrl {

/// One declared symmetry operation: index permutations plus per-slot
/// multipliers for observations and actions. Declared as if the system were
/// perfectly symmetric; out[i] = mult[i] * in[indices[i]].
struct TransformSpec {
    enum class Kind { reflection, rotation };

    std::string name;
    Kind kind = Kind::reflection;
    std::vector<int> obs_indices;
    Vec obs_multipliers;
    std::vector<int> act_indices;
    Vec act_multipliers;

    int obs_dim() const { return static_cast<int>(obs_indices.size()); }
    int act_dim() const { return static_cast<int>(act_indices.size()); }
};

/// Checks index bijections, nonzero multipliers and, for reflections, the
/// involution property. Throws with the transform and slot named.
void validate_transform(const TransformSpec& spec);

void apply_state_transform(const TransformSpec& spec, std::span<const double> s, Vec& out);
Vec apply_state_transform(const TransformSpec& spec, std::span<const double> s);

void apply_declared_action_transform(const TransformSpec& spec, std::span<const double> a,
                                     Vec& out);
Vec apply_declared_action_transform(const TransformSpec& spec, std::span<const double> a);

/// Transform declaration file: a line-oriented text document. Grammar:
///   version 1
///   transform NAME reflection|rotation
///   obs_indices i0 i1 ...
///   obs_multipliers m0 m1 ...
///   act_indices i0 i1 ...
///   act_multipliers m0 m1 ...
/// Blank lines and lines starting with '#' are ignored.
std::vector<TransformSpec> parse_transform_file(const std::string& path);
void write_transform_file(const std::string& path, const std::vector<TransformSpec>& specs);

/// Built-in declarations for the bundled environments.
std::vector<TransformSpec> triangle_transforms();
std::vector<TransformSpec> crawler_transforms();

}  // namespace symrl
