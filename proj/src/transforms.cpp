#include "symrl/transforms.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace symrl {

namespace {

void check_bijection(const std::string& name, const char* what, const std::vector<int>& idx) {
    std::vector<char> seen(idx.size(), 0);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const int j = idx[i];
        if (j < 0 || j >= static_cast<int>(idx.size()))
            throw std::invalid_argument("transform '" + name + "': " + what + " slot " +
                                        std::to_string(i) + " references out-of-range index " +
                                        std::to_string(j));
        if (seen[j])
            throw std::invalid_argument("transform '" + name + "': " + what +
                                        " is not a bijection, index " + std::to_string(j) +
                                        " used twice");
        seen[j] = 1;
    }
}

void check_involution(const std::string& name, const char* what, const std::vector<int>& idx,
                      const Vec& mult) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const int j = idx[i];
        if (idx[j] != static_cast<int>(i) || std::abs(mult[i] * mult[j] - 1.0) > 1e-12)
            throw std::invalid_argument("transform '" + name + "': " + what + " slot " +
                                        std::to_string(i) +
                                        " violates the reflection involution");
    }
}

}  // namespace

void validate_transform(const TransformSpec& spec) {
    if (spec.obs_indices.size() != spec.obs_multipliers.size() ||
        spec.act_indices.size() != spec.act_multipliers.size())
        throw std::invalid_argument("transform '" + spec.name + "': index/multiplier size mismatch");
    check_bijection(spec.name, "obs_indices", spec.obs_indices);
    check_bijection(spec.name, "act_indices", spec.act_indices);
    for (std::size_t i = 0; i < spec.obs_multipliers.size(); ++i)
        if (spec.obs_multipliers[i] == 0.0)
            throw std::invalid_argument("transform '" + spec.name + "': obs multiplier " +
                                        std::to_string(i) + " is zero");
    for (std::size_t i = 0; i < spec.act_multipliers.size(); ++i)
        if (spec.act_multipliers[i] == 0.0)
            throw std::invalid_argument("transform '" + spec.name + "': act multiplier " +
                                        std::to_string(i) + " is zero");
    if (spec.kind == TransformSpec::Kind::reflection) {
        check_involution(spec.name, "obs", spec.obs_indices, spec.obs_multipliers);
        check_involution(spec.name, "act", spec.act_indices, spec.act_multipliers);
    }
}

void apply_state_transform(const TransformSpec& spec, std::span<const double> s, Vec& out) {
    if (static_cast<int>(s.size()) != spec.obs_dim())
        throw std::invalid_argument("apply_state_transform: state dimension mismatch");
    out.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = spec.obs_multipliers[i] * s[spec.obs_indices[i]];
}

Vec apply_state_transform(const TransformSpec& spec, std::span<const double> s) {
    Vec out;
    apply_state_transform(spec, s, out);
    return out;
}

void apply_declared_action_transform(const TransformSpec& spec, std::span<const double> a,
                                     Vec& out) {
    if (static_cast<int>(a.size()) != spec.act_dim())
        throw std::invalid_argument("apply_declared_action_transform: action dimension mismatch");
    out.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = spec.act_multipliers[i] * a[spec.act_indices[i]];
}

Vec apply_declared_action_transform(const TransformSpec& spec, std::span<const double> a) {
    Vec out;
    apply_declared_action_transform(spec, a, out);
    return out;
}

namespace {

std::vector<int> parse_ints(const std::string& line, const std::string& ctx) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    std::vector<int> out;
    int v;
    while (ss >> v) out.push_back(v);
    if (out.empty()) throw std::invalid_argument(ctx + ": no values in '" + line + "'");
    return out;
}

Vec parse_doubles(const std::string& line, const std::string& ctx) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    Vec out;
    double v;
    while (ss >> v) out.push_back(v);
    if (out.empty()) throw std::invalid_argument(ctx + ": no values in '" + line + "'");
    return out;
}

}  // namespace

std::vector<TransformSpec> parse_transform_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open transform file: " + path);
    std::vector<TransformSpec> specs;
    std::string line;
    bool saw_version = false;
    TransformSpec cur;
    bool open = false;
    int fields = 0;
    auto finish = [&]() {
        if (!open) return;
        if (fields != 4)
            throw std::invalid_argument("transform '" + cur.name +
                                        "': incomplete declaration (need obs/act indices and "
                                        "multipliers)");
        validate_transform(cur);
        specs.push_back(cur);
        open = false;
        fields = 0;
    };
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "version") {
            saw_version = true;
        } else if (key == "transform") {
            finish();
            cur = TransformSpec{};
            std::string kind;
            ss >> cur.name >> kind;
            if (cur.name.empty()) throw std::invalid_argument("transform with no name in " + path);
            if (kind == "reflection")
                cur.kind = TransformSpec::Kind::reflection;
            else if (kind == "rotation")
                cur.kind = TransformSpec::Kind::rotation;
            else
                throw std::invalid_argument("transform '" + cur.name + "': unknown kind '" + kind +
                                            "'");
            open = true;
        } else if (!open) {
            throw std::invalid_argument("unexpected line before any transform: " + line);
        } else if (key == "obs_indices") {
            cur.obs_indices = parse_ints(line, "transform '" + cur.name + "'");
            ++fields;
        } else if (key == "obs_multipliers") {
            cur.obs_multipliers = parse_doubles(line, "transform '" + cur.name + "'");
            ++fields;
        } else if (key == "act_indices") {
            cur.act_indices = parse_ints(line, "transform '" + cur.name + "'");
            ++fields;
        } else if (key == "act_multipliers") {
            cur.act_multipliers = parse_doubles(line, "transform '" + cur.name + "'");
            ++fields;
        } else {
            throw std::invalid_argument("transform file " + path + ": unknown key '" + key + "'");
        }
    }
    finish();
    if (!saw_version) throw std::invalid_argument("transform file " + path + ": missing version");
    if (specs.empty()) throw std::invalid_argument("transform file " + path + ": no transforms");
    return specs;
}

void write_transform_file(const std::string& path, const std::vector<TransformSpec>& specs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write transform file: " + path);
    out << "version 1\n";
    for (const auto& t : specs) {
        out << "\ntransform " << t.name << ' '
            << (t.kind == TransformSpec::Kind::reflection ? "reflection" : "rotation") << '\n';
        out << "obs_indices";
        for (int i : t.obs_indices) out << ' ' << i;
        out << "\nobs_multipliers";
        for (double m : t.obs_multipliers) out << ' ' << m;
        out << "\nact_indices";
        for (int i : t.act_indices) out << ' ' << i;
        out << "\nact_multipliers";
        for (double m : t.act_multipliers) out << ' ' << m;
        out << '\n';
    }
}

std::vector<TransformSpec> triangle_transforms() {
    std::vector<TransformSpec> specs;
    auto refl = [](const char* name, std::vector<int> act_idx) {
        TransformSpec t;
        t.name = name;
        t.kind = TransformSpec::Kind::reflection;
        t.act_indices = act_idx;
        t.act_multipliers = {-1, -1, -1};
        t.obs_indices = {act_idx[0], act_idx[1], act_idx[2], 3};
        t.obs_multipliers = {-1, -1, -1, 1};
        return t;
    };
    auto rot = [](const char* name, std::vector<int> act_idx) {
        TransformSpec t;
        t.name = name;
        t.kind = TransformSpec::Kind::rotation;
        t.act_indices = act_idx;
        t.act_multipliers = {1, 1, 1};
        t.obs_indices = {act_idx[0], act_idx[1], act_idx[2], 3};
        t.obs_multipliers = {1, 1, 1, 1};
        return t;
    };
    specs.push_back(refl("a", {0, 2, 1}));
    specs.push_back(refl("b", {2, 1, 0}));
    specs.push_back(refl("c", {1, 0, 2}));
    specs.push_back(rot("d", {2, 0, 1}));
    specs.push_back(rot("e", {1, 2, 0}));
    for (const auto& s : specs) validate_transform(s);
    return specs;
}

namespace {

// Crawler leg conventions. Legs sit at 45 + 90*m degrees; knee sign
// conventions follow the actuator wiring: positive action flexes knees of
// legs 0 and 3 and extends knees of legs 1 and 2.
constexpr double kKneeSign[4] = {1.0, -1.0, -1.0, 1.0};

struct PlanarOp {
    // x' = qxx*x + qxy*y ; y' = qyx*x + qyy*y (signed permutation)
    double qxx, qxy, qyx, qyy;
};

TransformSpec make_crawler_transform(const std::string& name, TransformSpec::Kind kind,
                                     const int leg_src[4], const PlanarOp& q) {
    TransformSpec t;
    t.name = name;
    t.kind = kind;
    const bool reflection = kind == TransformSpec::Kind::reflection;

    t.act_indices.assign(8, 0);
    t.act_multipliers.assign(8, 0.0);
    for (int m = 0; m < 4; ++m) {
        const int s = leg_src[m];
        t.act_indices[2 * m] = 2 * s;
        t.act_multipliers[2 * m] = reflection ? -1.0 : 1.0;
        t.act_indices[2 * m + 1] = 2 * s + 1;
        t.act_multipliers[2 * m + 1] = kKneeSign[m] * kKneeSign[s];
    }

    t.obs_indices.assign(24, 0);
    t.obs_multipliers.assign(24, 1.0);
    for (int i = 0; i < 24; ++i) t.obs_indices[i] = i;

    // Slots 1-2 hold a (y,x)-ordered planar vector, slots 3-4 an (x,y) one,
    // slots 6-7 a (y,x) one. Apply the planar op to each.
    auto set_yx = [&](int ys, int xs) {
        // y' = qyx*x + qyy*y: exactly one of the coefficients is nonzero.
        if (q.qyy != 0.0) {
            t.obs_indices[ys] = ys;
            t.obs_multipliers[ys] = q.qyy;
        } else {
            t.obs_indices[ys] = xs;
            t.obs_multipliers[ys] = q.qyx;
        }
        if (q.qxx != 0.0) {
            t.obs_indices[xs] = xs;
            t.obs_multipliers[xs] = q.qxx;
        } else {
            t.obs_indices[xs] = ys;
            t.obs_multipliers[xs] = q.qxy;
        }
    };
    set_yx(1, 2);   // goal vector
    set_yx(6, 7);   // tilt vector
    set_yx(4, 3);   // velocity is stored (x,y)

    // Joint slots: leg m hip at 8+4m (pos), 9+4m (speed); knee at 10+4m, 11+4m.
    for (int m = 0; m < 4; ++m) {
        const int s = leg_src[m];
        const double hip_mult = reflection ? -1.0 : 1.0;
        const double knee_mult = kKneeSign[m] * kKneeSign[s];
        t.obs_indices[8 + 4 * m] = 8 + 4 * s;
        t.obs_indices[9 + 4 * m] = 9 + 4 * s;
        t.obs_multipliers[8 + 4 * m] = hip_mult;
        t.obs_multipliers[9 + 4 * m] = hip_mult;
        t.obs_indices[10 + 4 * m] = 10 + 4 * s;
        t.obs_indices[11 + 4 * m] = 11 + 4 * s;
        t.obs_multipliers[10 + 4 * m] = knee_mult;
        t.obs_multipliers[11 + 4 * m] = knee_mult;
    }
    return t;
}

}  // namespace

std::vector<TransformSpec> crawler_transforms() {
    using K = TransformSpec::Kind;
    std::vector<TransformSpec> specs;
    // Reflections about the four vertical symmetry planes.
    {
        const int src[4] = {3, 2, 1, 0};  // xz-plane: flip y
        specs.push_back(make_crawler_transform("xz", K::reflection, src, {1, 0, 0, -1}));
    }
    {
        const int src[4] = {1, 0, 3, 2};  // yz-plane: flip x
        specs.push_back(make_crawler_transform("yz", K::reflection, src, {-1, 0, 0, 1}));
    }
    {
        const int src[4] = {0, 3, 2, 1};  // y=x plane: swap axes
        specs.push_back(make_crawler_transform("diag_pos", K::reflection, src, {0, 1, 1, 0}));
    }
    {
        const int src[4] = {2, 1, 0, 3};  // y=-x plane
        specs.push_back(make_crawler_transform("diag_neg", K::reflection, src, {0, -1, -1, 0}));
    }
    // Rotations about the z axis. rot90 carries goal g to goal g+2.
    {
        const int src[4] = {3, 0, 1, 2};
        specs.push_back(make_crawler_transform("rot90", K::rotation, src, {0, -1, 1, 0}));
    }
    {
        const int src[4] = {2, 3, 0, 1};
        specs.push_back(make_crawler_transform("rot180", K::rotation, src, {-1, 0, 0, -1}));
    }
    {
        const int src[4] = {1, 2, 3, 0};
        specs.push_back(make_crawler_transform("rot270", K::rotation, src, {0, 1, -1, 0}));
    }
    for (const auto& s : specs) validate_transform(s);
    return specs;
}

}  // namespace symrl
