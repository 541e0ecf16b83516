#include "palmtex/descriptors.hpp"

#include "palmtex/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace palmtex {

FilterBank::FilterBank(std::vector<Kernel> kernels) : kernels_(std::move(kernels)) {
    if (kernels_.empty()) throw Error(ErrorCode::InvalidFilterBank, "filter bank needs at least one kernel");
    if (kernels_.size() > 8) throw Error(ErrorCode::InvalidFilterBank, "at most 8 kernels fit an 8-bit code");
    const int side = kernels_.front().side;
    for (std::size_t i = 0; i < kernels_.size(); ++i) {
        const Kernel& k = kernels_[i];
        if (k.side != side) throw Error(ErrorCode::MixedKernelSizes, "kernel " + std::to_string(i) + " has side " +
                                                                         std::to_string(k.side) + ", expected " +
                                                                         std::to_string(side));
        if (k.side <= 0 || k.side % 2 == 0 || k.coeffs.size() != static_cast<std::size_t>(k.side) * k.side)
            throw Error(ErrorCode::InvalidFilterBank, "kernels must be square with an odd side");
        const double mean = k.sum() / static_cast<double>(k.coeffs.size());
        if (!(std::abs(mean) <= kZeroMeanTolerance))
            throw Error(ErrorCode::InvalidFilterBank, "kernel " + std::to_string(i) + " is not zero-mean");
    }
}

void FilterBank::write(std::ostream& out) const {
    out << "BSIF " << count() << ' ' << side() << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (const Kernel& k : kernels_) {
        for (int r = 0; r < k.side; ++r) {
            line.str({});
            for (int c = 0; c < k.side; ++c) {
                if (c) line << ' ';
                line << k(r, c);
            }
            out << line.str() << '\n';
        }
        out << '\n';
    }
}

void FilterBank::save(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
    write(out);
    if (!out) throw Error(ErrorCode::IoFailure, "short write to " + path.string());
}

FilterBank FilterBank::read(std::istream& in) {
    std::string magic;
    int count = 0, side = 0;
    if (!(in >> magic >> count >> side) || magic != "BSIF")
        throw Error(ErrorCode::InvalidFilterBank, "missing `BSIF <count> <side>` header");
    if (count < 1 || count > 8 || side < 1 || side % 2 == 0)
        throw Error(ErrorCode::InvalidFilterBank, "bad filter bank geometry");
    std::vector<Kernel> kernels(static_cast<std::size_t>(count));
    for (auto& k : kernels) {
        k.side = side;
        k.coeffs.resize(static_cast<std::size_t>(side) * side);
        for (double& v : k.coeffs) {
            if (!(in >> v)) throw Error(ErrorCode::InvalidFilterBank, "truncated filter bank body");
        }
    }
    std::string extra;
    if (in >> extra) throw Error(ErrorCode::InvalidFilterBank, "trailing data after filter bank");
    return FilterBank(std::move(kernels));
}

FilterBank FilterBank::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::UnreadableFile, "cannot open " + path.string());
    return read(in);
}

}  // namespace palmtex
