#include "cubicgen/block_operator.hpp"

#include <memory>
#include <string>

#include "cubicgen/error.hpp"
#include "cubicgen/matrix_exp.hpp"

namespace cubicgen {

std::vector<std::vector<Eigen::Index>> sector_indices(const FockSpace& space, SectorKind kind) {
    std::vector<std::vector<Eigen::Index>> sectors;
    const int c = space.cutoff();
    if (kind == SectorKind::Whole) {
        std::vector<Eigen::Index> all(static_cast<std::size_t>(space.dim()));
        for (Eigen::Index i = 0; i < space.dim(); ++i) all[static_cast<std::size_t>(i)] = i;
        sectors.push_back(std::move(all));
        return sectors;
    }
    space.require_modes(2, "sector_indices");
    switch (kind) {
        case SectorKind::Mode1Local:
            for (int n2 = 0; n2 <= c; ++n2) {
                auto& s = sectors.emplace_back();
                for (int n1 = 0; n1 <= c; ++n1) s.push_back(space.index(n1, n2));
            }
            break;
        case SectorKind::Mode2Local:
            for (int n1 = 0; n1 <= c; ++n1) {
                auto& s = sectors.emplace_back();
                for (int n2 = 0; n2 <= c; ++n2) s.push_back(space.index(n1, n2));
            }
            break;
        case SectorKind::TotalNumber:
            for (int total = 0; total <= 2 * c; ++total) {
                auto& s = sectors.emplace_back();
                for (int n1 = std::max(0, total - c); n1 <= std::min(total, c); ++n1) {
                    s.push_back(space.index(n1, total - n1));
                }
            }
            break;
        case SectorKind::NumberDifference:
            for (int diff = -c; diff <= c; ++diff) {
                auto& s = sectors.emplace_back();
                for (int n2 = std::max(0, -diff); n2 <= std::min(c, c - diff); ++n2) {
                    s.push_back(space.index(n2 + diff, n2));
                }
            }
            break;
        case SectorKind::Whole:
            break;
    }
    return sectors;
}

BlockOperator::BlockOperator(FockSpace space, SectorKind kind, std::vector<ComplexMatrix> blocks)
    : space_(space),
      kind_(kind),
      indices_(std::make_shared<const std::vector<std::vector<Eigen::Index>>>(sector_indices(space, kind))),
      blocks_(std::move(blocks)) {
    if (blocks_.size() != indices_->size()) {
        throw ConfigError("BlockOperator: expected " + std::to_string(indices_->size()) +
                          " blocks, got " + std::to_string(blocks_.size()));
    }
    for (std::size_t s = 0; s < blocks_.size(); ++s) {
        const auto n = static_cast<Eigen::Index>((*indices_)[s].size());
        if (blocks_[s].rows() != n || blocks_[s].cols() != n) {
            throw ConfigError("BlockOperator: block " + std::to_string(s) + " has wrong shape");
        }
    }
}

BlockOperator BlockOperator::identity(const FockSpace& space, SectorKind kind) {
    return diagonal(space, kind, ComplexVector::Ones(space.dim()));
}

BlockOperator BlockOperator::diagonal(const FockSpace& space, SectorKind kind, const ComplexVector& diag) {
    if (diag.size() != space.dim()) {
        throw ConfigError("BlockOperator::diagonal: size mismatch");
    }
    const auto sectors = sector_indices(space, kind);
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(sectors.size());
    for (const auto& idx : sectors) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        ComplexMatrix b = ComplexMatrix::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) b(k, k) = diag[idx[static_cast<std::size_t>(k)]];
        blocks.push_back(std::move(b));
    }
    return BlockOperator(space, kind, std::move(blocks));
}

BlockOperator BlockOperator::from_dense(const OperatorMatrix& op, SectorKind kind) {
    const auto sectors = sector_indices(op.space(), kind);
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(sectors.size());
    for (const auto& idx : sectors) {
        const auto n = static_cast<Eigen::Index>(idx.size());
        ComplexMatrix b(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) {
                b(i, j) = op(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
            }
        }
        blocks.push_back(std::move(b));
    }
    return BlockOperator(op.space(), kind, std::move(blocks));
}

ComplexVector BlockOperator::apply(const ComplexVector& v) const {
    if (v.size() != space_.dim()) {
        throw ConfigError("BlockOperator::apply: vector size mismatch");
    }
    ComplexVector out(v.size());
    ComplexVector local;
    for (std::size_t s = 0; s < blocks_.size(); ++s) {
        const auto& idx = (*indices_)[s];
        const auto n = static_cast<Eigen::Index>(idx.size());
        local.resize(n);
        for (Eigen::Index k = 0; k < n; ++k) local[k] = v[idx[static_cast<std::size_t>(k)]];
        const ComplexVector mapped = blocks_[s] * local;
        for (Eigen::Index k = 0; k < n; ++k) out[idx[static_cast<std::size_t>(k)]] = mapped[k];
    }
    return out;
}

StateVector BlockOperator::apply(const StateVector& v) const {
    space_.require_same(v.space(), "BlockOperator::apply");
    return StateVector(space_, apply(v.amplitudes()));
}

BlockOperator BlockOperator::exp() const {
    std::vector<ComplexMatrix> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(matrix_exp(b));
    return BlockOperator(space_, kind_, std::move(out));
}

BlockOperator BlockOperator::adjoint() const {
    std::vector<ComplexMatrix> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(b.adjoint());
    return BlockOperator(space_, kind_, std::move(out));
}

void BlockOperator::require_compatible(const BlockOperator& other, const char* context) const {
    space_.require_same(other.space_, context);
    if (kind_ != other.kind_) {
        throw ConfigError(std::string(context) + ": operators use different sector decompositions");
    }
}

BlockOperator BlockOperator::operator*(const BlockOperator& rhs) const {
    require_compatible(rhs, "BlockOperator::operator*");
    std::vector<ComplexMatrix> out;
    out.reserve(blocks_.size());
    for (std::size_t s = 0; s < blocks_.size(); ++s) out.push_back(blocks_[s] * rhs.blocks_[s]);
    return BlockOperator(space_, kind_, std::move(out));
}

BlockOperator BlockOperator::operator+(const BlockOperator& rhs) const {
    require_compatible(rhs, "BlockOperator::operator+");
    std::vector<ComplexMatrix> out;
    out.reserve(blocks_.size());
    for (std::size_t s = 0; s < blocks_.size(); ++s) out.push_back(blocks_[s] + rhs.blocks_[s]);
    return BlockOperator(space_, kind_, std::move(out));
}

BlockOperator BlockOperator::operator*(Complex scale) const {
    std::vector<ComplexMatrix> out;
    out.reserve(blocks_.size());
    for (const auto& b : blocks_) out.push_back(b * scale);
    return BlockOperator(space_, kind_, std::move(out));
}

BlockOperator BlockOperator::conjugated_by_phases(const Eigen::VectorXd& angles) const {
    if (angles.size() != space_.dim()) {
        throw ConfigError("BlockOperator::conjugated_by_phases: size mismatch");
    }
    std::vector<ComplexMatrix> out = blocks_;
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto& idx = (*indices_)[s];
        for (Eigen::Index i = 0; i < out[s].rows(); ++i) {
            for (Eigen::Index j = 0; j < out[s].cols(); ++j) {
                const double phase = angles[idx[static_cast<std::size_t>(i)]] -
                                     angles[idx[static_cast<std::size_t>(j)]];
                out[s](i, j) *= std::polar(1.0, phase);
            }
        }
    }
    return BlockOperator(space_, kind_, std::move(out));
}

BlockOperator BlockOperator::diagonal_commutator(const Eigen::VectorXd& values) const {
    if (values.size() != space_.dim()) {
        throw ConfigError("BlockOperator::diagonal_commutator: size mismatch");
    }
    std::vector<ComplexMatrix> out = blocks_;
    for (std::size_t s = 0; s < out.size(); ++s) {
        const auto& idx = (*indices_)[s];
        for (Eigen::Index i = 0; i < out[s].rows(); ++i) {
            for (Eigen::Index j = 0; j < out[s].cols(); ++j) {
                out[s](i, j) *= values[idx[static_cast<std::size_t>(i)]] -
                                values[idx[static_cast<std::size_t>(j)]];
            }
        }
    }
    return BlockOperator(space_, kind_, std::move(out));
}

OperatorMatrix BlockOperator::dense() const {
    ComplexMatrix m = ComplexMatrix::Zero(space_.dim(), space_.dim());
    for (std::size_t s = 0; s < blocks_.size(); ++s) {
        const auto& idx = (*indices_)[s];
        for (Eigen::Index i = 0; i < blocks_[s].rows(); ++i) {
            for (Eigen::Index j = 0; j < blocks_[s].cols(); ++j) {
                m(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]) = blocks_[s](i, j);
            }
        }
    }
    return OperatorMatrix(space_, std::move(m));
}

}  // namespace cubicgen
