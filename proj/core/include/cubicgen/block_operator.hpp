#pragma once

#include <memory>
#include <vector>

#include "cubicgen/fock_space.hpp"

namespace cubicgen {

// Ways of splitting a Fock basis into invariant sectors. Every circuit
// element preserves one of these decompositions, so its truncated matrix is
// block diagonal after a permutation of the basis.
enum class SectorKind {
    Whole,             // a single sector holding every basis state
    Mode1Local,        // fixed n2, operator acts on mode 1
    Mode2Local,        // fixed n1, operator acts on mode 2
    TotalNumber,       // fixed n1 + n2 (beamsplitter)
    NumberDifference,  // fixed n1 - n2 (two-mode squeezer)
};

// Basis indices of each sector, in the order used for the sector blocks.
// Local kinds order by the acted-on occupation; TotalNumber by n1;
// NumberDifference by n2.
std::vector<std::vector<Eigen::Index>> sector_indices(const FockSpace& space, SectorKind kind);

// Dense operator stored as one block per sector. Products and sums are only
// defined between operators sharing a decomposition.
class BlockOperator {
public:
    BlockOperator(FockSpace space, SectorKind kind, std::vector<ComplexMatrix> blocks);

    static BlockOperator identity(const FockSpace& space, SectorKind kind);
    // Diagonal operator with the given entries in the basis ordering.
    static BlockOperator diagonal(const FockSpace& space, SectorKind kind, const ComplexVector& diag);
    // Restriction of a dense operator to the sector blocks; entries coupling
    // different sectors are dropped.
    static BlockOperator from_dense(const OperatorMatrix& op, SectorKind kind);

    const FockSpace& space() const { return space_; }
    SectorKind kind() const { return kind_; }
    const std::vector<ComplexMatrix>& blocks() const { return blocks_; }
    const std::vector<Eigen::Index>& indices(std::size_t sector) const { return (*indices_)[sector]; }

    ComplexVector apply(const ComplexVector& v) const;
    StateVector apply(const StateVector& v) const;

    BlockOperator exp() const;
    BlockOperator adjoint() const;
    BlockOperator operator*(const BlockOperator& rhs) const;
    BlockOperator operator+(const BlockOperator& rhs) const;
    BlockOperator operator*(Complex scale) const;

    // Entry-wise e^{i a_row} X e^{-i a_col}, i.e. conjugation by the diagonal
    // unitary exp(i diag(angles)).
    BlockOperator conjugated_by_phases(const Eigen::VectorXd& angles) const;
    // The commutator [diag(values), X].
    BlockOperator diagonal_commutator(const Eigen::VectorXd& values) const;

    OperatorMatrix dense() const;

private:
    void require_compatible(const BlockOperator& other, const char* context) const;

    FockSpace space_;
    SectorKind kind_;
    std::shared_ptr<const std::vector<std::vector<Eigen::Index>>> indices_;
    std::vector<ComplexMatrix> blocks_;
};

}  // namespace cubicgen
