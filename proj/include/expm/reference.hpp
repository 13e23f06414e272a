#pragma once

#include "expm/matrix.hpp"

namespace expm {

/// e^A in double-double arithmetic: scale to ||A||_1 <= 2^-4, sum the Taylor
/// series until terms drop below 2^-104 of the sum, square back, round.
/// Accurate to well beyond binary64 on reasonably conditioned inputs.
Matrix expm_reference(const Matrix& a);

enum class NormKind { frobenius };

struct ErrorReport {
    double rel_err = 0.0;
    NormKind norm_kind = NormKind::frobenius;
};

/// ||x - ref||_F / ||ref||_F.
ErrorReport relative_error(const Matrix& x, const Matrix& ref);

} // namespace expm
