#pragma once

#include <optional>

#include "json.hpp"
#include "nekh/algebra.hpp"
#include "nekh/geometry.hpp"

namespace nekh {

/** H = h + f on T^n x B_R with |f|_{C^k} < eps.  f is stored expanded around
    the same center as h. */
struct NearIntegrableSystem {
    FTPolynomial h;
    FTPolynomial f;
    double R = 1.0;
    int k_reg = 3;
    std::optional<double> M;
    double eps = 0.0;

    NearIntegrableSystem(FTPolynomial h_, FTPolynomial f_, double R_, int k_reg_, std::optional<double> M_ = {},
                         std::optional<double> eps_ = {});

    int dims() const noexcept { return h.dims(); }
    FTPolynomial hamiltonian() const { return h + f; }
    IntegrableModel model() const { return IntegrableModel(h, R, M); }
};

/** Builds a system from its JSON description:
      {"n": 2, "R": 1.0, "k_reg": 3, "M": null,
       "h": {"type": "quadratic", "hessian": [...], "gradient": [...], "center": [...]}
          | {"type": "polynomial", ...FTPolynomial JSON...},
       "f": {"type": "zero"}
          | {"type": "synthesized", "eps": .., "seed": .., "fourier_cap": .., "k_reg": ..,
             "decay_exponent": .., "action_degree": ..}
          | {"type": "polynomial", ...}}
    Missing "h" means 1/2 |I|^2 and missing "f" means zero. */
NearIntegrableSystem system_from_json(const nlohmann::json& j);

/// h = 1/2 |I|^2 around the origin.
FTPolynomial standard_quadratic(int n);

}  // namespace nekh
