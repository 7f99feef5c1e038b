"""Transfer matrices, boundary vectors and exchange operators."""
from .aux import (AuxOperator, algebra_residual, build_aux, contract, tail_extrapolate,
                  truncation_size, x_blocks, x_hat_blocks)
from .kplus import kplus_coeffs, kplus_matrix, truncation_checks, truncation_ratio
from .open import (OpenPQ, boundary_residuals, finite_t_open, khat_minus, khat_plus,
                   kminus2, kplus2, left_vector, left_vector_t, open_transfer, pq_build,
                   right_vector, right_vector_t, t2_open_blocks)
from .periodic import (finite_t_periodic, fundamental_blocks, lam_of_x, lax_from_blocks,
                       lax_matrix, local_commutator_residual, p_operator, periodic_transfer,
                       q_operator, x_of_lam)
from .rmatrix import (RFactors, boundary_action_residuals, diag_ratio, r_factors, r_matrix,
                      shift_ratio)
from .rmatrix import exchange_residuals as r_exchange_residuals
from .verify import (finite_t, markov_from_t2, mu_zero_limit_checks, verify_commutation,
                     verify_decomposition, verify_exchange, verify_t2_symmetry,
                     verify_tq_and_fusion)
