"""sparselift: exact solving of non-singular sparse integer linear systems.

The block solver keeps a structured inverse of A mod p (a projected
block-Hankel matrix held in an off-diagonal inverse representation) so
that every lifting step costs a small number of sparse matrix-vector
products plus lower-order dense work; dense Dixon lifting and two
Wiedemann-based baselines share the surrounding machinery.
"""

from .arith import (
    PrimeField,
    RationalVector,
    mod_inverse,
    radix_combine,
    random_prime,
    rational_reconstruct,
)
from .bench import BenchRecord, generate_system, run_bench, run_sweep
from .blockhankel import (
    BlockHankelRep,
    OffDiagInverse,
    apply_Binv,
    apply_Hinv,
    apply_U,
    apply_V,
    compute_H,
    invert_offdiag,
    prepare_block_inverse,
)
from .blockproj import BlockProjection, make_projection, verify_projection
from .densemodp import (
    DenseModMatrix,
    VandermondeContext,
    lu_solve,
    mat_inverse,
    mat_mul,
    vand_eval,
    vand_interp,
)
from .errors import (
    BadMinPoly,
    DegreeTooHigh,
    DimensionMismatch,
    InvalidBlocking,
    InvalidParams,
    NoReconstruction,
    ProjectionFailure,
    RankCollapse,
    Singular,
    SingularHankel,
    SingularMod,
    SparseliftError,
    ZeroInverse,
)
from .oracle import oracle_krylov, oracle_solve
from .polymat import PolyMatrix, SigmaBasis, m_basis, pm_basis, poly_mul
from .solvers import (
    SolveReport,
    lifting_steps_bound,
    solve_block_sparse,
    solve_cra_wiedemann,
    solve_dixon_dense,
    solve_wiedemann_padic,
    verify_solution,
)
from .sparsemat import (
    SparseIntMatrix,
    SparseModMatrix,
    gen_random_sparse,
    norm_inf,
    norm_inf_vec,
    read_matrix_market,
    read_vector,
    reduce_mod,
    write_matrix_market,
    write_vector,
)

__version__ = "0.1.0"
